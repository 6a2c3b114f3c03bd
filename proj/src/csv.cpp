#include "fwmav/csv.hpp"

#include "fwmav/text.hpp"

#include <fstream>
#include <sstream>

namespace fwmav {

namespace {

constexpr const char* kDatasetHeader = "t,a1,a2,a3,a4,vbx,vby,vbz,wbx,wby,wbz";
constexpr const char* kTraceHeader = "t,ref,z,e,u,vbz";

std::vector<double> parse_row(const std::string& line, size_t fields, const char* what) {
    const auto parts = text::split(line, ',');
    if (parts.size() != fields)
        throw ConfigError(std::string(what) + ": expected " + std::to_string(fields) +
                          " fields, got " + std::to_string(parts.size()));
    std::vector<double> row(fields);
    for (size_t i = 0; i < fields; ++i)
        row[i] = text::to_double(parts[i], what);
    return row;
}

std::ofstream open_out(const std::string& path, const char* what) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError(std::string(what) + ": cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(std::string(what) + ": cannot open: " + path);
    return in;
}

} // namespace

void save_dataset(const IoDataset& data, std::ostream& out) {
    out << kDatasetHeader << "\n";
    for (Index k = 0; k < data.inputs.rows(); ++k) {
        out << text::num(static_cast<double>(k) * data.dt);
        for (Index i = 0; i < 4; ++i)
            out << "," << text::num(data.inputs(k, i));
        for (Index i = 0; i < 6; ++i)
            out << "," << text::num(data.outputs(k, i));
        out << "\n";
    }
}

void save_dataset(const IoDataset& data, const std::string& path) {
    auto out = open_out(path, "dataset");
    save_dataset(data, out);
    if (!out)
        throw ConfigError("dataset: write failed: " + path);
}

IoDataset load_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != kDatasetHeader)
        throw ConfigError(std::string("dataset: bad header, expected '") + kDatasetHeader + "'");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (text::trim(line).empty())
            continue;
        rows.push_back(parse_row(line, 11, "dataset"));
    }
    if (rows.size() < 2)
        throw ConfigError("dataset: need at least 2 rows to recover dt");

    IoDataset data;
    data.dt = rows[1][0] - rows[0][0];
    if (!(data.dt > 0.0))
        throw ConfigError("dataset: non-increasing time column");
    data.inputs.resize(static_cast<Index>(rows.size()), 4);
    data.outputs.resize(static_cast<Index>(rows.size()), 6);
    for (size_t k = 0; k < rows.size(); ++k) {
        for (int i = 0; i < 4; ++i)
            data.inputs(static_cast<Index>(k), i) = rows[k][1 + i];
        for (int i = 0; i < 6; ++i)
            data.outputs(static_cast<Index>(k), i) = rows[k][5 + i];
    }
    return data;
}

IoDataset load_dataset(const std::string& path) {
    auto in = open_in(path, "dataset");
    return load_dataset(in);
}

void save_trace(const SimTrace& trace, std::ostream& out) {
    out << kTraceHeader << "\n";
    for (size_t k = 0; k < trace.t.size(); ++k) {
        out << text::num(trace.t[k]) << "," << text::num(trace.ref[k]) << ","
            << text::num(trace.z[k]) << "," << text::num(trace.e[k]) << ","
            << text::num(trace.u[k]) << "," << text::num(trace.vbz[k]) << "\n";
    }
}

void save_trace(const SimTrace& trace, const std::string& path) {
    auto out = open_out(path, "trace");
    save_trace(trace, out);
    if (!out)
        throw ConfigError("trace: write failed: " + path);
}

SimTrace load_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != kTraceHeader)
        throw ConfigError(std::string("trace: bad header, expected '") + kTraceHeader + "'");

    SimTrace trace;
    while (std::getline(in, line)) {
        if (text::trim(line).empty())
            continue;
        const auto row = parse_row(line, 6, "trace");
        trace.t.push_back(row[0]);
        trace.ref.push_back(row[1]);
        trace.z.push_back(row[2]);
        trace.e.push_back(row[3]);
        trace.u.push_back(row[4]);
        trace.vbz.push_back(row[5]);
    }
    if (trace.t.empty())
        throw ConfigError("trace: no rows");
    trace.rmse = compute_rmse(trace);
    if (trace.t.size() >= 2)
        trace.meta.dt = trace.t[1] - trace.t[0];
    return trace;
}

SimTrace load_trace(const std::string& path) {
    auto in = open_in(path, "trace");
    return load_trace(in);
}

void save_trace_meta(const SimTrace& trace, std::ostream& out) {
    out << "controller = " << trace.meta.controller << "\n";
    out << "reference = " << trace.meta.reference << "\n";
    out << "plant = " << trace.meta.plant << "\n";
    out << "seed = " << trace.meta.seed << "\n";
    out << "dt = " << text::num(trace.meta.dt) << "\n";
    out << "steps = " << trace.t.size() << "\n";
    out << "rmse = " << text::num(trace.rmse) << "\n";
}

void save_trace_meta(const SimTrace& trace, const std::string& path) {
    auto out = open_out(path, "trace-meta");
    save_trace_meta(trace, out);
    if (!out)
        throw ConfigError("trace-meta: write failed: " + path);
}

} // namespace fwmav
