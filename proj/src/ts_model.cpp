#include "fwmav/ts_model.hpp"

#include "fwmav/text.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace fwmav {

double mf_degree(double x, const GaussianMf& mf) {
    if (!(mf.width > 0.0))
        throw ConfigError("mf_degree: width must be > 0");
    const double d = (x - mf.center) / mf.width;
    return std::exp(-0.5 * d * d);
}

Vector TsModel::normalize(const Vector& inputs) const {
    if (inputs.size() != input_dim)
        throw ConfigError("ts-model: expected " + std::to_string(input_dim) +
                          " inputs, got " + std::to_string(inputs.size()));
    Vector x(input_dim);
    for (int ch = 0; ch < input_dim; ++ch)
        x[ch] = (inputs[ch] - input_scaling[ch].offset) / input_scaling[ch].scale;
    return x;
}

Vector fire_rules(const Vector& inputs, const TsModel& model) {
    const Vector x = model.normalize(inputs);
    Vector w(static_cast<Index>(model.rules.size()));
    for (size_t i = 0; i < model.rules.size(); ++i) {
        double strength = 1.0;
        for (int ch = 0; ch < model.input_dim; ++ch)
            strength *= mf_degree(x[ch], model.rules[i].antecedent[ch]);
        w[static_cast<Index>(i)] = strength;
    }
    return w;
}

Vector weighted_average(const Vector& strengths, const Matrix& rule_outputs) {
    if (strengths.size() != rule_outputs.rows())
        throw ConfigError("weighted_average: strength/output count mismatch");
    const double total = strengths.sum();
    if (total < 1e-300)
        return rule_outputs.colwise().mean();
    return rule_outputs.transpose() * strengths / total;
}

Vector infer(const Vector& inputs, const TsModel& model) {
    if (model.rules.empty())
        throw ConfigError("infer: model has no rules");
    const Vector x = model.normalize(inputs);
    const Vector w = fire_rules(inputs, model);

    Vector xb(model.input_dim + 1);
    xb[0] = 1.0;
    xb.tail(model.input_dim) = x;

    Matrix z(static_cast<Index>(model.rules.size()), model.output_dim);
    for (size_t i = 0; i < model.rules.size(); ++i)
        z.row(static_cast<Index>(i)) = (model.rules[i].consequent * xb).transpose();
    return weighted_average(w, z);
}

namespace {

ChannelScaling standardizer(const Eigen::Ref<const Vector>& col) {
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    return {mean, sd > 0.0 ? sd : 1.0};
}

} // namespace

TsModel identify_ts_model(const IoDataset& data, int clusters, const FcmConfig& fcm,
                          const IdentifyOptions& options, IdentifyInfo* info,
                          const Matrix* initial_partition) {
    const Index n = data.inputs.rows();
    const Index p = data.inputs.cols();
    const Index q = data.outputs.cols();
    if (n < 1 || p < 1 || q < 1)
        throw ConfigError("identify: empty dataset");
    if (data.outputs.rows() != n)
        throw ConfigError("identify: input/output row count mismatch");
    if (!data.inputs.allFinite() || !data.outputs.allFinite())
        throw ConfigError("identify: dataset contains non-finite values");
    if (clusters < 1 || clusters > n)
        throw ConfigError("identify: cluster count out of range");

    TsModel model;
    model.input_dim = static_cast<int>(p);
    model.output_dim = static_cast<int>(q);
    model.input_scaling.resize(p);

    Matrix xn(n, p);
    for (Index ch = 0; ch < p; ++ch) {
        model.input_scaling[ch] = standardizer(data.inputs.col(ch));
        xn.col(ch) = (data.inputs.col(ch).array() - model.input_scaling[ch].offset) /
                     model.input_scaling[ch].scale;
    }

    // Outputs are standardized for the clustering distances only; the rules
    // regress against the raw outputs below.
    Matrix joint(n, p + q);
    joint.leftCols(p) = xn;
    for (Index ch = 0; ch < q; ++ch) {
        ChannelScaling s = standardizer(data.outputs.col(ch));
        joint.col(p + ch) = (data.outputs.col(ch).array() - s.offset) / s.scale;
    }

    FcmConfig cfg = fcm;
    cfg.clusters = clusters;
    FcmModel fit = fcm_fit(joint, cfg, initial_partition);
    // Rule growth: add a cluster while the clustering cost stays above the
    // threshold (off by default, the threshold is +inf).
    while (fit.final_cost > options.rule_add_threshold &&
           cfg.clusters < options.max_clusters && cfg.clusters < n) {
        ++cfg.clusters;
        fit = fcm_fit(joint, cfg, nullptr);
    }
    if (info) {
        info->clusters_used = cfg.clusters;
        info->fcm_cost = fit.final_cost;
        info->fcm_iterations = fit.iterations_used;
        info->rank_deficient = false;
    }

    Vector range(p);
    for (Index ch = 0; ch < p; ++ch)
        range[ch] = xn.col(ch).maxCoeff() - xn.col(ch).minCoeff();

    Matrix phi(n, p + 1);
    phi.col(0).setOnes();
    phi.rightCols(p) = xn;

    const double ridge = 1e-8;
    model.rules.resize(cfg.clusters);
    for (int i = 0; i < cfg.clusters; ++i) {
        TsRule& rule = model.rules[i];
        rule.antecedent.resize(p);

        const Vector mu = fit.partition.row(i).transpose();
        const double mass = mu.sum();
        if (!(mass > 0.0))
            throw NumericError("identify: cluster " + std::to_string(i) + " has no members");

        for (Index ch = 0; ch < p; ++ch) {
            const double center = fit.centers(i, ch);
            const double var = (mu.array() * (xn.col(ch).array() - center).square()).sum() / mass;
            const double floor = std::max(1e-3 * range[ch], 1e-12);
            rule.antecedent[ch] = {center, std::max(std::sqrt(var), floor)};
        }

        const Vector wls = mu.array().pow(fcm.fuzzifier);
        Matrix wphi = wls.asDiagonal() * phi;
        Matrix a = phi.transpose() * wphi;
        a.diagonal().array() += ridge;
        Matrix b = wphi.transpose() * data.outputs;
        rule.consequent = a.ldlt().solve(b).transpose();

        if (info && !info->rank_deficient) {
            Matrix design = wls.array().sqrt().matrix().asDiagonal() * phi;
            Eigen::ColPivHouseholderQR<Matrix> qr(design);
            if (qr.rank() < p + 1)
                info->rank_deficient = true;
        }
    }
    return model;
}

Vector evaluate_fit(const TsModel& model, const IoDataset& data) {
    const Index n = data.inputs.rows();
    if (n < 1)
        throw ConfigError("evaluate_fit: empty dataset");
    if (data.outputs.rows() != n || data.outputs.cols() != model.output_dim ||
        data.inputs.cols() != model.input_dim)
        throw ConfigError("evaluate_fit: dataset/model dimension mismatch");

    Vector sq = Vector::Zero(model.output_dim);
    for (Index j = 0; j < n; ++j) {
        Vector err = infer(data.inputs.row(j).transpose(), model) -
                     data.outputs.row(j).transpose();
        sq += err.array().square().matrix();
    }
    return (sq / static_cast<double>(n)).array().sqrt();
}

// --- serialization -------------------------------------------------------

namespace {
constexpr const char* kModelTag = "fwmav-ts-model v1";

std::string next_line(std::istream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError(std::string("ts-model: truncated file, expected ") + what);
    return text::trim(line);
}

std::vector<double> parse_fields(const std::string& line, const std::string& keyword,
                                 size_t count) {
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    if (head != keyword)
        throw ConfigError("ts-model: expected '" + keyword + "', got '" + line + "'");
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok)
        vals.push_back(text::to_double(tok, keyword));
    if (vals.size() != count)
        throw ConfigError("ts-model: '" + keyword + "' expects " + std::to_string(count) +
                          " values, got " + std::to_string(vals.size()));
    return vals;
}

} // namespace

void save_ts_model(const TsModel& model, std::ostream& out) {
    out << kModelTag << "\n";
    out << "input_dim " << model.input_dim << "\n";
    out << "output_dim " << model.output_dim << "\n";
    out << "rule_count " << model.rules.size() << "\n";
    for (const ChannelScaling& s : model.input_scaling)
        out << "scaling " << text::num(s.offset) << " " << text::num(s.scale) << "\n";
    for (size_t i = 0; i < model.rules.size(); ++i) {
        const TsRule& rule = model.rules[i];
        out << "rule " << i << "\n";
        for (const GaussianMf& mf : rule.antecedent)
            out << "mf " << text::num(mf.center) << " " << text::num(mf.width) << "\n";
        for (Index k = 0; k < rule.consequent.rows(); ++k) {
            out << "out";
            for (Index c = 0; c < rule.consequent.cols(); ++c)
                out << " " << text::num(rule.consequent(k, c));
            out << "\n";
        }
    }
    out << "end\n";
}

void save_ts_model(const TsModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("ts-model: cannot open for writing: " + path);
    save_ts_model(model, out);
    if (!out)
        throw ConfigError("ts-model: write failed: " + path);
}

TsModel load_ts_model(std::istream& in) {
    if (next_line(in, "header") != kModelTag)
        throw ConfigError("ts-model: unrecognized header (expected '" +
                          std::string(kModelTag) + "')");
    TsModel model;
    model.input_dim = static_cast<int>(parse_fields(next_line(in, "input_dim"), "input_dim", 1)[0]);
    model.output_dim = static_cast<int>(parse_fields(next_line(in, "output_dim"), "output_dim", 1)[0]);
    const int rule_count = static_cast<int>(parse_fields(next_line(in, "rule_count"), "rule_count", 1)[0]);
    if (model.input_dim < 1 || model.output_dim < 1 || rule_count < 1)
        throw ConfigError("ts-model: dimensions must be >= 1");

    model.input_scaling.resize(model.input_dim);
    for (int ch = 0; ch < model.input_dim; ++ch) {
        auto v = parse_fields(next_line(in, "scaling"), "scaling", 2);
        if (v[1] == 0.0)
            throw ConfigError("ts-model: zero input scale");
        model.input_scaling[ch] = {v[0], v[1]};
    }

    model.rules.resize(rule_count);
    for (int i = 0; i < rule_count; ++i) {
        parse_fields(next_line(in, "rule"), "rule", 1);
        TsRule& rule = model.rules[i];
        rule.antecedent.resize(model.input_dim);
        for (int ch = 0; ch < model.input_dim; ++ch) {
            auto v = parse_fields(next_line(in, "mf"), "mf", 2);
            if (!(v[1] > 0.0))
                throw ConfigError("ts-model: membership width must be > 0");
            rule.antecedent[ch] = {v[0], v[1]};
        }
        rule.consequent.resize(model.output_dim, model.input_dim + 1);
        for (int k = 0; k < model.output_dim; ++k) {
            auto v = parse_fields(next_line(in, "out"), "out",
                                  static_cast<size_t>(model.input_dim) + 1);
            for (int c = 0; c <= model.input_dim; ++c)
                rule.consequent(k, c) = v[c];
        }
    }
    if (next_line(in, "end") != "end")
        throw ConfigError("ts-model: missing end marker");
    return model;
}

TsModel load_ts_model(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("ts-model: cannot open: " + path);
    return load_ts_model(in);
}

} // namespace fwmav
