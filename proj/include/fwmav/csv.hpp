#ifndef FWMAV_CSV_HPP
#define FWMAV_CSV_HPP

#include "fwmav/control.hpp"

#include <iosfwd>
#include <string>

namespace fwmav {

// Dataset CSV, header: t,a1,a2,a3,a4,vbx,vby,vbz,wbx,wby,wbz
// Values render with enough digits to reload bit-exactly.
void save_dataset(const IoDataset& data, std::ostream& out);
void save_dataset(const IoDataset& data, const std::string& path);
IoDataset load_dataset(std::istream& in);
IoDataset load_dataset(const std::string& path);

// Trace CSV, header: t,ref,z,e,u,vbz
void save_trace(const SimTrace& trace, std::ostream& out);
void save_trace(const SimTrace& trace, const std::string& path);
SimTrace load_trace(std::istream& in);
SimTrace load_trace(const std::string& path);

// Sidecar metadata (key/value lines) for a trace file.
void save_trace_meta(const SimTrace& trace, std::ostream& out);
void save_trace_meta(const SimTrace& trace, const std::string& path);

} // namespace fwmav

#endif // FWMAV_CSV_HPP
