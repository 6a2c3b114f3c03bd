#ifndef FWMAV_TEXT_HPP
#define FWMAV_TEXT_HPP

#include "fwmav/types.hpp"

#include <string>
#include <vector>

namespace fwmav::text {

// Shortest decimal rendering that reloads to the identical double.
std::string num(double v);

// Strict scalar parsing; `what` names the field for error messages.
double to_double(const std::string& s, const std::string& what);
long long to_int(const std::string& s, const std::string& what);
std::uint64_t to_uint64(const std::string& s, const std::string& what);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

} // namespace fwmav::text

#endif // FWMAV_TEXT_HPP
