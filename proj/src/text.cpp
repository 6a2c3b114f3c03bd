#include "fwmav/text.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>

namespace fwmav::text {

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double to_double(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty())
        throw ConfigError(what + ": empty value");
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError(what + ": not a number: '" + t + "'");
    return v;
}

long long to_int(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty())
        throw ConfigError(what + ": empty value");
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError(what + ": not an integer: '" + t + "'");
    return v;
}

std::uint64_t to_uint64(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t.empty())
        throw ConfigError(what + ": empty value");
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw ConfigError(what + ": not an unsigned integer: '" + t + "'");
    return v;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            break;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

} // namespace fwmav::text
