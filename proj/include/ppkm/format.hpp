#ifndef PPKM_FORMAT_HPP
#define PPKM_FORMAT_HPP

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace ppkm::detail {

// Shortest round-trip decimal form of a double. Locale-independent and
// deterministic, so identical runs produce byte-identical output files.
inline std::string format_double(double value) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) {
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        return std::string(buf);
    }
    return std::string(buf, ptr);
}

} // namespace ppkm::detail

#endif
