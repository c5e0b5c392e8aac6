#ifndef PPKM_ERROR_HPP
#define PPKM_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ppkm {

/// Stable machine-readable failure codes surfaced through the library and CLI.
enum class errc {
    invalid_argument,
    parse_error,
    duplicate_date,
    non_monotone_date,
    coverage_gap,
    anchor_out_of_range,
    invariant_violation,
    missing_data,
    degenerate_system,
    negative_compartment,
};

inline std::string_view to_string(errc code) {
    switch (code) {
        case errc::invalid_argument: return "invalid_argument";
        case errc::parse_error: return "parse_error";
        case errc::duplicate_date: return "duplicate_date";
        case errc::non_monotone_date: return "non_monotone_date";
        case errc::coverage_gap: return "coverage_gap";
        case errc::anchor_out_of_range: return "anchor_out_of_range";
        case errc::invariant_violation: return "invariant_violation";
        case errc::missing_data: return "missing_data";
        case errc::degenerate_system: return "degenerate_system";
        case errc::negative_compartment: return "negative_compartment";
    }
    return "unknown";
}

/// Error carrying a stable code plus the offending day index and/or input line.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    error(errc code, const std::string& message, long day)
        : std::runtime_error(message), code_(code), day_(day) {}

    errc code() const noexcept { return code_; }
    const std::optional<long>& day() const noexcept { return day_; }
    const std::optional<long>& line() const noexcept { return line_; }

    error& with_day(long day) {
        day_ = day;
        return *this;
    }
    error& with_line(long line) {
        line_ = line;
        return *this;
    }

private:
    errc code_;
    std::optional<long> day_;
    std::optional<long> line_;
};

} // namespace ppkm

#endif
