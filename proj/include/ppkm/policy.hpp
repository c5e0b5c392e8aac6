#ifndef PPKM_POLICY_HPP
#define PPKM_POLICY_HPP

#include <string>
#include <utility>
#include <vector>

#include "ppkm/error.hpp"
#include "ppkm/format.hpp"

namespace ppkm {

/// Decision thresholds on the (R_eff, rho) plane. r_high does not change the
/// recommended level; it marks the upper edge of the calibration band and is
/// kept for region annotation only.
struct policy_thresholds {
    double r_low = 0.40;
    double r_high = 0.72;
    double rho_split = 0.2;

    bool valid() const {
        return r_low > 0.0 && r_low < r_high && rho_split > 0.0 && rho_split < 1.0;
    }
};

/// A day's pandemic state: effective reproduction number and bed occupancy.
struct pandemic_point {
    double r_eff = 0.0;
    double occupancy = 0.0;

    bool valid() const {
        return r_eff >= 0.0 && occupancy >= 0.0 && occupancy <= 1.0;
    }
};

enum class ppkm_level { at_most_2, level_3, level_4 };

inline const char* to_string(ppkm_level level) {
    switch (level) {
        case ppkm_level::at_most_2: return "at_most_2";
        case ppkm_level::level_3: return "level_3";
        case ppkm_level::level_4: return "level_4";
    }
    return "unknown";
}

/// The six rectangles of the decision plane: columns split at r_low/r_high,
/// rows split at rho_split. Boundary values fall to the lower/left region.
enum class plane_region {
    left_bottom,   // r <= r_low,          rho <= rho_split  -> at most level 2
    left_top,      // r <= r_low,          rho >  rho_split  -> level 3
    middle_bottom, // r_low < r <= r_high, rho <= rho_split  -> level 3
    middle_top,    // r_low < r <= r_high, rho >  rho_split  -> level 4
    right_bottom,  // r >  r_high,         rho <= rho_split  -> level 3
    right_top,     // r >  r_high,         rho >  rho_split  -> level 4
};

inline const char* to_string(plane_region region) {
    switch (region) {
        case plane_region::left_bottom: return "left_bottom";
        case plane_region::left_top: return "left_top";
        case plane_region::middle_bottom: return "middle_bottom";
        case plane_region::middle_top: return "middle_top";
        case plane_region::right_bottom: return "right_bottom";
        case plane_region::right_top: return "right_top";
    }
    return "unknown";
}

struct policy_recommendation {
    ppkm_level level = ppkm_level::at_most_2;
    plane_region region = plane_region::left_bottom;
    std::string rationale_note;
};

/// Maps a (R_eff, rho) point to the recommended restriction level:
/// level 4 iff rho > rho_split AND r_eff > r_low, level 3 iff exactly one
/// holds, at most level 2 iff neither. Strict inequalities throughout, so
/// points on a threshold classify downward.
inline policy_recommendation classify(const pandemic_point& point,
                                      const policy_thresholds& thresholds = {}) {
    if (!thresholds.valid())
        throw error(errc::invalid_argument, "invalid policy thresholds");
    if (!point.valid())
        throw error(errc::invalid_argument, "pandemic point must have r_eff >= 0 and rho in [0,1]");

    const bool occupancy_high = point.occupancy > thresholds.rho_split;
    const bool reproduction_high = point.r_eff > thresholds.r_low;

    policy_recommendation rec;
    if (occupancy_high && reproduction_high)
        rec.level = ppkm_level::level_4;
    else if (occupancy_high || reproduction_high)
        rec.level = ppkm_level::level_3;
    else
        rec.level = ppkm_level::at_most_2;

    const int column = point.r_eff <= thresholds.r_low ? 0 : (point.r_eff <= thresholds.r_high ? 1 : 2);
    if (column == 0)
        rec.region = occupancy_high ? plane_region::left_top : plane_region::left_bottom;
    else if (column == 1)
        rec.region = occupancy_high ? plane_region::middle_top : plane_region::middle_bottom;
    else
        rec.region = occupancy_high ? plane_region::right_top : plane_region::right_bottom;

    const std::string r_low_s = detail::format_double(thresholds.r_low);
    const std::string rho_s = detail::format_double(thresholds.rho_split);
    rec.rationale_note = std::string("reff") + (reproduction_high ? ">" : "<=") + r_low_s + " and rho" +
                         (occupancy_high ? ">" : "<=") + rho_s;
    if (point.r_eff >= thresholds.r_high)
        rec.rationale_note += "; outside calibration range (reff>=" +
                              detail::format_double(thresholds.r_high) + ")";
    return rec;
}

inline std::vector<std::pair<long, policy_recommendation>> classify_series(
    const std::vector<std::pair<long, pandemic_point>>& points,
    const policy_thresholds& thresholds = {}) {
    std::vector<std::pair<long, policy_recommendation>> out;
    out.reserve(points.size());
    for (const auto& [day, point] : points) out.emplace_back(day, classify(point, thresholds));
    return out;
}

} // namespace ppkm

#endif
