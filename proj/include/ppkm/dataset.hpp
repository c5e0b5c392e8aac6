#ifndef PPKM_DATASET_HPP
#define PPKM_DATASET_HPP

#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ppkm/date.hpp"
#include "ppkm/error.hpp"
#include "ppkm/format.hpp"

namespace ppkm {

/// One row of the case file: counts of currently infected and cumulatively
/// recovered individuals on a calendar date.
struct epidemic_record {
    date day;
    std::int64_t infected = 0;
    std::int64_t recovered = 0;
};

/// One row of the bed-occupancy file, already scaled to a fraction in [0,1].
struct occupancy_record {
    date day;
    double occupancy = 0.0;
};

enum class occupancy_unit { fraction, percent };

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

inline std::int64_t parse_count(const std::string& text, const char* what, long line_no) {
    const std::string t = strip(text);
    if (t.empty())
        throw error(errc::parse_error, std::string("empty ") + what + " field").with_line(line_no);
    std::int64_t value = 0;
    for (char c : t) {
        if (c < '0' || c > '9')
            throw error(errc::parse_error,
                        std::string("invalid ") + what + " value '" + t + "' (expected a non-negative integer)")
                .with_line(line_no);
        value = value * 10 + (c - '0');
        if (value < 0)
            throw error(errc::parse_error, std::string(what) + " value out of range").with_line(line_no);
    }
    return value;
}

inline double parse_real(const std::string& text, const char* what, long line_no) {
    const std::string t = strip(text);
    try {
        std::size_t used = 0;
        double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw error(errc::parse_error, std::string("invalid ") + what + " value '" + t + "'").with_line(line_no);
    }
}

// Shared date-ordering checks for both loaders.
template <typename Record>
inline void check_order(const std::vector<Record>& records, const date& next, long line_no) {
    if (records.empty()) return;
    const date& prev = records.back().day;
    if (next == prev)
        throw error(errc::duplicate_date, "duplicate date " + to_iso(next)).with_line(line_no);
    if (next < prev)
        throw error(errc::non_monotone_date,
                    "date " + to_iso(next) + " goes backwards (previous " + to_iso(prev) + ")")
            .with_line(line_no);
}

} // namespace detail

/// Reads a case CSV with header `date,infected,recovered`. Rows must be
/// strictly increasing by date; dates are ISO-8601, counts non-negative
/// integers. Malformed input reports the offending line number.
inline std::vector<epidemic_record> load_cases(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw error(errc::parse_error, "cannot open case file '" + path + "'");

    std::string line;
    long line_no = 0;
    if (!std::getline(in, line))
        throw error(errc::parse_error, "case file '" + path + "' is empty");
    ++line_no;
    if (detail::strip(line) != "date,infected,recovered")
        throw error(errc::parse_error, "case file header must be 'date,infected,recovered'").with_line(line_no);

    std::vector<epidemic_record> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::strip(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != 3)
            throw error(errc::parse_error, "expected 3 fields, got " + std::to_string(cells.size()))
                .with_line(line_no);
        epidemic_record rec;
        try {
            rec.day = parse_date(detail::strip(cells[0]));
        } catch (error& e) {
            throw e.with_line(line_no);
        }
        rec.infected = detail::parse_count(cells[1], "infected", line_no);
        rec.recovered = detail::parse_count(cells[2], "recovered", line_no);
        detail::check_order(records, rec.day, line_no);
        records.push_back(rec);
    }
    return records;
}

/// Reads an occupancy CSV with header `date,occupancy`. Values are either
/// fractions in [0,1] or percentages in [0,100] (divided by 100), selected
/// by `unit`. Out-of-range values are rejected.
inline std::vector<occupancy_record> load_occupancy(const std::string& path,
                                                    occupancy_unit unit = occupancy_unit::percent) {
    std::ifstream in(path);
    if (!in)
        throw error(errc::parse_error, "cannot open occupancy file '" + path + "'");

    std::string line;
    long line_no = 0;
    if (!std::getline(in, line))
        throw error(errc::parse_error, "occupancy file '" + path + "' is empty");
    ++line_no;
    if (detail::strip(line) != "date,occupancy")
        throw error(errc::parse_error, "occupancy file header must be 'date,occupancy'").with_line(line_no);

    const double limit = unit == occupancy_unit::percent ? 100.0 : 1.0;
    std::vector<occupancy_record> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::strip(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != 2)
            throw error(errc::parse_error, "expected 2 fields, got " + std::to_string(cells.size()))
                .with_line(line_no);
        occupancy_record rec;
        try {
            rec.day = parse_date(detail::strip(cells[0]));
        } catch (error& e) {
            throw e.with_line(line_no);
        }
        const double raw = detail::parse_real(cells[1], "occupancy", line_no);
        if (!(raw >= 0.0 && raw <= limit))
            throw error(errc::parse_error,
                        "occupancy value " + detail::format_double(raw) + " outside [0," +
                            detail::format_double(limit) + "]")
                .with_line(line_no);
        rec.occupancy = unit == occupancy_unit::percent ? raw / 100.0 : raw;
        detail::check_order(records, rec.day, line_no);
        records.push_back(rec);
    }
    return records;
}

/// Date-aligned, gap-free, day-indexed series of (S, I, R, rho). Index 0 is
/// the anchor date; negative indices address earlier days. Immutable once
/// built and safe to share across threads.
class dataset {
public:
    /// Assembles a dataset from ingested case and occupancy records.
    ///
    /// The covered index range is the overlap of the two input ranges and
    /// must contain the anchor. S is derived in integer arithmetic as
    /// N - I - R (so S + I + R == N holds exactly). Occupancy gaps of at
    /// most three consecutive days are forward-filled from the last observed
    /// value and noted in the fill log; longer occupancy gaps and any case
    /// gap are coverage errors.
    static dataset build(const std::vector<epidemic_record>& cases,
                         const std::vector<occupancy_record>& occupancy, const date& anchor,
                         std::int64_t population) {
        if (population <= 0)
            throw error(errc::invalid_argument, "population must be positive");
        if (cases.empty())
            throw error(errc::coverage_gap, "case series is empty");
        if (occupancy.empty())
            throw error(errc::coverage_gap, "occupancy series is empty");

        const date start = std::max(cases.front().day, occupancy.front().day);
        const date end = std::min(cases.back().day, occupancy.back().day);
        if (end < start)
            throw error(errc::coverage_gap, "case and occupancy series do not overlap");
        if (anchor < start || end < anchor)
            throw error(errc::anchor_out_of_range,
                        "anchor " + to_iso(anchor) + " outside covered range " + to_iso(start) + ".." +
                            to_iso(end));

        dataset out;
        out.anchor_ = anchor;
        out.population_ = population;
        out.t_min_ = start - anchor;
        const std::size_t n = static_cast<std::size_t>(end - start) + 1;
        out.susceptible_.reserve(n);
        out.infected_.reserve(n);
        out.recovered_.reserve(n);
        out.occupancy_.reserve(n);

        // Case series: every day in the covered range must be present.
        std::size_t ci = 0;
        while (ci < cases.size() && cases[ci].day < start) ++ci;
        std::vector<std::string> missing;
        for (date d = start; !(end < d); ++d) {
            if (ci < cases.size() && cases[ci].day == d) {
                const auto& rec = cases[ci];
                if (rec.infected + rec.recovered > population)
                    throw error(errc::invariant_violation,
                                "infected + recovered exceeds population on " + to_iso(d))
                        .with_day(d - anchor);
                const std::int64_t s = population - rec.infected - rec.recovered;
                out.susceptible_.push_back(static_cast<double>(s));
                out.infected_.push_back(static_cast<double>(rec.infected));
                out.recovered_.push_back(static_cast<double>(rec.recovered));
                ++ci;
            } else {
                missing.push_back(to_iso(d));
            }
        }
        if (!missing.empty()) {
            std::string list = missing.front();
            for (std::size_t i = 1; i < missing.size() && i < 5; ++i) list += ", " + missing[i];
            if (missing.size() > 5) list += ", ...";
            throw error(errc::coverage_gap,
                        "case series missing " + std::to_string(missing.size()) + " day(s): " + list);
        }

        // Occupancy: forward-fill runs of <= 3 missing days from the last
        // observation (which may precede the covered range).
        std::size_t oi = 0;
        double last_value = 0.0;
        bool have_last = false;
        while (oi < occupancy.size() && occupancy[oi].day < start) {
            last_value = occupancy[oi].occupancy;
            have_last = true;
            ++oi;
        }
        int run = 0;
        for (date d = start; !(end < d); ++d) {
            if (oi < occupancy.size() && occupancy[oi].day == d) {
                last_value = occupancy[oi].occupancy;
                have_last = true;
                run = 0;
                out.occupancy_.push_back(last_value);
                ++oi;
            } else {
                ++run;
                if (!have_last || run > 3)
                    throw error(errc::coverage_gap,
                                "occupancy gap exceeding 3 days at " + to_iso(d))
                        .with_day(d - anchor);
                out.occupancy_.push_back(last_value);
                out.fill_log_.push_back(d);
            }
        }
        return out;
    }

    /// Wraps explicit day-indexed arrays (e.g. a simulated trajectory paired
    /// with its occupancy schedule). No integer identity is imposed here.
    static dataset from_series(const date& anchor, double population, long t_min,
                               std::vector<double> susceptible, std::vector<double> infected,
                               std::vector<double> recovered, std::vector<double> occupancy) {
        if (susceptible.size() != infected.size() || infected.size() != recovered.size() ||
            recovered.size() != occupancy.size())
            throw error(errc::invalid_argument, "from_series: arrays must have equal length");
        if (susceptible.empty())
            throw error(errc::invalid_argument, "from_series: arrays must be non-empty");
        dataset out;
        out.anchor_ = anchor;
        out.population_ = population;
        out.t_min_ = t_min;
        out.susceptible_ = std::move(susceptible);
        out.infected_ = std::move(infected);
        out.recovered_ = std::move(recovered);
        out.occupancy_ = std::move(occupancy);
        return out;
    }

    long t_min() const { return t_min_; }
    long t_max() const { return t_min_ + static_cast<long>(susceptible_.size()) - 1; }
    bool has(long t) const { return t >= t_min() && t <= t_max(); }
    std::size_t size() const { return susceptible_.size(); }

    double susceptible(long t) const { return susceptible_[index(t)]; }
    double infected(long t) const { return infected_[index(t)]; }
    double recovered(long t) const { return recovered_[index(t)]; }
    double occupancy(long t) const { return occupancy_[index(t)]; }

    /// Row total S+I+R; equal to the constant population on ingested data.
    double total(long t) const {
        const std::size_t i = index(t);
        return susceptible_[i] + infected_[i] + recovered_[i];
    }

    const date& anchor() const { return anchor_; }
    double population() const { return population_; }
    date date_of(long t) const { return anchor_ + t; }

    /// Dates whose occupancy value was forward-filled during build().
    const std::vector<date>& fill_log() const { return fill_log_; }

    /// Writes the canonical export table `t,date,S,I,R,rho`.
    void export_csv(std::ostream& out) const {
        out << "t,date,S,I,R,rho\n";
        for (long t = t_min(); t <= t_max(); ++t) {
            out << t << ',' << to_iso(date_of(t)) << ',' << detail::format_double(susceptible(t))
                << ',' << detail::format_double(infected(t)) << ','
                << detail::format_double(recovered(t)) << ',' << detail::format_double(occupancy(t))
                << '\n';
        }
    }

    /// Same data re-indexed so that `new_anchor` becomes day 0.
    dataset reanchored(const date& new_anchor) const {
        dataset out = *this;
        out.t_min_ = t_min_ - (new_anchor - anchor_);
        out.anchor_ = new_anchor;
        return out;
    }

private:
    dataset() = default;

    std::size_t index(long t) const {
        if (!has(t))
            throw error(errc::missing_data, "day " + std::to_string(t) + " not covered by dataset", t);
        return static_cast<std::size_t>(t - t_min_);
    }

    date anchor_{};
    double population_ = 0.0;
    long t_min_ = 0;
    std::vector<double> susceptible_;
    std::vector<double> infected_;
    std::vector<double> recovered_;
    std::vector<double> occupancy_;
    std::vector<date> fill_log_;
};

/// Convenience wrapper matching the ingestion pipeline in one call.
inline dataset build_dataset(const std::vector<epidemic_record>& cases,
                             const std::vector<occupancy_record>& occupancy, const date& anchor,
                             std::int64_t population) {
    return dataset::build(cases, occupancy, anchor, population);
}

} // namespace ppkm

#endif
