// ppkm - command line front end for the epidemic policy toolkit.
//
// Subcommands: estimate, reff, classify, simulate, report. Inputs are the
// case/occupancy CSVs described in the data module; outputs are plot-ready
// CSV (or JSON) tables plus a machine-readable summary. Runs are
// deterministic: identical inputs and options produce byte-identical files,
// including under parallel estimation.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ppkm/ppkm.hpp"
#include "ppkm/format.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(ppkm::errc code) {
    switch (code) {
        case ppkm::errc::invalid_argument:
            return kExitConfig;
        case ppkm::errc::parse_error:
        case ppkm::errc::duplicate_date:
        case ppkm::errc::non_monotone_date:
        case ppkm::errc::coverage_gap:
        case ppkm::errc::anchor_out_of_range:
        case ppkm::errc::invariant_violation:
        case ppkm::errc::missing_data:
            return kExitData;
        case ppkm::errc::degenerate_system:
        case ppkm::errc::negative_compartment:
            return kExitNumeric;
    }
    return kExitNumeric;
}

[[noreturn]] void fail(ppkm::errc code, const std::string& message) {
    throw ppkm::error(code, message);
}

// ---------------------------------------------------------------------------
// Run configuration: JSON config file with command-line overrides (flags win).

struct run_config {
    std::string cases_path;
    std::string occupancy_path;
    std::string anchor = "2021-08-07";
    long long population = 10'467'629;
    ppkm::occupancy_unit unit = ppkm::occupancy_unit::percent;

    ppkm::model_params params;
    ppkm::window_config window;
    ppkm::bounds box;
    ppkm::policy_thresholds thresholds;

    std::string out_dir = ".";
    std::string format = "csv";
    unsigned threads = 1;
};

struct cli_overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> cases_path;
    std::optional<std::string> occupancy_path;
    std::optional<std::string> anchor;
    std::optional<long long> population;
    std::optional<std::string> unit;
    std::optional<int> window;
    std::optional<std::string> residual_mode;
    std::vector<double> bounds_values;
    std::vector<double> threshold_values;
    std::optional<double> entry_rate;
    std::optional<double> death_rate;
    std::optional<double> excess_death_rate;
    std::optional<double> cautiousness;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::optional<unsigned> threads;
};

void add_common_options(CLI::App* cmd, cli_overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON config file; flags override its values");
    cmd->add_option("--cases", o.cases_path, "case CSV (date,infected,recovered)");
    cmd->add_option("--occupancy", o.occupancy_path, "occupancy CSV (date,occupancy)");
    cmd->add_option("--anchor", o.anchor, "calendar date mapped to day index 0 (YYYY-MM-DD)");
    cmd->add_option("--population", o.population, "population size N");
    cmd->add_option("--occupancy-unit", o.unit, "occupancy column unit")
        ->check(CLI::IsMember({"fraction", "percent"}));
    cmd->add_option("--window", o.window, "estimation window length in days");
    cmd->add_option("--residual-mode", o.residual_mode, "which model equations enter the fit")
        ->check(CLI::IsMember({"infected-only", "all"}));
    cmd->add_option("--bounds", o.bounds_values, "rate box A_MIN,A_MAX,B_MIN,B_MAX")
        ->delimiter(',')
        ->expected(0, 4);
    cmd->add_option("--thresholds", o.threshold_values, "policy thresholds R_LOW,R_HIGH,RHO")
        ->delimiter(',')
        ->expected(0, 3);
    cmd->add_option("--entry-rate", o.entry_rate, "model entry rate (lambda)");
    cmd->add_option("--death-rate", o.death_rate, "model death rate (mu)");
    cmd->add_option("--excess-death-rate", o.excess_death_rate, "disease death increment (mu')");
    cmd->add_option("--cautiousness", o.cautiousness, "incidence saturation constant (gamma)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--format", o.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", o.threads, "estimation threads (0 = hardware)");
}

double json_number(const json& j, const char* key) {
    if (!j.at(key).is_number())
        fail(ppkm::errc::invalid_argument, std::string("config key '") + key + "' must be a number");
    return j.at(key).get<double>();
}

run_config resolve_config(const cli_overrides& o) {
    run_config cfg;

    if (o.config_path) {
        std::ifstream in(*o.config_path);
        if (!in)
            fail(ppkm::errc::invalid_argument, "cannot open config file '" + *o.config_path + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            fail(ppkm::errc::invalid_argument,
                 "config file '" + *o.config_path + "' is not valid JSON: " + e.what());
        }
        if (j.contains("cases")) cfg.cases_path = j.at("cases").get<std::string>();
        if (j.contains("occupancy")) cfg.occupancy_path = j.at("occupancy").get<std::string>();
        if (j.contains("anchor")) cfg.anchor = j.at("anchor").get<std::string>();
        if (j.contains("population")) cfg.population = j.at("population").get<long long>();
        if (j.contains("occupancy_unit")) {
            const auto u = j.at("occupancy_unit").get<std::string>();
            if (u != "fraction" && u != "percent")
                fail(ppkm::errc::invalid_argument, "occupancy_unit must be fraction or percent");
            cfg.unit = u == "percent" ? ppkm::occupancy_unit::percent : ppkm::occupancy_unit::fraction;
        }
        if (j.contains("window")) cfg.window.window = j.at("window").get<int>();
        if (j.contains("residual_mode")) {
            const auto m = j.at("residual_mode").get<std::string>();
            if (m != "infected-only" && m != "all")
                fail(ppkm::errc::invalid_argument, "residual_mode must be infected-only or all");
            cfg.window.mode = m == "all" ? ppkm::window_config::residuals::all_compartments
                                         : ppkm::window_config::residuals::infected_only;
        }
        if (j.contains("bounds")) {
            const auto& b = j.at("bounds");
            if (!b.is_array() || b.size() != 4)
                fail(ppkm::errc::invalid_argument, "config bounds must be [a_min,a_max,b_min,b_max]");
            cfg.box = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
        }
        if (j.contains("thresholds")) {
            const auto& t = j.at("thresholds");
            if (!t.is_array() || t.size() != 3)
                fail(ppkm::errc::invalid_argument, "config thresholds must be [r_low,r_high,rho]");
            cfg.thresholds = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
        }
        if (j.contains("params")) {
            const auto& p = j.at("params");
            if (p.contains("entry_rate")) cfg.params.entry_rate = json_number(p, "entry_rate");
            if (p.contains("death_rate")) cfg.params.death_rate = json_number(p, "death_rate");
            if (p.contains("excess_death_rate"))
                cfg.params.excess_death_rate = json_number(p, "excess_death_rate");
            if (p.contains("cautiousness")) cfg.params.cautiousness = json_number(p, "cautiousness");
        }
        if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
        if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
    }

    if (o.cases_path) cfg.cases_path = *o.cases_path;
    if (o.occupancy_path) cfg.occupancy_path = *o.occupancy_path;
    if (o.anchor) cfg.anchor = *o.anchor;
    if (o.population) cfg.population = *o.population;
    if (o.unit)
        cfg.unit = *o.unit == "percent" ? ppkm::occupancy_unit::percent
                                        : ppkm::occupancy_unit::fraction;
    if (o.window) cfg.window.window = *o.window;
    if (o.residual_mode)
        cfg.window.mode = *o.residual_mode == "all"
                              ? ppkm::window_config::residuals::all_compartments
                              : ppkm::window_config::residuals::infected_only;
    if (!o.bounds_values.empty()) {
        if (o.bounds_values.size() != 4)
            fail(ppkm::errc::invalid_argument, "--bounds expects A_MIN,A_MAX,B_MIN,B_MAX");
        cfg.box = {o.bounds_values[0], o.bounds_values[1], o.bounds_values[2], o.bounds_values[3]};
    }
    if (!o.threshold_values.empty()) {
        if (o.threshold_values.size() != 3)
            fail(ppkm::errc::invalid_argument, "--thresholds expects R_LOW,R_HIGH,RHO");
        cfg.thresholds = {o.threshold_values[0], o.threshold_values[1], o.threshold_values[2]};
    }
    if (o.entry_rate) cfg.params.entry_rate = *o.entry_rate;
    if (o.death_rate) cfg.params.death_rate = *o.death_rate;
    if (o.excess_death_rate) cfg.params.excess_death_rate = *o.excess_death_rate;
    if (o.cautiousness) cfg.params.cautiousness = *o.cautiousness;
    if (o.out_dir) cfg.out_dir = *o.out_dir;
    if (o.format) cfg.format = *o.format;
    if (o.threads) cfg.threads = *o.threads;

    cfg.params.population = static_cast<double>(cfg.population);
    if (!cfg.params.valid())
        fail(ppkm::errc::invalid_argument, "model parameter overrides violate their ranges");
    if (!cfg.window.valid())
        fail(ppkm::errc::invalid_argument, "window length must be at least 2");
    if (!cfg.box.valid())
        fail(ppkm::errc::invalid_argument, "bounds box must satisfy min <= max inside [0,1]^2");
    if (!cfg.thresholds.valid())
        fail(ppkm::errc::invalid_argument, "thresholds must satisfy 0 < r_low < r_high, 0 < rho < 1");
    return cfg;
}

ppkm::dataset load_data(const run_config& cfg) {
    if (cfg.cases_path.empty() || cfg.occupancy_path.empty())
        fail(ppkm::errc::invalid_argument, "this command needs --cases and --occupancy (or a config)");
    for (const std::string& p : {cfg.cases_path, cfg.occupancy_path})
        if (!fs::exists(p))
            fail(ppkm::errc::invalid_argument, "input file '" + p + "' does not exist");

    const auto cases = ppkm::load_cases(cfg.cases_path);
    const auto occupancy = ppkm::load_occupancy(cfg.occupancy_path, cfg.unit);
    ppkm::dataset data =
        ppkm::build_dataset(cases, occupancy, ppkm::parse_date(cfg.anchor), cfg.population);
    if (!data.fill_log().empty()) {
        std::cerr << "note: occupancy forward-filled on " << data.fill_log().size() << " day(s):";
        for (const auto& d : data.fill_log()) std::cerr << ' ' << ppkm::to_iso(d);
        std::cerr << '\n';
    }
    return data;
}

void check_range_coverage(const ppkm::dataset& data, long from, long to, int window) {
    if (to < from)
        fail(ppkm::errc::invalid_argument, "--to must not be smaller than --from");
    if (from - window < data.t_min() || to > data.t_max())
        throw ppkm::error(ppkm::errc::coverage_gap,
                          "range [" + std::to_string(from) + "," + std::to_string(to) +
                              "] with window " + std::to_string(window) + " needs days " +
                              std::to_string(from - window) + ".." + std::to_string(to) +
                              " but data covers " + std::to_string(data.t_min()) + ".." +
                              std::to_string(data.t_max()),
                          from - window < data.t_min() ? from - window : to);
}

// ---------------------------------------------------------------------------
// Table output: CSV primary, JSON mirror.

struct table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

std::string fmt(double v) { return ppkm::detail::format_double(v); }

fs::path write_table(const table& t, const run_config& cfg, const std::string& stem) {
    fs::create_directories(cfg.out_dir);
    const bool as_json = cfg.format == "json";
    const fs::path path = fs::path(cfg.out_dir) / (stem + (as_json ? ".json" : ".csv"));
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ppkm::errc::invalid_argument, "cannot write " + path.string());

    if (as_json) {
        ordered_json rows = ordered_json::array();
        for (const auto& r : t.rows) {
            ordered_json obj;
            for (std::size_t i = 0; i < t.header.size(); ++i) {
                // Numeric cells stay numeric in the JSON mirror; integer
                // cells (day indices) stay integral.
                const std::string& cell = r[i];
                char* end = nullptr;
                const long long as_int = std::strtoll(cell.c_str(), &end, 10);
                if (!cell.empty() && end == cell.c_str() + cell.size()) {
                    obj[t.header[i]] = as_int;
                    continue;
                }
                const double num = std::strtod(cell.c_str(), &end);
                if (!cell.empty() && end == cell.c_str() + cell.size())
                    obj[t.header[i]] = num;
                else
                    obj[t.header[i]] = cell;
            }
            rows.push_back(std::move(obj));
        }
        out << rows.dump(2) << '\n';
    } else {
        for (std::size_t i = 0; i < t.header.size(); ++i)
            out << (i ? "," : "") << t.header[i];
        out << '\n';
        for (const auto& r : t.rows) {
            for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
            out << '\n';
        }
    }
    return path;
}

// ---------------------------------------------------------------------------
// Subcommand bodies.

table rates_table(const std::vector<ppkm::rate_estimate>& estimates) {
    table t;
    t.header = {"t", "alpha", "beta", "residual_norm", "active_bounds"};
    for (const auto& e : estimates)
        t.row({std::to_string(e.day), fmt(e.alpha), fmt(e.beta), fmt(e.residual_norm),
               e.active.to_string()});
    return t;
}

int cmd_estimate(const run_config& cfg, long from, long to) {
    const ppkm::dataset data = load_data(cfg);
    check_range_coverage(data, from, to, cfg.window.window);
    const auto estimates =
        ppkm::estimate_series(data, cfg.params, from, to, cfg.window, cfg.box, cfg.threads);
    const auto path = write_table(rates_table(estimates), cfg, "rates");
    std::cout << "wrote " << path.string() << " (" << estimates.size() << " days)\n";
    return kExitOk;
}

int cmd_reff(const run_config& cfg, long from, long to, const std::string& variant) {
    const ppkm::dataset data = load_data(cfg);
    check_range_coverage(data, from, to, cfg.window.window);
    const auto estimates =
        ppkm::estimate_series(data, cfg.params, from, to, cfg.window, cfg.box, cfg.threads);

    table t;
    if (variant == "both") {
        const auto by_data =
            ppkm::r_eff_series(data, estimates, cfg.params, ppkm::reff_variant::data_based);
        const auto by_sim =
            ppkm::r_eff_series(data, estimates, cfg.params, ppkm::reff_variant::simulation_based);
        t.header = {"t", "reff_data", "reff_sim", "abs_diff"};
        for (std::size_t i = 0; i < by_data.size(); ++i)
            t.row({std::to_string(by_data[i].day), fmt(by_data[i].value), fmt(by_sim[i].value),
                   fmt(std::fabs(by_data[i].value - by_sim[i].value))});
    } else {
        const auto v = variant == "sim" ? ppkm::reff_variant::simulation_based
                                        : ppkm::reff_variant::data_based;
        const auto series = ppkm::r_eff_series(data, estimates, cfg.params, v);
        t.header = {"t", "reff", "variant"};
        for (const auto& p : series)
            t.row({std::to_string(p.day), fmt(p.value), ppkm::to_string(p.variant)});
    }
    const auto path = write_table(t, cfg, "reff");
    std::cout << "wrote " << path.string() << '\n';
    return kExitOk;
}

table policy_table(const std::vector<std::pair<long, ppkm::pandemic_point>>& points,
                   const ppkm::policy_thresholds& thresholds) {
    table t;
    t.header = {"t", "reff", "rho", "level", "region", "note"};
    for (const auto& [day, rec] : ppkm::classify_series(points, thresholds)) {
        const auto& point = points[t.rows.size()].second;
        t.row({std::to_string(day), fmt(point.r_eff), fmt(point.occupancy),
               ppkm::to_string(rec.level), ppkm::to_string(rec.region), rec.rationale_note});
    }
    return t;
}

std::vector<std::pair<long, ppkm::pandemic_point>> read_points_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ppkm::errc::invalid_argument, "cannot open series file '" + path + "'");
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line))
        fail(ppkm::errc::parse_error, "series file '" + path + "' is empty");
    ++line_no;
    if (line.ends_with("\r")) line.pop_back();
    if (line != "t,reff,rho")
        throw ppkm::error(ppkm::errc::parse_error, "series file header must be 't,reff,rho'")
            .with_line(line_no);
    std::vector<std::pair<long, ppkm::pandemic_point>> points;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.ends_with("\r")) line.pop_back();
        if (line.empty()) continue;
        long t;
        double reff, rho;
        if (std::sscanf(line.c_str(), "%ld,%lf,%lf", &t, &reff, &rho) != 3)
            throw ppkm::error(ppkm::errc::parse_error, "malformed series row '" + line + "'")
                .with_line(line_no);
        points.emplace_back(t, ppkm::pandemic_point{reff, rho});
    }
    return points;
}

int cmd_classify(const run_config& cfg, const std::vector<double>& point,
                 const std::string& series_file) {
    std::vector<std::pair<long, ppkm::pandemic_point>> points;
    if (!point.empty() && !series_file.empty())
        fail(ppkm::errc::invalid_argument, "give either --point or --series, not both");
    if (!point.empty()) {
        if (point.size() != 2) fail(ppkm::errc::invalid_argument, "--point expects R_EFF,RHO");
        points.emplace_back(0, ppkm::pandemic_point{point[0], point[1]});
    } else if (!series_file.empty()) {
        points = read_points_file(series_file);
    } else {
        fail(ppkm::errc::invalid_argument, "classify needs --point R,RHO or --series FILE");
    }

    const table t = policy_table(points, cfg.thresholds);
    const auto path = write_table(t, cfg, "policy");
    for (const auto& row : t.rows)
        std::cout << "t=" << row[0] << " level=" << row[3] << " region=" << row[4] << '\n';
    std::cout << "wrote " << path.string() << '\n';
    return kExitOk;
}

std::vector<ppkm::day_rates> read_rates_file(const std::string& path, const ppkm::dataset* data,
                                             double fallback_rho, long& first_day) {
    std::ifstream in(path);
    if (!in) fail(ppkm::errc::invalid_argument, "cannot open rates file '" + path + "'");
    std::string line;
    long line_no = 0;
    if (!std::getline(in, line))
        fail(ppkm::errc::parse_error, "rates file '" + path + "' is empty");
    ++line_no;
    if (line.ends_with("\r")) line.pop_back();

    // Accept the `rates.csv` layout or any table starting t,alpha,beta[,rho].
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 3 || header[0] != "t" || header[1] != "alpha" || header[2] != "beta")
        throw ppkm::error(ppkm::errc::parse_error,
                          "rates file header must start with 't,alpha,beta'")
            .with_line(line_no);
    const bool has_rho = header.size() > 3 && header[3] == "rho";

    std::vector<ppkm::day_rates> schedule;
    bool first = true;
    long prev_day = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.ends_with("\r")) line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() < 3)
            throw ppkm::error(ppkm::errc::parse_error, "malformed rates row '" + line + "'")
                .with_line(line_no);
        const long day = std::stol(cells[0]);
        if (first) {
            first_day = day;
            first = false;
        } else if (day != prev_day + 1) {
            throw ppkm::error(ppkm::errc::parse_error, "rates file days must be consecutive")
                .with_line(line_no);
        }
        prev_day = day;
        ppkm::day_rates r;
        r.recovery = std::stod(cells[1]);
        r.incidence = std::stod(cells[2]);
        if (has_rho)
            r.occupancy = std::stod(cells[3]);
        else if (data && data->has(day))
            r.occupancy = data->occupancy(day);
        else
            r.occupancy = fallback_rho;
        schedule.push_back(r);
    }
    if (schedule.empty())
        fail(ppkm::errc::parse_error, "rates file '" + path + "' has no rows");
    return schedule;
}

int cmd_simulate(const run_config& cfg, long horizon, const std::vector<double>& initial,
                 const std::string& rates_file, std::optional<double> alpha,
                 std::optional<double> beta, double rho) {
    std::optional<ppkm::dataset> data;
    if (!cfg.cases_path.empty() && !cfg.occupancy_path.empty()) data = load_data(cfg);

    ppkm::compartments state;
    long start_day = 0;
    if (!initial.empty()) {
        if (initial.size() != 3) fail(ppkm::errc::invalid_argument, "--initial expects S,I,R");
        state = {initial[0], initial[1], initial[2]};
    } else if (data) {
        if (!data->has(0))
            fail(ppkm::errc::invalid_argument, "dataset does not cover day 0; give --initial");
        state = {data->susceptible(0), data->infected(0), data->recovered(0)};
    } else {
        fail(ppkm::errc::invalid_argument, "simulate needs --initial S,I,R or input data files");
    }
    if (!state.valid())
        fail(ppkm::errc::invalid_argument, "--initial compartments must be finite and non-negative");

    std::vector<ppkm::day_rates> schedule;
    if (!rates_file.empty()) {
        schedule = read_rates_file(rates_file, data ? &*data : nullptr, rho, start_day);
        if (horizon >= 0 && static_cast<std::size_t>(horizon) < schedule.size())
            schedule.resize(static_cast<std::size_t>(horizon));
    } else {
        if (horizon < 0) fail(ppkm::errc::invalid_argument, "--horizon must be >= 0");
        if (horizon > 0 && (!alpha || !beta))
            fail(ppkm::errc::invalid_argument,
                 "simulate needs --rates FILE or constant --alpha and --beta");
        for (long i = 0; i < horizon; ++i) {
            double day_rho = rho;
            if (data && data->has(start_day + i)) day_rho = data->occupancy(start_day + i);
            schedule.push_back({*alpha, *beta, day_rho});
        }
    }

    table t;
    t.header = {"t", "S", "I", "R"};
    if (schedule.empty()) {
        t.row({std::to_string(start_day), fmt(state.susceptible), fmt(state.infected),
               fmt(state.recovered)});
    } else {
        const ppkm::trajectory traj = ppkm::simulate(state, cfg.params, schedule, start_day);
        for (std::size_t i = 0; i < traj.states.size(); ++i)
            t.row({std::to_string(traj.day_of(i)), fmt(traj.states[i].susceptible),
                   fmt(traj.states[i].infected), fmt(traj.states[i].recovered)});
    }
    const auto path = write_table(t, cfg, "trajectory");
    std::cout << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
    return kExitOk;
}

int cmd_report(const run_config& cfg, long from, long to) {
    const ppkm::dataset data = load_data(cfg);
    check_range_coverage(data, from, to, cfg.window.window);

    const auto estimates =
        ppkm::estimate_series(data, cfg.params, from, to, cfg.window, cfg.box, cfg.threads);
    write_table(rates_table(estimates), cfg, "rates");

    const auto by_data =
        ppkm::r_eff_series(data, estimates, cfg.params, ppkm::reff_variant::data_based);
    const auto by_sim =
        ppkm::r_eff_series(data, estimates, cfg.params, ppkm::reff_variant::simulation_based);
    table reff_t;
    reff_t.header = {"t", "reff_data", "reff_sim", "abs_diff"};
    for (std::size_t i = 0; i < by_data.size(); ++i)
        reff_t.row({std::to_string(by_data[i].day), fmt(by_data[i].value), fmt(by_sim[i].value),
                    fmt(std::fabs(by_data[i].value - by_sim[i].value))});
    write_table(reff_t, cfg, "reff");

    // The recommendation pairs the observed-data R_eff with observed occupancy.
    std::vector<std::pair<long, ppkm::pandemic_point>> points;
    for (const auto& p : by_data)
        points.emplace_back(p.day, ppkm::pandemic_point{p.value, data.occupancy(p.day)});
    const auto recommendations = ppkm::classify_series(points, cfg.thresholds);
    write_table(policy_table(points, cfg.thresholds), cfg, "policy");

    ordered_json summary;
    summary["anchor"] = cfg.anchor;
    summary["population"] = cfg.population;
    summary["window"] = cfg.window.window;
    summary["residual_mode"] =
        cfg.window.mode == ppkm::window_config::residuals::all_compartments ? "all"
                                                                            : "infected-only";
    summary["bounds"] = {cfg.box.alpha_min, cfg.box.alpha_max, cfg.box.beta_min, cfg.box.beta_max};
    summary["thresholds"] = {{"r_low", cfg.thresholds.r_low},
                             {"r_high", cfg.thresholds.r_high},
                             {"rho_split", cfg.thresholds.rho_split}};
    summary["range"] = {{"from", from}, {"to", to}};
    summary["days"] = ordered_json::array();
    for (std::size_t i = 0; i < recommendations.size(); ++i) {
        const auto& [day, rec] = recommendations[i];
        summary["days"].push_back({{"t", day},
                                   {"reff_data", by_data[i].value},
                                   {"reff_sim", by_sim[i].value},
                                   {"rho", points[i].second.occupancy},
                                   {"level", ppkm::to_string(rec.level)},
                                   {"region", ppkm::to_string(rec.region)}});
    }
    fs::create_directories(cfg.out_dir);
    const fs::path summary_path = fs::path(cfg.out_dir) / "summary.json";
    std::ofstream out(summary_path, std::ios::binary);
    out << summary.dump(2) << '\n';
    std::cout << "wrote report bundle to " << cfg.out_dir << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete SIR toolkit: windowed rate estimation, effective reproduction "
                 "number, and PPKM restriction-level recommendations"};
    app.require_subcommand(1);

    cli_overrides common;

    auto* estimate = app.add_subcommand("estimate", "fit per-day recovery/incidence rates");
    long est_from = 0, est_to = 30;
    add_common_options(estimate, common);
    estimate->add_option("--from", est_from, "first day index to fit");
    estimate->add_option("--to", est_to, "last day index to fit");

    auto* reff = app.add_subcommand("reff", "compute the effective reproduction number");
    long reff_from = 0, reff_to = 30;
    std::string variant = "both";
    add_common_options(reff, common);
    reff->add_option("--from", reff_from, "first day index");
    reff->add_option("--to", reff_to, "last day index");
    reff->add_option("--variant", variant, "which series to compute")
        ->check(CLI::IsMember({"data", "sim", "both"}));

    auto* classify = app.add_subcommand("classify", "recommend a restriction level");
    std::vector<double> point;
    std::string series_file;
    add_common_options(classify, common);
    classify->add_option("--point", point, "single R_EFF,RHO point")->delimiter(',')->expected(0, 2);
    classify->add_option("--series", series_file, "CSV of points with header t,reff,rho");

    auto* simulate_cmd = app.add_subcommand("simulate", "run the day-stepped model forward");
    long horizon = -1;
    std::vector<double> initial;
    std::string rates_file;
    std::optional<double> alpha_flag, beta_flag;
    double rho_flag = 0.0;
    add_common_options(simulate_cmd, common);
    simulate_cmd->add_option("--horizon", horizon, "number of days to step");
    simulate_cmd->add_option("--initial", initial, "initial S,I,R")->delimiter(',')->expected(0, 3);
    simulate_cmd->add_option("--rates", rates_file, "per-day rates table (t,alpha,beta[,rho])");
    simulate_cmd->add_option("--alpha", alpha_flag, "constant recovery rate");
    simulate_cmd->add_option("--beta", beta_flag, "constant incidence rate");
    simulate_cmd->add_option("--rho", rho_flag, "constant occupancy when no data is given");

    auto* report = app.add_subcommand("report", "estimate + reff (both variants) + classify");
    long rep_from = 0, rep_to = 30;
    add_common_options(report, common);
    report->add_option("--from", rep_from, "first day index");
    report->add_option("--to", rep_to, "last day index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion")
            return app.exit(e);
        app.exit(e);
        return kExitConfig;
    }

    try {
        const run_config cfg = resolve_config(common);
        if (estimate->parsed()) return cmd_estimate(cfg, est_from, est_to);
        if (reff->parsed()) return cmd_reff(cfg, reff_from, reff_to, variant);
        if (classify->parsed()) return cmd_classify(cfg, point, series_file);
        if (simulate_cmd->parsed())
            return cmd_simulate(cfg, horizon, initial, rates_file, alpha_flag, beta_flag, rho_flag);
        if (report->parsed()) return cmd_report(cfg, rep_from, rep_to);
        std::cerr << "no subcommand given\n";
        return kExitConfig;
    } catch (const ppkm::error& e) {
        json err;
        err["error"]["code"] = std::string(ppkm::to_string(e.code()));
        err["error"]["message"] = e.what();
        if (e.day()) err["error"]["day"] = *e.day();
        if (e.line()) err["error"]["line"] = *e.line();
        std::cerr << err.dump() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        json err;
        err["error"]["code"] = "internal_error";
        err["error"]["message"] = e.what();
        std::cerr << err.dump() << '\n';
        return kExitNumeric;
    }
}
