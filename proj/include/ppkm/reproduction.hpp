#ifndef PPKM_REPRODUCTION_HPP
#define PPKM_REPRODUCTION_HPP

#include <vector>

#include "ppkm/dataset.hpp"
#include "ppkm/error.hpp"
#include "ppkm/estimation.hpp"
#include "ppkm/model.hpp"

namespace ppkm {

enum class reff_variant { data_based, simulation_based };

inline const char* to_string(reff_variant v) {
    return v == reff_variant::data_based ? "data" : "sim";
}

/// Effective reproduction number at one day.
struct reff_point {
    long day = 0;
    double value = 0.0;
    reff_variant variant = reff_variant::data_based;
};

/// R_eff = beta*lambda*S / ((mu + gamma*lambda) * (mu + mu' + alpha) * N).
/// The S/N factor scales the basic reproduction number by the currently
/// susceptible share of the population.
inline double r_eff(const model_params& params, double alpha, double beta, double susceptible,
                    double total_population) {
    if (!(total_population > 0.0))
        throw error(errc::invalid_argument, "r_eff: population must be positive");
    if (alpha < 0.0 || beta < 0.0 || susceptible < 0.0)
        throw error(errc::invalid_argument, "r_eff: rates and susceptibles must be non-negative");
    const double mu = params.death_rate;
    const double lambda = params.entry_rate;
    return beta * lambda * susceptible /
           ((mu + params.cautiousness * lambda) *
            (mu + params.excess_death_rate + alpha) * total_population);
}

/// R_eff for each estimated day.
///
/// data_based evaluates the formula on the observed S_t with N_t taken as
/// the row total S_t+I_t+R_t (identical to the constant population on
/// ingested data, where S was derived as N-I-R). simulation_based first
/// re-simulates from the dataset's state at the first estimated day, using
/// the per-day estimated rates and the observed occupancy, and evaluates
/// the formula on the simulated state and its (drifting) total.
///
/// Estimates must cover consecutive days.
inline std::vector<reff_point> r_eff_series(const dataset& data,
                                            const std::vector<rate_estimate>& estimates,
                                            const model_params& params, reff_variant variant) {
    std::vector<reff_point> out;
    if (estimates.empty()) return out;
    for (std::size_t i = 1; i < estimates.size(); ++i)
        if (estimates[i].day != estimates[i - 1].day + 1)
            throw error(errc::invalid_argument, "r_eff_series: estimates must cover consecutive days");

    const long t0 = estimates.front().day;
    const long t1 = estimates.back().day;
    out.reserve(estimates.size());

    if (variant == reff_variant::data_based) {
        for (const auto& est : estimates) {
            const double value =
                r_eff(params, est.alpha, est.beta, data.susceptible(est.day), data.total(est.day));
            out.push_back({est.day, value, variant});
        }
        return out;
    }

    compartments state{data.susceptible(t0), data.infected(t0), data.recovered(t0)};
    std::vector<compartments> states;
    states.reserve(estimates.size());
    states.push_back(state);
    if (t1 > t0) {
        std::vector<day_rates> schedule;
        schedule.reserve(static_cast<std::size_t>(t1 - t0));
        for (long t = t0; t < t1; ++t) {
            const auto& est = estimates[static_cast<std::size_t>(t - t0)];
            schedule.push_back({est.alpha, est.beta, data.occupancy(t)});
        }
        trajectory traj = simulate(state, params, schedule, t0);
        states = std::move(traj.states);
    }
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const auto& est = estimates[i];
        const auto& s = states[i];
        const double value = r_eff(params, est.alpha, est.beta, s.susceptible, s.total());
        out.push_back({est.day, value, variant});
    }
    return out;
}

} // namespace ppkm

#endif
