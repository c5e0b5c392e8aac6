#ifndef PPKM_MODEL_HPP
#define PPKM_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ppkm/error.hpp"

namespace ppkm {

/// Fixed constants of the discrete SIR model with saturated incidence and
/// bed-occupancy-saturated recovery. The update reads, per day t:
///
///   S' = S + lambda - mu*S - beta*S*I/(1 + gamma*S)
///   I' = I - mu*I - mu'*I + beta*S*I/(1 + gamma*S) - alpha*I/(1 + rho*I)
///   R' = R - mu*R + alpha*I/(1 + rho*I)
///
/// Defaults are the DKI Jakarta calibration; the entry rate is kept as the
/// exact ratio 10,467,629/17,225 rather than its truncated decimal.
struct model_params {
    double entry_rate = 10'467'629.0 / 17'225.0; // lambda, individuals/day
    double death_rate = 0.0000421496;            // mu, 1/day
    double excess_death_rate = 0.06;             // mu', 1/day
    double cautiousness = 0.35;                  // gamma, in [0,1]
    double population = 10'467'629.0;            // N, individuals

    bool valid() const {
        return entry_rate > 0.0 && death_rate > 0.0 && excess_death_rate > 0.0 &&
               cautiousness >= 0.0 && cautiousness <= 1.0 && population > 0.0 &&
               std::isfinite(entry_rate) && std::isfinite(population);
    }
};

/// Per-day rate inputs: recovery alpha, incidence beta, bed occupancy rho.
struct day_rates {
    double recovery = 0.0;  // alpha, 1/day
    double incidence = 0.0; // beta, 1/(individuals*day)
    double occupancy = 0.0; // rho, dimensionless

    bool valid() const {
        auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
        return in_unit(recovery) && in_unit(incidence) && in_unit(occupancy);
    }
};

/// Compartment counts at one day boundary. Real-valued by design: the model
/// is arithmetic on reals and no rounding to whole individuals is performed.
struct compartments {
    double susceptible = 0.0;
    double infected = 0.0;
    double recovered = 0.0;

    double total() const { return susceptible + infected + recovered; }

    bool valid() const {
        return susceptible >= 0.0 && infected >= 0.0 && recovered >= 0.0 &&
               std::isfinite(susceptible) && std::isfinite(infected) && std::isfinite(recovered);
    }
};

/// A simulated path: states at day boundaries start_day .. start_day+n, and
/// the n per-day rates that produced them (one fewer than states).
struct trajectory {
    long start_day = 0;
    std::vector<compartments> states;
    std::vector<day_rates> rates;

    std::size_t days() const { return rates.size(); }
    long day_of(std::size_t index) const { return start_day + static_cast<long>(index); }
};

/// One day of the recursion. No clamping: a negative output compartment is a
/// data/parameter inconsistency and raises negative_compartment.
inline compartments step(const compartments& state, const model_params& params,
                         const day_rates& rates) {
    if (!state.valid())
        throw error(errc::invalid_argument, "step: compartments must be finite and non-negative");
    if (!params.valid())
        throw error(errc::invalid_argument, "step: invalid model parameters");
    if (!rates.valid())
        throw error(errc::invalid_argument, "step: day rates must lie in [0,1]");

    const double S = state.susceptible;
    const double I = state.infected;
    const double R = state.recovered;
    const double transmission = rates.incidence * S * I / (1.0 + params.cautiousness * S);
    const double recovery = rates.recovery * I / (1.0 + rates.occupancy * I);

    compartments next;
    next.susceptible = S + params.entry_rate - params.death_rate * S - transmission;
    next.infected = I - params.death_rate * I - params.excess_death_rate * I + transmission - recovery;
    next.recovered = R - params.death_rate * R + recovery;

    if (next.susceptible < 0.0 || next.infected < 0.0 || next.recovered < 0.0)
        throw error(errc::negative_compartment, "step produced a negative compartment");
    return next;
}

/// Iterates step over a whole rates schedule. Aborts at the first failing day,
/// reporting its absolute index (start_day + offset of the failing step).
inline trajectory simulate(const compartments& initial, const model_params& params,
                           std::span<const day_rates> schedule, long start_day = 0) {
    if (schedule.empty())
        throw error(errc::invalid_argument, "simulate: rates schedule must be non-empty");

    trajectory out;
    out.start_day = start_day;
    out.states.reserve(schedule.size() + 1);
    out.rates.assign(schedule.begin(), schedule.end());
    out.states.push_back(initial);
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        try {
            out.states.push_back(step(out.states.back(), params, schedule[i]));
        } catch (error& e) {
            throw e.with_day(start_day + static_cast<long>(i));
        }
    }
    return out;
}

inline trajectory simulate(const compartments& initial, const model_params& params,
                           const std::vector<day_rates>& schedule, long start_day = 0) {
    return simulate(initial, params, std::span<const day_rates>(schedule), start_day);
}

} // namespace ppkm

#endif
