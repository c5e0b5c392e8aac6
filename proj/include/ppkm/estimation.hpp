#ifndef PPKM_ESTIMATION_HPP
#define PPKM_ESTIMATION_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ppkm/dataset.hpp"
#include "ppkm/error.hpp"
#include "ppkm/model.hpp"

namespace ppkm {

/// Sliding-window configuration for the per-day rate fit.
struct window_config {
    /// Which model equations contribute residual rows. The I-equation is the
    /// only one containing both unknowns; the S- and R-equations each pin a
    /// single unknown and can be appended for a 3W-row system.
    enum class residuals { infected_only, all_compartments };

    int window = 90;
    residuals mode = residuals::infected_only;

    bool valid() const { return window >= 2; }
};

/// Box constraints for (alpha, beta). The fit is meaningful only for rates
/// interpretable as per-day probabilities, so the box lives inside [0,1]^2.
struct bounds {
    double alpha_min = 0.0;
    double alpha_max = 1.0;
    double beta_min = 0.0;
    double beta_max = 1.0;

    bool valid() const {
        return alpha_min <= alpha_max && beta_min <= beta_max && alpha_min >= 0.0 &&
               beta_min >= 0.0 && alpha_max <= 1.0 && beta_max <= 1.0;
    }
};

/// Rows of the overdetermined linear system in x = (alpha, beta):
/// residual_i = alpha_coef[i]*alpha + beta_coef[i]*beta - target[i].
struct linear_system {
    std::vector<double> alpha_coef;
    std::vector<double> beta_coef;
    std::vector<double> target;

    std::size_t rows() const { return target.size(); }

    double objective(double alpha, double beta) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < target.size(); ++i) {
            const double r = alpha_coef[i] * alpha + beta_coef[i] * beta - target[i];
            sum += r * r;
        }
        return sum;
    }
};

/// Which box constraints bind at the returned minimiser.
struct active_bounds {
    bool alpha_lower = false;
    bool alpha_upper = false;
    bool beta_lower = false;
    bool beta_upper = false;

    bool any() const { return alpha_lower || alpha_upper || beta_lower || beta_upper; }

    std::string to_string() const {
        std::string s;
        auto add = [&](bool flag, const char* name) {
            if (!flag) return;
            if (!s.empty()) s += '|';
            s += name;
        };
        add(alpha_lower, "alpha_min");
        add(alpha_upper, "alpha_max");
        add(beta_lower, "beta_min");
        add(beta_upper, "beta_max");
        return s.empty() ? "none" : s;
    }
};

/// Fitted per-day rates with diagnostics.
struct rate_estimate {
    long day = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double residual_norm = 0.0; // sum of squared residuals at the solution
    active_bounds active;
};

/// Builds the window system for day t from days s in {t-W, ..., t-1}.
///
/// Each day contributes the I-equation rearranged into a residual linear in
/// (alpha, beta):
///
///   r_s = alpha * I_s/(1+rho_s*I_s) - beta * S_s*I_s/(1+gamma*S_s)
///         - [(1-mu-mu')*I_s - I_{s+1}]
///
/// which vanishes exactly when the data obey the model recursion. In
/// all_compartments mode the S- and R-equation residuals (one unknown each)
/// are appended after the W infected rows, in the same
/// observed-minus-predicted arrangement:
///
///   S row: beta * S_s*I_s/(1+gamma*S_s) - [(1-mu)*S_s + lambda - S_{s+1}]
///   R row: -alpha * I_s/(1+rho_s*I_s)   - [(1-mu)*R_s - R_{s+1}]
inline linear_system build_system(const dataset& data, const model_params& params, long t,
                                  const window_config& config = {}) {
    if (!config.valid())
        throw error(errc::invalid_argument, "window length must be at least 2");
    if (!params.valid())
        throw error(errc::invalid_argument, "invalid model parameters");

    const long w = config.window;
    if (!data.has(t - w) || !data.has(t)) {
        const long missing = data.has(t) ? t - w : t;
        throw error(errc::missing_data,
                    "window for day " + std::to_string(t) + " needs days " + std::to_string(t - w) +
                        ".." + std::to_string(t) + " but day " + std::to_string(missing) +
                        " is absent",
                    missing);
    }

    const double mu = params.death_rate;
    const double mu_excess = params.excess_death_rate;
    const double gamma = params.cautiousness;
    const double lambda = params.entry_rate;
    const bool all = config.mode == window_config::residuals::all_compartments;

    linear_system sys;
    const std::size_t row_count = all ? 3 * static_cast<std::size_t>(w) : static_cast<std::size_t>(w);
    sys.alpha_coef.reserve(row_count);
    sys.beta_coef.reserve(row_count);
    sys.target.reserve(row_count);

    for (long s = t - w; s < t; ++s) {
        const double S = data.susceptible(s);
        const double I = data.infected(s);
        const double rho = data.occupancy(s);
        const double recovery_coef = I / (1.0 + rho * I);
        const double transmission_coef = S * I / (1.0 + gamma * S);
        sys.alpha_coef.push_back(recovery_coef);
        sys.beta_coef.push_back(-transmission_coef);
        sys.target.push_back((1.0 - mu - mu_excess) * I - data.infected(s + 1));
    }
    if (all) {
        for (long s = t - w; s < t; ++s) {
            const double S = data.susceptible(s);
            const double I = data.infected(s);
            sys.alpha_coef.push_back(0.0);
            sys.beta_coef.push_back(S * I / (1.0 + gamma * S));
            sys.target.push_back((1.0 - mu) * S + lambda - data.susceptible(s + 1));
        }
        for (long s = t - w; s < t; ++s) {
            const double I = data.infected(s);
            const double rho = data.occupancy(s);
            sys.alpha_coef.push_back(-(I / (1.0 + rho * I)));
            sys.beta_coef.push_back(0.0);
            sys.target.push_back((1.0 - mu) * data.recovered(s) - data.recovered(s + 1));
        }
    }

    auto all_zero = [](const std::vector<double>& column) {
        return std::all_of(column.begin(), column.end(), [](double v) { return v == 0.0; });
    };
    if (all_zero(sys.alpha_coef) || all_zero(sys.beta_coef))
        throw error(errc::degenerate_system,
                    "window for day " + std::to_string(t) +
                        " has an identically zero coefficient column (no infections in window?)",
                    t);
    return sys;
}

namespace detail {

struct candidate {
    double alpha;
    double beta;
    double objective;
};

inline bool better(const candidate& a, const candidate& b) {
    if (a.objective != b.objective) return a.objective < b.objective;
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.beta < b.beta;
}

} // namespace detail

/// Exact global minimiser of ||A x - b||^2 over the bounds box.
///
/// The problem is a 2-variable convex box-QP, so no iterative solver is
/// needed: take the unconstrained normal-equations solution if it lies in
/// the box; otherwise the minimum is on the boundary and the KKT candidate
/// set (each edge with its free variable minimised in closed form, plus the
/// four corners) is enumerated. Ties break toward smaller alpha, then beta.
inline rate_estimate solve_box_ls(const linear_system& system, const bounds& box = {}) {
    if (!box.valid())
        throw error(errc::invalid_argument, "bounds box must satisfy min <= max inside [0,1]^2");
    if (system.rows() == 0)
        throw error(errc::invalid_argument, "linear system has no rows");

    // Normal-equation sums: S = A^T A, c = A^T b.
    double saa = 0.0, sab = 0.0, sbb = 0.0, ca = 0.0, cb = 0.0;
    for (std::size_t i = 0; i < system.rows(); ++i) {
        const double a = system.alpha_coef[i];
        const double b = system.beta_coef[i];
        const double y = system.target[i];
        saa += a * a;
        sab += a * b;
        sbb += b * b;
        ca += a * y;
        cb += b * y;
    }
    if (saa == 0.0 || sbb == 0.0)
        throw error(errc::degenerate_system, "a coefficient column of the system is identically zero");

    auto inside = [&](double alpha, double beta) {
        return alpha >= box.alpha_min && alpha <= box.alpha_max && beta >= box.beta_min &&
               beta <= box.beta_max;
    };

    detail::candidate best{box.alpha_min, box.beta_min,
                           std::numeric_limits<double>::infinity()};

    const double det = saa * sbb - sab * sab;
    bool interior = false;
    if (det > 0.0) {
        const double alpha_free = (ca * sbb - cb * sab) / det;
        const double beta_free = (saa * cb - sab * ca) / det;
        if (std::isfinite(alpha_free) && std::isfinite(beta_free) && inside(alpha_free, beta_free)) {
            best = {alpha_free, beta_free, system.objective(alpha_free, beta_free)};
            interior = true;
        }
    }
    // det == 0 means singular normal equations: fall through to the boundary
    // enumeration, which is exact for a (possibly degenerate) convex quadratic.
    if (!interior) {
        auto consider = [&](double alpha, double beta) {
            detail::candidate c{alpha, beta, system.objective(alpha, beta)};
            if (detail::better(c, best)) best = c;
        };
        auto clamp = [](double v, double lo, double hi) { return std::min(std::max(v, lo), hi); };

        // Edges with alpha fixed: the free beta minimises a 1-D parabola.
        for (double alpha : {box.alpha_min, box.alpha_max}) {
            const double beta_vertex = (cb - sab * alpha) / sbb;
            consider(alpha, clamp(beta_vertex, box.beta_min, box.beta_max));
        }
        // Edges with beta fixed.
        for (double beta : {box.beta_min, box.beta_max}) {
            const double alpha_vertex = (ca - sab * beta) / saa;
            consider(clamp(alpha_vertex, box.alpha_min, box.alpha_max), beta);
        }
        // Corners (mostly redundant with the clamped edges; kept explicit).
        consider(box.alpha_min, box.beta_min);
        consider(box.alpha_min, box.beta_max);
        consider(box.alpha_max, box.beta_min);
        consider(box.alpha_max, box.beta_max);
    }

    rate_estimate result;
    result.alpha = best.alpha;
    result.beta = best.beta;
    result.residual_norm = best.objective;
    result.active.alpha_lower = best.alpha == box.alpha_min;
    result.active.alpha_upper = best.alpha == box.alpha_max;
    result.active.beta_lower = best.beta == box.beta_min;
    result.active.beta_upper = best.beta == box.beta_max;
    return result;
}

/// Fits every day in [t_start, t_end], each from its own window. Windows are
/// independent, so fits may run on several threads; results are identical to
/// the sequential order regardless of thread count.
inline std::vector<rate_estimate> estimate_series(const dataset& data, const model_params& params,
                                                  long t_start, long t_end,
                                                  const window_config& config = {},
                                                  const bounds& box = {}, unsigned threads = 1) {
    if (t_end < t_start)
        throw error(errc::invalid_argument, "estimate_series: empty day range");

    const std::size_t n = static_cast<std::size_t>(t_end - t_start) + 1;
    std::vector<rate_estimate> out(n);

    auto fit_one = [&](std::size_t i) {
        const long t = t_start + static_cast<long>(i);
        try {
            out[i] = solve_box_ls(build_system(data, params, t, config), box);
        } catch (error& e) {
            if (!e.day()) e.with_day(t);
            throw;
        }
        out[i].day = t;
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n));

    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fit_one(i);
        return out;
    }

    // First failing day wins, independent of thread interleaving.
    std::vector<std::exception_ptr> failures(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned k = 0; k < threads; ++k) {
        pool.emplace_back([&, k] {
            for (std::size_t i = k; i < n; i += threads) {
                try {
                    fit_one(i);
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (std::size_t i = 0; i < n; ++i)
        if (failures[i]) std::rethrow_exception(failures[i]);
    return out;
}

/// The cheap single-day proxy estimate (previous day's recovered and
/// infected counts over the initial population). Kept for comparison; it is
/// not a substitute for the windowed fit.
inline std::pair<double, double> naive_rates(double infected_prev, double recovered_prev,
                                             double population0) {
    if (!(population0 > 0.0))
        throw error(errc::invalid_argument, "naive_rates: population must be positive");
    if (infected_prev < 0.0 || recovered_prev < 0.0)
        throw error(errc::invalid_argument, "naive_rates: counts must be non-negative");
    return {recovered_prev / population0, infected_prev / population0};
}

} // namespace ppkm

#endif
