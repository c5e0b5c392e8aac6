#ifndef PPKM_TESTS_GRID_ORACLE_HPP
#define PPKM_TESTS_GRID_ORACLE_HPP

#include <cstddef>
#include <cmath>
#include <vector>

// Independent grid-search oracle for the 2-variable box least squares.
//
// Scans every alpha on the grid; along one alpha-line the objective is a
// 1-D parabola in beta, so the best grid beta on that line is one of the two
// grid neighbours of the line's vertex (or a clamped end). This visits the
// same argmin as the full two-dimensional scan at a fraction of the cost and
// shares no code with the solver under test: objectives are evaluated by
// direct residual summation, never via normal equations.
namespace oracle {

struct system2 {
    std::vector<double> alpha_coef;
    std::vector<double> beta_coef;
    std::vector<double> target;
};

struct point {
    double alpha = 0.0;
    double beta = 0.0;
    double objective = 0.0;
};

inline double objective(const system2& sys, double alpha, double beta) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sys.target.size(); ++i) {
        const double r = sys.alpha_coef[i] * alpha + sys.beta_coef[i] * beta - sys.target[i];
        sum += r * r;
    }
    return sum;
}

inline point grid_search(const system2& sys, double step = 1e-4, double lo = 0.0, double hi = 1.0) {
    const long cells = std::lround((hi - lo) / step);
    point best{lo, lo, objective(sys, lo, lo)};

    auto consider = [&](double alpha, double beta) {
        const double f = objective(sys, alpha, beta);
        if (f < best.objective ||
            (f == best.objective &&
             (alpha < best.alpha || (alpha == best.alpha && beta < best.beta))))
            best = {alpha, beta, f};
    };

    for (long i = 0; i <= cells; ++i) {
        const double alpha = lo + static_cast<double>(i) * step;
        // 1-D least squares along this alpha-line, from the residual columns.
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < sys.target.size(); ++k) {
            const double r = sys.alpha_coef[k] * alpha - sys.target[k];
            num -= r * sys.beta_coef[k];
            den += sys.beta_coef[k] * sys.beta_coef[k];
        }
        if (den == 0.0) {
            consider(alpha, lo);
            continue;
        }
        const double vertex = num / den;
        long j = static_cast<long>(std::floor((vertex - lo) / step));
        for (long dj = 0; dj <= 1; ++dj) {
            long jj = j + dj;
            if (jj < 0) jj = 0;
            if (jj > cells) jj = cells;
            consider(alpha, lo + static_cast<double>(jj) * step);
        }
        consider(alpha, lo);
        consider(alpha, hi);
    }
    return best;
}

// Exhaustive 2-D scan, only affordable on coarse grids; used to validate
// grid_search itself.
inline point full_scan(const system2& sys, double step, double lo = 0.0, double hi = 1.0) {
    const long cells = std::lround((hi - lo) / step);
    point best{lo, lo, objective(sys, lo, lo)};
    for (long i = 0; i <= cells; ++i)
        for (long j = 0; j <= cells; ++j) {
            const double alpha = lo + static_cast<double>(i) * step;
            const double beta = lo + static_cast<double>(j) * step;
            const double f = objective(sys, alpha, beta);
            if (f < best.objective ||
                (f == best.objective &&
                 (alpha < best.alpha || (alpha == best.alpha && beta < best.beta))))
                best = {alpha, beta, f};
        }
    return best;
}

} // namespace oracle

#endif
