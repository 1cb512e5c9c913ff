#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

namespace anlab {

struct NelderMeadOptions {
    double tol_x = 1e-4;    ///< max vertex distance (inf-norm) from the best vertex
    double tol_f = 1e-4;    ///< max objective spread across the simplex
    int max_iterations = 400;
    int max_evaluations = 400;
    double initial_step = 0.5;
};

template <std::size_t N>
struct NelderMeadResult {
    std::array<double, N> x;
    double value;
    int iterations;
    int evaluations;
    bool converged;
};

/// Unconstrained downhill simplex minimization with the standard
/// reflection / expansion / contraction / shrink coefficients (1, 2, 1/2, 1/2).
/// Terminates when both the simplex diameter and the objective spread fall
/// below their tolerances, or when the iteration/evaluation budget runs out.
/// Non-finite objective values are treated as +infinity.
template <std::size_t N, class F>
NelderMeadResult<N> nelder_mead(F&& f, const std::array<double, N>& x0,
                                const NelderMeadOptions& opt = {}) {
    using Point = std::array<double, N>;
    constexpr double rho = 1.0, chi = 2.0, psi = 0.5, shrink = 0.5;

    int evals = 0;
    auto eval = [&](const Point& p) {
        ++evals;
        const double v = f(p);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::array<Point, N + 1> simplex;
    std::array<double, N + 1> values;
    simplex[0] = x0;
    values[0] = eval(x0);
    for (std::size_t i = 0; i < N; ++i) {
        simplex[i + 1] = x0;
        simplex[i + 1][i] += opt.initial_step;
        values[i + 1] = eval(simplex[i + 1]);
    }

    std::array<std::size_t, N + 1> order;
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        auto s = simplex;
        auto v = values;
        for (std::size_t i = 0; i <= N; ++i) {
            simplex[i] = s[order[i]];
            values[i] = v[order[i]];
        }
    };

    auto along = [&](const Point& centroid, const Point& worst, double t) {
        Point p;
        for (std::size_t k = 0; k < N; ++k) p[k] = centroid[k] + t * (centroid[k] - worst[k]);
        return p;
    };

    auto converged = [&] {
        double fspread = 0.0, xspread = 0.0;
        for (std::size_t i = 1; i <= N; ++i) {
            fspread = std::max(fspread, std::abs(values[i] - values[0]));
            for (std::size_t k = 0; k < N; ++k)
                xspread = std::max(xspread, std::abs(simplex[i][k] - simplex[0][k]));
        }
        return fspread <= opt.tol_f && xspread <= opt.tol_x;
    };

    sort_simplex();
    int it = 0;
    bool done = converged();
    while (!done && it < opt.max_iterations && evals < opt.max_evaluations) {
        ++it;
        Point centroid{};
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k) centroid[k] += simplex[i][k] / N;
        const Point& worst = simplex[N];

        const Point xr = along(centroid, worst, rho);
        const double fr = eval(xr);
        bool do_shrink = false;
        if (fr < values[0]) {
            const Point xe = along(centroid, worst, rho * chi);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[N] = xe;
                values[N] = fe;
            } else {
                simplex[N] = xr;
                values[N] = fr;
            }
        } else if (fr < values[N - 1]) {
            simplex[N] = xr;
            values[N] = fr;
        } else if (fr < values[N]) {
            const Point xc = along(centroid, worst, psi * rho);
            const double fc = eval(xc);
            if (fc <= fr) {
                simplex[N] = xc;
                values[N] = fc;
            } else {
                do_shrink = true;
            }
        } else {
            const Point xcc = along(centroid, worst, -psi);
            const double fcc = eval(xcc);
            if (fcc < values[N]) {
                simplex[N] = xcc;
                values[N] = fcc;
            } else {
                do_shrink = true;
            }
        }
        if (do_shrink) {
            for (std::size_t i = 1; i <= N; ++i) {
                for (std::size_t k = 0; k < N; ++k)
                    simplex[i][k] = simplex[0][k] + shrink * (simplex[i][k] - simplex[0][k]);
                values[i] = eval(simplex[i]);
            }
        }
        sort_simplex();
        done = converged();
    }
    return {simplex[0], values[0], it, evals, done};
}

}  // namespace anlab
