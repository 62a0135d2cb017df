#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ising/numeric.hpp"
#include "ising/parallel.hpp"

namespace ising {

// Point in the domain of the zero-temperature bound: freezing probability
// alpha and reweighting base z.
struct InterpPoint {
    double alpha;
    double z;

    InterpPoint(double alpha_, double z_) : alpha(alpha_), z(z_) {
        if (!(alpha > 0.0 && alpha <= 0.5))
            throw std::invalid_argument("InterpPoint: alpha must be in (0, 1/2]");
        if (!(z > 0.0 && z < 1.0)) throw std::invalid_argument("InterpPoint: z must be in (0, 1)");
    }
};

// Right-stochastic band matrix of the reflected walk: boundary rows push to
// the single interior neighbour, interior rows split 1/2 each way.
struct BandMatrix {
    int d;
    std::vector<double> m;  // (d+1) x (d+1), row-major

    double at(int i, int j) const { return m[std::size_t(i) * std::size_t(d + 1) + std::size_t(j)]; }
    double& at(int i, int j) { return m[std::size_t(i) * std::size_t(d + 1) + std::size_t(j)]; }
};

inline BandMatrix band_matrix(int d) {
    if (d < 2) throw std::invalid_argument("band_matrix: d must be >= 2");
    BandMatrix bm;
    bm.d = d;
    bm.m.assign(std::size_t(d + 1) * std::size_t(d + 1), 0.0);
    bm.at(0, 1) = 1.0;
    bm.at(d, d - 1) = 1.0;
    for (int i = 1; i < d; ++i) {
        bm.at(i, i - 1) = 0.5;
        bm.at(i, i + 1) = 0.5;
    }
    return bm;
}

// Joint law of (number of moves, final position) of a d-step lazy walk on
// {0..d} reflected at 0: each step moves with probability 2*alpha, and a
// move from the interior goes up or down with equal probability.
// p(k, i) = Pr[R_1 + R_-1 = k and |R_1 - R_-1| = i - 1] for the multinomial
// step counts (R_1, R_-1, R_0).
struct WalkDistribution {
    int d;
    double alpha;
    std::vector<double> p;  // (d+1) x (d+1): moves k, position index i-1

    double at(int k, int pos) const {
        return p[std::size_t(k) * std::size_t(d + 1) + std::size_t(pos)];
    }
    double& at(int k, int pos) { return p[std::size_t(k) * std::size_t(d + 1) + std::size_t(pos)]; }
};

inline WalkDistribution walk_distribution(int d, double alpha) {
    if (d < 2) throw std::invalid_argument("walk_distribution: d must be >= 2");
    if (!(alpha >= 0.0 && alpha <= 0.5))
        throw std::invalid_argument("walk_distribution: alpha must be in [0, 1/2]");
    WalkDistribution w;
    w.d = d;
    w.alpha = alpha;
    w.p.assign(std::size_t(d + 1) * std::size_t(d + 1), 0.0);
    w.at(0, 0) = 1.0;
    std::vector<double> next(w.p.size());
    for (int step = 0; step < d; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int k = 0; k <= step; ++k) {
            for (int pos = 0; pos <= step; ++pos) {
                const double mass = w.at(k, pos);
                if (mass == 0.0) continue;
                next[std::size_t(k) * std::size_t(d + 1) + std::size_t(pos)] +=
                    (1.0 - 2.0 * alpha) * mass;
                if (pos == 0) {
                    next[std::size_t(k + 1) * std::size_t(d + 1) + 1] += 2.0 * alpha * mass;
                } else if (pos == d) {
                    next[std::size_t(k + 1) * std::size_t(d + 1) + std::size_t(d - 1)] +=
                        2.0 * alpha * mass;
                } else {
                    next[std::size_t(k + 1) * std::size_t(d + 1) + std::size_t(pos + 1)] +=
                        alpha * mass;
                    next[std::size_t(k + 1) * std::size_t(d + 1) + std::size_t(pos - 1)] +=
                        alpha * mass;
                }
            }
        }
        w.p.swap(next);
    }
    return w;
}

inline double walk_min_moment(const WalkDistribution& w, double z) {
    if (!(z > 0.0 && z <= 1.0)) throw std::domain_error("walk_min_moment: z must be in (0, 1]");
    const int d = w.d;
    // k - (i-1) is twice the number of cancelled moves, so the summand is
    // sqrt(z)^(k-pos) with even exponent.
    std::vector<double> sqrt_z_pow(std::size_t(d) + 1);
    const double sz = std::sqrt(z);
    sqrt_z_pow[0] = 1.0;
    for (int j = 1; j <= d; ++j) sqrt_z_pow[j] = sqrt_z_pow[j - 1] * sz;
    double s = 0.0;
    for (int k = 0; k <= d; ++k)
        for (int pos = 0; pos <= k; ++pos) {
            const double mass = w.at(k, pos);
            if (mass != 0.0) s += mass * sqrt_z_pow[k - pos];
        }
    return s;
}

// E[z^(R_1 /\ R_-1)] with (R_1, R_-1, R_0) ~ multinomial(d; alpha, alpha, 1-2 alpha),
// computed by the reflected-walk dynamic program. Independent of the matrix path.
inline double walk_min_moment(int d, double alpha, double z) {
    return walk_min_moment(walk_distribution(d, alpha), z);
}

// The same moment through the band-matrix product: with A = (1-2a) Id + 2a sqrt(z) M,
// the first row of A^d paired against (1, z^-1/2, ..., z^-d/2). Kept as a
// cross-check for the walk path; all entries are nonnegative so there is no
// cancellation, only dynamic range.
inline double matrix_min_moment(int d, double alpha, double z) {
    if (!(alpha >= 0.0 && alpha <= 0.5))
        throw std::domain_error("matrix_min_moment: alpha must be in [0, 1/2]");
    if (!(z > 0.0 && z <= 1.0)) throw std::domain_error("matrix_min_moment: z must be in (0, 1]");
    const BandMatrix bm = band_matrix(d);
    const double t = std::sqrt(z);
    std::vector<double> row(std::size_t(d) + 1, 0.0), next(std::size_t(d) + 1);
    row[0] = 1.0;
    for (int step = 0; step < d; ++step) {
        for (int j = 0; j <= d; ++j) {
            double acc = (1.0 - 2.0 * alpha) * row[std::size_t(j)];
            for (int i = std::max(0, j - 1); i <= std::min(d, j + 1); ++i)
                acc += 2.0 * alpha * t * bm.at(i, j) * row[std::size_t(i)];
            next[std::size_t(j)] = acc;
        }
        row.swap(next);
    }
    double s = 0.0;
    double xi = 1.0;
    for (int i = 0; i <= d; ++i) {
        s += row[std::size_t(i)] * xi;
        xi /= t;
    }
    return s;
}

// Zero-temperature functional
//   F_d(alpha, z) = -log E[z^(R_1 /\ R_-1)] / log z + d log(1 - 2a^2 + 2a^2 z) / (2 log z).
// Evaluated through the walk program; F_2 is identically zero.
inline double f_interp(int d, const InterpPoint& point) {
    if (d < 2) throw std::invalid_argument("f_interp: d must be >= 2");
    if (!(point.z > 1e-9 && point.z < 1.0 - 1e-9))
        throw std::domain_error("f_interp: z too close to 0 or 1");
    const double logz = std::log(point.z);
    const double moment = walk_min_moment(d, point.alpha, point.z);
    const double a2 = point.alpha * point.alpha;
    return -std::log(moment) / logz +
           double(d) * std::log(1.0 - 2.0 * a2 + 2.0 * a2 * point.z) / (2.0 * logz);
}

// Finite-temperature functional phi_{beta,y} on the frozen-field family:
//   (1/y) log E[X1^y] - (d/2y) log E[X2^y],
// with E[X2^y] in closed form and E[X1^y] an exact multinomial sum over the
// hard-field counts, accumulated in log space. With y = -log(z)/beta this
// converges to F_d(alpha, z) as beta grows.
inline double finite_beta_functional(int d, double beta, double y, double alpha) {
    if (d < 2) throw std::invalid_argument("finite_beta_functional: d must be >= 2");
    if (!(y > 0.0)) throw std::domain_error("finite_beta_functional: y must be > 0");
    if (!(beta > 0.0)) throw std::domain_error("finite_beta_functional: beta must be > 0");
    if (!(alpha >= 0.0 && alpha <= 0.5))
        throw std::domain_error("finite_beta_functional: alpha must be in [0, 1/2]");

    const double eb = std::exp(-beta);
    const double soft = 0.5 * (1.0 + eb);
    const double ex2 = 2.0 * alpha * alpha + 2.0 * alpha * alpha * std::exp(-beta * y) +
                       (1.0 - 4.0 * alpha * alpha) * std::pow(soft, y);

    const double log_alpha = alpha > 0.0 ? std::log(alpha) : kNegInf;
    const double log_stay = alpha < 0.5 ? std::log(1.0 - 2.0 * alpha) : kNegInf;
    LogSumExp acc;
    for (int r1 = 0; r1 <= d; ++r1) {
        for (int rm = 0; rm + r1 <= d; ++rm) {
            const int r0 = d - r1 - rm;
            if (alpha == 0.0 && r1 + rm > 0) continue;
            if (alpha == 0.5 && r0 > 0) continue;
            double lt = std::lgamma(double(d) + 1.0) - std::lgamma(double(r1) + 1.0) -
                        std::lgamma(double(rm) + 1.0) - std::lgamma(double(r0) + 1.0);
            if (r1 + rm > 0) lt += double(r1 + rm) * log_alpha;
            if (r0 > 0) lt += double(r0) * log_stay;
            const int lo = std::min(r1, rm), hi = std::max(r1, rm);
            const double log_pair = -beta * lo + std::log1p(std::exp(-beta * double(hi - lo)));
            lt += y * log_pair + y * double(r0) * std::log(soft);
            acc.add(lt);
        }
    }
    return acc.value() / y - 0.5 * double(d) / y * std::log(ex2);
}

struct InterpOptimum {
    InterpPoint best{0.25, 0.5};
    double f_star = 0.0;
    bool refinement_improved = true;  // false flags a coarse-grid-only result
    bool on_alpha_boundary = false;   // optimum landed on alpha = 1/2
};

// Deterministic grid scan over (alpha, z] followed by compass refinement.
// Ties break lexicographically on (alpha, z), so the result is independent
// of the worker count.
inline InterpOptimum optimize_interp(int d, int grid_resolution = 256, double refine_tol = 1e-10,
                                     unsigned workers = 0) {
    if (d < 3) throw std::invalid_argument("optimize_interp: d must be >= 3");
    if (grid_resolution < 32) throw std::invalid_argument("optimize_interp: grid_resolution < 32");
    if (!(refine_tol > 0.0)) throw std::invalid_argument("optimize_interp: refine_tol <= 0");

    const double z_lo = 1e-6, z_hi = 1.0 - 1e-6;
    const double alpha_min = 1e-9;

    struct Cell {
        double f, alpha, z;
        bool better_than(const Cell& o) const {
            if (f != o.f) return f < o.f;
            if (alpha != o.alpha) return alpha < o.alpha;
            return z < o.z;
        }
    };

    std::vector<Cell> row_best(static_cast<std::size_t>(grid_resolution));
    parallel_for(std::size_t(grid_resolution), workers, [&](std::size_t idx) {
        const int i = int(idx) + 1;
        const double alpha = 0.5 * double(i) / double(grid_resolution);
        const WalkDistribution w = walk_distribution(d, alpha);
        Cell best{std::numeric_limits<double>::infinity(), alpha, z_lo};
        for (int j = 1; j <= grid_resolution; ++j) {
            const double z = z_lo + (z_hi - z_lo) * double(j) / double(grid_resolution + 1);
            const double logz = std::log(z);
            const double a2 = alpha * alpha;
            const double f = -std::log(walk_min_moment(w, z)) / logz +
                             double(d) * std::log(1.0 - 2.0 * a2 + 2.0 * a2 * z) / (2.0 * logz);
            const Cell c{f, alpha, z};
            if (c.better_than(best)) best = c;
        }
        row_best[idx] = best;
    });
    Cell best = row_best[0];
    for (const Cell& c : row_best)
        if (c.better_than(best)) best = c;
    const double grid_min = best.f;

    const auto eval = [&](double alpha, double z) {
        return f_interp(d, InterpPoint(alpha, z));
    };
    double step_a = 0.5 / double(grid_resolution);
    double step_z = (z_hi - z_lo) / double(grid_resolution + 1);
    int budget = 200000;  // hard stop; the compass loop converges in ~1e3 probes
    while ((step_a > refine_tol || step_z > refine_tol) && (budget -= 4) > 0) {
        Cell candidate = best;
        const double probes[4][2] = {{best.alpha + step_a, best.z},
                                     {best.alpha - step_a, best.z},
                                     {best.alpha, best.z + step_z},
                                     {best.alpha, best.z - step_z}};
        for (const auto& pr : probes) {
            const double a = std::clamp(pr[0], alpha_min, 0.5);
            const double z = std::clamp(pr[1], z_lo, z_hi);
            const Cell c{eval(a, z), a, z};
            if (c.better_than(candidate)) candidate = c;
        }
        if (candidate.better_than(best)) {
            best = candidate;
        } else {
            step_a *= 0.5;
            step_z *= 0.5;
        }
    }

    InterpOptimum out;
    out.best = InterpPoint(best.alpha, best.z);
    out.f_star = best.f;
    out.refinement_improved = best.f < grid_min;
    out.on_alpha_boundary = best.alpha >= 0.5;
    return out;
}

struct MaxcutBound {
    double bound;  // fraction of edges
    InterpOptimum optimum;
};

// Fraction-of-edges upper bound 1 + (2/d) inf F_d.
inline MaxcutBound maxcut_upper_bound(int d, int grid_resolution = 256,
                                      double refine_tol = 1e-10, unsigned workers = 0) {
    MaxcutBound r{0.0, optimize_interp(d, grid_resolution, refine_tol, workers)};
    r.bound = 1.0 + 2.0 * r.optimum.f_star / double(d);
    return r;
}

}  // namespace ising
