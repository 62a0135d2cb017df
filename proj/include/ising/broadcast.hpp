#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ising/numeric.hpp"
#include "ising/parallel.hpp"
#include "ising/rng.hpp"

namespace ising {

// Spins on the depth-ell tree whose root has d children and every other
// internal node d-1 children, stored level by level.
struct BroadcastTree {
    int d = 0;
    int depth = 0;
    std::vector<std::int64_t> level_offset;  // depth+2 entries into spins
    std::vector<std::int8_t> spins;

    std::int64_t level_size(int level) const {
        return level_offset[std::size_t(level) + 1] - level_offset[std::size_t(level)];
    }
    std::int8_t spin_at(int level, std::int64_t idx) const {
        return spins[std::size_t(level_offset[std::size_t(level)] + idx)];
    }
    int children_per_node(int level) const { return level == 0 ? d : d - 1; }
};

inline std::int64_t broadcast_node_count(int d, int depth) {
    // 1 + d ((d-1)^depth - 1)/(d-2)
    std::int64_t total = 1, width = 1;
    for (int level = 1; level <= depth; ++level) {
        width *= (level == 1 ? d : d - 1);
        total += width;
        if (total > 100'000'000) throw std::invalid_argument("broadcast tree exceeds 1e8 nodes");
    }
    return total;
}

// Root spin uniform; every child keeps its parent's spin with probability
// e^-beta/(1+e^-beta) and flips otherwise, independently.
inline BroadcastTree sample_broadcast(int d, int depth, double beta, std::uint64_t seed) {
    if (d < 3) throw std::invalid_argument("sample_broadcast: d must be >= 3");
    if (depth < 1) throw std::invalid_argument("sample_broadcast: depth must be >= 1");
    if (!(beta >= 0.0)) throw std::invalid_argument("sample_broadcast: beta must be >= 0");
    broadcast_node_count(d, depth);

    BroadcastTree t;
    t.d = d;
    t.depth = depth;
    t.level_offset.assign(std::size_t(depth) + 2, 0);
    std::int64_t width = 1;
    for (int level = 0; level <= depth; ++level) {
        t.level_offset[std::size_t(level) + 1] = t.level_offset[std::size_t(level)] + width;
        width *= (level == 0 ? d : d - 1);
    }
    t.spins.resize(std::size_t(t.level_offset.back()));

    Rng rng(seed);
    const double keep = std::exp(-beta) / (1.0 + std::exp(-beta));
    t.spins[0] = std::int8_t(rng.spin());
    for (int level = 1; level <= depth; ++level) {
        const int fanout = t.children_per_node(level - 1);
        const std::int64_t parent_base = t.level_offset[std::size_t(level) - 1];
        const std::int64_t base = t.level_offset[std::size_t(level)];
        for (std::int64_t i = 0; i < t.level_size(level); ++i) {
            const std::int8_t parent = t.spins[std::size_t(parent_base + i / fanout)];
            t.spins[std::size_t(base + i)] =
                rng.uniform() < keep ? parent : std::int8_t(-parent);
        }
    }
    return t;
}

// Exact Pr[root = +1 | spins on the depth-ell boundary], by an upward
// sum-product pass with pairwise weight e^-beta on equal spins and 1
// otherwise. Spins at interior levels are ignored; messages are kept in
// log scale so deep trees do not underflow.
inline double root_posterior(const BroadcastTree& t, double beta) {
    const int depth = t.depth;
    // log-messages (to the parent) for +1 and -1 parent spin
    std::vector<double> up(std::size_t(t.level_size(depth)) * 2);
    for (std::int64_t i = 0; i < t.level_size(depth); ++i) {
        const std::int8_t s = t.spin_at(depth, i);
        up[std::size_t(2 * i)] = (s == 1) ? -beta : 0.0;
        up[std::size_t(2 * i) + 1] = (s == -1) ? -beta : 0.0;
    }
    for (int level = depth - 1; level >= 1; --level) {
        const int fanout = t.children_per_node(level);
        std::vector<double> next(std::size_t(t.level_size(level)) * 2);
        for (std::int64_t i = 0; i < t.level_size(level); ++i) {
            double sum_plus = 0.0, sum_minus = 0.0;  // over children, per own spin
            for (int c = 0; c < fanout; ++c) {
                sum_plus += up[std::size_t(2 * (i * fanout + c))];
                sum_minus += up[std::size_t(2 * (i * fanout + c)) + 1];
            }
            for (int parent_spin = 0; parent_spin < 2; ++parent_spin) {
                const double w_plus = (parent_spin == 0) ? -beta : 0.0;
                const double w_minus = (parent_spin == 1) ? -beta : 0.0;
                const double a = w_plus + sum_plus;
                const double b = w_minus + sum_minus;
                const double m = std::max(a, b);
                next[std::size_t(2 * i) + std::size_t(parent_spin)] =
                    m + std::log(std::exp(a - m) + std::exp(b - m));
            }
        }
        up.swap(next);
    }
    double log_plus = 0.0, log_minus = 0.0;
    for (std::int64_t c = 0; c < t.level_size(1); ++c) {
        log_plus += up[std::size_t(2 * c)];
        log_minus += up[std::size_t(2 * c) + 1];
    }
    return 1.0 / (1.0 + std::exp(log_minus - log_plus));
}

struct ReconstructionEstimate {
    double mean_abs_bias = 0.0;
    double stderr_ = 0.0;
    int trials = 0;
};

// Monte-Carlo estimate of E|Pr[root = +1 | boundary] - 1/2|.
inline ReconstructionEstimate reconstruction_error(int d, double beta, int depth, int trials,
                                                   std::uint64_t seed, unsigned workers = 0) {
    if (trials < 100) throw std::invalid_argument("reconstruction_error: trials must be >= 100");
    std::vector<double> bias(static_cast<std::size_t>(trials));
    parallel_for(std::size_t(trials), workers, [&](std::size_t i) {
        Rng sub = Rng::substream(seed, i);
        const BroadcastTree t = sample_broadcast(d, depth, beta, sub.next_u64());
        bias[i] = std::abs(root_posterior(t, beta) - 0.5);
    });
    const MeanStderr ms = mean_stderr(bias);
    return {ms.mean, ms.stderr_, trials};
}

}  // namespace ising
