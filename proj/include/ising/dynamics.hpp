#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ising/graphs.hpp"
#include "ising/numeric.hpp"
#include "ising/parallel.hpp"
#include "ising/rng.hpp"

namespace ising {

// Flattened neighbour lists with multiplicity, loops dropped. Loops never
// move under single-site dynamics, so they are excluded once up front.
struct Adjacency {
    int n = 0;
    std::vector<std::int32_t> offset;  // n+1 entries
    std::vector<std::int32_t> flat;

    static Adjacency build(const HalfEdgeGraph& g) {
        Adjacency adj;
        adj.n = g.n;
        std::vector<int> deg(std::size_t(g.n), 0);
        g.for_each_edge([&](int c, int p) {
            const int v = g.vertex_of(c), w = g.vertex_of(p);
            if (v != w) {
                ++deg[std::size_t(v)];
                ++deg[std::size_t(w)];
            }
        });
        adj.offset.assign(std::size_t(g.n) + 1, 0);
        for (int v = 0; v < g.n; ++v) adj.offset[std::size_t(v) + 1] = adj.offset[std::size_t(v)] + deg[std::size_t(v)];
        adj.flat.resize(std::size_t(adj.offset.back()));
        std::vector<int> cursor(adj.offset.begin(), adj.offset.end() - 1);
        g.for_each_edge([&](int c, int p) {
            const int v = g.vertex_of(c), w = g.vertex_of(p);
            if (v != w) {
                adj.flat[std::size_t(cursor[std::size_t(v)]++)] = std::int32_t(w);
                adj.flat[std::size_t(cursor[std::size_t(w)]++)] = std::int32_t(v);
            }
        });
        return adj;
    }

    std::span<const std::int32_t> neighbours(int v) const {
        return {flat.data() + offset[std::size_t(v)],
                std::size_t(offset[std::size_t(v) + 1] - offset[std::size_t(v)])};
    }
};

struct ChainState {
    SpinConfig sigma;
    std::int64_t sweep_count = 0;
    Rng rng;

    ChainState(int n, Rng rng_) : sigma(std::size_t(n)), rng(rng_) {
        for (auto& s : sigma) s = std::int8_t(rng.spin());
    }
};

// One heat-bath sweep: n single-site updates in a fresh uniform random
// order. Site v is set to +1 with probability 1/(1+exp(beta (a+ - a-)))
// where a_s counts incident non-loop edge endpoints with the other end at
// spin s. The Boltzmann measure is stationary for this kernel.
inline void glauber_sweep(const Adjacency& adj, double beta, ChainState& state) {
    if (!(beta >= 0.0)) throw std::invalid_argument("glauber_sweep: beta must be >= 0");
    const int n = adj.n;
    std::vector<std::int32_t> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[std::size_t(i)] = i;
    state.rng.shuffle(order);
    for (int v : order) {
        int field = 0;  // a+ - a-
        for (int w : adj.neighbours(v)) field += state.sigma[std::size_t(w)];
        const double p_plus = 1.0 / (1.0 + std::exp(beta * double(field)));
        state.sigma[std::size_t(v)] = state.rng.uniform() < p_plus ? std::int8_t(1) : std::int8_t(-1);
    }
    ++state.sweep_count;
}

inline void glauber_sweep(const HalfEdgeGraph& g, double beta, ChainState& state) {
    glauber_sweep(Adjacency::build(g), beta, state);
}

struct OverlapEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    int pairs = 0;
};

// Monte-Carlo estimate of E|sigma . sigma'| / n between paired independent
// chains. Each pair burns the first half of its sweeps and averages the
// absolute overlap over the second half; mean and standard error are taken
// across pairs, which are independent by construction.
inline OverlapEstimate estimate_overlap(const HalfEdgeGraph& g, double beta, int replicas,
                                        int sweeps, std::uint64_t seed, unsigned workers = 0) {
    if (replicas < 2 || replicas % 2 != 0)
        throw std::invalid_argument("estimate_overlap: replicas must be even and >= 2");
    if (sweeps < 2) throw std::invalid_argument("estimate_overlap: sweeps must be >= 2");
    const Adjacency adj = Adjacency::build(g);
    const int pairs = replicas / 2;
    std::vector<double> pair_mean(static_cast<std::size_t>(pairs));
    parallel_for(std::size_t(pairs), workers, [&](std::size_t r) {
        ChainState a(g.n, Rng::substream(seed, 2 * r));
        ChainState b(g.n, Rng::substream(seed, 2 * r + 1));
        const int burn = sweeps / 2;
        for (int t = 0; t < burn; ++t) {
            glauber_sweep(adj, beta, a);
            glauber_sweep(adj, beta, b);
        }
        double acc = 0.0;
        int samples = 0;
        for (int t = burn; t < sweeps; ++t) {
            glauber_sweep(adj, beta, a);
            glauber_sweep(adj, beta, b);
            std::int64_t dot = 0;
            for (int v = 0; v < g.n; ++v)
                dot += int(a.sigma[std::size_t(v)]) * int(b.sigma[std::size_t(v)]);
            acc += std::abs(double(dot)) / double(g.n);
            ++samples;
        }
        pair_mean[r] = acc / double(samples);
    });
    const MeanStderr ms = mean_stderr(pair_mean);
    return {ms.mean, ms.stderr_, pairs};
}

struct LocalSearchResult {
    std::int64_t cut = 0;
    SpinConfig sigma;
};

// Random-restart greedy single-flip ascent on the cut size. At a local
// maximum every vertex has at least as many opposite-spin as same-spin
// neighbours, so the cut is at least (m - loops)/2.
inline LocalSearchResult local_search_maxcut(const HalfEdgeGraph& g, int restarts,
                                             std::uint64_t seed) {
    if (restarts < 1) throw std::invalid_argument("local_search_maxcut: restarts must be >= 1");
    const Adjacency adj = Adjacency::build(g);
    LocalSearchResult best;
    best.cut = -1;
    for (int r = 0; r < restarts; ++r) {
        Rng rng = Rng::substream(seed, std::uint64_t(r));
        SpinConfig sigma(static_cast<std::size_t>(g.n));
        for (auto& s : sigma) s = std::int8_t(rng.spin());
        std::vector<std::int32_t> order(static_cast<std::size_t>(g.n));
        for (int i = 0; i < g.n; ++i) order[std::size_t(i)] = i;
        bool moved = true;
        while (moved) {
            moved = false;
            rng.shuffle(order);
            for (int v : order) {
                int field = 0;
                for (int w : adj.neighbours(v)) field += sigma[std::size_t(w)];
                // flipping v changes the cut by sigma_v * field
                if (int(sigma[std::size_t(v)]) * field > 0) {
                    sigma[std::size_t(v)] = std::int8_t(-sigma[std::size_t(v)]);
                    moved = true;
                }
            }
        }
        const std::int64_t cut = cut_size(g, sigma);
        if (cut > best.cut) {
            best.cut = cut;
            best.sigma = std::move(sigma);
        }
    }
    return best;
}

}  // namespace ising
