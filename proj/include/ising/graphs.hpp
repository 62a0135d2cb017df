#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ising/analytic.hpp"
#include "ising/numeric.hpp"
#include "ising/rng.hpp"

namespace ising {

using SpinConfig = std::vector<std::int8_t>;  // entries +-1

// d-regular multigraph as a perfect matching on the n*d vertex clones.
// Clone c of vertex v has index v*d + c; pairing is an involution without
// fixed points. Loops and multi-edges are first-class.
struct HalfEdgeGraph {
    int n = 0;
    int d = 0;
    std::vector<std::int32_t> pairing;

    int clones() const { return n * d; }
    int edge_count() const { return n * d / 2; }
    int vertex_of(int clone) const { return clone / d; }

    void validate() const {
        if (int(pairing.size()) != clones())
            throw std::invalid_argument("HalfEdgeGraph: pairing size mismatch");
        for (int c = 0; c < clones(); ++c) {
            const int p = pairing[std::size_t(c)];
            if (p < 0 || p >= clones() || p == c || pairing[std::size_t(p)] != c)
                throw std::invalid_argument("HalfEdgeGraph: pairing is not a fixed-point-free involution");
        }
    }

    // Visits each matched pair once, as (clone, partner) with clone < partner.
    template <typename Fn>
    void for_each_edge(Fn&& fn) const {
        for (int c = 0; c < clones(); ++c) {
            const int p = pairing[std::size_t(c)];
            if (c < p) fn(c, p);
        }
    }
};

inline HalfEdgeGraph sample_configuration_model(int n, int d, Rng& rng) {
    if (n < 2 || d < 1) throw std::invalid_argument("sample_configuration_model: need n >= 2, d >= 1");
    if ((std::int64_t(n) * d) % 2 != 0)
        throw std::invalid_argument("sample_configuration_model: n*d must be even");
    HalfEdgeGraph g;
    g.n = n;
    g.d = d;
    std::vector<std::int32_t> order(std::size_t(n) * std::size_t(d));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = std::int32_t(i);
    rng.shuffle(order);
    g.pairing.assign(order.size(), -1);
    for (std::size_t i = 0; i < order.size(); i += 2) {
        g.pairing[std::size_t(order[i])] = order[i + 1];
        g.pairing[std::size_t(order[i + 1])] = order[i];
    }
    return g;
}

inline HalfEdgeGraph sample_configuration_model(int n, int d, std::uint64_t seed) {
    Rng rng(seed);
    return sample_configuration_model(n, d, rng);
}

struct SimplicityReport {
    bool simple = true;
    int loops = 0;        // matched clone pairs inside one vertex
    int multi_edges = 0;  // distinct vertex pairs joined by more than one edge
};

inline SimplicityReport is_simple(const HalfEdgeGraph& g) {
    SimplicityReport r;
    std::map<std::pair<int, int>, int> mult;
    g.for_each_edge([&](int c, int p) {
        const int v = g.vertex_of(c), w = g.vertex_of(p);
        if (v == w) {
            ++r.loops;
        } else {
            ++mult[{std::min(v, w), std::max(v, w)}];
        }
    });
    for (const auto& [vw, k] : mult)
        if (k > 1) ++r.multi_edges;
    r.simple = (r.loops == 0 && r.multi_edges == 0);
    return r;
}

// Number of unordered pairs of parallel edges, sum of C(mult, 2) over vertex
// pairs. This is the double-edge count whose planted mean is
// (d-1)^2 (1+e^(2 beta)) / (2 (1+e^beta)^2).
inline std::int64_t double_edge_pairs(const HalfEdgeGraph& g) {
    std::map<std::pair<int, int>, std::int64_t> mult;
    g.for_each_edge([&](int c, int p) {
        const int v = g.vertex_of(c), w = g.vertex_of(p);
        if (v != w) ++mult[{std::min(v, w), std::max(v, w)}];
    });
    std::int64_t pairs = 0;
    for (const auto& [vw, k] : mult) pairs += k * (k - 1) / 2;
    return pairs;
}

// Number of monochromatic edges. A self-loop always counts 1.
inline std::int64_t hamiltonian(const HalfEdgeGraph& g, const SpinConfig& sigma) {
    if (int(sigma.size()) != g.n) throw std::invalid_argument("hamiltonian: spin size mismatch");
    std::int64_t h = 0;
    g.for_each_edge([&](int c, int p) {
        if (sigma[std::size_t(g.vertex_of(c))] == sigma[std::size_t(g.vertex_of(p))]) ++h;
    });
    return h;
}

inline std::int64_t cut_size(const HalfEdgeGraph& g, const SpinConfig& sigma) {
    return g.edge_count() - hamiltonian(g, sigma);
}

// Counts configurations by energy with a Gray-code sweep; count[h] is the
// number of spin configurations with exactly h monochromatic edges.
inline std::vector<std::int64_t> energy_histogram(const HalfEdgeGraph& g) {
    if (g.n > 24) throw std::invalid_argument("energy_histogram: n must be <= 24");
    g.validate();
    std::vector<std::vector<int>> nbr(std::size_t(g.n));  // multiplicity included, loops excluded
    g.for_each_edge([&](int c, int p) {
        const int v = g.vertex_of(c), w = g.vertex_of(p);
        if (v != w) {
            nbr[std::size_t(v)].push_back(w);
            nbr[std::size_t(w)].push_back(v);
        }
    });

    std::vector<std::int64_t> count(std::size_t(g.edge_count()) + 1, 0);
    SpinConfig sigma(std::size_t(g.n), 1);
    std::int64_t h = g.edge_count();  // all-equal assignment: every edge monochromatic
    ++count[std::size_t(h)];
    const std::uint64_t total = std::uint64_t(1) << g.n;
    for (std::uint64_t i = 1; i < total; ++i) {
        const int v = __builtin_ctzll(i);  // Gray-code flip position
        for (int w : nbr[std::size_t(v)]) h += (sigma[std::size_t(w)] == sigma[std::size_t(v)]) ? -1 : 1;
        sigma[std::size_t(v)] = std::int8_t(-sigma[std::size_t(v)]);
        ++count[std::size_t(h)];
    }
    return count;
}

// log Z(beta) by exhaustive enumeration, accumulated as log-sum-exp.
inline double exact_partition_function(const HalfEdgeGraph& g, double beta) {
    const auto count = energy_histogram(g);
    LogSumExp acc;
    for (std::size_t h = 0; h < count.size(); ++h)
        if (count[h] > 0) acc.add(std::log(double(count[h])) - beta * double(h));
    return acc.value();
}

inline std::int64_t exact_maxcut(const HalfEdgeGraph& g) {
    const auto count = energy_histogram(g);
    for (std::size_t h = 0; h < count.size(); ++h)
        if (count[h] > 0) return g.edge_count() - std::int64_t(h);
    throw std::logic_error("exact_maxcut: empty histogram");
}

struct PlantedOptions {
    bool balanced_sigma = false;  // condition sigma* on |sum sigma| <= 1
    bool require_simple = false;  // rerun the chain until the graph is simple
    int max_simple_attempts = 1000;
};

struct PlantedSample {
    HalfEdgeGraph g;
    SpinConfig sigma_star;
    std::int64_t accepted_moves = 0;
};

namespace detail {

// One Metropolis pass of nd/2 edge-switch proposals. A proposal picks two
// distinct matched pairs, rewires them one of the two possible ways, and is
// accepted with probability min(1, exp(-beta * delta_H)).
inline std::int64_t planted_sweep(HalfEdgeGraph& g, const SpinConfig& sigma, double beta,
                                  Rng& rng) {
    const int clones = g.clones();
    const double exp_mb[3] = {1.0, std::exp(-beta), std::exp(-2.0 * beta)};
    std::int64_t accepted = 0;
    const auto spin = [&](int clone) { return sigma[std::size_t(g.vertex_of(clone))]; };
    for (int move = 0; move < g.edge_count(); ++move) {
        const int a = int(rng.below(std::uint64_t(clones)));
        const int b = g.pairing[std::size_t(a)];
        int c = int(rng.below(std::uint64_t(clones)));
        if (c == a || c == b) continue;  // same pair: proposal is a no-op
        const int e = g.pairing[std::size_t(c)];
        const bool cross = rng.uniform() < 0.5;
        // rewiring: (a,c)(b,e) or (a,e)(b,c)
        const int na = cross ? c : e;
        const int nb = cross ? e : c;
        const int old_h = int(spin(a) == spin(b)) + int(spin(c) == spin(e));
        const int new_h = int(spin(a) == spin(na)) + int(spin(b) == spin(nb));
        const int delta = new_h - old_h;
        if (delta > 0 && rng.uniform() >= exp_mb[delta]) continue;
        g.pairing[std::size_t(a)] = na;
        g.pairing[std::size_t(na)] = a;
        g.pairing[std::size_t(b)] = nb;
        g.pairing[std::size_t(nb)] = b;
        ++accepted;
    }
    return accepted;
}

}  // namespace detail

// Planted (disassortative block) model: sigma* uniform on {+-1}^n, then a
// matching with stationary law proportional to exp(-beta H(sigma*)), sampled
// by edge-switch MCMC from a uniform matching. One sweep proposes nd/2 moves.
inline PlantedSample sample_planted(int n, int d, double beta, std::uint64_t seed, int sweeps,
                                    const PlantedOptions& opts = {}) {
    if (sweeps < 1) throw std::invalid_argument("sample_planted: sweeps must be >= 1");
    if (!(beta >= 0.0)) throw std::invalid_argument("sample_planted: beta must be >= 0");
    Rng rng(seed);

    PlantedSample out;
    out.sigma_star.resize(std::size_t(n));
    if (opts.balanced_sigma) {
        for (int i = 0; i < n; ++i) out.sigma_star[std::size_t(i)] = (i < n / 2) ? 1 : -1;
        if (n % 2 == 1) out.sigma_star[std::size_t(n / 2)] = std::int8_t(rng.spin());
        rng.shuffle(out.sigma_star);
    } else {
        for (auto& s : out.sigma_star) s = std::int8_t(rng.spin());
    }

    for (int attempt = 0;; ++attempt) {
        out.g = sample_configuration_model(n, d, rng);
        out.accepted_moves = 0;
        for (int s = 0; s < sweeps; ++s) {
            out.accepted_moves += detail::planted_sweep(out.g, out.sigma_star, beta, rng);
#ifndef NDEBUG
            out.g.validate();  // the switch must preserve the perfect matching
#endif
        }
        if (!opts.require_simple || is_simple(out.g).simple) return out;
        if (attempt + 1 >= opts.max_simple_attempts)
            throw std::runtime_error("sample_planted: no simple graph within attempt budget");
    }
}

// log Pr[the matching realizes edge statistics mu] for a spin assignment
// with a rho_1 fraction of + vertices, via binomials and double factorials
// in log-gamma form. Counts must be integral, with even monochromatic
// clone counts.
inline double pairing_event_logprob(int n, int d, double rho1, const EdgeTypeDistribution& mu) {
    mu.validate();
    const double dn = double(n) * double(d);
    const double plus_clones = dn * rho1;
    const double a = dn * mu.mu_pp;
    const double b = dn * mu.mu_mm;
    const double c = dn * mu.mu_pm;
    const auto near_int = [](double x) { return std::abs(x - std::round(x)) < 1e-9; };
    if (!near_int(plus_clones) || !near_int(a) || !near_int(b) || !near_int(c))
        throw std::invalid_argument("pairing_event_logprob: counts must be integral");
    const long P = std::lround(plus_clones), A = std::lround(a), B = std::lround(b),
               C = std::lround(c);
    const long M = std::lround(dn) - P;
    if (A % 2 != 0 || B % 2 != 0)
        throw std::invalid_argument("pairing_event_logprob: monochromatic clone counts must be even");
    if (A + C != P || B + C != M)
        throw std::invalid_argument("pairing_event_logprob: mu inconsistent with rho1");
    return log_binomial(P, A) + log_binomial(M, B) + log_double_factorial_odd(A - 1) +
           log_double_factorial_odd(B - 1) + std::lgamma(double(C) + 1.0) -
           log_double_factorial_odd(std::lround(dn) - 1);
}

// Edge-list text format: header "n d", one "u v" line per edge, 0-based,
// loops as "v v", multi-edges repeated.
inline void write_edge_list(const HalfEdgeGraph& g, std::ostream& os) {
    os << g.n << ' ' << g.d << '\n';
    g.for_each_edge([&](int c, int p) {
        const int v = g.vertex_of(c), w = g.vertex_of(p);
        os << std::min(v, w) << ' ' << std::max(v, w) << '\n';
    });
}

inline HalfEdgeGraph read_edge_list(std::istream& is) {
    HalfEdgeGraph g;
    if (!(is >> g.n >> g.d)) throw std::runtime_error("read_edge_list: bad header");
    if (g.n < 1 || g.d < 1 || (std::int64_t(g.n) * g.d) % 2 != 0)
        throw std::runtime_error("read_edge_list: invalid n, d");
    g.pairing.assign(std::size_t(g.n) * std::size_t(g.d), -1);
    std::vector<int> used(std::size_t(g.n), 0);
    const auto take_clone = [&](int v) {
        if (used[std::size_t(v)] >= g.d) throw std::runtime_error("read_edge_list: degree overflow");
        return v * g.d + used[std::size_t(v)]++;
    };
    int u, v;
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!(is >> u >> v)) throw std::runtime_error("read_edge_list: truncated edge list");
        if (u < 0 || u >= g.n || v < 0 || v >= g.n)
            throw std::runtime_error("read_edge_list: vertex out of range");
        const int cu = take_clone(u), cv = take_clone(v);
        g.pairing[std::size_t(cu)] = std::int32_t(cv);
        g.pairing[std::size_t(cv)] = std::int32_t(cu);
    }
    for (int w : used)
        if (w != g.d) throw std::runtime_error("read_edge_list: graph is not d-regular");
    return g;
}

inline std::string to_edge_list(const HalfEdgeGraph& g) {
    std::ostringstream os;
    write_edge_list(g, os);
    return os.str();
}

}  // namespace ising
