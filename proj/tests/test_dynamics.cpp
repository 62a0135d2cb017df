#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ising/dynamics.hpp"

using namespace ising;

namespace {

HalfEdgeGraph k4() {
    std::istringstream src("4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    return read_edge_list(src);
}

HalfEdgeGraph p2() {
    std::istringstream src("2 1\n0 1\n");
    return read_edge_list(src);
}

HalfEdgeGraph cycle5() {
    std::istringstream src("5 2\n0 1\n1 2\n2 3\n3 4\n4 0\n");
    return read_edge_list(src);
}

double exact_mean_energy(const HalfEdgeGraph& g, double beta) {
    const auto hist = energy_histogram(g);
    double num = 0.0, den = 0.0;
    for (std::size_t h = 0; h < hist.size(); ++h) {
        if (hist[h] == 0) continue;
        const double w = double(hist[h]) * std::exp(-beta * double(h));
        num += double(h) * w;
        den += w;
    }
    return num / den;
}

}  // namespace

TEST_CASE("glauber at beta zero flips fair coins") {
    const HalfEdgeGraph g = k4();
    const Adjacency adj = Adjacency::build(g);
    ChainState chain(g.n, Rng(11u));
    std::int64_t plus = 0, total = 0;
    for (int t = 0; t < 20000; ++t) {
        glauber_sweep(adj, 0.0, chain);
        for (auto s : chain.sigma) {
            plus += s == 1;
            ++total;
        }
    }
    const double frac = double(plus) / double(total);
    CHECK(std::abs(frac - 0.5) < 0.01);
}

TEST_CASE("glauber magnetization vanishes by spin-flip symmetry") {
    const HalfEdgeGraph g = k4();
    const Adjacency adj = Adjacency::build(g);
    ChainState chain(g.n, Rng(3u));
    const int sweeps = 200000;
    std::vector<double> site_sum(4, 0.0);
    for (int t = 0; t < sweeps; ++t) {
        glauber_sweep(adj, 1.0, chain);
        for (int v = 0; v < 4; ++v) site_sum[std::size_t(v)] += chain.sigma[std::size_t(v)];
    }
    for (int v = 0; v < 4; ++v) {
        const double mag = site_sum[std::size_t(v)] / sweeps;
        CHECK(std::abs(mag) < 0.02);  // well over 3 sigma for this chain
    }
}

TEST_CASE("glauber matches the exact two-site law") {
    const HalfEdgeGraph g = p2();
    const Adjacency adj = Adjacency::build(g);
    const double beta = 1.0;
    ChainState chain(g.n, Rng(5u));
    for (int t = 0; t < 1000; ++t) glauber_sweep(adj, beta, chain);
    std::int64_t agree = 0;
    const int sweeps = 400000;
    for (int t = 0; t < sweeps; ++t) {
        glauber_sweep(adj, beta, chain);
        agree += chain.sigma[0] == chain.sigma[1];
    }
    const double expect = std::exp(-beta) / (1.0 + std::exp(-beta));
    CHECK(std::abs(double(agree) / sweeps - expect) < 0.005);
}

TEST_CASE("glauber time-averaged energy matches the log-partition derivative") {
    const HalfEdgeGraph g = k4();
    const Adjacency adj = Adjacency::build(g);
    const double beta = 1.0, h = 0.01;
    const double slope =
        -(exact_partition_function(g, beta + h) - exact_partition_function(g, beta)) / h;

    ChainState chain(g.n, Rng(8u));
    for (int t = 0; t < 1000; ++t) glauber_sweep(adj, beta, chain);
    const int batches = 20, per_batch = 20000;
    std::vector<double> batch_mean(batches);
    for (int b = 0; b < batches; ++b) {
        double acc = 0.0;
        for (int t = 0; t < per_batch; ++t) {
            glauber_sweep(adj, beta, chain);
            acc += double(hamiltonian(g, chain.sigma));
        }
        batch_mean[std::size_t(b)] = acc / per_batch;
    }
    const MeanStderr ms = mean_stderr(batch_mean);
    CHECK(std::abs(ms.mean - slope) <= 3.0 * ms.stderr_ + 1e-3);
    CHECK(std::abs(exact_mean_energy(g, beta) - slope) < 1e-2);  // derivative step error only
}

TEST_CASE("overlap estimate is small for independent spins") {
    Rng rng(17u);
    const HalfEdgeGraph g = sample_configuration_model(1000, 3, rng);
    const OverlapEstimate est = estimate_overlap(g, 0.0, 16, 100, 99u);
    CHECK(est.mean <= 0.05);
    CHECK(est.pairs == 8);
}

TEST_CASE("overlap estimate is worker independent") {
    Rng rng(17u);
    const HalfEdgeGraph g = sample_configuration_model(100, 3, rng);
    const OverlapEstimate a = estimate_overlap(g, 1.0, 8, 60, 4u, 1);
    const OverlapEstimate b = estimate_overlap(g, 1.0, 8, 60, 4u, 4);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);
    CHECK_THROWS_AS(estimate_overlap(g, 1.0, 3, 60, 4u), std::invalid_argument);
}

TEST_CASE("local search on small graphs reaches the optimum") {
    const LocalSearchResult r4 = local_search_maxcut(k4(), 5, 1u);
    CHECK(r4.cut == 4);
    const LocalSearchResult r5 = local_search_maxcut(cycle5(), 5, 1u);
    CHECK(r5.cut == 4);
}

TEST_CASE("local search results are locally maximal and above half the edges") {
    Rng rng(23u);
    const HalfEdgeGraph g = sample_configuration_model(300, 3, rng);
    const LocalSearchResult res = local_search_maxcut(g, 3, 9u);
    CHECK(res.cut >= (g.edge_count() + 1) / 2 - is_simple(g).loops);
    const Adjacency adj = Adjacency::build(g);
    SpinConfig sigma = res.sigma;
    for (int v = 0; v < g.n; ++v) {
        int field = 0;
        for (int w : adj.neighbours(v)) field += sigma[std::size_t(w)];
        CHECK(int(sigma[std::size_t(v)]) * field <= 0);  // no improving single flip
    }
}

TEST_CASE("local search stays below the rigorous upper bound on random cubic graphs") {
    Rng rng(31u);
    const HalfEdgeGraph g = sample_configuration_model(10000, 3, rng);
    const LocalSearchResult res = local_search_maxcut(g, 20, 77u);
    const double frac = double(res.cut) / double(g.edge_count());
    CHECK(frac <= 0.9241 + 0.01);
}
