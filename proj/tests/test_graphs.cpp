#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <sstream>

#include "ising/graphs.hpp"
#include "support/matching_enum.hpp"

using namespace ising;
using ising_test::for_each_matching;
using ising_test::graph_from_pairing;

namespace {

HalfEdgeGraph k4() {
    std::istringstream src("4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    return read_edge_list(src);
}

HalfEdgeGraph cycle5() {
    std::istringstream src("5 2\n0 1\n1 2\n2 3\n3 4\n4 0\n");
    return read_edge_list(src);
}

// canonical vertex-level edge multiset, insensitive to clone labels
std::string canonical_edges(const HalfEdgeGraph& g) {
    std::vector<std::pair<int, int>> edges;
    g.for_each_edge([&](int c, int p) {
        const int v = g.vertex_of(c), w = g.vertex_of(p);
        edges.emplace_back(std::min(v, w), std::max(v, w));
    });
    std::sort(edges.begin(), edges.end());
    std::string key;
    for (auto [v, w] : edges) key += std::to_string(v) + "," + std::to_string(w) + ";";
    return key;
}

}  // namespace

TEST_CASE("configuration model basics") {
    const HalfEdgeGraph g = sample_configuration_model(2, 1, 7u);
    REQUIRE(g.pairing.size() == 2);
    CHECK(g.pairing[0] == 1);
    CHECK(g.pairing[1] == 0);

    CHECK_THROWS_AS(sample_configuration_model(3, 3, 1u), std::invalid_argument);

    // deterministic given the seed
    const HalfEdgeGraph a = sample_configuration_model(50, 3, 123u);
    const HalfEdgeGraph b = sample_configuration_model(50, 3, 123u);
    CHECK(a.pairing == b.pairing);
    a.validate();
}

TEST_CASE("configuration model partner of a fixed clone is uniform") {
    // n=4, d=2: the partner of clone 0 ranges over 7 clones
    const int trials = 100000;
    std::array<int, 8> counts{};
    for (int t = 0; t < trials; ++t)
        ++counts[std::size_t(sample_configuration_model(4, 2, std::uint64_t(t)).pairing[0])];
    CHECK(counts[0] == 0);
    const double expect = trials / 7.0;
    double chi2 = 0.0;
    for (int i = 1; i < 8; ++i) chi2 += (counts[std::size_t(i)] - expect) * (counts[std::size_t(i)] - expect) / expect;
    CHECK(chi2 < 27.9);  // chi-square(6) at the 1e-4 tail
}

TEST_CASE("configuration model simplicity probability at n=4, d=3") {
    // exact fraction by enumeration, checked against sampling
    std::int64_t simple_count = 0, total = 0;
    for_each_matching(12, [&](const std::vector<std::int32_t>& pairing) {
        ++total;
        if (is_simple(graph_from_pairing(4, 3, pairing)).simple) ++simple_count;
    });
    CHECK(total == 10395);
    CHECK(simple_count == 1296);

    int simple_sampled = 0;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t)
        if (is_simple(sample_configuration_model(4, 3, std::uint64_t(t))).simple) ++simple_sampled;
    const double frac = double(simple_sampled) / trials;
    CHECK(frac > 0.10);
    CHECK(frac < 0.15);
}

TEST_CASE("is_simple flags loops and duplicate pairs") {
    HalfEdgeGraph g;
    g.n = 2;
    g.d = 2;
    g.pairing = {1, 0, 3, 2};  // loop at vertex 0 and loop at vertex 1
    const auto rep = is_simple(g);
    CHECK_FALSE(rep.simple);
    CHECK(rep.loops == 2);
    CHECK(rep.multi_edges == 0);

    HalfEdgeGraph h;
    h.n = 2;
    h.d = 2;
    h.pairing = {2, 3, 0, 1};  // double edge between 0 and 1
    const auto rep2 = is_simple(h);
    CHECK_FALSE(rep2.simple);
    CHECK(rep2.loops == 0);
    CHECK(rep2.multi_edges == 1);
    CHECK(double_edge_pairs(h) == 1);

    CHECK(is_simple(k4()).simple);
    CHECK(is_simple(k4()).loops == 0);
}

TEST_CASE("hamiltonian and cut on K4") {
    const HalfEdgeGraph g = k4();
    const SpinConfig balanced = {1, 1, -1, -1};
    CHECK(hamiltonian(g, balanced) == 2);
    CHECK(cut_size(g, balanced) == 4);
    const SpinConfig aligned = {1, 1, 1, 1};
    CHECK(hamiltonian(g, aligned) == g.edge_count());
    CHECK_THROWS_AS(hamiltonian(g, SpinConfig{1, -1}), std::invalid_argument);
}

TEST_CASE("loops always count as monochromatic") {
    HalfEdgeGraph g;
    g.n = 2;
    g.d = 2;
    g.pairing = {1, 0, 3, 2};
    const SpinConfig s = {1, -1};
    CHECK(hamiltonian(g, s) == 2);
    CHECK(cut_size(g, s) == 0);
}

TEST_CASE("exact partition function on K4") {
    const HalfEdgeGraph g = k4();
    for (double beta : {0.5, 1.0, 2.0}) {
        const double expect = std::log(2.0 * std::exp(-6.0 * beta) + 8.0 * std::exp(-3.0 * beta) +
                                       6.0 * std::exp(-2.0 * beta));
        CHECK(exact_partition_function(g, beta) == Catch::Approx(expect).margin(1e-12));
    }
    CHECK(exact_partition_function(g, 0.0) == Catch::Approx(4.0 * std::log(2.0)).margin(1e-12));
    // strictly decreasing in beta
    double prev = exact_partition_function(g, 0.0);
    for (double beta : {0.3, 0.9, 1.8, 4.0}) {
        const double z = exact_partition_function(g, beta);
        CHECK(z < prev);
        prev = z;
    }
    HalfEdgeGraph big;
    big.n = 25;
    big.d = 2;
    CHECK_THROWS_AS(exact_partition_function(big, 1.0), std::invalid_argument);
}

TEST_CASE("partition function bracket") {
    const HalfEdgeGraph g = k4();
    const auto hist = energy_histogram(g);
    std::int64_t min_h = -1;
    for (std::size_t h = 0; h < hist.size(); ++h)
        if (hist[h] > 0) {
            min_h = std::int64_t(h);
            break;
        }
    for (double beta : {0.4, 1.3}) {
        const double lz = exact_partition_function(g, beta);
        CHECK(lz >= 4.0 * std::log(2.0) - beta * double(g.edge_count()));
        CHECK(lz <= 4.0 * std::log(2.0) - beta * double(min_h));
    }
}

TEST_CASE("exact maxcut and the partition function identity") {
    CHECK(exact_maxcut(k4()) == 4);
    CHECK(exact_maxcut(cycle5()) == 4);
    for (const HalfEdgeGraph& g : {k4(), cycle5()}) {
        const double beta = 30.0, h = 0.01;
        const double slope =
            (exact_partition_function(g, beta + h) - exact_partition_function(g, beta)) / h;
        CHECK(double(g.edge_count()) + slope == Catch::Approx(double(exact_maxcut(g))).margin(1e-3));
    }
}

TEST_CASE("cut and hamiltonian partition the edges of a loopless graph") {
    Rng rng(41u);
    HalfEdgeGraph g = sample_configuration_model(60, 3, rng);
    while (is_simple(g).loops > 0) g = sample_configuration_model(60, 3, rng);
    for (int trial = 0; trial < 50; ++trial) {
        SpinConfig sigma(60);
        for (auto& s : sigma) s = std::int8_t(rng.spin());
        CHECK(cut_size(g, sigma) + hamiltonian(g, sigma) == g.edge_count());
    }
}

TEST_CASE("planted sampler at beta zero stays uniform") {
    // partner of clone 0 must remain uniform after the switch chain
    const int trials = 50000;
    std::array<int, 8> counts{};
    for (int t = 0; t < trials; ++t) {
        const PlantedSample ps = sample_planted(4, 2, 0.0, std::uint64_t(t), 5);
        ps.g.validate();
        ++counts[std::size_t(ps.g.pairing[0])];
    }
    CHECK(counts[0] == 0);
    const double expect = trials / 7.0;
    double chi2 = 0.0;
    for (int i = 1; i < 8; ++i) chi2 += (counts[std::size_t(i)] - expect) * (counts[std::size_t(i)] - expect) / expect;
    CHECK(chi2 < 27.9);
}

TEST_CASE("planted sampler options") {
    const PlantedSample balanced =
        sample_planted(100, 3, 1.0, 5u, 10, PlantedOptions{.balanced_sigma = true});
    int mag = 0;
    for (auto s : balanced.sigma_star) mag += s;
    CHECK(std::abs(mag) <= 1);

    const PlantedSample simple =
        sample_planted(30, 3, 1.0, 5u, 20, PlantedOptions{.require_simple = true});
    CHECK(is_simple(simple.g).simple);

    CHECK_THROWS_AS(sample_planted(10, 3, 1.0, 1u, 0), std::invalid_argument);
}

TEST_CASE("planted sampler matches its stationary law on tiny graphs") {
    // n=4, d=3 with a fixed balanced assignment: the matching law is
    // exp(-beta H) / Z over all 10395 matchings; compare on the projected
    // multigraphs (47 of them) in total variation.
    const double beta = 1.0;
    const SpinConfig sigma = {1, 1, -1, -1};
    std::map<std::string, double> exact;
    double z_total = 0.0;
    for_each_matching(12, [&](const std::vector<std::int32_t>& pairing) {
        const HalfEdgeGraph g = graph_from_pairing(4, 3, pairing);
        const double w = std::exp(-beta * double(hamiltonian(g, sigma)));
        exact[canonical_edges(g)] += w;
        z_total += w;
    });
    for (auto& [key, w] : exact) w /= z_total;
    CHECK(exact.size() == 47);

    Rng rng(2024u);
    HalfEdgeGraph g = sample_configuration_model(4, 3, rng);
    const int burn = 2000, samples = 500000, stride = 2;
    for (int t = 0; t < burn; ++t) detail::planted_sweep(g, sigma, beta, rng);
    std::map<std::string, std::int64_t> counts;
    for (int s = 0; s < samples; ++s) {
        for (int t = 0; t < stride; ++t) detail::planted_sweep(g, sigma, beta, rng);
        ++counts[canonical_edges(g)];
    }
    double tv = 0.0;
    for (const auto& [key, p] : exact) {
        const auto it = counts.find(key);
        const double emp = it == counts.end() ? 0.0 : double(it->second) / samples;
        tv += std::abs(emp - p);
    }
    for (const auto& [key, c] : counts)
        if (exact.find(key) == exact.end()) tv += double(c) / samples;
    tv /= 2.0;
    CHECK(tv <= 0.02);
}

TEST_CASE("pairing_event_logprob agrees with enumeration at n=4, d=3") {
    const int n = 4, d = 3, dn = n * d;
    const SpinConfig sigma = {1, 1, -1, -1};
    std::map<std::array<long, 3>, std::int64_t> type_counts;  // (e11, emm, e1m)
    std::int64_t total = 0;
    for_each_matching(12, [&](const std::vector<std::int32_t>& pairing) {
        const HalfEdgeGraph g = graph_from_pairing(n, d, pairing);
        std::array<long, 3> key{0, 0, 0};
        g.for_each_edge([&](int c, int p) {
            const int sv = sigma[std::size_t(g.vertex_of(c))], sw = sigma[std::size_t(g.vertex_of(p))];
            if (sv == 1 && sw == 1)
                ++key[0];
            else if (sv == -1 && sw == -1)
                ++key[1];
            else
                ++key[2];
        });
        ++type_counts[key];
        ++total;
    });
    REQUIRE(total == 10395);

    double mass = 0.0;
    for (const auto& [key, count] : type_counts) {
        const EdgeTypeDistribution mu{2.0 * double(key[0]) / dn, double(key[2]) / dn,
                                      double(key[2]) / dn, 2.0 * double(key[1]) / dn};
        const double lp = pairing_event_logprob(n, d, 0.5, mu);
        CHECK(std::exp(lp) == Catch::Approx(double(count) / double(total)).margin(1e-12));
        mass += std::exp(lp);
    }
    CHECK(mass == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("pairing_event_logprob approaches the KL rate") {
    const int n = 200, d = 3, dn = n * d;
    const ModelParams params(d, 1.0);
    const EdgeTypeDistribution star = planted_edge_stats(params);
    // round the planted statistics to a feasible integer point near rho1 = 1/2
    const long a = 2 * std::lround(dn * star.mu_pp / 2.0);
    const long plus = dn / 2;
    const long c = plus - a;
    const EdgeTypeDistribution mu{double(a) / dn, double(c) / dn, double(c) / dn, double(a) / dn};
    const double lp = pairing_event_logprob(n, d, 0.5, mu);
    const double rho[4] = {0.25, 0.25, 0.25, 0.25};
    const double kl = kl_divergence(mu.as_array(), rho);
    CHECK(std::abs(lp / n + 0.5 * d * kl) <= 0.15);
}

TEST_CASE("pairing_event_logprob rejects infeasible counts") {
    // non-integral counts
    CHECK_THROWS_AS(pairing_event_logprob(4, 3, 0.5,
                                          EdgeTypeDistribution{0.33, 0.17, 0.17, 0.33}),
                    std::invalid_argument);
    // odd monochromatic clone count: mu_pp * dn = 3
    CHECK_THROWS_AS(pairing_event_logprob(4, 3, 0.5,
                                          EdgeTypeDistribution{0.25, 0.25, 0.25, 0.25}),
                    std::invalid_argument);
    // inconsistent rho1
    CHECK_THROWS_AS(pairing_event_logprob(6, 2, 0.25,
                                          EdgeTypeDistribution{1.0 / 3, 1.0 / 6, 1.0 / 6, 1.0 / 3}),
                    std::invalid_argument);
}

TEST_CASE("edge list round trip") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const HalfEdgeGraph g = sample_configuration_model(20, 3, seed);
        const std::string text = to_edge_list(g);
        std::istringstream is(text);
        const HalfEdgeGraph h = read_edge_list(is);
        CHECK(h.n == g.n);
        CHECK(h.d == g.d);
        CHECK(canonical_edges(h) == canonical_edges(g));
        CHECK(to_edge_list(h) == text);
    }
    std::istringstream bad("2 1\n0 0\n");  // vertex 0 has degree 2, vertex 1 none
    CHECK_THROWS_AS(read_edge_list(bad), std::runtime_error);
    std::istringstream out_of_range("2 1\n0 5\n");
    CHECK_THROWS_AS(read_edge_list(out_of_range), std::runtime_error);
    std::istringstream truncated("4 3\n0 1\n");
    CHECK_THROWS_AS(read_edge_list(truncated), std::runtime_error);
}
