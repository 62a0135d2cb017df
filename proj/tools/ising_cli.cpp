// Batch front-end: thresholds and bounds tables, second-moment rate scans,
// and seeded simulation checks with machine-readable reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ising/ising.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace ising;

constexpr std::uint64_t kDefaultSeed = 1;

struct DegreeRange {
    int lo = 3;
    int hi = 10;
};

// Accepts "7" or "3..10".
DegreeRange parse_range(const std::string& s) {
    DegreeRange r;
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            r.lo = r.hi = std::stoi(s);
        } else {
            r.lo = std::stoi(s.substr(0, dots));
            r.hi = std::stoi(s.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw CLI::ValidationError("--d", "expected an integer or lo..hi range");
    }
    return r;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << content;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const {
        std::string out;
        for (std::size_t i = 0; i < columns.size(); ++i)
            out += (i ? "," : "") + columns[i];
        out += '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
            out += '\n';
        }
        return out;
    }

    std::string to_json(const std::string& command) const {
        json j;
        j["command"] = command;
        j["columns"] = columns;
        j["rows"] = rows;
        return j.dump(2) + "\n";
    }

    std::string render(const std::string& command, const std::string& format) const {
        if (format == "csv") return to_csv();
        if (format == "json") return to_json(command);
        throw CLI::ValidationError("--format", "must be csv or json");
    }
};

double cut_fraction_at(double beta) { return std::exp(beta) / (1.0 + std::exp(beta)); }

int cmd_thresholds(const DegreeRange& range, const std::string& out, const std::string& format) {
    Table t;
    t.columns = {"d", "beta_dagger", "beta_star", "cut_fraction_at_beta_star"};
    for (int d = range.lo; d <= range.hi; ++d) {
        const double bs = beta_star(d);
        t.rows.push_back({std::to_string(d), fmt(beta_dagger(d)), fmt(bs),
                          fmt(cut_fraction_at(bs))});
    }
    write_output(out, t.render("thresholds", format));
    return 0;
}

int cmd_table1(const DegreeRange& range, int grid, unsigned workers, const std::string& out,
               const std::string& format) {
    Table t;
    t.columns = {"d", "first_moment_bound", "interp_bound", "cut_at_beta_star", "optimizer_flag"};
    for (int d = range.lo; d <= range.hi; ++d) {
        const MaxcutBound mb = maxcut_upper_bound(d, grid, 1e-10, workers);
        std::string flag = "ok";
        if (!mb.optimum.refinement_improved) flag = "coarse-grid-only";
        if (mb.optimum.on_alpha_boundary) flag += "+alpha-boundary";
        t.rows.push_back({std::to_string(d), fmt(first_moment_maxcut_bound(d)), fmt(mb.bound),
                          fmt(cut_fraction_at(beta_star(d))), flag});
    }
    write_output(out, t.render("table1", format));
    return 0;
}

int cmd_fscan(int d, const std::vector<double>& betas, int alpha_steps, const std::string& out,
              const std::string& format) {
    Table t;
    t.columns = {"beta", "alpha", "f"};
    for (double beta : betas) {
        const ModelParams params(d, beta);
        for (int i = 0; i < alpha_steps; ++i) {
            const double alpha = -1.0 + 2.0 * double(i + 1) / double(alpha_steps + 1);
            t.rows.push_back({fmt(beta), fmt(alpha), fmt(second_moment_rate(params, alpha))});
        }
    }
    write_output(out, t.render("fscan", format));
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimOptions {
    std::string kind;
    int n = 500;
    int d = 3;
    double beta = 1.0;
    int replicas = 32;
    int sweeps = 0;  // 0 picks the per-kind default
    int depth = 8;
    int trials = 2000;
    int restarts = 20;
    std::string dump_graph_path;  // write the sampled graph as an edge list
    std::uint64_t seed = kDefaultSeed;
    unsigned workers = 0;

    int sweeps_or_default() const {
        if (sweeps > 0) return sweeps;
        if (kind == "glauber-check") return 1000000;  // the 0.01 TV gate needs ~1e6 samples
        if (kind == "planted-stats") return 200;
        return 2000;
    }
};

struct Report {
    json j;
    bool passed = true;

    Report(const SimOptions& o) {
        j["command"] = "simulate";
        j["kind"] = o.kind;
        j["seed"] = o.seed;
        j["params"] = json::object();
        j["estimates"] = json::array();
        j["checks"] = json::array();
        j["notes"] = json::array();
    }
    void param(const std::string& k, const json& v) { j["params"][k] = v; }
    void estimate(const std::string& name, double value, double stderr_) {
        j["estimates"].push_back({{"name", name}, {"value", value}, {"stderr", stderr_}});
    }
    void check(const std::string& name, bool ok, double observed, double threshold,
               const std::string& comparator) {
        j["checks"].push_back({{"name", name},
                               {"passed", ok},
                               {"observed", observed},
                               {"threshold", threshold},
                               {"comparator", comparator}});
        passed = passed && ok;
    }
    void note(const std::string& s) { j["notes"].push_back(s); }
    std::string finish() {
        j["passed"] = passed;
        return j.dump(2) + "\n";
    }
};

void dump_graph(const SimOptions& o, const HalfEdgeGraph& g, Report& rep) {
    if (o.dump_graph_path.empty()) return;
    std::ofstream os(o.dump_graph_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open graph dump file: " + o.dump_graph_path);
    write_edge_list(g, os);
    rep.note("graph written to " + o.dump_graph_path);
}

void simulate_overlap(const SimOptions& o, Report& rep) {
    Rng rng(o.seed);
    const HalfEdgeGraph g = sample_configuration_model(o.n, o.d, rng);
    dump_graph(o, g, rep);
    const OverlapEstimate est = estimate_overlap(g, o.beta, o.replicas, o.sweeps_or_default(), o.seed, o.workers);
    rep.estimate("overlap", est.mean, est.stderr_);
    if (o.beta == 0.0) {
        rep.check("overlap_independent_spins", est.mean <= 0.05, est.mean, 0.05, "<=");
    } else if (o.beta < beta_star(o.d)) {
        rep.check("overlap_near_orthogonal", est.mean <= 0.15, est.mean, 0.15, "<=");
    } else {
        rep.note("qualitative: beta is above the replica symmetry breaking threshold, "
                 "no overlap gate applies");
    }
}

void simulate_broadcast(const SimOptions& o, Report& rep) {
    std::vector<int> depths;
    for (int ell = 2; ell < o.depth; ell += 2) depths.push_back(ell);
    depths.push_back(o.depth);
    std::vector<ReconstructionEstimate> est;
    for (int ell : depths) {
        est.push_back(reconstruction_error(o.d, o.beta, ell, o.trials, o.seed, o.workers));
        rep.estimate("bias_depth_" + std::to_string(ell), est.back().mean_abs_bias,
                     est.back().stderr_);
    }
    const auto& first = est.front();
    const auto& last = est.back();
    if (o.beta < beta_star(o.d)) {
        if (depths.size() < 2) {
            rep.note("single depth: no trend check applies");
        } else if (o.depth >= 8) {
            // deep runs must lose at least half the bias
            const double pooled = std::sqrt(first.stderr_ * first.stderr_ / 4.0 +
                                            last.stderr_ * last.stderr_);
            const double threshold = first.mean_abs_bias / 2.0 + 3.0 * pooled;
            rep.check("bias_decays_with_depth", last.mean_abs_bias <= threshold,
                      last.mean_abs_bias, threshold, "<=");
        } else {
            // shallow runs only need the bias not to grow
            const double pooled = std::sqrt(first.stderr_ * first.stderr_ +
                                            last.stderr_ * last.stderr_);
            const double threshold = first.mean_abs_bias + 3.0 * pooled;
            rep.check("bias_does_not_grow", last.mean_abs_bias <= threshold, last.mean_abs_bias,
                      threshold, "<=");
        }
    } else {
        rep.check("bias_persists_at_depth", last.mean_abs_bias >= 0.05, last.mean_abs_bias, 0.05,
                  ">=");
    }
}

void simulate_planted_stats(const SimOptions& o, Report& rep) {
    std::vector<double> cut_frac(static_cast<std::size_t>(o.replicas));
    std::vector<double> loops(static_cast<std::size_t>(o.replicas));
    std::vector<double> doubles(static_cast<std::size_t>(o.replicas));
    HalfEdgeGraph first_graph;
    parallel_for(static_cast<std::size_t>(o.replicas), o.workers, [&](std::size_t r) {
        Rng sub = Rng::substream(o.seed, r);
        const PlantedSample ps = sample_planted(o.n, o.d, o.beta, sub.next_u64(), o.sweeps_or_default());
        cut_frac[r] = double(cut_size(ps.g, ps.sigma_star)) / double(ps.g.edge_count());
        loops[r] = double(is_simple(ps.g).loops);
        doubles[r] = double(double_edge_pairs(ps.g));
        if (r == 0) first_graph = ps.g;
    });
    dump_graph(o, first_graph, rep);
    const MeanStderr cf = mean_stderr(cut_frac);
    const MeanStderr lo = mean_stderr(loops);
    const MeanStderr db = mean_stderr(doubles);
    rep.estimate("cut_fraction", cf.mean, cf.stderr_);
    rep.estimate("loops_mean", lo.mean, lo.stderr_);
    rep.estimate("double_edges_mean", db.mean, db.stderr_);

    const double target_cut = cut_fraction_at(o.beta);
    const double ebp = std::exp(o.beta);
    const double kappa = double(o.d - 1) / (ebp + 1.0);
    const double lambda = double(o.d - 1) * double(o.d - 1) * (1.0 + ebp * ebp) /
                          (2.0 * (1.0 + ebp) * (1.0 + ebp));
    rep.check("cut_fraction_matches_planted_mean", std::abs(cf.mean - target_cut) <= 0.02,
              std::abs(cf.mean - target_cut), 0.02, "<=");
    rep.check("loops_match_kappa", std::abs(lo.mean - kappa) <= 3.0 * lo.stderr_,
              std::abs(lo.mean - kappa), 3.0 * lo.stderr_, "<=");
    rep.check("double_edges_match_lambda", std::abs(db.mean - lambda) <= 3.0 * db.stderr_,
              std::abs(db.mean - lambda), 3.0 * db.stderr_, "<=");
}

// Exact one-spin marginals of a tiny graph by direct enumeration.
std::vector<double> exact_plus_marginals(const HalfEdgeGraph& g, double beta) {
    std::vector<double> weight_plus(static_cast<std::size_t>(g.n), 0.0);
    double total = 0.0;
    SpinConfig sigma(static_cast<std::size_t>(g.n));
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << g.n); ++mask) {
        for (int v = 0; v < g.n; ++v)
            sigma[std::size_t(v)] = (mask >> v) & 1 ? std::int8_t(1) : std::int8_t(-1);
        const double w = std::exp(-beta * double(hamiltonian(g, sigma)));
        total += w;
        for (int v = 0; v < g.n; ++v)
            if (sigma[std::size_t(v)] == 1) weight_plus[std::size_t(v)] += w;
    }
    for (double& w : weight_plus) w /= total;
    return weight_plus;
}

void glauber_marginal_check(const HalfEdgeGraph& g, const std::string& label, double beta,
                            int samples, std::uint64_t seed, Report& rep) {
    const Adjacency adj = Adjacency::build(g);
    ChainState chain(g.n, Rng(seed));
    const int burn = 1000;
    for (int t = 0; t < burn; ++t) glauber_sweep(adj, beta, chain);
    std::vector<std::int64_t> plus(static_cast<std::size_t>(g.n), 0);
    std::int64_t agree01 = 0;
    for (int t = 0; t < samples; ++t) {
        glauber_sweep(adj, beta, chain);
        for (int v = 0; v < g.n; ++v)
            if (chain.sigma[std::size_t(v)] == 1) ++plus[std::size_t(v)];
        if (chain.sigma[0] == chain.sigma[1]) ++agree01;
    }
    const auto exact = exact_plus_marginals(g, beta);
    double worst_tv = 0.0;
    for (int v = 0; v < g.n; ++v) {
        const double emp = double(plus[std::size_t(v)]) / double(samples);
        worst_tv = std::max(worst_tv, std::abs(emp - exact[std::size_t(v)]));
    }
    rep.estimate(label + "_marginal_tv", worst_tv, 0.0);
    rep.check(label + "_marginals_match_enumeration", worst_tv <= 0.01, worst_tv, 0.01, "<=");
    if (g.n == 2) {
        const double emp_agree = double(agree01) / double(samples);
        const double exact_agree = std::exp(-beta) / (1.0 + std::exp(-beta));
        rep.estimate(label + "_agreement", emp_agree, 0.0);
        rep.check(label + "_edge_agreement", std::abs(emp_agree - exact_agree) <= 0.01,
                  std::abs(emp_agree - exact_agree), 0.01, "<=");
    }
}

// Local-search lower bound on the cut fraction of a sampled graph; the found
// fraction must stay below the rigorous upper bound up to noise.
void simulate_local_cut(const SimOptions& o, Report& rep) {
    Rng rng(o.seed);
    const HalfEdgeGraph g = sample_configuration_model(o.n, o.d, rng);
    dump_graph(o, g, rep);
    const LocalSearchResult res = local_search_maxcut(g, o.restarts, o.seed);
    const double frac = double(res.cut) / double(g.edge_count());
    rep.estimate("local_search_cut_fraction", frac, 0.0);
    const double upper = maxcut_upper_bound(o.d).bound;
    rep.check("cut_below_upper_bound", frac <= upper + 0.01, frac, upper + 0.01, "<=");
    rep.check("cut_at_least_half", res.cut >= (g.edge_count() + 1) / 2, double(res.cut),
              double((g.edge_count() + 1) / 2), ">=");
}

void simulate_glauber_check(const SimOptions& o, Report& rep) {
    // path on two vertices and the complete graph on four
    std::istringstream p2_src("2 1\n0 1\n");
    std::istringstream k4_src("4 3\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n");
    const HalfEdgeGraph p2 = read_edge_list(p2_src);
    const HalfEdgeGraph k4 = read_edge_list(k4_src);
    glauber_marginal_check(p2, "p2", o.beta, o.sweeps_or_default(), o.seed, rep);
    glauber_marginal_check(k4, "k4", o.beta, o.sweeps_or_default(), o.seed + 1, rep);
}

int cmd_simulate(const SimOptions& o, const std::string& out) {
    Report rep(o);
    rep.param("n", o.n);
    rep.param("d", o.d);
    rep.param("beta", o.beta);
    rep.param("replicas", o.replicas);
    rep.param("sweeps", o.sweeps_or_default());
    rep.param("depth", o.depth);
    rep.param("trials", o.trials);
    rep.param("restarts", o.restarts);

    if (o.kind == "overlap") {
        simulate_overlap(o, rep);
    } else if (o.kind == "broadcast") {
        simulate_broadcast(o, rep);
    } else if (o.kind == "planted-stats") {
        simulate_planted_stats(o, rep);
    } else if (o.kind == "glauber-check") {
        simulate_glauber_check(o, rep);
    } else if (o.kind == "local-cut") {
        simulate_local_cut(o, rep);
    } else {
        throw CLI::ValidationError(
            "--kind", "must be one of overlap, broadcast, planted-stats, glauber-check, local-cut");
    }
    const bool passed = rep.passed;
    write_output(out, rep.finish());
    return passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ising antiferromagnet on random regular graphs: bounds and simulations"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string out_path;
    std::string format = "csv";
    unsigned workers = 0;
    app.add_option("--out", out_path, "output file (default: stdout)")->capture_default_str();
    app.add_option("--format", format, "csv or json")->capture_default_str();
    app.add_option("--workers", workers, "thread cap, 0 = auto")->capture_default_str();

    std::string d_range = "3..10";
    auto* thresholds = app.add_subcommand("thresholds", "thresholds and the planted cut fraction");
    thresholds->add_option("--d", d_range, "degree or lo..hi range")->capture_default_str();

    std::string t1_range = "3..10";
    int grid = 256;
    auto* table1 = app.add_subcommand("table1", "max-cut bounds per degree");
    table1->add_option("--d", t1_range, "degree or lo..hi range")->capture_default_str();
    table1->add_option("--grid", grid, "optimizer grid resolution")->capture_default_str();

    int fscan_d = 3;
    std::vector<double> fscan_betas;
    int alpha_steps = 2001;
    auto* fscan = app.add_subcommand("fscan", "second-moment rate over an alpha grid");
    fscan->add_option("--d", fscan_d, "degree")->capture_default_str();
    fscan->add_option("--beta", fscan_betas, "inverse temperatures")->required()->delimiter(',');
    fscan->add_option("--alpha-steps", alpha_steps, "grid size, must be >= 11")
        ->capture_default_str();

    SimOptions sim;
    auto* simulate = app.add_subcommand("simulate", "seeded statistical checks");
    simulate
        ->add_option("--kind", sim.kind,
                     "overlap | broadcast | planted-stats | glauber-check | local-cut")
        ->required();
    simulate->add_option("--n", sim.n, "vertex count")->capture_default_str();
    simulate->add_option("--d", sim.d, "degree")->capture_default_str();
    simulate->add_option("--beta", sim.beta, "inverse temperature")->capture_default_str();
    simulate->add_option("--replicas", sim.replicas, "independent replicas")->capture_default_str();
    simulate->add_option("--sweeps", sim.sweeps, "sweeps per chain / samples (0 = per-kind default)")
        ->capture_default_str();
    simulate->add_option("--depth", sim.depth, "broadcast depth")->capture_default_str();
    simulate->add_option("--trials", sim.trials, "broadcast trials")->capture_default_str();
    simulate->add_option("--restarts", sim.restarts, "local-search restarts")->capture_default_str();
    simulate->add_option("--dump-graph", sim.dump_graph_path,
                         "write the sampled graph as an edge list");
    std::uint64_t seed = kDefaultSeed;
    app.add_option("--seed", seed, "master seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        sim.seed = seed;
        sim.workers = workers;
        if (thresholds->parsed()) {
            const DegreeRange r = parse_range(d_range);
            if (r.lo < 3 || r.hi > 64 || r.lo > r.hi) {
                std::cerr << "thresholds: --d must lie within 3..64\n";
                return 2;
            }
            return cmd_thresholds(r, out_path, format);
        }
        if (table1->parsed()) {
            const DegreeRange r = parse_range(t1_range);
            if (r.lo < 3 || r.hi > 64 || r.lo > r.hi) {
                std::cerr << "table1: --d must lie within 3..64\n";
                return 2;
            }
            return cmd_table1(r, grid, workers, out_path, format);
        }
        if (fscan->parsed()) {
            if (alpha_steps < 11) {
                std::cerr << "fscan: --alpha-steps must be >= 11\n";
                return 2;
            }
            return cmd_fscan(fscan_d, fscan_betas, alpha_steps, out_path, format);
        }
        if (simulate->parsed()) {
            if (format != "csv" && format != "json") {
                std::cerr << "simulate: --format must be csv or json\n";
                return 2;
            }
            return cmd_simulate(sim, out_path);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
