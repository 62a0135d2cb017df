#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "ising/numeric.hpp"

namespace ising {

// Degree and inverse temperature, the two knobs of every closed-form
// quantity in this library. Entropy and KL terms are in nats throughout.
struct ModelParams {
    int d;
    double beta;

    ModelParams(int d_, double beta_) : d(d_), beta(beta_) {
        if (d < 3 || d > 64) throw std::invalid_argument("ModelParams: d must be in [3, 64]");
        if (!std::isfinite(beta) || beta < 0.0)
            throw std::invalid_argument("ModelParams: beta must be finite and >= 0");
    }
};

// Distribution of ordered spin pairs over edge endpoints.
struct EdgeTypeDistribution {
    double mu_pp, mu_pm, mu_mp, mu_mm;

    std::array<double, 4> as_array() const { return {mu_pp, mu_pm, mu_mp, mu_mm}; }
    double rho_plus() const { return mu_pp + mu_pm; }
    double cut_fraction() const { return mu_pm + mu_mp; }

    void validate() const {
        const auto a = as_array();
        double sum = 0.0;
        for (double x : a) {
            if (x < 0.0) throw std::invalid_argument("EdgeTypeDistribution: negative entry");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("EdgeTypeDistribution: entries must sum to 1");
        if (std::abs(mu_pm - mu_mp) > 1e-12)
            throw std::invalid_argument("EdgeTypeDistribution: mu_pm must equal mu_mp");
    }
};

// Distribution over {+-1}^4 spin combinations (sigma_v, sigma'_v, sigma_w, sigma'_w)
// of the two endpoints of an edge under a pair of configurations.
struct PairOverlapDistribution {
    std::array<double, 16> p{};

    // Spins are +-1; bit set means -1.
    static constexpr int index(int r, int s, int t, int u) {
        return ((r < 0) << 3) | ((s < 0) << 2) | ((t < 0) << 1) | int(u < 0);
    }
    double& at(int r, int s, int t, int u) { return p[index(r, s, t, u)]; }
    double at(int r, int s, int t, int u) const { return p[index(r, s, t, u)]; }

    // Vertex marginal rho_{ij} = sum_{kl} mu_{ijkl}, indexed like the upper two bits.
    std::array<double, 4> vertex_marginal() const {
        std::array<double, 4> rho{};
        for (int i = 0; i < 16; ++i) rho[i >> 2] += p[i];
        return rho;
    }

    void validate() const {
        double sum = 0.0;
        for (double x : p) {
            if (x < 0.0) throw std::invalid_argument("PairOverlapDistribution: negative entry");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("PairOverlapDistribution: entries must sum to 1");
    }
};

// Symmetric two-atom polarization at +-2*eps.
struct BetheEvalPoint {
    double eps;

    explicit BetheEvalPoint(double eps_) : eps(eps_) {
        if (!(eps >= 0.0 && eps < 0.25))
            throw std::invalid_argument("BetheEvalPoint: eps must be in [0, 1/4)");
    }
};

// Replica symmetry breaking threshold, log((sqrt(d-1)+1)/(sqrt(d-1)-1)).
// Strictly decreasing in d.
inline double beta_star(int d) {
    if (d < 3 || d > 64) throw std::invalid_argument("beta_star: d must be in [3, 64]");
    const double s = std::sqrt(double(d - 1));
    return std::log((s + 1.0) / (s - 1.0));
}

// Second-moment threshold, log((sqrt(d)+1)/(sqrt(d)-1)).
// Satisfies beta_star(d) == beta_dagger(d-1) for d >= 4.
inline double beta_dagger(int d) {
    if (d < 3 || d > 64) throw std::invalid_argument("beta_dagger: d must be in [3, 64]");
    const double s = std::sqrt(double(d));
    return std::log((s + 1.0) / (s - 1.0));
}

// Annealed free energy bound, log 2 + (d/2) log((1+e^-beta)/2).
inline double first_moment_free_energy_bound(const ModelParams& params) {
    return std::log(2.0) + 0.5 * params.d * std::log(0.5 * (1.0 + std::exp(-params.beta)));
}

// Second-moment rate function
//   f_d(alpha, beta) = (1-d) log 2 + H((1+alpha)/2)
//                      + (d/2) log((1+e^-beta)^2 + alpha^2 (1-e^-beta)^2),
// even in alpha; f_d(0, beta) is twice the first-moment exponent.
inline double second_moment_rate(const ModelParams& params, double alpha) {
    if (!(std::abs(alpha) < 1.0))
        throw std::domain_error("second_moment_rate: |alpha| must be < 1");
    const double eb = std::exp(-params.beta);
    const double q = (1.0 + eb) * (1.0 + eb) + alpha * alpha * (1.0 - eb) * (1.0 - eb);
    return (1.0 - params.d) * std::log(2.0) + binary_entropy(0.5 * (1.0 + alpha)) +
           0.5 * params.d * std::log(q);
}

// Cut-fraction bound from counting cuts: the unique root c in (1/2, 1) of
// H_b(c) = log(2) (d-2)/d. H_b is strictly decreasing there, so bisection.
inline double first_moment_maxcut_bound(int d) {
    if (d < 3 || d > 64) throw std::invalid_argument("first_moment_maxcut_bound: d must be in [3, 64]");
    const double target = std::log(2.0) * double(d - 2) / double(d);
    double lo = 0.5, hi = 1.0 - 1e-12;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (binary_entropy(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Edge-type statistics of the planted model: monochromatic mass 1/(2(1+e^beta))
// per same-spin type, e^beta/(2(1+e^beta)) per opposite-spin type.
inline EdgeTypeDistribution planted_edge_stats(const ModelParams& params) {
    const double ebp = std::exp(params.beta);
    const double same = 0.5 / (1.0 + ebp);
    const double diff = 0.5 * ebp / (1.0 + ebp);
    return {same, diff, diff, same};
}

// Exponential growth rate of the first-moment contribution from edge
// statistics mu:
//   phi_{d,beta}(mu) = H(rho(mu)) - (d/2) KL(mu || rho x rho)
//                      - (d beta / 2)(mu_pp + mu_mm).
// Returns -inf when the KL term is infinite.
inline double annealed_exponent(const ModelParams& params, const EdgeTypeDistribution& mu) {
    mu.validate();
    const double r1 = mu.rho_plus();
    if (!(r1 > 0.0 && r1 < 1.0))
        throw std::domain_error("annealed_exponent: vertex marginal must be interior");
    const auto m = mu.as_array();
    const std::array<double, 4> prod = {r1 * r1, r1 * (1.0 - r1), (1.0 - r1) * r1,
                                        (1.0 - r1) * (1.0 - r1)};
    const double kl = kl_divergence(m, prod);
    if (!std::isfinite(kl)) return kNegInf;
    return binary_entropy(r1) - 0.5 * params.d * kl -
           0.5 * params.d * params.beta * (mu.mu_pp + mu.mu_mm);
}

// Weighted count of monochromatic edges across the two configurations;
// a pattern contributes 1 for each configuration whose endpoint spins agree.
inline double pair_edge_weight(const PairOverlapDistribution& mu) {
    double h = 0.0;
    for (int r = 1; r >= -1; r -= 2)
        for (int s = 1; s >= -1; s -= 2)
            for (int t = 1; t >= -1; t -= 2)
                for (int u = 1; u >= -1; u -= 2)
                    h += double((r == t) + (s == u)) * mu.at(r, s, t, u);
    return h;
}

// Pair analogue of annealed_exponent, evaluated against an explicit vertex
// marginal: H(rho) - (d/2) KL(mu || rho x rho) - (d beta / 2) H_edge(mu).
// Returns -inf when the KL term is infinite.
inline double pair_overlap_exponent(const ModelParams& params, const PairOverlapDistribution& mu,
                                    const std::array<double, 4>& rho) {
    mu.validate();
    std::array<double, 16> prod{};
    for (int i = 0; i < 16; ++i) prod[i] = rho[i >> 2] * rho[i & 3];
    const double kl = kl_divergence(mu.p, prod);
    if (!std::isfinite(kl)) return kNegInf;
    return entropy(rho) - 0.5 * params.d * kl - 0.5 * params.d * params.beta * pair_edge_weight(mu);
}

// Default form against the marginal induced by mu itself, the growth rate of
// the pair-configuration class with edge statistics mu.
inline double pair_overlap_exponent(const ModelParams& params, const PairOverlapDistribution& mu) {
    return pair_overlap_exponent(params, mu, mu.vertex_marginal());
}

// Vertex marginal of the overlap-alpha slice: (1+alpha)/4 on agreeing and
// (1-alpha)/4 on disagreeing spin pairs.
inline std::array<double, 4> overlap_slice_marginal(double alpha) {
    return {0.25 * (1.0 + alpha), 0.25 * (1.0 - alpha), 0.25 * (1.0 - alpha),
            0.25 * (1.0 + alpha)};
}

struct OverlapMaximizer {
    PairOverlapDistribution mu;
    double z_alpha;
};

// Tilted product measure maximizing -KL(mu || rho_a x rho_a) - beta H_edge(mu)
// over the simplex, with rho_a the overlap-alpha slice marginal and
// z_alpha = (1+e^-2beta)(1+alpha^2)/4 + e^-beta(1-alpha^2)/2 its normalizer.
// Against rho_a the maximum equals log z_alpha exactly. The marginal induced
// by the measure itself agrees with rho_a only to O(alpha(1-alpha)(1-e^-beta)^2),
// so the exact identities below are stated against the slice marginal.
inline OverlapMaximizer overlap_maximizer(const ModelParams& params, double alpha) {
    if (!(std::abs(alpha) < 1.0))
        throw std::domain_error("overlap_maximizer: |alpha| must be < 1");
    const double eb = std::exp(-params.beta);
    const double z = 0.25 * (1.0 + eb * eb) * (1.0 + alpha * alpha) +
                     0.5 * eb * (1.0 - alpha * alpha);
    const double agree = (1.0 + alpha) * (1.0 + alpha) / (16.0 * z);
    const double differ = (1.0 - alpha) * (1.0 - alpha) / (16.0 * z);
    const double mixed = (1.0 - alpha * alpha) / (16.0 * z) * eb;

    OverlapMaximizer r;
    r.z_alpha = z;
    auto& mu = r.mu;
    // both configurations monochromatic on the edge
    mu.at(+1, +1, +1, +1) = mu.at(-1, -1, -1, -1) = agree * eb * eb;
    mu.at(+1, -1, +1, -1) = mu.at(-1, +1, -1, +1) = differ * eb * eb;
    // exactly one configuration monochromatic
    mu.at(+1, +1, +1, -1) = mu.at(+1, +1, -1, +1) = mu.at(+1, -1, +1, +1) = mu.at(-1, +1, +1, +1) =
        mixed;
    mu.at(-1, -1, -1, +1) = mu.at(-1, -1, +1, -1) = mu.at(-1, +1, -1, -1) = mu.at(+1, -1, -1, -1) =
        mixed;
    // neither configuration monochromatic
    mu.at(+1, +1, -1, -1) = mu.at(-1, -1, +1, +1) = agree;
    mu.at(+1, -1, -1, +1) = mu.at(-1, +1, +1, -1) = differ;
    return r;
}

// Bethe functional evaluated on the symmetric two-atom family. The first
// term averages the root penalty over a Binomial(d, 1/2) split of the d
// neighbour fields between the two atoms; the second is the edge penalty.
// Binomial weights are formed in log space so large d stays stable.
inline double bethe_functional(const ModelParams& params, const BetheEvalPoint& point) {
    const int d = params.d;
    const double eb = std::exp(-params.beta);
    const double eps = point.eps;

    double root_term = 0.0;
    for (int i = 0; i <= d; ++i) {
        double inner = 0.0;
        for (int sg = -1; sg <= 1; sg += 2) {
            const double up = 1.0 - (1.0 - eb) * (0.5 + sg * eps);
            const double dn = 1.0 - (1.0 - eb) * (0.5 - sg * eps);
            inner += std::pow(up, double(i)) * std::pow(dn, double(d - i));
        }
        const double log_weight = log_binomial(d, i) - d * std::log(2.0);
        root_term += std::exp(log_weight) * xlogx(inner);
    }
    root_term /= 2.0 * std::pow(0.5 * (1.0 + eb), double(d));

    const double edge_term =
        d *
        (xlogx(1.0 - (1.0 - eb) * (0.5 + 2.0 * eps * eps)) +
         xlogx(1.0 - (1.0 - eb) * (0.5 - 2.0 * eps * eps))) /
        (2.0 * (1.0 + eb));

    return root_term - edge_term;
}

// Coefficient of eps^4 in the expansion of the Bethe functional around
// eps = 0 (the first three derivatives vanish). Changes sign exactly at
// beta_star(d): the bracket is (d-2) x^2 - 2 d x + (d-2) at x = e^beta.
inline double bethe_quartic_coefficient(const ModelParams& params) {
    if (!(params.beta > 0.0))
        throw std::domain_error("bethe_quartic_coefficient: beta must be > 0");
    const double d = params.d;
    const double x = std::exp(params.beta);
    const double em = std::exp(-params.beta);
    const double bracket = (d - 2.0) * x * x - 2.0 * d * x + (d - 2.0);
    return 4.0 * d * em * em * (x - 1.0) * (x - 1.0) * bracket /
           ((1.0 + x) * (1.0 + x) * (1.0 + em) * (1.0 + em));
}

}  // namespace ising
