#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace ising {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Lambda(x) = x log x, continuously extended by 0 at x = 0.
inline double xlogx(double x) {
    if (x < 0.0) throw std::domain_error("xlogx: negative argument");
    return x > 0.0 ? x * std::log(x) : 0.0;
}

// Binary entropy in nats, H(0) = H(1) = 0.
inline double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("binary_entropy: p outside [0,1]");
    return -xlogx(p) - xlogx(1.0 - p);
}

// Shannon entropy in nats with the 0 log 0 = 0 convention.
inline double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double x : p) h -= xlogx(x);
    return h;
}

// KL(p || q) in nats. Conventions: 0 log(0/q) = 0; p > 0 with q = 0 gives +inf.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        kl += p[i] * std::log(p[i] / q[i]);
    }
    return kl;
}

inline double log_binomial(long n, long k) {
    if (k < 0 || k > n) throw std::domain_error("log_binomial: k outside [0,n]");
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

// log k!! for odd k >= -1, via (2j-1)!! = (2j)! / (j! 2^j).
inline double log_double_factorial_odd(long k) {
    if (k < -1 || k % 2 == 0) throw std::domain_error("log_double_factorial_odd: k must be odd or -1");
    if (k <= 0) return 0.0;
    const double j = double((k + 1) / 2);
    return std::lgamma(2.0 * j + 1.0) - std::lgamma(j + 1.0) - j * std::log(2.0);
}

inline double log_sum_exp(std::span<const double> v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Streaming log-sum-exp accumulator.
class LogSumExp {
public:
    void add(double log_term) {
        if (log_term == kNegInf) return;
        if (log_term > max_) {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        } else {
            sum_ += std::exp(log_term - max_);
        }
    }
    double value() const { return sum_ > 0.0 ? max_ + std::log(sum_) : kNegInf; }

private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t count = 0;
};

// Sample mean and standard error of the mean.
inline MeanStderr mean_stderr(std::span<const double> xs) {
    MeanStderr r;
    r.count = xs.size();
    if (xs.empty()) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / double(xs.size());
    if (xs.size() < 2) return r;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.stderr_ = std::sqrt(ss / double(xs.size() - 1) / double(xs.size()));
    return r;
}

}  // namespace ising
