#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace ladderlab {

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) * 0.3989422804014326779399461;
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.7071067811865475244008444);
}

inline double normal_mass(double a, double b) {
    return normal_cdf(b) - normal_cdf(a);
}

// int_a^b z phi(z) dz for the standard normal
inline double normal_partial_mean(double a, double b) {
    return normal_pdf(a) - normal_pdf(b);
}

// Gauss-Hermite rule normalized for N(0,1): E[f(Z)] ~= sum_i w[i] f(x[i]).
struct GaussHermite {
    std::vector<double> x;
    std::vector<double> w;
};

// 15-node rule (computed once via Golub-Welsch)
const GaussHermite& gh15();

// Welford accumulator for mean / variance / standard error
struct RunningStats {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double sd() const { return std::sqrt(variance()); }
    double se() const { return n > 0 ? sd() / std::sqrt(static_cast<double>(n)) : 0.0; }
};

// Kahan-compensated sum; aggregation order-independent up to ~1e-12
struct KahanSum {
    double s = 0.0;
    double c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double value() const { return s; }
};

// One-sided two-sample Kolmogorov-Smirnov: D+ = sup_x (F_a(x) - F_b(x)),
// large when sample a is stochastically smaller than sample b. Returns the
// statistic; the asymptotic one-sided p-value is exp(-2 D^2 nm/(n+m)).
inline double ks_one_sided(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        const double x = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= x) ++ia;
        while (ib < b.size() && b[ib] <= x) ++ib;
        const double fa = static_cast<double>(ia) / a.size();
        const double fb = static_cast<double>(ib) / b.size();
        d = std::max(d, fa - fb);
    }
    return d;
}

inline double ks_one_sided_pvalue(double d, std::size_t n, std::size_t m) {
    if (d <= 0.0) return 1.0;
    const double nm = static_cast<double>(n) * m / (n + m);
    return std::exp(-2.0 * d * d * nm);
}

inline double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = lo + 1 < xs.size() ? lo + 1 : lo;
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

}  // namespace ladderlab
