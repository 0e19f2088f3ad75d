#include "ghzclock/binomial.hpp"

#include <cmath>
#include <stdexcept>

namespace ghzclock {

namespace {

// Inversion from k = 0; only used while n q is small so q^n stays well above underflow.
int invert_from_zero(int n, double q, Stream& s) {
    const double r = q / (1.0 - q);
    const double f0 = std::pow(1.0 - q, n);
    for (;;) {
        double u = uniform01(s);
        double f = f0;
        for (int k = 0; k <= n; ++k) {
            if (u < f) return k;
            u -= f;
            f *= r * (n - k) / (k + 1);
        }
        // Accumulated rounding left u past the last cell; draw again.
    }
}

// Chop-down inversion starting at the mode and alternating outwards.
int invert_from_mode(int n, double q, Stream& s) {
    const int m = static_cast<int>((n + 1) * q);
    const double logq = std::log(q), logp = std::log1p(-q);
    const double pm = std::exp(std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) + m * logq +
                               (n - m) * logp);
    const double up = q / (1.0 - q), down = (1.0 - q) / q;
    for (;;) {
        double u = uniform01(s);
        if (u < pm) return m;
        u -= pm;
        int lo = m, hi = m;
        double flo = pm, fhi = pm;
        while (lo > 0 || hi < n) {
            if (lo > 0) {
                flo *= down * lo / (n - lo + 1.0);
                --lo;
                if (u < flo) return lo;
                u -= flo;
            }
            if (hi < n) {
                fhi *= up * (n - hi) / (hi + 1.0);
                ++hi;
                if (u < fhi) return hi;
                u -= fhi;
            }
        }
    }
}

}  // namespace

int sample_binomial(int n, double p, Stream& s) {
    if (n < 0) throw std::invalid_argument("sample_binomial: negative trial count");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_binomial: probability outside [0, 1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    const bool flip = p > 0.5;
    const double q = flip ? 1.0 - p : p;
    const int k = n * q < 30.0 ? invert_from_zero(n, q, s) : invert_from_mode(n, q, s);
    return flip ? n - k : k;
}

double binomial_pmf(int n, int k, double p) {
    if (k < 0 || k > n) return 0.0;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
                    (n - k) * std::log1p(-p));
}

}  // namespace ghzclock
