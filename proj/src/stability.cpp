#include "ghzclock/stability.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ghzclock {

double adev_from_phase_error(double rms_dphi, double omega0, double tau, double T) {
    return rms_dphi / (omega0 * std::sqrt(tau * T));
}

double avar_timeseries(std::span<const double> y, double T, double tau, bool overlapping) {
    if (!(T > 0.0) || !(tau > 0.0)) throw std::invalid_argument("adev_timeseries: T and tau must be positive");
    const long long m = std::llround(tau / T);
    const long long n = static_cast<long long>(y.size());
    if (m < 1 || n < 2 * m) throw std::invalid_argument("adev_timeseries: record shorter than 2 tau");
    // x holds time error; second differences of x at lag m give the Allan statistic.
    std::vector<double> x(static_cast<std::size_t>(n + 1), 0.0);
    for (long long i = 0; i < n; ++i) x[i + 1] = x[i] + y[i] * T;
    const long long stride = overlapping ? 1 : m;
    double acc = 0.0;
    long long terms = 0;
    for (long long i = 0; i + 2 * m <= n; i += stride) {
        double d = x[i + 2 * m] - 2.0 * x[i + m] + x[i];
        acc += d * d;
        ++terms;
    }
    const double t = static_cast<double>(m) * T;
    return acc / (2.0 * static_cast<double>(terms) * t * t);
}

double adev_timeseries(std::span<const double> y, double T, double tau, bool overlapping) {
    return std::sqrt(avar_timeseries(y, T, tau, overlapping));
}

double sql_reference(double N, double omega0, double tau) {
    if (N < 1.0) throw std::invalid_argument("sql_reference: N must be >= 1");
    return 1.0 / (omega0 * tau * std::sqrt(N));
}

}  // namespace ghzclock
