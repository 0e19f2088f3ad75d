#include "ghzclock/measurement.hpp"

#include <cmath>
#include <stdexcept>

#include "ghzclock/binomial.hpp"
#include "ghzclock/phase.hpp"

namespace ghzclock {

namespace {

void check_visibility(double vis) {
    if (!(vis >= 0.0 && vis <= 1.0)) throw std::invalid_argument("visibility must lie in [0, 1]");
}

double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

CountPair sample_pair(int half, double phx, double phy, double vis, Stream& s) {
    CountPair c;
    c.n_x = c.n_y = half;
    c.k_x = sample_binomial(half, clamp01(0.5 * (1.0 + vis * std::cos(phx))), s);
    c.k_y = sample_binomial(half, clamp01(0.5 * (1.0 + vis * std::cos(phy))), s);
    return c;
}

}  // namespace

CountPair sample_uncorrelated(int n, double phi, double vis, Stream& s) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("sample_uncorrelated: n must be even and >= 2");
    check_visibility(vis);
    // sin(phi) == cos(phi - pi/2)
    return sample_pair(n / 2, phi, phi - kPi / 2, vis, s);
}

CountPair sample_ghz_parities(int copies, long long size, double phi_lo, double vis, Stream& s) {
    if (copies < 2 || copies % 2 != 0)
        throw std::invalid_argument("sample_ghz_parities: copies must be even and >= 2");
    if (size < 1) throw std::invalid_argument("sample_ghz_parities: size must be >= 1");
    check_visibility(vis);
    const double phx = static_cast<double>(size) * phi_lo;
    // Y copies carry a quarter-turn preparation phase so their parity tracks sin(size phi).
    return sample_pair(copies / 2, phx, phx - kPi / 2, vis, s);
}

PhaseEstimate phase_from_counts(const CountPair& c) {
    if (c.n_x < 1 || c.n_y < 1) throw std::invalid_argument("phase_from_counts: empty sub-ensemble");
    const double cx = 2.0 * c.k_x / c.n_x - 1.0;
    const double sy = 2.0 * c.k_y / c.n_y - 1.0;
    if (cx == 0.0 && sy == 0.0) return {0.0, true};
    return {wrap_phase(std::atan2(sy, cx)), false};
}

}  // namespace ghzclock
