#include "ghzclock/estimation.hpp"

#include <cmath>
#include <stdexcept>

#include "ghzclock/phase.hpp"

namespace ghzclock {

namespace {

double ipow(int D, int j) {
    double r = 1.0;
    for (int i = 0; i < std::abs(j); ++i) r *= D;
    return j >= 0 ? r : 1.0 / r;
}

// D^j pi reduced mod 2 pi for j >= 0 is exactly pi or 0.
double level_offset(int j, int D) {
    if (j >= 0) return (j == 0 || D % 2 == 1) ? kPi : 0.0;
    return kPi * ipow(D, j);
}

double frac(double v) {
    double f = v - std::floor(v);
    return f >= 1.0 ? 0.0 : f;
}

int mod_base(double r, int D) {
    long long z = static_cast<long long>(r) % D;
    return static_cast<int>(z < 0 ? z + D : z);
}

void check_readings(std::span<const LevelReading> readings, int D) {
    if (readings.empty()) throw std::invalid_argument("reconstruct_phase: no readings");
    if (D < 2) throw std::invalid_argument("reconstruct_phase: base must be >= 2");
    for (std::size_t i = 1; i < readings.size(); ++i)
        if (readings[i].j != readings[i - 1].j + 1)
            throw std::invalid_argument("reconstruct_phase: levels must be consecutive and ascending");
}

// Coarsest level. Below j = 0 the reading is kept unwrapped around zero, which keeps
// negative LO phases inside the detection range.
double anchor(const LevelReading& r, int D) {
    if (r.j >= 0) return level_fraction(r.theta_raw, r.j, D);
    return (r.theta_raw + level_offset(r.j, D)) / kTwoPi;
}

}  // namespace

double level_fraction(double theta_raw, int j, int D) {
    return frac((theta_raw + level_offset(j, D)) / kTwoPi);
}

int extract_digit(double phi_prev, double phi_cur, int D) {
    double v = (D * (phi_prev + kPi) - (phi_cur + kPi)) / kTwoPi;
    return mod_base(std::nearbyint(v), D);
}

double reconstruct_phase(std::span<const LevelReading> readings, int D) {
    check_readings(readings, D);
    double x = anchor(readings.front(), D);
    for (std::size_t i = 1; i < readings.size(); ++i) {
        double r = level_fraction(readings[i].theta_raw, readings[i].j, D);
        x = r + std::nearbyint(D * x - r);
    }
    return kTwoPi * x / ipow(D, readings.back().j) - kPi;
}

DigitString extract_digits(std::span<const LevelReading> readings, int D) {
    DigitString out;
    out.base = D;
    for (std::size_t i = 1; i < readings.size(); ++i) {
        double prev = kTwoPi * level_fraction(readings[i - 1].theta_raw, readings[i - 1].j, D) - kPi;
        double cur = kTwoPi * level_fraction(readings[i].theta_raw, readings[i].j, D) - kPi;
        out.digits[readings[i].j] = extract_digit(prev, cur, D);
    }
    return out;
}

double reconstruct_phase_digitwise(std::span<const LevelReading> readings, int D) {
    check_readings(readings, D);
    const LevelReading& first = readings.front();
    const int jmin = first.j, jmax = readings.back().j;
    double whole = anchor(first, D) - level_fraction(first.theta_raw, jmin, D);
    double x = std::nearbyint(whole) * ipow(D, jmax - jmin);
    for (const auto& [j, z] : extract_digits(readings, D).digits) x += z * ipow(D, jmax - j);
    x += level_fraction(readings.back().theta_raw, jmax, D);
    return kTwoPi * x / ipow(D, jmax) - kPi;
}

DigitString digits_oracle(double phi_lo, int j_min, int j_max, int D) {
    if (D < 2) throw std::invalid_argument("digits_oracle: base must be >= 2");
    DigitString out;
    out.base = D;
    // Same double-precision fraction the forward map uses; the expansion itself is long double.
    long double t = static_cast<long double>((phi_lo + kPi) / kTwoPi);
    for (int i = 0; i < std::abs(j_min); ++i) t = j_min > 0 ? t * D : t / D;
    t -= std::floor(t);
    for (int j = j_min + 1; j <= j_max; ++j) {
        t *= D;
        long double z = std::floor(t);
        t -= z;
        out.digits[j] = static_cast<int>(z);
    }
    return out;
}

}  // namespace ghzclock
