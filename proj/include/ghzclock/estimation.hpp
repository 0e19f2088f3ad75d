#pragma once

#include <map>
#include <span>

namespace ghzclock {

struct LevelReading {
    int j = 0;
    double theta_raw = 0.0;  // estimate of wrap(D^j * phi_lo)
    long long group_size = 1;
    int copies = 2;
};

struct DigitString {
    int base = 2;
    std::map<int, int> digits;
};

// R_j: estimate of frac(D^j (phi_lo + pi) / 2pi).
double level_fraction(double theta_raw, int j, int D);

// Phases here are level phases in the shifted convention 2 pi R_j - pi.
int extract_digit(double phi_prev, double phi_cur, int D);

// Recursive unwrap across levels; readings must have consecutive j ascending.
// Result may leave [-pi, pi) when coarse levels see LO wraps.
double reconstruct_phase(std::span<const LevelReading> readings, int D);

// Same estimate assembled from extracted digits (digit sum plus finest level).
double reconstruct_phase_digitwise(std::span<const LevelReading> readings, int D);

// Digits Z_j of the level sequence, j = j_min + 1 .. j_max.
DigitString extract_digits(std::span<const LevelReading> readings, int D);

// Reference expansion: Z_j = floor(D^j (phi_lo + pi) / 2pi) mod D for j in (j_min, j_max].
DigitString digits_oracle(double phi_lo, int j_min, int j_max, int D);

}  // namespace ghzclock
