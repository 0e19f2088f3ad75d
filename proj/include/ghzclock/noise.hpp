#pragma once

#include <cstddef>
#include <vector>

#include "ghzclock/random.hpp"

namespace ghzclock {

enum class Spectrum { WhiteFrequency, FlickerFrequency };

struct NoiseModel {
    Spectrum spectrum = Spectrum::WhiteFrequency;
    double gamma_lo = 0.0;   // rad^2/s (white) or linewidth parameter (flicker)
    double gamma_ind = 0.0;  // 1/s
    double omega0 = 1.0;     // rad/s

    void validate() const;
};

struct PriorWidth {
    double s = 0.0;
};

PriorWidth prior_width(const NoiseModel& model, double T);

// Free-running LO phase accumulated in each of `cycles` consecutive Ramsey cycles.
// Flicker: 1/f shaping over [1/(L T), 1/(2T)] with L the FFT length (next power of
// two >= cycles), then scaled so every marginal has variance (gamma_lo T)^2.
std::vector<double> sample_lo_phases(const NoiseModel& model, double T, std::size_t cycles, Stream& s);

double visibility(const NoiseModel& model, double T, double group_size);

}  // namespace ghzclock
