#pragma once

#include <span>

namespace ghzclock {

struct StabilityRecord {
    double tau = 0.0;
    double T = 0.0;
    double adev_formula = 0.0;
    double adev_timeseries = 0.0;
    double adev_normalized = 0.0;  // adev_formula over the SQL at the same atom number
    long long trials = 0;
    double ci_halfwidth = 0.0;
};

double adev_from_phase_error(double rms_dphi, double omega0, double tau, double T);

// Two-sample deviation of per-cycle fractional frequencies at tau = m T, m = round(tau / T).
double adev_timeseries(std::span<const double> y, double T, double tau, bool overlapping = true);

// Allan variance, same estimator.
double avar_timeseries(std::span<const double> y, double T, double tau, bool overlapping = true);

double sql_reference(double N, double omega0, double tau);

}  // namespace ghzclock
