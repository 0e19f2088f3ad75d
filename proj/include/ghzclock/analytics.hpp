#pragma once

#include <stdexcept>
#include <string>

#include "ghzclock/noise.hpp"
#include "ghzclock/protocol.hpp"

namespace ghzclock {

class NoConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolverResult {
    double x_s = 0.0;
    double x_lower = 0.0;
    double x_upper = 0.0;
    int iterations = 0;
    double n = 0.0;
    double A = 0.0;
};

// Small root of x^n = A exp(-1/x) by iterating x <- 1 / (log A - n log x) from x = 1.
SolverResult solve_transcendental(double n, double A);

double p_slip(PriorWidth s);
double p_slip_asymptotic(PriorWidth s);  // leading term of the tail expansion

// (2 pi)^2 (tau/T) P_slip with slip threshold pi / threshold_scale, asymptotic tail form.
double slip_variance(double gamma_lo, double T, double tau, double threshold_scale);
double slip_variance_exact(double gamma_lo, double T, double tau, double threshold_scale);

enum class Regime { NoiseFree, LoLimited, DephasingFloor };

const char* to_string(Regime r);

struct PredictionRecord {
    double gamma1 = 0.0;  // projection noise
    double gamma2 = 0.0;  // rounding errors
    double gamma3 = 0.0;  // phase slips
    double gamma4 = 0.0;  // individual dephasing
    double T_opt = 0.0;
    double T = 0.0;  // operating Ramsey time, min(tau, T_opt)
    int n0_opt = 0;
    double sigma_y = 0.0;
    Regime regime = Regime::NoiseFree;
    bool classical_warning = false;  // n0_star below the classical rounding bound
    double x_opt = 0.0;
    double y_opt = 0.0;
};

// Effective linewidth of the single-step protocol at Ramsey time T.
double single_step_gamma(double N, double gamma_lo, double tau, double T);
PredictionRecord single_step_prediction(double N, double gamma_lo, double tau, double omega0 = 1.0);

double single_ghz_gamma(double N, double n_prime, double gamma_lo, double tau, double T);
PredictionRecord single_ghz_prediction(double N, double n_prime, double gamma_lo, double tau,
                                       double omega0 = 1.0);

// (2/pi^2) D^2 log(N^2), rounded up to an even count >= 2.
int n0_opt(int D, double N);
// Continuous optimum from the full transcendental condition, n0 = 2 D^2 / (pi^2 x).
double n0_opt_refined(int D, double N);
// Gamma1 + Gamma2 written in x = 2 D^2 / (n0 pi^2), at T = 1.
double rounding_objective(int D, double N, double x);

double rounding_error_prob(int n0, int D);
// Closed-form integral of the tail bound at threshold pi / D: n0 sqrt(2 pi) erfc(pi sqrt(n0) / (D sqrt 2)).
double rounding_error_prob_integral(int n0, int D);
// 2 int_t^inf n^(3/2) exp(-n u^2 / 2) du
double estimator_tail_bound(double n, double t);

// Phase-averaged probability that the two-quadrature estimator from n atoms (n/2 per
// quadrature, full contrast) errs by more than threshold, from the exact count law.
double estimator_error_rate(int n, double threshold, double reference = 0.0, int phases = 64);

// Even atom count per coarse level so that coarse rounding errors add at most `share` of
// the variance 1/precision (1/N for uncorrelated atoms, 1/(n0 D^(2(M-1))) under a cascade);
// never below the classical_level_bound value at N = precision.
int classical_level_atoms(int D, double precision, int levels, double share = 0.1);

// Lower bound on atoms per classical level for a Ramsey-time extension by k.
double classical_level_bound(int D, double N, double k);

struct GammaTerms {
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;
    double g4 = 0.0;
    double sum() const { return g1 + g2 + g3 + g4; }
};

GammaTerms cascade_gamma_terms(const CascadeConfig& cfg, const NoiseModel& model, double tau, double T);
PredictionRecord cascade_prediction(const CascadeConfig& cfg, const NoiseModel& model, double tau);

double binomial_tail_bound(int n, double p, int k);

double crossover_time(double N, double gamma_ind);
double crossover_time(const CascadeConfig& cfg, double gamma_ind);

// Dephasing floor sqrt(gamma_ind / (tau N)) / omega0.
double noise_floor(double N, double gamma_ind, double tau, double omega0 = 1.0);
// Heisenberg-up-to-log accuracy of the cascade, (8/pi) sqrt(log N) / N.
double cascade_accuracy_main(double N);
// Same quantity from the copy count, 2 sqrt(n0) / N.
double cascade_accuracy_from_copies(double n0, double N);

// Per-cycle error budget divided by T: projection noise with contrast decay plus the
// fringe-count error of the coarsest level (its second moment, in LO phase units),
// weighted by the cycles spent in a wrong fringe.
double cycle_error_budget(const ProtocolSpec& spec, const NoiseModel& model, double tau, double T);

// Ramsey time for simulations: minimizes the per-cycle error budget (projection noise
// with contrast decay plus single-cycle slips at the coarsest level) over T <= tau.
double operating_ramsey_time(const ProtocolSpec& spec, const NoiseModel& model, double tau);

// Classical exponential schedule: SQL line at T = tau joined to the dephasing floor.
double classical_exponential_sigma(double N, double gamma_ind, double tau, double omega0 = 1.0);

// Log-spaced grid minimizer of f over [lo, hi]; refined by golden section around the best node.
template <class F>
double grid_minimize(F&& f, double lo, double hi, int points = 10000);

}  // namespace ghzclock

#include "ghzclock/detail/grid_minimize.hpp"
