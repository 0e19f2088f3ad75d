#include "ghzclock/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "ghzclock/binomial.hpp"
#include "ghzclock/phase.hpp"

namespace ghzclock {

namespace {

const double kSqrtPi = std::sqrt(kPi);

double ipow(int D, int j) {
    double r = 1.0;
    for (int i = 0; i < std::abs(j); ++i) r *= D;
    return j >= 0 ? r : 1.0 / r;
}

// pi^2 x / (2 gamma) from the slip/projection trade-off, or tau when the solver does not apply.
double slip_optimum(double n, double A, double scale_gamma, double tau, double* x_out, bool* solved = nullptr) {
    if (solved) *solved = false;
    if (!(A > std::exp(1.0)) || !(scale_gamma > 0.0)) return tau;
    try {
        double x = solve_transcendental(n, A).x_s;
        if (x_out) *x_out = x;
        if (solved) *solved = true;
        return kPi * kPi * x / (2.0 * scale_gamma);
    } catch (const NoConvergence&) {
        return tau;
    }
}

}  // namespace

SolverResult solve_transcendental(double n, double A) {
    if (!(A > std::exp(1.0))) throw std::invalid_argument("solve_transcendental: A must exceed e");
    const double L = std::log(A);
    SolverResult r;
    r.n = n;
    r.A = A;
    double x = 1.0;
    for (r.iterations = 1; r.iterations <= 10000; ++r.iterations) {
        double denom = L - n * std::log(x);
        if (!(denom > 0.0) || !std::isfinite(denom)) break;
        double next = 1.0 / denom;
        if (std::abs(next - x) <= 1e-12 * next) {
            x = next;
            r.x_s = x;
            break;
        }
        x = next;
    }
    if (r.x_s == 0.0) {
        std::ostringstream msg;
        msg << "solve_transcendental: no convergence for n=" << n << ", A=" << A << " (last x=" << x
            << ", |n| x=" << std::abs(n) * x << ")";
        throw NoConvergence(msg.str());
    }
    const double LL = std::log(L);
    if (n <= 0.0) {
        r.x_lower = 1.0 / L;
        r.x_upper = 1.0 / (L + n * LL);
    } else {
        r.x_upper = 1.0 / (L + n * LL);
        if (L > n) r.x_lower = 1.0 / (L + n * LL / (1.0 - n / L));
        else r.x_lower = (1.0 - n / std::exp(1.0)) / L;  // from log u <= u / e
    }
    return r;
}

double p_slip(PriorWidth s) {
    if (s.s <= 0.0) return 0.0;
    return std::erfc(kPi / (std::sqrt(2.0) * s.s));
}

double p_slip_asymptotic(PriorWidth s) {
    if (s.s <= 0.0) return 0.0;
    return std::sqrt(2.0) * s.s / (kPi * kSqrtPi) * std::exp(-kPi * kPi / (2.0 * s.s * s.s));
}

namespace {

double slip_variance_with(double (*p)(PriorWidth), double gamma_lo, double T, double tau, double threshold_scale) {
    if (!(T > 0.0)) throw std::invalid_argument("slip_variance: T must be positive");
    if (!(gamma_lo * T < 1.0)) throw std::invalid_argument("slip_variance: requires gamma_lo T < 1");
    if (!(threshold_scale > 0.0)) throw std::invalid_argument("slip_variance: threshold scale must be positive");
    return kTwoPi * kTwoPi * (tau / T) * p({std::sqrt(gamma_lo * T) * threshold_scale});
}

}  // namespace

double slip_variance(double gamma_lo, double T, double tau, double threshold_scale) {
    return slip_variance_with(p_slip_asymptotic, gamma_lo, T, tau, threshold_scale);
}

double slip_variance_exact(double gamma_lo, double T, double tau, double threshold_scale) {
    return slip_variance_with(p_slip, gamma_lo, T, tau, threshold_scale);
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::NoiseFree: return "noise-free";
        case Regime::LoLimited: return "lo-limited";
        case Regime::DephasingFloor: return "dephasing-floor";
    }
    return "unknown";
}

double single_step_gamma(double N, double gamma_lo, double tau, double T) {
    return single_ghz_gamma(N, 1.0, gamma_lo, tau, T);
}

double single_ghz_gamma(double N, double n_prime, double gamma_lo, double tau, double T) {
    double g = 1.0 / (N * n_prime * T);
    if (gamma_lo > 0.0)
        g += std::sqrt(32.0 * kPi) * tau * std::sqrt(gamma_lo) * n_prime * std::pow(T, -1.5) *
             std::exp(-kPi * kPi / (2.0 * gamma_lo * T * n_prime * n_prime));
    return g;
}

PredictionRecord single_step_prediction(double N, double gamma_lo, double tau, double omega0) {
    if (N < 2.0) throw std::invalid_argument("single_step_prediction: N must be >= 2");
    return single_ghz_prediction(N, 1.0, gamma_lo, tau, omega0);
}

PredictionRecord single_ghz_prediction(double N, double n_prime, double gamma_lo, double tau, double omega0) {
    if (!(n_prime >= 1.0) || std::fmod(N, n_prime) != 0.0)
        throw std::invalid_argument("single_ghz_prediction: n_prime must divide N");
    if (!(tau > 0.0)) throw std::invalid_argument("prediction: tau must be positive");
    PredictionRecord p;
    const double np3 = n_prime * n_prime * n_prime;
    const double A = 8.0 / kSqrtPi * gamma_lo * tau * N * np3;
    p.T_opt = gamma_lo * tau * N * np3 <= std::exp(1.0) ? tau
                                                        : slip_optimum(1.5, A, gamma_lo * n_prime * n_prime, tau, &p.x_opt);
    p.T = std::min(tau, p.T_opt);
    p.gamma1 = 1.0 / (N * n_prime * p.T);
    p.gamma3 = single_ghz_gamma(N, n_prime, gamma_lo, tau, p.T) - p.gamma1;
    const double lg = gamma_lo > 0.0 ? std::max(0.0, std::log(gamma_lo * tau * N * np3)) : 0.0;
    p.sigma_y = std::sqrt(1.0 / (n_prime * tau) + 2.0 / (kPi * kPi) * gamma_lo * n_prime * lg) /
                (omega0 * std::sqrt(N * tau));
    p.regime = tau <= p.T_opt ? Regime::NoiseFree : Regime::LoLimited;
    return p;
}

int n0_opt(int D, double N) {
    if (N < 2.0) throw std::invalid_argument("n0_opt: N must be >= 2");
    double raw = 2.0 / (kPi * kPi) * D * D * std::log(N * N);
    int n = static_cast<int>(2.0 * std::ceil(raw / 2.0));
    return std::max(2, n);
}

double n0_opt_refined(int D, double N) {
    const double delta = static_cast<double>(D) / (D - 1);
    const double A = std::sqrt(32.0) * kPi * kPi * N * N / (delta * delta * (D * D - 1.0));
    return 2.0 * D * D / (kPi * kPi * solve_transcendental(0.5, A).x_s);
}

double rounding_objective(int D, double N, double x) {
    const double delta = static_cast<double>(D) / (D - 1);
    return 2.0 / (kPi * kPi) * delta * delta * D * D / (N * N * x) +
           std::sqrt(128.0) * D * D / (D * D - 1.0) / std::sqrt(x) * std::exp(-1.0 / x);
}

double rounding_error_prob(int n0, int D) {
    return 2.0 / kPi * std::sqrt(static_cast<double>(n0)) * D * std::exp(-n0 * kPi * kPi / (2.0 * D * D));
}

double rounding_error_prob_integral(int n0, int D) { return estimator_tail_bound(n0, kPi / D); }

double estimator_tail_bound(double n, double t) {
    return n * std::sqrt(2.0 * kPi) * std::erfc(t * std::sqrt(n / 2.0));
}

double estimator_error_rate(int n, double threshold, double reference, int phases) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("estimator_error_rate: n must be even and >= 2");
    if (phases < 1) throw std::invalid_argument("estimator_error_rate: phases must be >= 1");
    const int h = n / 2;
    std::vector<double> px(h + 1), py(h + 1);
    double acc = 0.0;
    for (int i = 0; i < phases; ++i) {
        const double phi = -kPi + kTwoPi * (i + 0.5) / phases;
        const double a = phi + reference;
        const double qx = 0.5 * (1.0 + std::cos(a)), qy = 0.5 * (1.0 + std::sin(a));
        for (int k = 0; k <= h; ++k) {
            px[k] = binomial_pmf(h, k, qx);
            py[k] = binomial_pmf(h, k, qy);
        }
        double tail = 0.0;
        for (int kx = 0; kx <= h; ++kx)
            for (int ky = 0; ky <= h; ++ky) {
                // uninformative (0, 0) readout lands at phase 0, as in phase_from_counts
                double est = std::atan2(2.0 * ky / h - 1.0, 2.0 * kx / h - 1.0) - reference;
                if (std::abs(wrap_phase(est - phi)) > threshold) tail += px[kx] * py[ky];
            }
        acc += tail;
    }
    return acc / phases;
}

int classical_level_atoms(int D, double precision, int levels, double share) {
    const double N = precision;
    if (levels < 2) return 0;
    static std::mutex mu;
    static std::map<std::tuple<int, double, int, double>, int> cache;
    const auto key = std::make_tuple(D, N, levels, share);
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    int n = std::max(2, static_cast<int>(2 * std::ceil(classical_level_bound(D, N, ipow(D, levels - 1)) / 2)));
    // A rounding error at coarse level j shifts the estimate by about 2 pi D^(|j| - 1).
    double weight = 0.0;
    for (int i = 0; i < levels - 1; ++i) weight += kTwoPi * kTwoPi * ipow(D, 2 * i);
    const double target = share / (N * weight);
    while (n < N && estimator_error_rate(n, kPi / D, 0.0) > target) n += 2;
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, n);
    return n;
}

double classical_level_bound(int D, double N, double k) {
    return 2.0 / (kPi * kPi) * D * D * std::log(k * N * N);
}

GammaTerms cascade_gamma_terms(const CascadeConfig& cfg, const NoiseModel& model, double tau, double T) {
    cfg.validate();
    const double N = static_cast<double>(cfg.quantum_atoms());
    const double delta = cfg.delta();
    GammaTerms g;
    g.g1 = cfg.n0 * delta * delta / (N * N * T);
    double weights = 0.0;
    for (int j = 1; j < cfg.M; ++j) weights += std::pow(kTwoPi * ipow(cfg.D, -j), 2);
    g.g2 = rounding_error_prob(cfg.n0, cfg.D) * weights / T;
    const double s = model.gamma_lo > 0.0 ? prior_width(model, T).s * ipow(cfg.D, -cfg.M_star) : 0.0;
    g.g3 = kTwoPi * kTwoPi * (tau / T) * p_slip_asymptotic({s}) / T;
    g.g4 = delta * model.gamma_ind / N;
    return g;
}

PredictionRecord cascade_prediction(const CascadeConfig& cfg, const NoiseModel& model, double tau) {
    cfg.validate();
    model.validate();
    if (!(tau > 0.0)) throw std::invalid_argument("prediction: tau must be positive");
    const double N = static_cast<double>(cfg.quantum_atoms());
    const double delta = cfg.delta();
    const int D = cfg.D;
    PredictionRecord p;
    p.n0_opt = n0_opt(D, N);
    try {
        p.x_opt = 2.0 * D * D / (kPi * kPi * n0_opt_refined(D, N));
    } catch (const NoConvergence&) {
        p.x_opt = 0.0;
    }
    const double A = 8.0 * model.gamma_lo * tau * N * N / (kSqrtPi * delta * delta * cfg.n0);
    bool solved = false;
    const double T0 = slip_optimum(1.5, A, model.gamma_lo, tau, &p.y_opt, &solved);
    p.T_opt = solved ? T0 * ipow(D, cfg.M_star) : tau;
    p.T = std::min(tau, p.T_opt);
    GammaTerms g = cascade_gamma_terms(cfg, model, tau, p.T);
    p.gamma1 = g.g1;
    p.gamma2 = g.g2;
    p.gamma3 = g.g3;
    p.gamma4 = g.g4;
    if (cfg.M_star > 0 && cfg.n0_star < classical_level_bound(D, N, ipow(D, cfg.M_star)))
        p.classical_warning = true;
    const double heis = 2.0 * delta * delta * D * D / (kPi * kPi) * std::log(N * N) / (tau * N);
    const double floor = delta * model.gamma_ind;
    if (tau > p.T_opt) {
        // Ramsey time capped below tau: the rate sum at the operating point sets the stability.
        p.sigma_y = std::sqrt(g.sum() / tau) / model.omega0;
        p.regime = g.g4 >= g.g1 + g.g2 + g.g3 ? Regime::DephasingFloor : Regime::LoLimited;
        return p;
    }
    p.sigma_y = std::sqrt((heis + floor) / (tau * N)) / model.omega0;
    p.regime = floor >= heis ? Regime::DephasingFloor : Regime::NoiseFree;
    return p;
}

double binomial_tail_bound(int n, double p, int k) {
    if (n < 2 || k < 0 || k > n) throw std::invalid_argument("binomial_tail_bound: need n >= 2 and 0 <= k <= n");
    double d = static_cast<double>(k) / n - p;
    return std::exp(-2.0 * (n - 1) * d * d);
}

double crossover_time(double N, double gamma_ind) {
    if (!(gamma_ind > 0.0)) throw std::invalid_argument("crossover_time: gamma_ind must be positive");
    return std::log(N) / (N * gamma_ind);
}

double crossover_time(const CascadeConfig& cfg, double gamma_ind) {
    if (!(gamma_ind > 0.0)) throw std::invalid_argument("crossover_time: gamma_ind must be positive");
    return 1.0 / (gamma_ind * static_cast<double>(cfg.top_group()));
}

double noise_floor(double N, double gamma_ind, double tau, double omega0) {
    return std::sqrt(gamma_ind / (tau * N)) / omega0;
}

double cascade_accuracy_main(double N) { return 8.0 / kPi * std::sqrt(std::log(N)) / N; }

double cascade_accuracy_from_copies(double n0, double N) { return 2.0 * std::sqrt(n0) / N; }

namespace {

// E[(2 pi K)^2] for K the fringe count of a centered Gaussian phase of width s:
// (2 pi)^2 sum_k (2k - 1) erfc((2k - 1) pi / (sqrt 2 s)). Leading term is (2 pi)^2 p_slip.
double wrap_second_moment(double s) {
    if (!(s > 0.0)) return 0.0;
    double m = 0.0;
    for (int k = 1;; ++k) {
        const double a = 2.0 * k - 1.0;
        const double t = a * std::erfc(a * kPi / (std::sqrt(2.0) * s));
        m += t;
        if (t < 1e-17 * m || a * kPi > 40.0 * s) break;
    }
    return kTwoPi * kTwoPi * m;
}

}  // namespace

double cycle_error_budget(const ProtocolSpec& spec, const NoiseModel& model, double tau, double T) {
    if (!(T > 0.0) || !(tau > 0.0)) throw std::invalid_argument("cycle_error_budget: T and tau must be positive");
    const auto plan = level_plan(spec);
    const LevelPlan& top = plan.back();
    double v = std::exp(2.0 * static_cast<double>(top.group_size) * model.gamma_ind * T * top.time_factor) /
               (top.copies * top.scale * top.scale);
    if (model.gamma_lo > 0.0) {
        double s = prior_width(model, T).s;
        // Feedback adds its own estimate noise to the next white-noise prior: variance x 2/(2 - gain).
        if (model.spectrum == Spectrum::WhiteFrequency) s *= std::sqrt(2.0 / (2.0 - spec.gain));
        const double c = plan.front().scale;
        v += (tau / T) * wrap_second_moment(s * c) / (c * c);
    }
    return v / T;
}

double operating_ramsey_time(const ProtocolSpec& spec, const NoiseModel& model, double tau) {
    model.validate();
    if (!(tau > 0.0)) throw std::invalid_argument("operating_ramsey_time: tau must be positive");
    if (model.gamma_lo == 0.0 && model.gamma_ind == 0.0) return tau;
    spec.validate();
    double T = grid_minimize([&](double t) { return cycle_error_budget(spec, model, tau, t); }, tau * 1e-9, tau, 4000);
    return std::min(T, tau);
}

double classical_exponential_sigma(double N, double gamma_ind, double tau, double omega0) {
    if (N < 1.0) throw std::invalid_argument("classical_exponential_sigma: N must be >= 1");
    return std::sqrt((1.0 / tau + gamma_ind) / (tau * N)) / omega0;
}

}  // namespace ghzclock
