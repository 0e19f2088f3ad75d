#include "ghzclock/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace ghzclock {

namespace {

struct TrialOutcome {
    double sq_error = 0.0;
    double avar = 0.0;
    long long slips = 0;
};

TrialOutcome run_trial(const ProtocolSpec& spec, const NoiseModel& model, double T, long long m,
                       std::uint64_t seed, long long index, const CampaignOptions& opt) {
    Stream s = make_stream(seed, static_cast<std::uint64_t>(index));
    CycleEngine eng(spec, model, T);
    const long long measured = opt.timeseries ? 2 * m : m;
    const auto free_phase = sample_lo_phases(model, T, static_cast<std::size_t>(opt.burn_in + measured), s);

    TrialOutcome out;
    std::vector<double> y;
    if (opt.timeseries) y.reserve(static_cast<std::size_t>(measured));
    double corr = 0.0;  // accumulated correction times T, in radians
    for (long long k = 0; k < opt.burn_in + measured; ++k) {
        auto r = eng.step(free_phase[static_cast<std::size_t>(k)] - corr, s);
        if (!opt.open_loop) corr += spec.gain * r.phi_est;
        long long mk = k - opt.burn_in;
        if (mk < 0) continue;
        if (mk < m) {
            double e = r.phi_est - r.phi_true;
            out.sq_error += e * e;
            out.slips += r.slip ? 1 : 0;
        }
        if (opt.timeseries) y.push_back(r.phi_true / (model.omega0 * T));
    }
    out.sq_error /= static_cast<double>(m);
    // Allan statistic at the realized averaging time m T
    if (opt.timeseries) out.avar = avar_timeseries(y, T, static_cast<double>(m) * T);
    return out;
}

}  // namespace

CampaignResult run_campaign(const ProtocolSpec& spec, const NoiseModel& model, double T, double tau, long long trials,
                            std::uint64_t seed, const CampaignOptions& opt) {
    if (!(T > 0.0)) throw std::invalid_argument("campaign: T must be positive");
    if (tau < T) throw std::invalid_argument("campaign: tau must be >= T");
    if (trials < 2) throw std::invalid_argument("campaign: need at least 2 trials");
    if (opt.burn_in < 0) throw std::invalid_argument("campaign: negative burn-in");
    spec.validate();
    model.validate();
    const long long m = std::max(1LL, static_cast<long long>(std::floor(tau / T * (1.0 + 1e-12))));

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
    unsigned nthreads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    nthreads = static_cast<unsigned>(std::min<long long>(nthreads, trials));
    std::atomic<long long> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            long long i = next.fetch_add(1);
            if (i >= trials) return;
            try {
                outcomes[static_cast<std::size_t>(i)] = run_trial(spec, model, T, m, seed, i, opt);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = trials;
                return;
            }
        }
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    CampaignResult res;
    res.cycles = m;
    double sum_sq = 0.0, sum_avar = 0.0;
    for (const auto& o : outcomes) {
        sum_sq += o.sq_error;
        sum_avar += o.avar;
        res.slips += o.slips;
        res.trial_sq_error.push_back(o.sq_error);
        if (opt.timeseries) res.trial_avar.push_back(o.avar);
    }
    const double n = static_cast<double>(trials);
    StabilityRecord& rec = res.record;
    rec.tau = tau;
    rec.T = T;
    rec.trials = trials;
    rec.adev_formula = adev_from_phase_error(std::sqrt(sum_sq / n), model.omega0, tau, T);
    rec.adev_timeseries = opt.timeseries ? std::sqrt(sum_avar / n) : 0.0;
    rec.adev_normalized = rec.adev_formula / sql_reference(static_cast<double>(spec.atoms()), model.omega0, tau);
    res.slip_rate = static_cast<double>(res.slips) / (n * static_cast<double>(m));

    if (opt.bootstrap > 1) {
        Stream bs = make_stream(seed, ~0ULL);
        std::uniform_int_distribution<long long> pick(0, trials - 1);
        std::vector<double> reps(static_cast<std::size_t>(opt.bootstrap));
        for (auto& r : reps) {
            double acc = 0.0;
            for (long long i = 0; i < trials; ++i) acc += res.trial_sq_error[static_cast<std::size_t>(pick(bs))];
            r = adev_from_phase_error(std::sqrt(acc / n), model.omega0, tau, T);
        }
        std::sort(reps.begin(), reps.end());
        auto at = [&](double q) { return reps[static_cast<std::size_t>(q * (reps.size() - 1) + 0.5)]; };
        rec.ci_halfwidth = 0.5 * (at(0.975) - at(0.025));
    }
    return res;
}

}  // namespace ghzclock
