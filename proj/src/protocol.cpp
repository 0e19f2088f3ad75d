#include "ghzclock/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ghzclock/analytics.hpp"
#include "ghzclock/measurement.hpp"
#include "ghzclock/phase.hpp"

namespace ghzclock {

namespace {

long long ipow_ll(int D, int j) {
    long long r = 1;
    for (int i = 0; i < j; ++i) r *= D;
    return r;
}

double ipow(int D, int j) {
    double r = 1.0;
    for (int i = 0; i < std::abs(j); ++i) r *= D;
    return j >= 0 ? r : 1.0 / r;
}

long long even_floor(long long n) { return n - (n % 2); }

// Readout offset for j >= 0. Coarse levels read at zero offset: their phase stays near
// zero, where the unshifted estimator has the thinner error tail.
constexpr double kQuadratureRef = kPi / 4;

void check_even(long long n, const char* what) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument(std::string(what) + " must be even and >= 2");
}

}  // namespace

const char* to_string(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::SingleStepUncorrelated: return "single-step";
        case ProtocolKind::SingleGHZ: return "single-ghz";
        case ProtocolKind::ClassicalExponential: return "classical-exponential";
        case ProtocolKind::CascadedGHZ: return "cascaded-ghz";
    }
    return "unknown";
}

long long CascadeConfig::quantum_atoms() const { return n0 * (ipow_ll(D, M) - 1) / (D - 1); }
long long CascadeConfig::classical_atoms() const { return static_cast<long long>(M_star) * n0_star; }
long long CascadeConfig::top_group() const { return ipow_ll(D, M - 1); }
double CascadeConfig::delta() const { return static_cast<double>(D) / (D - 1); }

void CascadeConfig::validate() const {
    if (D < 2) throw std::invalid_argument("cascade: D must be >= 2");
    if (M < 1) throw std::invalid_argument("cascade: M must be >= 1");
    if (M_star < 0) throw std::invalid_argument("cascade: M_star must be >= 0");
    if ((M - 1) * std::log(static_cast<double>(D)) > 52 * std::log(2.0))
        throw std::invalid_argument("cascade: largest group size exceeds 2^52");
    check_even(n0, "cascade: n0");
    if (M_star > 0) check_even(n0_star, "cascade: n0_star");
}

CascadeBuild build_cascade(long long N_target, int D, int n0, int M_star, int n0_star) {
    if (D < 2) throw std::invalid_argument("build_cascade: D must be >= 2");
    check_even(n0, "build_cascade: n0");
    if (N_target < static_cast<long long>(n0) * (D + 1))
        throw std::invalid_argument("build_cascade: budget below two levels (n0 (D + 1) atoms)");
    CascadeConfig c{D, 2, n0, M_star, n0_star};
    for (;;) {
        CascadeConfig next = c;
        ++next.M;
        if (next.quantum_atoms() > N_target || (next.M - 1) * std::log2(static_cast<double>(D)) > 52) break;
        c = next;
    }
    c.validate();
    return {c, c.quantum_atoms(), N_target - c.quantum_atoms()};
}

std::vector<ScheduleLevel> classical_exponential_schedule(long long N, double T_base, int levels, int D,
                                                          int coarse_atoms) {
    if (levels < 1) throw std::invalid_argument("classical schedule: levels must be >= 1");
    if (D < 2) throw std::invalid_argument("classical schedule: D must be >= 2");
    if (levels > 1 && coarse_atoms == 0) coarse_atoms = classical_level_atoms(D, static_cast<double>(N), levels);
    if (levels > 1) check_even(coarse_atoms, "classical schedule: coarse atoms");
    long long top = even_floor(N - static_cast<long long>(levels - 1) * coarse_atoms);
    if (top < 2) throw std::invalid_argument("classical schedule: too few atoms for the requested levels");
    std::vector<ScheduleLevel> out;
    out.push_back({0, T_base, top});
    for (int j = -1; j > -levels; --j) out.push_back({j, T_base * ipow(D, j), coarse_atoms});
    return out;
}

void ProtocolSpec::validate() const {
    if (!(gain > 0.0 && gain <= 1.0)) throw std::invalid_argument("protocol: gain must lie in (0, 1]");
    switch (kind) {
        case ProtocolKind::CascadedGHZ:
            cascade.validate();
            break;
        case ProtocolKind::SingleGHZ: {
            if (total_atoms < 4) throw std::invalid_argument("protocol: single GHZ needs at least 4 atoms");
            long long g = ghz_size > 0 ? ghz_size : total_atoms / 2;
            if (g < 1 || total_atoms % g != 0)
                throw std::invalid_argument("protocol: ghz_size must divide total_atoms");
            if (total_atoms / g < 2 || (total_atoms / g) % 2 != 0)
                throw std::invalid_argument("protocol: total_atoms / ghz_size must be even and >= 2");
            break;
        }
        case ProtocolKind::ClassicalExponential:
            if (cascade.D < 2) throw std::invalid_argument("protocol: base must be >= 2");
            classical_exponential_schedule(total_atoms, 1.0, levels, cascade.D, coarse_atoms);
            break;
        case ProtocolKind::SingleStepUncorrelated:
            if (total_atoms < 2) throw std::invalid_argument("protocol: total_atoms must be >= 2");
            break;
    }
}

std::vector<LevelPlan> level_plan(const ProtocolSpec& spec) {
    spec.validate();
    std::vector<LevelPlan> plan;
    switch (spec.kind) {
        case ProtocolKind::SingleStepUncorrelated:
            plan.push_back({0, 1, static_cast<int>(even_floor(spec.total_atoms)), 1.0, 1.0, kQuadratureRef});
            break;
        case ProtocolKind::SingleGHZ: {
            long long g = spec.ghz_size > 0 ? spec.ghz_size : spec.total_atoms / 2;
            plan.push_back({0, g, static_cast<int>(spec.total_atoms / g), static_cast<double>(g), 1.0, kQuadratureRef});
            break;
        }
        case ProtocolKind::ClassicalExponential: {
            auto sched = classical_exponential_schedule(spec.total_atoms, 1.0, spec.levels, spec.cascade.D,
                                                        spec.coarse_atoms);
            for (auto it = sched.rbegin(); it != sched.rend(); ++it) {
                double sc = ipow(spec.cascade.D, it->j);
                plan.push_back({it->j, 1, static_cast<int>(it->atoms), sc, sc, it->j < 0 ? 0.0 : kQuadratureRef});
            }
            break;
        }
        case ProtocolKind::CascadedGHZ: {
            const CascadeConfig& c = spec.cascade;
            for (int j = -c.M_star; j < 0; ++j) {
                double sc = ipow(c.D, j);
                plan.push_back({j, 1, c.n0_star, sc, sc, 0.0});
            }
            for (int j = 0; j < c.M; ++j) {
                long long g = ipow_ll(c.D, j);
                plan.push_back({j, g, c.n0, static_cast<double>(g), 1.0, kQuadratureRef});
            }
            break;
        }
    }
    return plan;
}

long long ProtocolSpec::atoms() const {
    long long sum = 0;
    for (const auto& l : level_plan(*this)) sum += l.group_size * l.copies;
    return sum;
}

CycleEngine::CycleEngine(const ProtocolSpec& spec, const NoiseModel& model, double T)
    : spec_(spec), plan_(level_plan(spec)) {
    if (!(T > 0.0)) throw std::invalid_argument("cycle: T must be positive");
    model.validate();
    base_ = spec.kind == ProtocolKind::CascadedGHZ || spec.kind == ProtocolKind::ClassicalExponential ? spec.cascade.D : 2;
    for (const auto& l : plan_) {
        vis_.push_back(visibility(model, T * l.time_factor, static_cast<double>(l.group_size)));
        readings_.push_back({l.j, 0.0, l.group_size, l.copies});
    }
}

CycleEngine::Result CycleEngine::step(double phi_true, Stream& s) {
    bool uninformative = false;
    for (std::size_t i = 0; i < plan_.size(); ++i) {
        const LevelPlan& l = plan_[i];
        CountPair c = l.group_size == 1
                          ? sample_uncorrelated(l.copies, l.scale * phi_true + l.reference, vis_[i], s)
                          : sample_ghz_parities(l.copies, l.group_size,
                                                phi_true + l.reference / static_cast<double>(l.group_size), vis_[i], s);
        PhaseEstimate e = phase_from_counts(c);
        uninformative = uninformative || e.uninformative;
        readings_[i].theta_raw = wrap_phase(e.phase - l.reference);
    }
    double est;
    switch (spec_.kind) {
        case ProtocolKind::SingleStepUncorrelated: est = readings_[0].theta_raw; break;
        case ProtocolKind::SingleGHZ: est = readings_[0].theta_raw / plan_[0].scale; break;
        default: est = reconstruct_phase(readings_, base_); break;
    }
    bool slip = std::abs(plan_.front().scale * phi_true) >= kPi;
    return {phi_true, est, slip, uninformative};
}

CycleRecord run_cycle(const ProtocolSpec& spec, const NoiseModel& model, double T, double phi_free, double state,
                      Stream& s) {
    CycleEngine eng(spec, model, T);
    CycleRecord rec;
    rec.phi_true = phi_free - state * T;
    auto r = eng.step(rec.phi_true, s);
    rec.phi_est = r.phi_est;
    rec.slip_flag = r.slip;
    rec.uninformative = r.uninformative;
    rec.readings = eng.readings();
    if (rec.readings.size() > 1) rec.digits = extract_digits(rec.readings, eng.base());
    else rec.digits.base = eng.base();
    rec.correction_state = state + spec.gain * rec.phi_est / T;
    return rec;
}

}  // namespace ghzclock
