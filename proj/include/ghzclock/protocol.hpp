#pragma once

#include <vector>

#include "ghzclock/estimation.hpp"
#include "ghzclock/noise.hpp"
#include "ghzclock/random.hpp"

namespace ghzclock {

enum class ProtocolKind { SingleStepUncorrelated, SingleGHZ, ClassicalExponential, CascadedGHZ };

const char* to_string(ProtocolKind k);

struct CascadeConfig {
    int D = 2;
    int M = 1;
    int n0 = 2;
    int M_star = 0;
    int n0_star = 2;

    long long quantum_atoms() const;    // n0 (D^M - 1) / (D - 1)
    long long classical_atoms() const;  // M_star n0_star
    long long top_group() const;        // D^(M-1)
    double delta() const;               // D / (D - 1)
    void validate() const;
};

struct CascadeBuild {
    CascadeConfig config;
    long long atoms_used = 0;  // quantum part only
    long long leftover = 0;
};

CascadeBuild build_cascade(long long N_target, int D, int n0, int M_star, int n0_star);

struct ScheduleLevel {
    int j = 0;
    double effective_time = 0.0;
    long long atoms = 0;
};

// Uncorrelated ensembles at T_base D^j, j = 0, -1, ..., -(levels-1). Coarse levels get
// coarse_atoms each (0 picks classical_level_atoms); level 0 gets the rest.
std::vector<ScheduleLevel> classical_exponential_schedule(long long N, double T_base, int levels, int D = 2,
                                                          int coarse_atoms = 0);

struct ProtocolSpec {
    ProtocolKind kind = ProtocolKind::SingleStepUncorrelated;
    CascadeConfig cascade;    // CascadedGHZ; cascade.D is also the base for ClassicalExponential
    long long total_atoms = 2;
    long long ghz_size = 0;   // SingleGHZ group size, 0 = total_atoms / 2
    int levels = 1;           // ClassicalExponential
    int coarse_atoms = 0;     // ClassicalExponential, 0 = automatic
    double gain = 0.7;

    void validate() const;
    long long atoms() const;  // atoms consumed per cycle
};

// One interrogation group inside a cycle.
struct LevelPlan {
    int j = 0;
    long long group_size = 1;  // qubits per GHZ copy (1 for uncorrelated atoms)
    int copies = 2;            // GHZ copies or atoms, split evenly between quadratures
    double scale = 1.0;        // phase picked up per unit LO phase
    double time_factor = 1.0;  // interrogation time relative to T, enters visibility
    double reference = 0.0;    // readout quadrature offset, removed after estimation
};

std::vector<LevelPlan> level_plan(const ProtocolSpec& spec);

struct CycleRecord {
    double phi_true = 0.0;
    double phi_est = 0.0;
    std::vector<LevelReading> readings;
    DigitString digits;
    double correction_state = 0.0;  // after the update
    bool slip_flag = false;
    bool uninformative = false;
};

CycleRecord run_cycle(const ProtocolSpec& spec, const NoiseModel& model, double T, double phi_free,
                      double state, Stream& s);

// Reusable cycle evaluator for hot loops; estimates are identical to run_cycle.
class CycleEngine {
public:
    CycleEngine(const ProtocolSpec& spec, const NoiseModel& model, double T);

    struct Result {
        double phi_true;
        double phi_est;
        bool slip;
        bool uninformative;
    };

    Result step(double phi_true, Stream& s);
    const std::vector<LevelReading>& readings() const { return readings_; }
    double slip_scale() const { return plan_.front().scale; }
    int base() const { return base_; }

private:
    ProtocolSpec spec_;
    std::vector<LevelPlan> plan_;
    std::vector<double> vis_;
    std::vector<LevelReading> readings_;
    int base_ = 2;
};

}  // namespace ghzclock
