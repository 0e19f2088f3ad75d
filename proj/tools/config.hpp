#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ghzclock/campaign.hpp"
#include "ghzclock/noise.hpp"
#include "ghzclock/protocol.hpp"

namespace ghzclock::cli {

// Message is already anchored as file:line:column.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class TPolicy { Fixed, TauTracking, AnalyticOptimal };

// Raw protocol entry; building is deferred so degenerate budgets can be reported per command.
struct ProtocolEntry {
    ProtocolKind kind = ProtocolKind::SingleStepUncorrelated;
    std::string name;        // label in output, defaults to the kind name
    long long atoms = 0;
    double gain = 0.7;
    long long ghz_size = 0;  // single-ghz
    int base = 2;            // classical-exponential and cascaded-ghz
    int levels = 0;          // classical-exponential levels or cascade M; 0 = automatic
    int copies = 0;          // cascade n0; 0 = automatic
    int coarse_atoms = 0;    // classical-exponential, 0 = automatic
    int classical_levels = 0;  // cascade M*; -1 = automatic
    int classical_copies = 0;  // cascade n0*; 0 = automatic
};

struct ScenarioConfig {
    std::string source;
    std::vector<ProtocolEntry> protocols;
    NoiseModel noise;
    std::vector<double> tau;
    TPolicy policy = TPolicy::AnalyticOptimal;
    double T_fixed = 0.0;
    long long cycles_per_tau = 1;  // tau-tracking: T = tau / cycles_per_tau
    long long trials = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string output;
    CampaignOptions campaign;
    bool cross_check = false;
    std::vector<double> sweep_T;
};

ScenarioConfig parse_config(const std::string& text, const std::string& source);
ScenarioConfig load_config(const std::string& path);

// Concrete protocol for a given atom budget, or nullopt with the reason in `why`.
std::optional<ProtocolSpec> build_protocol(const ProtocolEntry& e, std::string& why);

// Structures to choose from at run time: one per classical level count when that count is
// automatic, otherwise just the built spec.
std::vector<ProtocolSpec> candidates(const ProtocolEntry& e, const ProtocolSpec& built);

// Candidate with the smallest cycle budget at Ramsey time T.
ProtocolSpec choose_structure(const ProtocolEntry& e, const ProtocolSpec& built, const NoiseModel& model, double tau,
                              double T);

// Ramsey time (and, for automatic classical levels, the level count) for one tau.
struct Operating {
    ProtocolSpec spec;
    double T = 0.0;
};
Operating operating_point(const ProtocolEntry& e, const ProtocolSpec& spec, const ScenarioConfig& cfg, double tau);

}  // namespace ghzclock::cli
