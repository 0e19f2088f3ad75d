#pragma once

#include <cstdint>
#include <vector>

#include "ghzclock/noise.hpp"
#include "ghzclock/protocol.hpp"
#include "ghzclock/stability.hpp"

namespace ghzclock {

struct CampaignOptions {
    int burn_in = 10;
    bool timeseries = true;  // runs 2 tau/T measured cycles so the Allan estimator has data
    unsigned threads = 0;    // 0 = hardware concurrency
    int bootstrap = 200;
    bool open_loop = false;  // no feedback: every cycle sees only the free-running phase
};

struct CampaignResult {
    StabilityRecord record;
    double slip_rate = 0.0;
    long long slips = 0;
    long long cycles = 0;                // measured cycles per trial
    std::vector<double> trial_sq_error;  // per-trial mean squared estimation error
    std::vector<double> trial_avar;      // per-trial Allan variance (empty without time series)
};

CampaignResult run_campaign(const ProtocolSpec& spec, const NoiseModel& model, double T, double tau,
                            long long trials, std::uint64_t seed, const CampaignOptions& opt = {});

}  // namespace ghzclock
