#pragma once

#include "ghzclock/random.hpp"

namespace ghzclock {

struct CountPair {
    int k_x = 0;
    int k_y = 0;
    int n_x = 0;
    int n_y = 0;
};

// Half the atoms read the cosine quadrature, the other half the sine quadrature.
CountPair sample_uncorrelated(int n, double phi, double vis, Stream& s);

// Parity readout of `copies` GHZ states of `size` qubits each.
CountPair sample_ghz_parities(int copies, long long size, double phi_lo, double vis, Stream& s);

struct PhaseEstimate {
    double phase = 0.0;
    bool uninformative = false;
};

PhaseEstimate phase_from_counts(const CountPair& c);

}  // namespace ghzclock
