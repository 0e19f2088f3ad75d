#pragma once

#include "ghzclock/random.hpp"

namespace ghzclock {

// Exact draw from Binomial(n, p) by inversion; no normal approximation at any n.
int sample_binomial(int n, double p, Stream& s);

double binomial_pmf(int n, int k, double p);

}  // namespace ghzclock
