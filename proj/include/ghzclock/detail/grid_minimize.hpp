#pragma once

#include <cmath>
#include <limits>

namespace ghzclock {

template <class F>
double grid_minimize(F&& f, double lo, double hi, int points) {
    const double a = std::log(lo), b = std::log(hi);
    const double step = (b - a) / (points - 1);
    int best = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
        double v = f(std::exp(a + step * i));
        if (v < fbest) {
            fbest = v;
            best = i;
        }
    }
    double l = a + step * std::max(best - 1, 0), r = a + step * std::min(best + 1, points - 1);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = r - g * (r - l), d = l + g * (r - l);
    double fc = f(std::exp(c)), fd = f(std::exp(d));
    for (int it = 0; it < 100 && r - l > 1e-12; ++it) {
        if (fc < fd) {
            r = d; d = c; fd = fc;
            c = r - g * (r - l); fc = f(std::exp(c));
        } else {
            l = c; c = d; fc = fd;
            d = l + g * (r - l); fd = f(std::exp(d));
        }
    }
    double x = std::exp(0.5 * (l + r));
    return f(x) <= fbest ? x : std::exp(a + step * best);
}

}  // namespace ghzclock
