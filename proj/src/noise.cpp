#include "ghzclock/noise.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace ghzclock {

namespace {

std::mutex planner_mutex;  // FFTW planning is not thread safe

std::size_t next_pow2(std::size_t n) {
    std::size_t L = 2;
    while (L < n) L <<= 1;
    return L;
}

std::vector<double> flicker_series(double sigma, std::size_t cycles, Stream& s) {
    const std::size_t L = next_pow2(cycles);
    const std::size_t half = L / 2;
    std::normal_distribution<double> gauss;

    fftw_complex* spec = fftw_alloc_complex(half + 1);
    double* out = fftw_alloc_real(L);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(L), spec, out, FFTW_ESTIMATE);
    }

    // Amplitude 1/sqrt(k) gives power 1/f; c2r doubles interior bins.
    double var = 0.0;
    spec[0][0] = spec[0][1] = 0.0;
    for (std::size_t k = 1; k < half; ++k) {
        double a = 1.0 / std::sqrt(static_cast<double>(k));
        spec[k][0] = a * gauss(s);
        spec[k][1] = a * gauss(s);
        var += 4.0 * a * a;
    }
    double an = 1.0 / std::sqrt(static_cast<double>(half));
    spec[half][0] = an * gauss(s);
    spec[half][1] = 0.0;
    var += an * an;

    fftw_execute(plan);
    const double scale = sigma / std::sqrt(var);
    std::vector<double> res(out, out + cycles);
    for (double& v : res) v *= scale;

    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(spec);
    fftw_free(out);
    return res;
}

}  // namespace

void NoiseModel::validate() const {
    if (!(gamma_lo >= 0.0)) throw std::invalid_argument("noise: gamma_lo must be >= 0");
    if (!(gamma_ind >= 0.0)) throw std::invalid_argument("noise: gamma_ind must be >= 0");
    if (!(omega0 > 0.0)) throw std::invalid_argument("noise: omega0 must be > 0");
}

PriorWidth prior_width(const NoiseModel& model, double T) {
    if (!(T > 0.0)) throw std::invalid_argument("prior_width: T must be positive");
    if (model.spectrum == Spectrum::WhiteFrequency) return {std::sqrt(model.gamma_lo * T)};
    return {model.gamma_lo * T};
}

std::vector<double> sample_lo_phases(const NoiseModel& model, double T, std::size_t cycles, Stream& s) {
    if (cycles < 1) throw std::invalid_argument("sample_lo_phases: need at least one cycle");
    const double sigma = prior_width(model, T).s;
    if (sigma == 0.0) return std::vector<double>(cycles, 0.0);
    if (model.spectrum == Spectrum::FlickerFrequency) return flicker_series(sigma, cycles, s);
    std::normal_distribution<double> gauss(0.0, sigma);
    std::vector<double> res(cycles);
    for (double& v : res) v = gauss(s);
    return res;
}

double visibility(const NoiseModel& model, double T, double group_size) {
    if (group_size < 1.0) throw std::invalid_argument("visibility: group size must be >= 1");
    if (T < 0.0) throw std::invalid_argument("visibility: negative time");
    return std::exp(-group_size * model.gamma_ind * T);
}

}  // namespace ghzclock
