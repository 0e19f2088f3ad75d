#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ghzclock/binomial.hpp"

using namespace ghzclock;

namespace {

// pmf by the multiplicative recurrence from k = 0, in long double
std::vector<double> pmf_table(int n, double p) {
    std::vector<long double> w(n + 1);
    w[0] = 1.0L;
    for (int k = 0; k < n; ++k) w[k + 1] = w[k] * (n - k) / (k + 1) * p / (1.0L - p);
    long double z = 0.0L;
    for (auto v : w) z += v;
    std::vector<double> out(n + 1);
    for (int k = 0; k <= n; ++k) out[k] = static_cast<double>(w[k] / z);
    return out;
}

double chi_square(int n, double p, int draws, std::uint64_t seed) {
    Stream s = make_stream(seed, 0);
    std::vector<int> hist(n + 1, 0);
    for (int i = 0; i < draws; ++i) ++hist[sample_binomial(n, p, s)];
    auto pmf = pmf_table(n, p);
    // pool cells with expectation < 5 into their neighbour
    double chi = 0.0, exp_acc = 0.0, obs_acc = 0.0;
    int cells = 0;
    for (int k = 0; k <= n; ++k) {
        exp_acc += pmf[k] * draws;
        obs_acc += hist[k];
        if (exp_acc >= 5.0) {
            chi += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
            exp_acc = obs_acc = 0.0;
            ++cells;
        }
    }
    if (exp_acc > 0.0) chi += (obs_acc - exp_acc) * (obs_acc - exp_acc) / std::max(exp_acc, 1e-300);
    int df = std::max(cells - 1, 1);
    return (chi - df) / std::sqrt(2.0 * df);
}

}  // namespace

TEST(Binomial, DistributionMatchesPmf) {
    struct Case { int n; double p; };
    for (Case c : {Case{10, 0.3}, Case{60, 0.5}, Case{1000, 0.2}, Case{50, 0.9}, Case{7, 0.999}, Case{400, 0.07}}) {
        double z = chi_square(c.n, c.p, 200000, 11 + c.n);
        EXPECT_LT(z, 5.0) << "n=" << c.n << " p=" << c.p;
    }
}

TEST(Binomial, LargeNMoments) {
    Stream s = make_stream(3, 0);
    const int n = 1000000;
    double sum = 0.0, sq = 0.0;
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        double k = sample_binomial(n, 0.5, s);
        sum += k;
        sq += k * k;
    }
    double mean = sum / draws, var = sq / draws - mean * mean;
    EXPECT_NEAR(mean, 500000.0, 5.0 * std::sqrt(250000.0 / draws));
    EXPECT_NEAR(var / 250000.0, 1.0, 0.05);
}

TEST(Binomial, DegenerateInputs) {
    Stream s = make_stream(1, 0);
    EXPECT_EQ(sample_binomial(0, 0.4, s), 0);
    EXPECT_EQ(sample_binomial(25, 0.0, s), 0);
    EXPECT_EQ(sample_binomial(25, 1.0, s), 25);
    EXPECT_THROW(sample_binomial(-1, 0.5, s), std::invalid_argument);
    EXPECT_THROW(sample_binomial(5, 1.5, s), std::invalid_argument);
}

TEST(Binomial, SameSeedSameDraws) {
    Stream a = make_stream(42, 7), b = make_stream(42, 7), c = make_stream(42, 8);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        int x = sample_binomial(300, 0.37, a);
        EXPECT_EQ(x, sample_binomial(300, 0.37, b));
        differs = differs || x != sample_binomial(300, 0.37, c);
    }
    EXPECT_TRUE(differs);
}

TEST(Binomial, PmfValues) {
    EXPECT_NEAR(binomial_pmf(10, 5, 0.5), 0.24609375, 1e-14);
    EXPECT_DOUBLE_EQ(binomial_pmf(4, 0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(binomial_pmf(4, 4, 1.0), 1.0);
    EXPECT_EQ(binomial_pmf(4, 5, 0.3), 0.0);
}
