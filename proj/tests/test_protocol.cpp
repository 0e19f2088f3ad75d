#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ghzclock/estimation.hpp"
#include "ghzclock/phase.hpp"
#include "ghzclock/protocol.hpp"

using namespace ghzclock;

TEST(BuildCascade, Examples) {
    auto b = build_cascade(400, 2, 12, 0, 2);
    EXPECT_EQ(b.config.M, 5);
    EXPECT_EQ(b.atoms_used, 372);
    EXPECT_EQ(b.leftover, 28);
    EXPECT_EQ(b.config.top_group(), 16);
    EXPECT_DOUBLE_EQ(b.config.delta() * b.config.top_group() * b.config.n0, 384.0);

    auto e = build_cascade(36, 2, 12, 0, 2);
    EXPECT_EQ(e.config.M, 2);
    EXPECT_EQ(e.leftover, 0);

    auto t = build_cascade(1000, 3, 10, 2, 20);
    EXPECT_EQ(t.config.M, 4);  // 10 * 40 = 400, next level needs 1210
    EXPECT_EQ(t.atoms_used, 400);
    EXPECT_DOUBLE_EQ(t.config.delta(), 1.5);
}

TEST(BuildCascade, Errors) {
    EXPECT_THROW(build_cascade(35, 2, 12, 0, 2), std::invalid_argument);
    EXPECT_THROW(build_cascade(400, 1, 12, 0, 2), std::invalid_argument);
    EXPECT_THROW(build_cascade(400, 2, 7, 0, 2), std::invalid_argument);
}

TEST(BuildCascade, LargestFittingLevelCount) {
    for (long long N = 36; N < 5000; N += 37) {
        auto b = build_cascade(N, 2, 12, 0, 2);
        EXPECT_LE(b.atoms_used, N);
        CascadeConfig more = b.config;
        ++more.M;
        EXPECT_GT(more.quantum_atoms(), N);
        EXPECT_EQ(b.atoms_used + b.leftover, N);
    }
}

TEST(Schedule, Examples) {
    auto one = classical_exponential_schedule(100, 1.0, 1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].atoms, 100);
    EXPECT_DOUBLE_EQ(one[0].effective_time, 1.0);

    auto three = classical_exponential_schedule(1000, 1.0, 3, 2, 20);
    ASSERT_EQ(three.size(), 3u);
    EXPECT_DOUBLE_EQ(three[0].effective_time, 1.0);
    EXPECT_DOUBLE_EQ(three[1].effective_time, 0.5);
    EXPECT_DOUBLE_EQ(three[2].effective_time, 0.25);
    EXPECT_EQ(three[0].atoms, 960);
    EXPECT_EQ(three[2].j, -2);
}

TEST(Schedule, AutomaticCoarseCount) {
    auto s = classical_exponential_schedule(1000, 1.0, 4);
    for (std::size_t i = 1; i < s.size(); ++i) {
        EXPECT_EQ(s[i].atoms % 2, 0);
        EXPECT_EQ(s[i].atoms, s[1].atoms);
    }
    EXPECT_THROW(classical_exponential_schedule(10, 1.0, 8, 2, 4), std::invalid_argument);
    EXPECT_THROW(classical_exponential_schedule(10, 1.0, 0), std::invalid_argument);
}

TEST(AtomAccounting, PlansMatchBudgets) {
    ProtocolSpec c;
    c.kind = ProtocolKind::CascadedGHZ;
    c.cascade = {2, 5, 12, 3, 30};
    EXPECT_EQ(c.atoms(), c.cascade.quantum_atoms() + c.cascade.classical_atoms());
    EXPECT_EQ(c.atoms(), 372 + 90);

    c.cascade = {3, 4, 8, 0, 2};
    EXPECT_EQ(c.atoms(), 8 * 40);

    ProtocolSpec g;
    g.kind = ProtocolKind::SingleGHZ;
    g.total_atoms = 64;
    EXPECT_EQ(g.atoms(), 64);
    g.ghz_size = 8;
    EXPECT_EQ(g.atoms(), 64);
    g.ghz_size = 5;
    EXPECT_THROW(g.validate(), std::invalid_argument);

    ProtocolSpec e;
    e.kind = ProtocolKind::ClassicalExponential;
    e.total_atoms = 1000;
    e.levels = 3;
    e.coarse_atoms = 20;
    EXPECT_EQ(e.atoms(), 1000);

    ProtocolSpec bad;
    bad.gain = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad.gain = 1.5;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(LevelPlan, Ordering) {
    ProtocolSpec c;
    c.kind = ProtocolKind::CascadedGHZ;
    c.cascade = {2, 4, 12, 2, 40};
    auto plan = level_plan(c);
    ASSERT_EQ(plan.size(), 6u);
    for (std::size_t i = 0; i < plan.size(); ++i) EXPECT_EQ(plan[i].j, int(i) - 2);
    EXPECT_DOUBLE_EQ(plan[0].scale, 0.25);
    EXPECT_DOUBLE_EQ(plan[0].time_factor, 0.25);
    EXPECT_EQ(plan[5].group_size, 8);
    EXPECT_DOUBLE_EQ(plan[5].time_factor, 1.0);
}

TEST(RunCycle, LargeEnsembleSingleStep) {
    ProtocolSpec s;
    s.total_atoms = 1000000;
    NoiseModel m;
    auto st = make_stream(5, 0);
    auto r = run_cycle(s, m, 1.0, 0.1, 0.0, st);
    EXPECT_DOUBLE_EQ(r.phi_true, 0.1);
    EXPECT_NEAR(r.phi_est, 0.1, 3e-3);
    EXPECT_NEAR(r.correction_state, 0.7 * r.phi_est, 1e-15);
    EXPECT_FALSE(r.slip_flag);
    EXPECT_EQ(r.readings.size(), 1u);
}

TEST(RunCycle, DeterministicLimitWithUnitGain) {
    ProtocolSpec s;
    s.total_atoms = 1000000;
    s.gain = 1.0;
    NoiseModel m;
    auto st = make_stream(6, 0);
    const double T = 2.0;
    // constant LO detuning of 0.2 rad per cycle, no noise
    auto r1 = run_cycle(s, m, T, 0.2, 0.0, st);
    auto r2 = run_cycle(s, m, T, 0.2, r1.correction_state, st);
    EXPECT_NEAR(r2.phi_true, 0.0, 3e-3);
    auto r3 = run_cycle(s, m, T, 0.0, 0.05, st);
    EXPECT_DOUBLE_EQ(r3.phi_true, -0.1);
}

TEST(RunCycle, CascadeDigitsMatchOracle) {
    ProtocolSpec s;
    s.kind = ProtocolKind::CascadedGHZ;
    s.cascade = {2, 5, 200000, 0, 2};
    NoiseModel m;
    auto st = make_stream(7, 0);
    for (double phi : {-2.9, -1.3, -0.02, 0.4, 1.7, 3.0}) {
        auto r = run_cycle(s, m, 1.0, phi, 0.0, st);
        auto oracle = digits_oracle(phi, 0, 4, 2);
        EXPECT_EQ(r.digits.digits, oracle.digits) << phi;
        EXPECT_NEAR(r.phi_est, phi, 1e-3) << phi;
    }
}

TEST(RunCycle, CascadeWithClassicalLevelsUnwraps) {
    ProtocolSpec s;
    s.kind = ProtocolKind::CascadedGHZ;
    s.cascade = {2, 4, 100000, 2, 100000};
    NoiseModel m;
    auto st = make_stream(8, 0);
    // LO phase beyond pi: coarse levels see it unwrapped
    auto r = run_cycle(s, m, 1.0, 5.0, 0.0, st);
    EXPECT_NEAR(r.phi_est, 5.0, 1e-3);
    EXPECT_FALSE(r.slip_flag);
    auto w = run_cycle(s, m, 1.0, 13.0, 0.0, st);
    EXPECT_TRUE(w.slip_flag);
    EXPECT_NEAR(wrap_phase(w.phi_est - 13.0), 0.0, 1e-3);
}

TEST(RunCycle, SingleGhzEstimate) {
    ProtocolSpec s;
    s.kind = ProtocolKind::SingleGHZ;
    s.total_atoms = 2000;
    s.ghz_size = 4;
    NoiseModel m;
    auto st = make_stream(9, 0);
    auto r = run_cycle(s, m, 1.0, 0.3, 0.0, st);
    EXPECT_NEAR(r.phi_est, 0.3, 0.05);
    auto w = run_cycle(s, m, 1.0, 0.9, 0.0, st);
    EXPECT_TRUE(w.slip_flag);
    EXPECT_NEAR(w.phi_est, 0.9 - kPi / 2, 0.05);
}

TEST(Feedback, StationaryAfterBurnIn) {
    ProtocolSpec s;
    s.total_atoms = 100;
    NoiseModel m{Spectrum::WhiteFrequency, 0.05, 0.0, 1.0};
    const double T = 1.0;
    const int trials = 4000, cycles = 50, burn = 10;
    std::vector<double> sum2(cycles, 0.0);
    for (int t = 0; t < trials; ++t) {
        auto st = make_stream(11, t);
        auto free = sample_lo_phases(m, T, cycles, st);
        CycleEngine eng(s, m, T);
        double corr = 0.0;
        for (int k = 0; k < cycles; ++k) {
            auto r = eng.step(free[k] - corr, st);
            corr += s.gain * r.phi_est;
            sum2[k] += r.phi_true * r.phi_true;
        }
    }
    double a = 0.0, b = 0.0;
    const int half = (cycles - burn) / 2;
    for (int k = burn; k < burn + half; ++k) a += sum2[k];
    for (int k = burn + half; k < cycles; ++k) b += sum2[k];
    double ratio = a / b;
    EXPECT_GE(ratio, 0.8);
    EXPECT_LE(ratio, 1.25);
}

TEST(ProtocolKind, Names) {
    EXPECT_STREQ(to_string(ProtocolKind::CascadedGHZ), "cascaded-ghz");
    EXPECT_STREQ(to_string(ProtocolKind::SingleStepUncorrelated), "single-step");
}
