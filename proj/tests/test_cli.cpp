#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("ghzclock_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) {
        fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    CliRun invoke(const std::string& args) {
        fs::path o = dir_ / "stdout.txt", e = dir_ / "stderr.txt";
        std::string cmd = std::string(GHZCLOCK_CLI_PATH) + " " + args + " >" + o.string() + " 2>" + e.string();
        int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
    }

    fs::path dir_;
};

const char* kMinimal = R"(seed: 3
trials: 20
tau: [1, 2, 4]
noise:
  gamma_lo: 0.2
  gamma_ind: 0.0002
protocols:
  - kind: single-step
    atoms: 64
  - kind: cascaded-ghz
    atoms: 200
    copies: 24
)";

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.push_back("");
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_F(Cli, SimulateWritesDocumentedHeader) {
    auto cfg = write("cfg.yaml", kMinimal);
    auto out = dir_ / "sim.csv";
    auto r = invoke("simulate --config " + cfg.string() + " --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = parse_csv(slurp(out));
    ASSERT_EQ(rows.size(), 1u + 2 * 3);
    std::string header = slurp(out).substr(0, slurp(out).find('\n'));
    EXPECT_EQ(header, "protocol,tau,T,adev_formula,adev_timeseries,adev_normalized,ci_halfwidth,slip_rate,trials,seed");
    EXPECT_NE(r.err.find("seed: 3"), std::string::npos);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), rows[0].size());
        for (std::size_t c = 1; c < rows[i].size(); ++c) {
            char* end = nullptr;
            std::strtod(rows[i][c].c_str(), &end);
            EXPECT_EQ(*end, '\0') << rows[i][c];
        }
        EXPECT_EQ(rows[i][9], "3");
    }
    EXPECT_EQ(slurp(out).find('\r'), std::string::npos);
}

TEST_F(Cli, SameSeedSameBytes) {
    auto cfg = write("cfg.yaml", kMinimal);
    auto a = dir_ / "a.csv", b = dir_ / "b.csv", c = dir_ / "c.csv";
    ASSERT_EQ(invoke("simulate --config " + cfg.string() + " --out " + a.string()).code, 0);
    ASSERT_EQ(invoke("simulate --config " + cfg.string() + " --threads 2 --out " + b.string()).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    auto r = invoke("simulate --config " + cfg.string() + " --seed 99 --out " + c.string());
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("seed: 99"), std::string::npos);
    EXPECT_NE(slurp(a), slurp(c));
}

TEST_F(Cli, TauBelowFixedRamseyTime) {
    auto cfg = write("cfg.yaml", R"(tau: [0.5, 2]
ramsey:
  policy: fixed
  T: 1
noise:
  gamma_lo: 0.1
protocols:
  - kind: single-step
    atoms: 10
)");
    auto r = invoke("simulate --config " + cfg.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("ramsey.T"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("tau[0]"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("cfg.yaml:1:"), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownKeyIsLineAnchored) {
    auto cfg = write("cfg.yaml", R"(tau: [1]
noise:
  gamma_lo: 0.1
  gama_ind: 0.01
protocols:
  - kind: single-step
    atoms: 10
)");
    auto r = invoke("predict --config " + cfg.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("cfg.yaml:4:3"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("noise.gama_ind"), std::string::npos) << r.err;
}

TEST_F(Cli, ConfigErrors) {
    auto bad_yaml = write("bad.yaml", "tau: [1, 2\nprotocols: []\n");
    EXPECT_EQ(invoke("predict --config " + bad_yaml.string()).code, 2);
    auto dec = write("dec.yaml", "tau: [2, 1]\nprotocols:\n  - kind: single-step\n    atoms: 4\n");
    auto r = invoke("predict --config " + dec.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("strictly increasing"), std::string::npos);
    auto kind = write("kind.yaml", "tau: [1]\nprotocols:\n  - kind: squeezed\n    atoms: 4\n");
    EXPECT_EQ(invoke("predict --config " + kind.string()).code, 2);
    auto trials = write("trials.yaml", "trials: 1\ntau: [1]\nprotocols:\n  - kind: single-step\n    atoms: 4\n");
    EXPECT_EQ(invoke("simulate --config " + trials.string()).code, 2);
    EXPECT_EQ(invoke("predict --config " + (dir_ / "missing.yaml").string()).code, 2);
    EXPECT_EQ(invoke("predict").code, 2);
    EXPECT_EQ(invoke("").code, 2);
    auto cfg = write("cfg.yaml", kMinimal);
    EXPECT_EQ(invoke("sweep --config " + cfg.string()).code, 2);
}

TEST_F(Cli, MissingOutputDirectoryLeavesNothing) {
    auto cfg = write("cfg.yaml", kMinimal);
    auto target = dir_ / "nowhere" / "out.csv";
    auto r = invoke("predict --config " + cfg.string() + " --out " + target.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(fs::exists(target));
    EXPECT_FALSE(fs::exists(dir_ / "nowhere"));
}

TEST_F(Cli, PredictSkipsDegenerateCascade) {
    auto cfg = write("cfg.yaml", R"(tau: [1, 10]
noise:
  gamma_lo: 1
  gamma_ind: 0.001
protocols:
  - kind: single-step
    atoms: 100
  - kind: cascaded-ghz
    atoms: 1
)");
    auto r = invoke("predict --config " + cfg.string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("warning: protocol cascaded-ghz skipped"), std::string::npos) << r.err;
    EXPECT_EQ(r.out.find("cascaded-ghz"), std::string::npos);
    EXPECT_NE(r.out.find("single-step"), std::string::npos);
}

TEST_F(Cli, PredictEmitsFigureCurvesWithCrossCheck) {
    auto cfg = write("cfg.yaml", R"(tau: {start: 1, stop: 1000, points: 4}
noise:
  gamma_lo: 1
  gamma_ind: 0.001
predict:
  cross_check: true
protocols:
  - kind: single-step
    atoms: 400
  - kind: classical-exponential
    atoms: 400
  - kind: cascaded-ghz
    atoms: 400
    copies: 24
    classical_levels: 0
)");
    auto r = invoke("predict --config " + cfg.string());
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = parse_csv(r.out);
    ASSERT_GE(rows.size(), 1u);
    const auto& h = rows[0];
    ASSERT_EQ(h.back(), "grid_gap");
    std::map<std::string, int> counts;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), h.size()) << i;
        counts[rows[i][0]]++;
        if (!rows[i].back().empty()) EXPECT_LT(std::abs(std::stod(rows[i].back())), 0.05) << rows[i][0] << " " << rows[i][1];
    }
    EXPECT_EQ(counts["single-step"], 4);
    EXPECT_EQ(counts["classical-exponential"], 4);
    EXPECT_EQ(counts["cascaded-ghz"], 4);
    EXPECT_EQ(counts["noise-floor"], 4);
}

TEST_F(Cli, Fig1AndSweep) {
    auto cfg = write("cfg.yaml", std::string(kMinimal) + "ramsey:\n  policy: analytic-optimal\n  sweep: [0.25, 0.5, 1, 2]\n");
    auto r = invoke("fig1 --config " + cfg.string());
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = parse_csv(r.out);
    EXPECT_EQ(rows[0][3], "adev_mc");
    EXPECT_EQ(rows.size(), 1u + 2 * 3);
    auto s = invoke("sweep --config " + cfg.string());
    ASSERT_EQ(s.code, 0) << s.err;
    // T grid entries above tau are skipped: 3 + 4 + 4 per protocol
    EXPECT_EQ(parse_csv(s.out).size(), 1u + 2 * 11);
}

TEST_F(Cli, Selftest) {
    auto r = invoke("selftest");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
    EXPECT_NE(r.out.find("PASS digit-round-trip"), std::string::npos);
}

TEST(ConfigParse, GridAndDefaults) {
    auto c = ghzclock::cli::parse_config(
        "tau: {start: 1, stop: 100, points: 3}\nnoise:\n  gamma_lo: 1\nprotocols:\n  - kind: single-ghz\n    atoms: 32\n    ghz_size: 4\n", "x");
    ASSERT_EQ(c.tau.size(), 3u);
    EXPECT_NEAR(c.tau[1], 10.0, 1e-12);
    EXPECT_EQ(c.trials, 1000);
    EXPECT_EQ(c.policy, ghzclock::cli::TPolicy::AnalyticOptimal);
    EXPECT_EQ(c.protocols[0].ghz_size, 4);
    EXPECT_THROW(ghzclock::cli::parse_config("tau: [1]\nnoise:\n  gamma_lo: 1\nprotocols:\n  - kind: single-ghz\n", "x"),
                 ghzclock::cli::ConfigError);
}
