#include "commands.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>

#include "ghzclock/analytics.hpp"
#include "ghzclock/binomial.hpp"
#include "ghzclock/campaign.hpp"
#include "ghzclock/estimation.hpp"
#include "ghzclock/phase.hpp"
#include "ghzclock/stability.hpp"

namespace ghzclock::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Built {
    const ProtocolEntry* entry;
    ProtocolSpec spec;
};

std::vector<Built> build_all(const ScenarioConfig& cfg, std::ostream& log) {
    std::vector<Built> out;
    for (const auto& e : cfg.protocols) {
        std::string why;
        if (auto s = build_protocol(e, why)) out.push_back({&e, *s});
        else log << "warning: protocol " << e.name << " skipped: " << why << '\n';
    }
    return out;
}

CampaignOptions campaign_options(const ScenarioConfig& cfg) {
    CampaignOptions o = cfg.campaign;
    o.threads = cfg.threads;
    return o;
}

struct Theory {
    PredictionRecord rec;
    bool has_gammas = false;
    bool has_T_opt = false;
    double grid_T = kNaN;  // grid minimizer over feasible Ramsey times T <= tau
};

double plain_grid_argmin(const std::function<double(double)>& f, double lo, double hi) {
    const int points = 10000;
    double best = lo, fb = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
        double t = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        double v = f(t);
        if (v < fb) {
            fb = v;
            best = t;
        }
    }
    return best;
}

Theory theory(const ProtocolSpec& s, const NoiseModel& m, double tau, bool cross_check) {
    Theory t;
    const double N = static_cast<double>(s.atoms());
    const double g = m.gamma_lo;
    std::function<double(double)> gamma;
    switch (s.kind) {
        case ProtocolKind::SingleStepUncorrelated:
            t.rec = single_step_prediction(N, g, tau, m.omega0);
            gamma = [&](double T) { return single_step_gamma(N, g, tau, T); };
            t.has_gammas = t.has_T_opt = true;
            break;
        case ProtocolKind::SingleGHZ: {
            double np = static_cast<double>(s.ghz_size > 0 ? s.ghz_size : s.total_atoms / 2);
            t.rec = single_ghz_prediction(N, np, g, tau, m.omega0);
            gamma = [&, np](double T) { return single_ghz_gamma(N, np, g, tau, T); };
            t.has_gammas = t.has_T_opt = true;
            break;
        }
        case ProtocolKind::ClassicalExponential:
            t.rec.sigma_y = classical_exponential_sigma(N, m.gamma_ind, tau, m.omega0);
            t.rec.T = tau;
            t.rec.regime = m.gamma_ind >= 1.0 / tau ? Regime::DephasingFloor : Regime::NoiseFree;
            break;
        case ProtocolKind::CascadedGHZ:
            t.rec = cascade_prediction(s.cascade, m, tau);
            gamma = [&](double T) {
                auto gt = cascade_gamma_terms(s.cascade, m, tau, T);
                return gt.g1 + gt.g2 + gt.g3;
            };
            t.has_gammas = t.has_T_opt = true;
            break;
    }
    if (cross_check && gamma && g > 0.0) t.grid_T = plain_grid_argmin(gamma, 1e-6 / g, std::min(tau, 1e2 / g));
    return t;
}

}  // namespace

std::uint64_t point_seed(std::uint64_t seed, std::size_t i) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(i) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

CsvTable simulate_table(const ScenarioConfig& cfg, std::ostream& log) {
    CsvTable t({"protocol", "tau", "T", "adev_formula", "adev_timeseries", "adev_normalized", "ci_halfwidth",
                "slip_rate", "trials", "seed"});
    const auto opt = campaign_options(cfg);
    for (const auto& b : build_all(cfg, log)) {
        for (std::size_t i = 0; i < cfg.tau.size(); ++i) {
            const double tau = cfg.tau[i];
            auto op = operating_point(*b.entry, b.spec, cfg, tau);
            auto r = run_campaign(op.spec, cfg.noise, op.T, tau, cfg.trials, point_seed(cfg.seed, i), opt);
            t.add_row({b.entry->name, fmt(tau), fmt(op.T), fmt(r.record.adev_formula),
                       opt.timeseries ? fmt(r.record.adev_timeseries) : "", fmt(r.record.adev_normalized),
                       fmt(r.record.ci_halfwidth), fmt(r.slip_rate), fmt(cfg.trials),
                       std::to_string(cfg.seed)});
        }
    }
    return t;
}

CsvTable predict_table(const ScenarioConfig& cfg, std::ostream& log) {
    std::vector<std::string> header{"protocol", "tau", "T", "T_opt", "sigma_y", "sigma_normalized", "gamma1", "gamma2",
                                    "gamma3", "gamma4", "regime", "sql", "noise_floor"};
    if (cfg.cross_check) {
        header.push_back("grid_T");
        header.push_back("grid_gap");
    }
    CsvTable t(header);
    const auto built = build_all(cfg, log);
    double n_ref = 1.0;
    for (const auto& b : built) n_ref = std::max(n_ref, static_cast<double>(b.spec.atoms()));
    for (const auto& e : cfg.protocols) n_ref = std::max(n_ref, static_cast<double>(e.atoms));
    for (const auto& b : built) {
        for (double tau : cfg.tau) {
            const ProtocolSpec s = operating_point(*b.entry, b.spec, cfg, tau).spec;
            const double N = static_cast<double>(s.atoms());
            auto th = theory(s, cfg.noise, tau, cfg.cross_check);
            const auto& p = th.rec;
            const double sql = sql_reference(N, cfg.noise.omega0, tau);
            std::vector<std::string> row{b.entry->name,
                                         fmt(tau),
                                         fmt(p.T),
                                         th.has_T_opt ? fmt(p.T_opt) : "",
                                         fmt(p.sigma_y),
                                         fmt(p.sigma_y / sql),
                                         th.has_gammas ? fmt(p.gamma1) : "",
                                         th.has_gammas ? fmt(p.gamma2) : "",
                                         th.has_gammas ? fmt(p.gamma3) : "",
                                         th.has_gammas ? fmt(p.gamma4) : "",
                                         to_string(p.regime),
                                         fmt(sql),
                                         fmt(noise_floor(N, cfg.noise.gamma_ind, tau, cfg.noise.omega0))};
            if (cfg.cross_check) {
                row.push_back(fmt(th.grid_T));
                row.push_back(std::isnan(th.grid_T) ? "" : fmt(p.T / th.grid_T - 1.0));
            }
            t.add_row(std::move(row));
        }
    }
    for (double tau : cfg.tau) {
        const double sql = sql_reference(n_ref, cfg.noise.omega0, tau);
        const double nf = noise_floor(n_ref, cfg.noise.gamma_ind, tau, cfg.noise.omega0);
        std::vector<std::string> row{"noise-floor", fmt(tau), "", "", fmt(nf), fmt(nf / sql), "", "", "", "", "",
                                     fmt(sql), fmt(nf)};
        if (cfg.cross_check) row.insert(row.end(), {"", ""});
        t.add_row(std::move(row));
    }
    return t;
}

CsvTable fig1_table(const ScenarioConfig& cfg, std::ostream& log) {
    CsvTable t({"protocol", "tau", "T", "adev_mc", "adev_mc_normalized", "ci_halfwidth", "slip_rate", "sigma_theory",
                "sigma_theory_normalized", "sql", "noise_floor", "trials", "seed"});
    const auto opt = campaign_options(cfg);
    for (const auto& b : build_all(cfg, log)) {
        for (std::size_t i = 0; i < cfg.tau.size(); ++i) {
            const double tau = cfg.tau[i];
            auto op = operating_point(*b.entry, b.spec, cfg, tau);
            const double N = static_cast<double>(op.spec.atoms());
            auto r = run_campaign(op.spec, cfg.noise, op.T, tau, cfg.trials, point_seed(cfg.seed, i), opt);
            auto th = theory(op.spec, cfg.noise, tau, false);
            const double sql = sql_reference(N, cfg.noise.omega0, tau);
            t.add_row({b.entry->name, fmt(tau), fmt(op.T), fmt(r.record.adev_formula), fmt(r.record.adev_formula / sql),
                       fmt(r.record.ci_halfwidth), fmt(r.slip_rate), fmt(th.rec.sigma_y), fmt(th.rec.sigma_y / sql),
                       fmt(sql), fmt(noise_floor(N, cfg.noise.gamma_ind, tau, cfg.noise.omega0)), fmt(cfg.trials),
                       std::to_string(cfg.seed)});
        }
    }
    return t;
}

CsvTable sweep_table(const ScenarioConfig& cfg, std::ostream& log) {
    if (cfg.sweep_T.empty()) throw ConfigError(cfg.source + ": sweep needs a ramsey.sweep grid of Ramsey times");
    CsvTable t({"protocol", "tau", "T", "adev_formula", "adev_timeseries", "slip_rate", "trials", "seed"});
    const auto opt = campaign_options(cfg);
    for (const auto& b : build_all(cfg, log)) {
        for (std::size_t i = 0; i < cfg.tau.size(); ++i) {
            const double tau = cfg.tau[i];
            for (double T : cfg.sweep_T) {
                if (T > tau) break;
                ProtocolSpec s = choose_structure(*b.entry, b.spec, cfg.noise, tau, T);
                auto r = run_campaign(s, cfg.noise, T, tau, cfg.trials, point_seed(cfg.seed, i), opt);
                t.add_row({b.entry->name, fmt(tau), fmt(T), fmt(r.record.adev_formula),
                           opt.timeseries ? fmt(r.record.adev_timeseries) : "", fmt(r.slip_rate), fmt(cfg.trials),
                           std::to_string(cfg.seed)});
            }
        }
    }
    return t;
}

int selftest(std::uint64_t seed, std::ostream& out) {
    int failures = 0;
    auto report = [&](const char* name, bool ok, const std::string& detail) {
        out << (ok ? "PASS " : "FAIL ") << name;
        if (!detail.empty()) out << "  (" << detail << ")";
        out << '\n';
        if (!ok) ++failures;
    };

    {
        // sampler moments against n p and n p (1 - p)
        Stream s = make_stream(seed, 0);
        const int n = 50, draws = 200000;
        const double p = 0.3;
        double m1 = 0, m2 = 0;
        for (int i = 0; i < draws; ++i) {
            double k = sample_binomial(n, p, s);
            m1 += k;
            m2 += k * k;
        }
        m1 /= draws;
        double var = m2 / draws - m1 * m1;
        bool ok = std::abs(m1 - n * p) < 0.02 && std::abs(var / (n * p * (1 - p)) - 1) < 0.02;
        report("binomial-moments", ok, "mean " + fmt(m1) + ", var " + fmt(var));
    }
    {
        double worst = 0.0;
        for (int D : {2, 3})
            for (int i = 0; i < 10000; ++i) {
                double phi = -kPi + kTwoPi * (i + 0.5) / 10000;
                std::vector<LevelReading> rs;
                double scale = 1.0;
                for (int j = 0; j < 8; ++j, scale *= D) rs.push_back({j, wrap_phase(scale * phi), 1, 2});
                worst = std::max(worst, std::abs(reconstruct_phase(rs, D) - phi));
            }
        report("digit-round-trip", worst < 1e-9, "max error " + fmt(worst));
    }
    {
        double worst = 0.0;
        for (double n : {-1.0, 0.0, 1.0, 1.5})
            for (int e = 4; e <= 12; e += 2) {
                double A = std::pow(10.0, e);
                auto r = solve_transcendental(n, A);
                worst = std::max(worst, std::abs(std::expm1(n * std::log(r.x_s) - std::log(A) + 1.0 / r.x_s)));
            }
        report("solver-residual", worst <= 1e-10, "max relative residual " + fmt(worst));
    }
    {
        bool ok = true;
        for (int n = 2; n <= 60 && ok; ++n)
            for (int i = 1; i <= 9 && ok; ++i)
                for (int k = 0; k <= n; ++k)
                    if (binomial_pmf(n, k, i / 10.0) > binomial_tail_bound(n, i / 10.0, k) * (1 + 1e-12)) ok = false;
        report("binomial-bound", ok, "");
    }
    {
        double d = std::abs(p_slip({1.0}) - std::erfc(kPi / std::sqrt(2.0)));
        report("slip-probability", d < 1e-15, "");
    }
    return failures;
}

}  // namespace ghzclock::cli
