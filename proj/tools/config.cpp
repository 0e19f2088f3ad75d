#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "ghzclock/analytics.hpp"

namespace ghzclock::cli {

namespace {

std::string where(const std::string& src, const YAML::Mark& m) {
    std::ostringstream os;
    os << src;
    if (!m.is_null()) os << ':' << m.line + 1 << ':' << m.column + 1;
    return os.str();
}

[[noreturn]] void fail(const std::string& src, const YAML::Node& n, const std::string& msg) {
    throw ConfigError(where(src, n.Mark()) + ": " + msg);
}

// Map accessor that rejects unknown keys once all known ones have been read.
class MapReader {
public:
    MapReader(const YAML::Node& n, std::string path, const std::string& src) : n_(n), path_(std::move(path)), src_(src) {
        if (!n.IsMap()) fail(src_, n, (path_.empty() ? std::string("top level") : path_) + " must be a mapping");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return static_cast<bool>(n_[key]);
    }

    YAML::Node node(const std::string& key) {
        seen_.insert(key);
        return n_[key];
    }

    template <class T>
    T get(const std::string& key, T def) {
        return has(key) ? as<T>(key) : def;
    }

    template <class T>
    T require(const std::string& key) {
        if (!has(key)) fail(src_, n_, "missing required field " + full(key));
        return as<T>(key);
    }

    template <class T>
    T as(const std::string& key) {
        YAML::Node v = n_[key];
        try {
            return v.as<T>();
        } catch (const YAML::Exception&) {
            fail(src_, v, "field " + full(key) + " has the wrong type");
        }
    }

    std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() {
        for (auto it = n_.begin(); it != n_.end(); ++it) {
            std::string k = it->first.as<std::string>();
            if (!seen_.count(k)) fail(src_, it->first, "unknown key " + full(k));
        }
    }

private:
    YAML::Node n_;
    std::string path_;
    const std::string& src_;
    std::set<std::string> seen_;
};

std::vector<double> read_grid(MapReader& parent, const std::string& key, const std::string& src) {
    YAML::Node g = parent.node(key);
    std::vector<double> out;
    if (g.IsSequence()) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            try {
                out.push_back(g[i].as<double>());
            } catch (const YAML::Exception&) {
                fail(src, g[i], "entries of " + parent.full(key) + " must be numbers");
            }
        }
        if (out.empty()) fail(src, g, parent.full(key) + " is empty");
    } else {
        MapReader r(g, parent.full(key), src);
        double a = r.require<double>("start"), b = r.require<double>("stop");
        int n = r.require<int>("points");
        r.finish();
        if (!(a > 0.0) || !(b > a) || n < 2) fail(src, g, parent.full(key) + " needs 0 < start < stop and points >= 2");
        for (int i = 0; i < n; ++i) out.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0) || !std::isfinite(out[i])) fail(src, g, parent.full(key) + " entries must be positive");
        if (i > 0 && !(out[i] > out[i - 1])) fail(src, g, parent.full(key) + " must be strictly increasing");
    }
    return out;
}

ProtocolKind parse_kind(const std::string& s, const std::string& src, const YAML::Node& n) {
    for (auto k : {ProtocolKind::SingleStepUncorrelated, ProtocolKind::SingleGHZ, ProtocolKind::ClassicalExponential,
                   ProtocolKind::CascadedGHZ})
        if (s == to_string(k)) return k;
    fail(src, n, "unknown protocol kind '" + s +
                     "' (expected single-step, single-ghz, classical-exponential or cascaded-ghz)");
}

ProtocolEntry read_protocol(const YAML::Node& n, std::size_t index, const std::string& src) {
    MapReader r(n, "protocols[" + std::to_string(index) + "]", src);
    ProtocolEntry e;
    e.kind = parse_kind(r.require<std::string>("kind"), src, r.node("kind"));
    e.name = r.get<std::string>("name", to_string(e.kind));
    e.gain = r.get<double>("gain", 0.7);
    if (!(e.gain > 0.0 && e.gain <= 1.0)) fail(src, r.node("gain"), r.full("gain") + " must lie in (0, 1]");
    auto positive_int = [&](const std::string& key, auto def, auto min) {
        if (r.has(key) && r.node(key).IsScalar() && r.node(key).Scalar() == "auto") return decltype(def){0};
        auto v = r.get<decltype(def)>(key, def);
        if (r.has(key) && v < min) fail(src, r.node(key), r.full(key) + " must be >= " + std::to_string(min));
        return v;
    };
    switch (e.kind) {
        case ProtocolKind::SingleStepUncorrelated:
            e.atoms = positive_int("atoms", 0LL, 1LL);
            if (!r.has("atoms")) fail(src, n, "missing required field " + r.full("atoms"));
            break;
        case ProtocolKind::SingleGHZ:
            e.atoms = positive_int("atoms", 0LL, 1LL);
            if (!r.has("atoms")) fail(src, n, "missing required field " + r.full("atoms"));
            e.ghz_size = positive_int("ghz_size", 0LL, 1LL);
            break;
        case ProtocolKind::ClassicalExponential:
            e.atoms = positive_int("atoms", 0LL, 1LL);
            if (!r.has("atoms")) fail(src, n, "missing required field " + r.full("atoms"));
            e.base = positive_int("base", 2, 2);
            e.levels = positive_int("levels", 0, 1);
            e.coarse_atoms = positive_int("coarse_atoms", 0, 2);
            break;
        case ProtocolKind::CascadedGHZ:
            e.base = positive_int("base", 2, 2);
            e.levels = positive_int("levels", 0, 1);
            e.copies = positive_int("copies", 0, 2);
            e.atoms = positive_int("atoms", 0LL, 1LL);
            e.classical_levels = positive_int("classical_levels", 0, 0);
            if (r.has("classical_levels") && r.node("classical_levels").Scalar() == "auto") e.classical_levels = -1;
            e.classical_copies = positive_int("classical_copies", 0, 2);
            if (e.levels == 0 && e.atoms == 0) fail(src, n, r.full("atoms") + " or " + r.full("levels") + " is required");
            if (e.copies % 2 != 0) fail(src, r.node("copies"), r.full("copies") + " must be even");
            if (e.classical_copies % 2 != 0)
                fail(src, r.node("classical_copies"), r.full("classical_copies") + " must be even");
            break;
    }
    r.finish();
    return e;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& ex) {
        throw ConfigError(where(source, ex.mark) + ": " + ex.msg);
    }
    ScenarioConfig c;
    c.source = source;
    MapReader top(root, "", source);

    c.seed = top.get<std::uint64_t>("seed", 1);
    c.trials = top.get<long long>("trials", 1000);
    if (c.trials < 2) fail(source, top.node("trials"), "trials must be >= 2");
    c.threads = top.get<unsigned>("threads", 0);
    c.output = top.get<std::string>("output", "");
    if (!top.has("tau")) fail(source, root, "missing required field tau");
    c.tau = read_grid(top, "tau", source);

    {
        MapReader n(top.node("noise"), "noise", source);
        std::string sp = n.get<std::string>("spectrum", "white");
        if (sp == "white") c.noise.spectrum = Spectrum::WhiteFrequency;
        else if (sp == "flicker") c.noise.spectrum = Spectrum::FlickerFrequency;
        else fail(source, n.node("spectrum"), "noise.spectrum must be white or flicker");
        c.noise.gamma_lo = n.get<double>("gamma_lo", 0.0);
        c.noise.gamma_ind = n.get<double>("gamma_ind", 0.0);
        c.noise.omega0 = n.get<double>("omega0", 1.0);
        if (!(c.noise.gamma_lo >= 0.0)) fail(source, n.node("gamma_lo"), "noise.gamma_lo must be >= 0");
        if (!(c.noise.gamma_ind >= 0.0)) fail(source, n.node("gamma_ind"), "noise.gamma_ind must be >= 0");
        if (!(c.noise.omega0 > 0.0)) fail(source, n.node("omega0"), "noise.omega0 must be positive");
        n.finish();
    }

    if (top.has("ramsey")) {
        YAML::Node rn = top.node("ramsey");
        MapReader r(rn, "ramsey", source);
        std::string pol = r.get<std::string>("policy", "analytic-optimal");
        if (pol == "fixed") c.policy = TPolicy::Fixed;
        else if (pol == "tau-tracking") c.policy = TPolicy::TauTracking;
        else if (pol == "analytic-optimal") c.policy = TPolicy::AnalyticOptimal;
        else fail(source, r.node("policy"), "ramsey.policy must be fixed, tau-tracking or analytic-optimal");
        if (c.policy == TPolicy::Fixed) {
            c.T_fixed = r.require<double>("T");
            if (!(c.T_fixed > 0.0)) fail(source, r.node("T"), "ramsey.T must be positive");
            for (std::size_t i = 0; i < c.tau.size(); ++i)
                if (c.tau[i] < c.T_fixed) {
                    std::ostringstream os;
                    os << "tau[" << i << "] = " << c.tau[i] << " is smaller than ramsey.T = " << c.T_fixed;
                    fail(source, top.node("tau"), os.str());
                }
        }
        if (c.policy == TPolicy::TauTracking) {
            c.cycles_per_tau = r.get<long long>("cycles", 1);
            if (c.cycles_per_tau < 1) fail(source, r.node("cycles"), "ramsey.cycles must be >= 1");
        }
        if (r.has("sweep")) c.sweep_T = read_grid(r, "sweep", source);
        r.finish();
    }

    if (top.has("campaign")) {
        MapReader r(top.node("campaign"), "campaign", source);
        c.campaign.burn_in = r.get<int>("burn_in", 10);
        if (c.campaign.burn_in < 0) fail(source, r.node("burn_in"), "campaign.burn_in must be >= 0");
        c.campaign.timeseries = r.get<bool>("timeseries", true);
        c.campaign.bootstrap = r.get<int>("bootstrap", 200);
        c.campaign.open_loop = r.get<bool>("open_loop", false);
        r.finish();
    }
    if (top.has("predict")) {
        MapReader r(top.node("predict"), "predict", source);
        c.cross_check = r.get<bool>("cross_check", false);
        r.finish();
    }

    YAML::Node ps = top.node("protocols");
    if (!ps || !ps.IsSequence() || ps.size() == 0) fail(source, ps ? ps : root, "protocols must be a non-empty list");
    for (std::size_t i = 0; i < ps.size(); ++i) c.protocols.push_back(read_protocol(ps[i], i, source));
    top.finish();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot read config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

namespace {

// Cascade with M* classical levels taken out of the entry's atom budget.
ProtocolSpec build_cascade_spec(const ProtocolEntry& e, int M_star) {
    ProtocolSpec s;
    s.kind = ProtocolKind::CascadedGHZ;
    s.gain = e.gain;
    auto quantum = [&](long long budget) {
        if (e.levels > 0) {
            int n0 = e.copies;
            if (n0 == 0) {
                if (e.atoms == 0) throw std::invalid_argument("copies or atoms is required");
                CascadeConfig probe{e.base, e.levels, 2, 0, 2};
                n0 = static_cast<int>(2 * (budget / (2 * (probe.quantum_atoms() / 2))));
            }
            return CascadeConfig{e.base, e.levels, n0, 0, 2};
        }
        int n0 = e.copies > 0 ? e.copies : n0_opt(e.base, static_cast<double>(std::max(2LL, budget)));
        return build_cascade(budget, e.base, n0, 0, 2).config;
    };
    CascadeConfig c = quantum(e.atoms);
    int n_star = 2;
    if (M_star > 0) {
        for (int pass = 0; pass < 2; ++pass) {
            double top = static_cast<double>(c.top_group());
            n_star = e.classical_copies > 0 ? e.classical_copies
                                            : classical_level_atoms(e.base, c.n0 * top * top, M_star + 1);
            if (e.levels > 0 && e.copies > 0) break;
            c = quantum(e.atoms - static_cast<long long>(M_star) * n_star);
        }
    }
    c.M_star = M_star;
    c.n0_star = n_star;
    s.cascade = c;
    s.total_atoms = c.quantum_atoms() + c.classical_atoms();
    s.validate();
    return s;
}

}  // namespace

std::optional<ProtocolSpec> build_protocol(const ProtocolEntry& e, std::string& why) {
    ProtocolSpec s;
    s.kind = e.kind;
    s.gain = e.gain;
    s.total_atoms = e.atoms;
    try {
        switch (e.kind) {
            case ProtocolKind::SingleStepUncorrelated:
                if (e.atoms < 2) throw std::invalid_argument("needs at least 2 atoms");
                s.total_atoms = e.atoms - e.atoms % 2;
                break;
            case ProtocolKind::SingleGHZ:
                s.ghz_size = e.ghz_size;
                break;
            case ProtocolKind::ClassicalExponential:
                s.cascade.D = e.base;
                s.levels = e.levels > 0 ? e.levels : 1;
                s.coarse_atoms = e.coarse_atoms;
                break;
            case ProtocolKind::CascadedGHZ:
                s = build_cascade_spec(e, std::max(0, e.classical_levels));
                break;
        }
        s.validate();
    } catch (const std::invalid_argument& ex) {
        why = ex.what();
        return std::nullopt;
    }
    return s;
}

std::vector<ProtocolSpec> candidates(const ProtocolEntry& e, const ProtocolSpec& built) {
    std::vector<ProtocolSpec> out;
    if (e.kind == ProtocolKind::ClassicalExponential && e.levels == 0) {
        for (int L = 1; L <= 24; ++L) {
            ProtocolSpec s = built;
            s.levels = L;
            try {
                s.validate();
            } catch (const std::invalid_argument&) {
                break;
            }
            out.push_back(s);
        }
    } else if (e.kind == ProtocolKind::CascadedGHZ && e.classical_levels < 0) {
        for (int Ms = 0; Ms <= 24; ++Ms) {
            try {
                out.push_back(build_cascade_spec(e, Ms));
            } catch (const std::invalid_argument&) {
                break;
            }
        }
    }
    if (out.empty()) out.push_back(built);
    return out;
}

ProtocolSpec choose_structure(const ProtocolEntry& e, const ProtocolSpec& built, const NoiseModel& model, double tau,
                              double T) {
    ProtocolSpec best = built;
    double best_v = std::numeric_limits<double>::infinity();
    for (const auto& s : candidates(e, built)) {
        double v = cycle_error_budget(s, model, tau, T);
        if (v < best_v * (1 - 1e-9)) {
            best_v = v;
            best = s;
        }
    }
    return best;
}

Operating operating_point(const ProtocolEntry& e, const ProtocolSpec& spec, const ScenarioConfig& cfg, double tau) {
    Operating op{spec, 0.0};
    switch (cfg.policy) {
        case TPolicy::Fixed: op.T = cfg.T_fixed; break;
        case TPolicy::TauTracking: op.T = tau / static_cast<double>(cfg.cycles_per_tau); break;
        case TPolicy::AnalyticOptimal: {
            // joint choice of structure and T
            double best_v = std::numeric_limits<double>::infinity();
            for (const auto& s : candidates(e, spec)) {
                double T = operating_ramsey_time(s, cfg.noise, tau);
                double v = cycle_error_budget(s, cfg.noise, tau, T);
                if (v < best_v * (1 - 1e-9)) {
                    best_v = v;
                    op = {s, T};
                }
            }
            return op;
        }
    }
    op.spec = choose_structure(e, spec, cfg.noise, tau, op.T);
    return op;
}

}  // namespace ghzclock::cli
