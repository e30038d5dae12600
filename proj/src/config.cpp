#include "reduxion/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace reduxion {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorKind::ConfigInvalid, what);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) invalid(where + " must be an object");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!ok.count(k)) invalid("unknown key '" + k + "' in " + where);
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) invalid("'" + key + "' must be a number");
    return v.get<double>();
}

long long integer(const json& v, const std::string& key, long long lo, long long hi) {
    if (!v.is_number_integer() && !(v.is_number_float() && v.get<double>() == std::floor(v.get<double>())))
        invalid("'" + key + "' must be an integer");
    const double x = v.get<double>();
    if (x < static_cast<double>(lo) || x > static_cast<double>(hi))
        invalid("'" + key + "' out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<long long>(x);
}

double positive(const json& v, const std::string& key) {
    const double x = number(v, key);
    if (!(x > 0.0) || !std::isfinite(x)) invalid("'" + key + "' must be positive");
    return x;
}

RunMode parse_mode(const std::string& m) {
    if (m == "trajectory") return RunMode::Trajectory;
    if (m == "ensemble") return RunMode::Ensemble;
    if (m == "enumerate") return RunMode::Enumerate;
    if (m == "entropy-scan") return RunMode::EntropyScan;
    if (m == "verify") return RunMode::Verify;
    invalid("unknown mode '" + m + "'");
}

OutputFormat parse_format(const std::string& f) {
    if (f == "json") return OutputFormat::Json;
    if (f == "csv") return OutputFormat::Csv;
    invalid("unknown output format '" + f + "'");
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// CSV field quoting for labels containing separators
std::string field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string render_distribution(const OutcomeDistribution& d, OutputFormat format, const char* column) {
    if (format == OutputFormat::Json) {
        json j = json::object();
        for (const auto& [k, v] : d) j[k] = v;
        return j.dump(2) + "\n";
    }
    std::string out = std::string("outcome,") + column + "\n";
    for (const auto& [k, v] : d) out += field(k) + "," + g17(v) + "\n";
    return out;
}

std::string render_trajectory(const Trajectory& t, OutputFormat format) {
    if (format == OutputFormat::Json) {
        json arr = json::array();
        for (const auto& e : t.events)
            arr.push_back({{"stage", e.stage},
                           {"t_red", e.t_red},
                           {"t_abs", e.t_abs},
                           {"kind", to_string(e.kind)},
                           {"outcome_index", e.outcome_index},
                           {"outcome_label", e.outcome_label},
                           {"probability", e.probability}});
        arr.push_back({{"total_probability", t.total_probability}, {"terminal_label", t.terminal_label}});
        return arr.dump(2) + "\n";
    }
    std::string out = "stage,t_red,t_abs,kind,outcome_index,outcome_label,probability\n";
    for (const auto& e : t.events)
        out += std::to_string(e.stage) + "," + g17(e.t_red) + "," + g17(e.t_abs) + "," + to_string(e.kind) + "," +
               std::to_string(e.outcome_index) + "," + field(e.outcome_label) + "," + g17(e.probability) + "\n";
    out += "final,,,,," + field(t.terminal_label) + "," + g17(t.total_probability) + "\n";
    return out;
}

std::string render_ensemble(const RunConfig& cfg, const EnsembleResult& r, OutputFormat format) {
    const double n = static_cast<double>(cfg.n_traj);
    double mean_red = 0.0;
    std::size_t max_red = 0;
    for (const auto& rec : r.records) {
        mean_red += static_cast<double>(rec.jumps.size());
        max_red = std::max(max_red, rec.jumps.size());
    }
    mean_red /= n;
    if (format == OutputFormat::Json) {
        json dist = json::object(), err = json::object();
        for (const auto& [k, p] : r.distribution) {
            dist[k] = p;
            err[k] = std::sqrt(p * (1.0 - p) / n);
        }
        json j = {{"scenario", cfg.scenario},
                  {"n_traj", cfg.n_traj},
                  {"seed", cfg.seed},
                  {"distribution", dist},
                  {"standard_error", err},
                  {"mean_reductions", mean_red},
                  {"max_reductions", max_red}};
        return j.dump(2) + "\n";
    }
    std::string out = "outcome,frequency,standard_error\n";
    for (const auto& [k, p] : r.distribution)
        out += field(k) + "," + g17(p) + "," + g17(std::sqrt(p * (1.0 - p) / n)) + "\n";
    return out;
}

std::string render_scan(const std::vector<EntropySample>& rows, OutputFormat format) {
    std::size_t k = 0;
    for (const auto& r : rows) k = std::max(k, r.weights.size());
    if (format == OutputFormat::Json) {
        json arr = json::array();
        for (const auto& r : rows) {
            std::vector<double> w = r.weights;
            w.resize(k, 0.0);
            arr.push_back({{"t", r.t}, {"weights", w}, {"sigma", r.sigma}});
        }
        return arr.dump(2) + "\n";
    }
    std::string out = "t";
    for (std::size_t j = 0; j < k; ++j) out += ",w_" + std::to_string(j);
    out += ",sigma\n";
    for (const auto& r : rows) {
        out += g17(r.t);
        for (std::size_t j = 0; j < k; ++j) out += "," + g17(j < r.weights.size() ? r.weights[j] : 0.0);
        out += "," + g17(r.sigma) + "\n";
    }
    return out;
}

} // namespace

std::string render_verify(const std::vector<VerifyRow>& rows, OutputFormat format) {
    if (format == OutputFormat::Json) {
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"group", r.group},
                           {"name", r.name},
                           {"expected", r.expected},
                           {"actual", r.actual},
                           {"tolerance", r.tolerance},
                           {"relative", r.relative},
                           {"pass", r.pass}});
        return arr.dump(2) + "\n";
    }
    std::string out = "group,name,expected,actual,tolerance,relative,pass\n";
    for (const auto& r : rows)
        out += field(r.group) + "," + field(r.name) + "," + g17(r.expected) + "," + g17(r.actual) + "," +
               g17(r.tolerance) + "," + (r.relative ? "true" : "false") + "," + (r.pass ? "true" : "false") + "\n";
    return out;
}

RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        invalid(std::string("config is not valid JSON: ") + e.what());
    }
    allow_keys(doc, "config",
               {"scenario", "mode", "n_traj", "seed", "horizon", "solver", "mixing", "scan", "output", "filter"});
    RunConfig cfg;

    if (!doc.contains("scenario")) invalid("config needs a 'scenario'");
    const json& sc = doc["scenario"];
    if (sc.is_string()) {
        cfg.scenario = sc.get<std::string>();
    } else {
        allow_keys(sc, "scenario", {"name", "params"});
        if (!sc.contains("name") || !sc["name"].is_string()) invalid("scenario needs a string 'name'");
        cfg.scenario = sc["name"].get<std::string>();
        if (sc.contains("params")) {
            if (!sc["params"].is_object()) invalid("scenario params must be an object");
            for (const auto& [k, v] : sc["params"].items()) {
                if (v.is_number()) {
                    cfg.params[k] = v.get<double>();
                } else if (v.is_array()) {
                    std::vector<double> list;
                    for (const auto& x : v) list.push_back(number(x, k));
                    cfg.params[k] = list;
                } else {
                    invalid("parameter '" + k + "' must be a number or a list of numbers");
                }
            }
        }
    }
    if (!find_variant(cfg.scenario)) invalid("unknown scenario '" + cfg.scenario + "'");

    if (doc.contains("mode")) {
        if (!doc["mode"].is_string()) invalid("'mode' must be a string");
        cfg.mode = parse_mode(doc["mode"].get<std::string>());
    }
    if (doc.contains("n_traj")) cfg.n_traj = static_cast<std::size_t>(integer(doc["n_traj"], "n_traj", 1, 100000000));
    if (doc.contains("seed")) {
        const json& s = doc["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            invalid("'seed' must be a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (doc.contains("horizon")) cfg.horizon = positive(doc["horizon"], "horizon");
    if (doc.contains("filter")) {
        if (!doc["filter"].is_string()) invalid("'filter' must be a string");
        cfg.filter = doc["filter"].get<std::string>();
    }

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        allow_keys(s, "solver", {"grid_points", "t_tol_rel", "plateau_eps", "max_iter", "derivative_step_rel"});
        if (s.contains("grid_points")) cfg.solver.grid_points = static_cast<int>(integer(s["grid_points"], "grid_points", 4, 10000000));
        if (s.contains("t_tol_rel")) cfg.solver.t_tol_rel = positive(s["t_tol_rel"], "t_tol_rel");
        if (s.contains("plateau_eps")) cfg.solver.plateau_eps = positive(s["plateau_eps"], "plateau_eps");
        if (s.contains("max_iter")) cfg.solver.max_iter = static_cast<int>(integer(s["max_iter"], "max_iter", 1, 100000));
        if (s.contains("derivative_step_rel"))
            cfg.solver.derivative_step_rel = positive(s["derivative_step_rel"], "derivative_step_rel");
    }
    if (doc.contains("mixing")) {
        const json& m = doc["mixing"];
        allow_keys(m, "mixing", {"theta_points", "phi_points", "starts", "step_tol"});
        if (m.contains("theta_points")) cfg.mixing.theta_points = static_cast<int>(integer(m["theta_points"], "theta_points", 1, 100000));
        if (m.contains("phi_points")) cfg.mixing.phi_points = static_cast<int>(integer(m["phi_points"], "phi_points", 1, 100000));
        if (m.contains("starts")) cfg.mixing.starts = static_cast<int>(integer(m["starts"], "starts", 1, 1000));
        if (m.contains("step_tol")) cfg.mixing.step_tol = positive(m["step_tol"], "step_tol");
    }
    if (doc.contains("scan")) {
        const json& s = doc["scan"];
        allow_keys(s, "scan", {"t_max", "points", "times"});
        if (s.contains("t_max")) cfg.scan.t_max = positive(s["t_max"], "t_max");
        if (s.contains("points")) cfg.scan.points = static_cast<int>(integer(s["points"], "points", 2, 10000000));
        if (s.contains("times")) {
            if (!s["times"].is_array() || s["times"].empty()) invalid("'times' must be a non-empty list");
            for (const auto& t : s["times"]) {
                const double x = number(t, "times");
                if (!(x >= 0.0)) invalid("scan times must be non-negative");
                cfg.scan.times.push_back(x);
            }
        }
    }
    if (doc.contains("output")) {
        const json& o = doc["output"];
        allow_keys(o, "output", {"path", "format"});
        if (o.contains("path")) {
            if (!o["path"].is_string()) invalid("output path must be a string");
            cfg.output_path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            if (!o["format"].is_string()) invalid("output format must be a string");
            cfg.format = parse_format(o["format"].get<std::string>());
        }
    }

    // parameter blocks are validated before any computation
    configured_scenario(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

Scenario configured_scenario(const RunConfig& cfg) {
    Scenario sc = build_scenario(cfg.scenario, cfg.params);
    sc.solver = cfg.solver;
    sc.mixing = cfg.mixing;
    if (cfg.horizon) {
        const double h = *cfg.horizon;
        sc.evolution = [inner = sc.evolution, h](const PureState& s, int stage) {
            StageFlow f = inner(s, stage);
            f.horizon = h;
            return f;
        };
    }
    return sc;
}

RunResult execute(const RunConfig& cfg) {
    RunResult res;
    if (cfg.mode == RunMode::Verify) {
        const auto rows = verify_table(cfg.filter);
        res.text = render_verify(rows, cfg.format);
        res.exit_code = std::all_of(rows.begin(), rows.end(), [](const VerifyRow& r) { return r.pass; }) ? 0 : 1;
        return res;
    }
    const Scenario sc = configured_scenario(cfg);
    switch (cfg.mode) {
    case RunMode::Trajectory: {
        Rng rng(derive_seed(cfg.seed, 0));
        res.text = render_trajectory(run_trajectory(sc, rng), cfg.format);
        break;
    }
    case RunMode::Ensemble:
        res.text = render_ensemble(cfg, run_ensemble(sc, cfg.n_traj, cfg.seed), cfg.format);
        break;
    case RunMode::Enumerate:
        res.text = render_distribution(enumerate_outcomes(sc), cfg.format, "probability");
        break;
    case RunMode::EntropyScan: {
        const auto* init = std::get_if<PureState>(&sc.initial);
        if (!init) invalid("entropy-scan needs a pure initial state");
        const StageFlow f = sc.evolution(*init, 1);
        std::vector<double> times = cfg.scan.times;
        if (times.empty()) {
            const double t_max = cfg.scan.t_max.value_or(f.horizon);
            for (int i = 0; i < cfg.scan.points; ++i) times.push_back(t_max * i / (cfg.scan.points - 1));
        }
        std::vector<EntropySample> rows;
        for (double t : times) {
            EntropySample s;
            s.t = t;
            s.weights = schmidt_spectrum(f.flow(t), sc.cut);
            s.sigma = reduction_entropy(s.weights);
            rows.push_back(std::move(s));
        }
        res.text = render_scan(rows, cfg.format);
        break;
    }
    case RunMode::Verify: break;
    }
    return res;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NonConvergent: return 3;
    case ErrorKind::StageOverflow: return 4;
    default: return 2;
    }
}

} // namespace reduxion
