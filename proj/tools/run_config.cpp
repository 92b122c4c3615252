#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"

#include "csv_out.hpp"
#include "udn/errors.hpp"
#include "udn/units.hpp"

namespace udn::cli {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

void check(bool ok, const std::string& msg) {
    if (!ok) bad(msg);
}

// One JSON object scope: typed getters plus exhaustive unknown-key rejection.
class ObjView {
  public:
    ObjView(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj.is_object()) bad(where_ + " must be a JSON object");
    }

    bool has(const char* key) {
        seen_.insert(key);
        return obj_.contains(key);
    }

    double num(const char* key, double fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number()) bad(path(key) + " must be a number");
        return v.get<double>();
    }

    // null clears the value; missing keeps the fallback
    std::optional<double> num_or_null(const char* key, std::optional<double> fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (v.is_null()) return std::nullopt;
        if (!v.is_number()) bad(path(key) + " must be a number or null");
        return v.get<double>();
    }

    uint64_t uint(const char* key, uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) bad(path(key) + " must be a non-negative integer");
        if (!v.is_number_unsigned() && v.get<int64_t>() < 0) {
            bad(path(key) + " must be a non-negative integer");
        }
        return v.get<uint64_t>();
    }

    std::string str(const char* key, std::string fallback) {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_string()) bad(path(key) + " must be a string");
        return v.get<std::string>();
    }

    const json* object(const char* key) {
        if (!has(key)) return nullptr;
        return &obj_.at(key);
    }

    // call last: anything not requested above is a schema violation
    void finish() {
        for (const auto& item : obj_.items()) {
            if (!seen_.contains(item.key())) bad("unknown key " + path(item.key().c_str()));
        }
    }

  private:
    std::string path(const char* key) const {
        return where_.empty() ? std::string(key) : where_ + "." + key;
    }

    const json& obj_;
    std::string where_;
    std::set<std::string> seen_;
};

template <typename Enum>
Enum parse_enum(const std::string& text, const char* field,
                std::initializer_list<std::pair<const char*, Enum>> table) {
    std::string valid;
    for (const auto& [name, value] : table) {
        if (text == name) return value;
        if (!valid.empty()) valid += ", ";
        valid += name;
    }
    bad(std::string(field) + " must be one of: " + valid + " (got \"" + text + "\")");
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("off");
}

void check_field(bool ok, const char* field, const char* what) {
    if (!ok) bad(std::string(field) + " " + what);
}

}  // namespace

const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::general: return "general";
        case Scenario::corollary: return "corollary";
        case Scenario::adapted: return "adapted";
    }
    return "?";
}

const char* sweep_var_name(SweepVar v) {
    switch (v) {
        case SweepVar::lambda: return "lambda_per_km2";
        case SweepVar::alignment: return "alignment";
        case SweepVar::threshold_db: return "threshold_db";
    }
    return "?";
}

const char* sweep_scale_name(SweepScale s) {
    return s == SweepScale::log ? "log" : "linear";
}

std::vector<double> SweepSpec::grid() const {
    std::vector<double> g;
    g.reserve(static_cast<size_t>(points));
    const int n = points;
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            g.push_back(from);
        } else if (i == n - 1) {
            g.push_back(to);
        } else {
            const double t = static_cast<double>(i) / static_cast<double>(n - 1);
            g.push_back(scale == SweepScale::log ? from * std::pow(to / from, t)
                                                 : from + (to - from) * t);
        }
    }
    return g;
}

void RunConfig::validate() const {
    check_field(sweep.points >= 2 && sweep.points <= 100000, "sweep.points",
                "must lie in [2, 100000]");
    check_field(std::isfinite(sweep.from) && std::isfinite(sweep.to), "sweep.from/to",
                "must be finite");
    check_field(sweep.from < sweep.to, "sweep.from", "must be less than sweep.to");
    if (sweep.scale == SweepScale::log) {
        check_field(sweep.from > 0.0, "sweep.from", "must be positive on a log scale");
    }
    switch (sweep.var) {
        case SweepVar::lambda:
            check_field(sweep.from > 0.0, "sweep.from", "must be positive for a density sweep");
            break;
        case SweepVar::alignment:
            check_field(sweep.from > 0.0 && sweep.to <= 1.0 + 1e-12, "sweep.from/to",
                        "must lie in (0, 1] for an alignment sweep");
            break;
        case SweepVar::threshold_db:
            break;
    }

    const ParamSpec& p = params;
    check_field(std::isfinite(p.lambda_per_km2) && p.lambda_per_km2 > 0.0,
                "params.lambda_per_km2", "must be positive");
    check_field(std::isfinite(p.mu) && p.mu > 0.0, "params.mu", "must be positive");
    check_field(std::isfinite(p.threshold_db), "params.threshold_db", "must be finite");
    if (p.snr_at_d0_db) {
        check_field(std::isfinite(*p.snr_at_d0_db), "params.snr_at_d0_db", "must be finite");
    }
    check_field(std::isfinite(p.beta1) && p.beta1 >= 0.0, "params.beta1", "must be >= 0");
    check_field(std::isfinite(p.beta2) && p.beta2 > 2.0, "params.beta2", "must exceed 2");
    check_field(p.beta1 <= p.beta2, "params.beta1", "must not exceed params.beta2");
    check_field(std::isfinite(p.d0_m) && p.d0_m > 0.0, "params.d0_m", "must be positive");
    check_field(std::isfinite(p.alpha0_db), "params.alpha0_db", "must be finite");
    check_field(std::isfinite(p.main_bs_db), "params.main_bs_db", "must be finite");
    check_field(std::isfinite(p.main_ue_db), "params.main_ue_db", "must be finite");
    if (p.side_bs_db) {
        check_field(std::isfinite(*p.side_bs_db), "params.side_bs_db", "must be finite");
    }
    if (p.side_ue_db) {
        check_field(std::isfinite(*p.side_ue_db), "params.side_ue_db", "must be finite");
    }
    check_field(p.width_bs_rad > 0.0 && p.width_bs_rad <= kTwoPi * (1.0 + 1e-12),
                "params.width_bs_rad", "must lie in (0, 2pi]");
    check_field(p.width_ue_rad > 0.0 && p.width_ue_rad <= kTwoPi * (1.0 + 1e-12),
                "params.width_ue_rad", "must lie in (0, 2pi]");

    if (scenario != Scenario::adapted) {
        check(!adaptation_k_per_km2.has_value(),
              "adaptation.k_per_km2 requires scenario \"adapted\"");
    }
    if (scenario == Scenario::corollary || scenario == Scenario::adapted) {
        const char* name = scenario_name(scenario);
        check(!p.snr_at_d0_db.has_value(),
              std::string(name) +
                  " scenario is interference-limited: set params.snr_at_d0_db to null");
        check(!p.side_bs_db.has_value() && !p.side_ue_db.has_value(),
              std::string(name) + " scenario needs zero side lobes: set params.side_bs_db and "
                                  "params.side_ue_db to null");
        check(p.beta1 == 0.0,
              std::string(name) + " scenario requires params.beta1 = 0 (bounded near field)");
    }
    if (scenario == Scenario::adapted) {
        check(adaptation_k_per_km2.has_value(),
              "adapted scenario requires adaptation.k_per_km2");
        check_field(std::isfinite(*adaptation_k_per_km2) && *adaptation_k_per_km2 > 0.0,
                    "adaptation.k_per_km2", "must be positive");
        check(sweep.var == SweepVar::lambda,
              "adapted scenario sweeps density: sweep.variable must be \"lambda\"");
    }

    if (sim.enabled) {
        check_field(sim.trials >= 1, "sim.trials", "must be >= 1");
        check_field(sim.workers >= 1 && sim.workers <= 256, "sim.workers",
                    "must lie in [1, 256]");
        check_field(std::isfinite(sim.window_radius_m) && sim.window_radius_m >= 0.0,
                    "sim.window_radius_m", "must be >= 0 (0 selects the automatic window)");
    }
    check_field(std::isfinite(quad.abs_tol) && quad.abs_tol > 0.0, "quadrature.abs_tol",
                "must be positive");
    check_field(std::isfinite(quad.rel_tol) && quad.rel_tol > 0.0, "quadrature.rel_tol",
                "must be positive");
    check_field(quad.max_subdivisions >= 1 && quad.max_subdivisions <= 100000,
                "quadrature.max_subdivisions", "must lie in [1, 100000]");
    check(!csv_path.empty(), "output.csv_path must not be empty");

    // Endpoint probe: catches residual inconsistencies (e.g. a width outside
    // the model's tolerance) with the library's own message.
    for (const double v : {sweep.from, sweep.to}) {
        try {
            at(v);
        } catch (const InfeasibleError&) {
            throw;  // adaptation infeasibility keeps its own exit code
        } catch (const std::exception& e) {
            bad(std::string("config rejected at sweep value ") + format_double(v) + ": " +
                e.what());
        }
    }
}

NetworkParams RunConfig::base_params() const {
    NetworkParams p;
    p.lambda = per_km2_to_per_m2(params.lambda_per_km2);
    p.mu = params.mu;
    p.threshold = db_to_linear(params.threshold_db);
    p.model.alpha0 = db_to_linear(params.alpha0_db);
    p.model.beta1 = params.beta1;
    p.model.beta2 = params.beta2;
    p.model.d0 = params.d0_m;
    p.sigma2 = params.snr_at_d0_db
                   ? p.model.alpha0 * std::pow(p.model.d0, -p.model.beta1) /
                         db_to_linear(*params.snr_at_d0_db)
                   : 0.0;
    p.beams.main_bs = db_to_linear(params.main_bs_db);
    p.beams.side_bs = params.side_bs_db ? db_to_linear(*params.side_bs_db) : 0.0;
    p.beams.width_bs = params.width_bs_rad;
    p.beams.main_ue = db_to_linear(params.main_ue_db);
    p.beams.side_ue = params.side_ue_db ? db_to_linear(*params.side_ue_db) : 0.0;
    p.beams.width_ue = params.width_ue_rad;
    return p;
}

NetworkParams RunConfig::at(double sweep_value) const {
    NetworkParams p = base_params();
    double lambda_km2 = params.lambda_per_km2;
    switch (sweep.var) {
        case SweepVar::lambda:
            lambda_km2 = sweep_value;
            p.lambda = per_km2_to_per_m2(sweep_value);
            break;
        case SweepVar::alignment: {
            const double w = kTwoPi * std::min(1.0, std::sqrt(sweep_value));
            p.beams.width_bs = w;
            p.beams.width_ue = w;
            break;
        }
        case SweepVar::threshold_db:
            p.threshold = db_to_linear(sweep_value);
            break;
    }
    if (scenario == Scenario::adapted) {
        const double ratio = *adaptation_k_per_km2 / lambda_km2;
        if (ratio > 1.0 + 1e-12) {
            throw InfeasibleError("beam adaptation infeasible: K = " +
                                  format_double(*adaptation_k_per_km2) +
                                  " per km^2 exceeds density " + format_double(lambda_km2));
        }
        const double w = kTwoPi * std::min(1.0, std::sqrt(ratio));
        p.beams.width_bs = w;
        p.beams.width_ue = w;
    }
    p.validate();
    return p;
}

std::vector<std::string> RunConfig::provenance() const {
    std::vector<std::string> out;
    auto add = [&out](const std::string& k, const std::string& v) {
        out.push_back("# " + k + " = " + v);
    };
    add("scenario", scenario_name(scenario));
    add("sweep.variable", sweep_var_name(sweep.var));
    add("sweep.scale", sweep_scale_name(sweep.scale));
    add("sweep.from", format_double(sweep.from));
    add("sweep.to", format_double(sweep.to));
    add("sweep.points", format_u64(static_cast<uint64_t>(sweep.points)));
    add("params.lambda_per_km2", format_double(params.lambda_per_km2));
    add("params.mu", format_double(params.mu));
    add("params.threshold_db", format_double(params.threshold_db));
    add("params.snr_at_d0_db", fmt_opt(params.snr_at_d0_db));
    add("params.beta1", format_double(params.beta1));
    add("params.beta2", format_double(params.beta2));
    add("params.d0_m", format_double(params.d0_m));
    add("params.alpha0_db", format_double(params.alpha0_db));
    add("params.main_bs_db", format_double(params.main_bs_db));
    add("params.side_bs_db", fmt_opt(params.side_bs_db));
    add("params.width_bs_rad", format_double(params.width_bs_rad));
    add("params.main_ue_db", format_double(params.main_ue_db));
    add("params.side_ue_db", fmt_opt(params.side_ue_db));
    add("params.width_ue_rad", format_double(params.width_ue_rad));
    if (adaptation_k_per_km2) add("adaptation.k_per_km2", format_double(*adaptation_k_per_km2));
    add("sim.enabled", sim.enabled ? "true" : "false");
    if (sim.enabled) {
        add("sim.trials", format_u64(sim.trials));
        add("sim.seed", format_u64(sim.seed));
        add("sim.window_radius_m", sim.window_radius_m == 0.0
                                       ? std::string("auto")
                                       : format_double(sim.window_radius_m));
        add("sim.workers", format_u64(sim.workers));
    }
    add("quadrature.abs_tol", format_double(quad.abs_tol));
    add("quadrature.rel_tol", format_double(quad.rel_tol));
    add("quadrature.max_subdivisions",
        format_u64(static_cast<uint64_t>(quad.max_subdivisions)));
    add("toggles.mu_convention", mu_convention == MuConvention::paper ? "paper" : "campbell");
    add("toggles.thm3_d0", thm3_tail == DenseBoundTail::paper ? "paper" : "d0sq");
    add("output.csv_path", csv_path);
    if (!svg_path.empty()) add("output.svg_path", svg_path);
    return out;
}

RunConfig parse_config_json(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        bad(origin + ": " + e.what());
    }
    RunConfig cfg;
    ObjView top(root, "");
    if (top.has("scenario")) {
        cfg.scenario = parse_enum<Scenario>(top.str("scenario", "general"), "scenario",
                                            {{"general", Scenario::general},
                                             {"corollary", Scenario::corollary},
                                             {"adapted", Scenario::adapted}});
    }
    if (const json* sw = top.object("sweep")) {
        ObjView v(*sw, "sweep");
        cfg.sweep.var = parse_enum<SweepVar>(v.str("variable", "lambda"), "sweep.variable",
                                             {{"lambda", SweepVar::lambda},
                                              {"alignment", SweepVar::alignment},
                                              {"threshold_db", SweepVar::threshold_db}});
        cfg.sweep.scale = parse_enum<SweepScale>(
            v.str("scale", "log"), "sweep.scale",
            {{"log", SweepScale::log}, {"linear", SweepScale::linear}});
        cfg.sweep.from = v.num("from", cfg.sweep.from);
        cfg.sweep.to = v.num("to", cfg.sweep.to);
        cfg.sweep.points = static_cast<int>(v.uint("points", 25));
        v.finish();
    }
    if (const json* pj = top.object("params")) {
        ObjView v(*pj, "params");
        ParamSpec& p = cfg.params;
        p.lambda_per_km2 = v.num("lambda_per_km2", p.lambda_per_km2);
        p.mu = v.num("mu", p.mu);
        p.threshold_db = v.num("threshold_db", p.threshold_db);
        p.snr_at_d0_db = v.num_or_null("snr_at_d0_db", p.snr_at_d0_db);
        p.beta1 = v.num("beta1", p.beta1);
        p.beta2 = v.num("beta2", p.beta2);
        p.d0_m = v.num("d0_m", p.d0_m);
        p.alpha0_db = v.num("alpha0_db", p.alpha0_db);
        p.main_bs_db = v.num("main_bs_db", p.main_bs_db);
        p.side_bs_db = v.num_or_null("side_bs_db", p.side_bs_db);
        p.width_bs_rad = v.num("width_bs_rad", p.width_bs_rad);
        p.main_ue_db = v.num("main_ue_db", p.main_ue_db);
        p.side_ue_db = v.num_or_null("side_ue_db", p.side_ue_db);
        p.width_ue_rad = v.num("width_ue_rad", p.width_ue_rad);
        v.finish();
    }
    if (const json* aj = top.object("adaptation")) {
        ObjView v(*aj, "adaptation");
        cfg.adaptation_k_per_km2 = v.num("k_per_km2", 1.0);
        v.finish();
    }
    if (const json* sj = top.object("sim")) {
        ObjView v(*sj, "sim");
        cfg.sim.enabled = true;
        cfg.sim.trials = v.uint("trials", cfg.sim.trials);
        cfg.sim.seed = v.uint("seed", cfg.sim.seed);
        cfg.sim.window_radius_m = v.num("window_radius_m", cfg.sim.window_radius_m);
        cfg.sim.workers = static_cast<unsigned>(v.uint("workers", cfg.sim.workers));
        v.finish();
    }
    if (const json* qj = top.object("quadrature")) {
        ObjView v(*qj, "quadrature");
        cfg.quad.abs_tol = v.num("abs_tol", cfg.quad.abs_tol);
        cfg.quad.rel_tol = v.num("rel_tol", cfg.quad.rel_tol);
        cfg.quad.max_subdivisions = static_cast<int>(
            v.uint("max_subdivisions", static_cast<uint64_t>(cfg.quad.max_subdivisions)));
        v.finish();
    }
    if (const json* tj = top.object("toggles")) {
        ObjView v(*tj, "toggles");
        cfg.mu_convention = parse_enum<MuConvention>(
            v.str("mu_convention", "paper"), "toggles.mu_convention",
            {{"paper", MuConvention::paper}, {"campbell", MuConvention::campbell}});
        cfg.thm3_tail = parse_enum<DenseBoundTail>(
            v.str("thm3_d0", "paper"), "toggles.thm3_d0",
            {{"paper", DenseBoundTail::paper}, {"d0sq", DenseBoundTail::d0sq}});
        v.finish();
    }
    if (const json* oj = top.object("output")) {
        ObjView v(*oj, "output");
        cfg.csv_path = v.str("csv_path", cfg.csv_path);
        cfg.svg_path = v.str("svg_path", cfg.svg_path);
        v.finish();
    }
    top.finish();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str(), path);
}

RunConfig preset_fig2(double beta1) {
    RunConfig cfg;
    cfg.scenario = Scenario::general;
    cfg.sweep = {SweepVar::lambda, SweepScale::log, 1.0, 1e6, 25};
    cfg.params.beta1 = beta1;
    const std::string stem = "fig2_b" + format_u64(static_cast<uint64_t>(beta1));
    cfg.csv_path = stem + ".csv";
    cfg.svg_path = stem + ".svg";
    return cfg;
}

RunConfig preset_fig3(double threshold_db, double d0_m) {
    RunConfig cfg;
    cfg.scenario = Scenario::corollary;
    cfg.sweep = {SweepVar::alignment, SweepScale::linear, 0.05, 1.0, 20};
    cfg.params.lambda_per_km2 = 1000.0;
    cfg.params.threshold_db = threshold_db;
    cfg.params.snr_at_d0_db = std::nullopt;
    cfg.params.beta1 = 0.0;
    cfg.params.d0_m = d0_m;
    cfg.params.side_bs_db = std::nullopt;
    cfg.params.side_ue_db = std::nullopt;
    const std::string stem = "fig3_t" + format_u64(static_cast<uint64_t>(threshold_db)) + "_d" +
                             format_u64(static_cast<uint64_t>(d0_m));
    cfg.csv_path = stem + ".csv";
    cfg.svg_path = stem + ".svg";
    return cfg;
}

RunConfig preset_fig4() {
    RunConfig cfg;
    cfg.scenario = Scenario::adapted;
    cfg.sweep = {SweepVar::lambda, SweepScale::log, 1.0, 9e6, 25};
    cfg.params.snr_at_d0_db = std::nullopt;
    cfg.params.beta1 = 0.0;
    cfg.params.side_bs_db = std::nullopt;
    cfg.params.side_ue_db = std::nullopt;
    cfg.adaptation_k_per_km2 = 1.0;
    cfg.csv_path = "fig4.csv";
    cfg.svg_path = "fig4.svg";
    return cfg;
}

RunConfig preset_adjudicate() {
    RunConfig cfg;
    cfg.scenario = Scenario::general;
    cfg.params.lambda_per_km2 = 1e4;
    cfg.params.mu = 2.0;
    cfg.sim.enabled = true;
    cfg.sim.trials = 100000;
    cfg.csv_path = "adjudication.md";
    return cfg;
}

}  // namespace udn::cli
