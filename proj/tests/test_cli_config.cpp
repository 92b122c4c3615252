#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "csv_out.hpp"
#include "doctest.h"
#include "run_config.hpp"
#include "svg_plot.hpp"
#include "sweep.hpp"
#include "udn/errors.hpp"
#include "udn/units.hpp"

using namespace udn::cli;

namespace {

RunConfig parse(const std::string& text) { return parse_config_json(text, "inline"); }

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// config behind the small general-scenario golden file
RunConfig general_golden_config() {
    RunConfig cfg;
    cfg.sweep = {SweepVar::lambda, SweepScale::log, 10.0, 1e5, 5};
    cfg.csv_path = "general_5pt.csv";
    return cfg;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MESSAGE(bool(in), "cannot open " << p.string()
                                             << " (set UDN_REGEN_GOLDEN=1 to create goldens)");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void golden_compare(const char* name, const RunConfig& cfg) {
    const std::string got = render_csv(cfg, compute_sweep(cfg));
    const std::filesystem::path path = std::filesystem::path(UDN_TEST_GOLDEN_DIR) / name;
    if (std::getenv("UDN_REGEN_GOLDEN") != nullptr) {
        std::ofstream out(path, std::ios::binary);
        REQUIRE(bool(out));
        out << got;
        return;
    }
    CHECK_MESSAGE(got == read_file(path), "rendered CSV deviates from " << name);
}

}  // namespace

TEST_CASE("defaults parse and validate") {
    const RunConfig cfg = parse("{}");
    CHECK(cfg.scenario == Scenario::general);
    CHECK(cfg.sweep.var == SweepVar::lambda);
    CHECK(cfg.sweep.points == 25);
    CHECK(cfg.csv_path == "sweep.csv");
    CHECK_FALSE(cfg.sim.enabled);
    cfg.validate();
}

TEST_CASE("full config round trip") {
    const RunConfig cfg = parse(R"({
        "scenario": "corollary",
        "sweep": {"variable": "alignment", "scale": "linear", "from": 0.05, "to": 1.0, "points": 20},
        "params": {
            "lambda_per_km2": 1000, "mu": 1.0, "threshold_db": 7.0,
            "snr_at_d0_db": null, "beta1": 0.0, "beta2": 4.0, "d0_m": 10.0,
            "alpha0_db": 0.0, "main_bs_db": 20.0, "side_bs_db": null,
            "width_bs_rad": 0.5235987755982988, "main_ue_db": 10.0,
            "side_ue_db": null, "width_ue_rad": 1.5707963267948966
        },
        "sim": {"trials": 5000, "seed": 99, "window_radius_m": 300.0, "workers": 2},
        "toggles": {"mu_convention": "campbell", "thm3_d0": "d0sq"},
        "output": {"csv_path": "out.csv", "svg_path": "out.svg"}
    })");
    CHECK(cfg.scenario == Scenario::corollary);
    CHECK(cfg.sweep.var == SweepVar::alignment);
    CHECK(cfg.sweep.scale == SweepScale::linear);
    CHECK(cfg.sweep.from == 0.05);
    CHECK(cfg.sweep.points == 20);
    CHECK_FALSE(cfg.params.snr_at_d0_db.has_value());
    CHECK_FALSE(cfg.params.side_bs_db.has_value());
    CHECK_FALSE(cfg.params.side_ue_db.has_value());
    CHECK(cfg.sim.enabled);
    CHECK(cfg.sim.trials == 5000);
    CHECK(cfg.sim.seed == 99);
    CHECK(cfg.sim.window_radius_m == 300.0);
    CHECK(cfg.sim.workers == 2);
    CHECK(cfg.mu_convention == udn::MuConvention::campbell);
    CHECK(cfg.thm3_tail == udn::DenseBoundTail::d0sq);
    CHECK(cfg.csv_path == "out.csv");
    CHECK(cfg.svg_path == "out.svg");
    cfg.validate();
}

TEST_CASE("quadrature section tunes the analytic engine") {
    const RunConfig cfg = parse(R"({
        "quadrature": {"abs_tol": 1e-12, "rel_tol": 1e-9, "max_subdivisions": 400}
    })");
    CHECK(cfg.quad.abs_tol == 1e-12);
    CHECK(cfg.quad.rel_tol == 1e-9);
    CHECK(cfg.quad.max_subdivisions == 400);
    cfg.validate();

    RunConfig bad;
    bad.quad.max_subdivisions = 0;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("quadrature.max_subdivisions"),
                         ConfigError);
    bad = {};
    bad.quad.rel_tol = 0.0;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("quadrature.rel_tol"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("{\"quadrature\": {\"budget\": 7}}"),
                         doctest::Contains("quadrature.budget"), ConfigError);

    // a starved budget must surface as non-convergence, never a silent result
    RunConfig starved;
    starved.sweep = {SweepVar::lambda, SweepScale::log, 100.0, 1000.0, 2};
    starved.quad.abs_tol = 1e-300;
    starved.quad.rel_tol = 1e-300;
    starved.quad.max_subdivisions = 1;
    CHECK_THROWS_AS(compute_sweep(starved), udn::NonConvergenceError);
}

TEST_CASE("schema violations are rejected with the offending path") {
    CHECK_THROWS_WITH_AS(parse("{\"bogus\": 1}"), doctest::Contains("bogus"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("{\"params\": {\"foo\": 1}}"), doctest::Contains("params.foo"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse("{\"sweep\": {\"step\": 2}}"), doctest::Contains("sweep.step"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse("{\"params\": {\"mu\": \"one\"}}"),
                         doctest::Contains("params.mu"), ConfigError);
    CHECK_THROWS_WITH_AS(parse("{\"sim\": {\"trials\": -5}}"), doctest::Contains("sim.trials"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse("{\"sim\": {\"trials\": 2.5}}"), doctest::Contains("sim.trials"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse("{\"scenario\": \"exotic\"}"), doctest::Contains("corollary"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse("{\"params\": {\"beta1\": null}}"),
                         doctest::Contains("params.beta1"), ConfigError);
    CHECK_THROWS_AS(parse("not json at all"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_file("/nonexistent/config.json"),
                         doctest::Contains("cannot read"), ConfigError);
}

TEST_CASE("validation names the broken field") {
    RunConfig cfg;
    cfg.sweep.points = 1;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("sweep.points"), ConfigError);
    cfg = {};
    cfg.sweep.from = 10.0;
    cfg.sweep.to = 1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("sweep.from"), ConfigError);
    cfg = {};
    cfg.sweep = {SweepVar::threshold_db, SweepScale::log, -10.0, 15.0, 10};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("log"), ConfigError);
    cfg.sweep.scale = SweepScale::linear;
    cfg.validate();  // negative thresholds in dB are fine on a linear scale
    cfg = {};
    cfg.sweep = {SweepVar::alignment, SweepScale::linear, 0.1, 1.5, 10};
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("alignment"), ConfigError);
    cfg = {};
    cfg.params.width_bs_rad = 7.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("width_bs_rad"), ConfigError);
    cfg = {};
    cfg.params.beta2 = 2.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("beta2"), ConfigError);
    cfg = {};
    cfg.sim.enabled = true;
    cfg.sim.workers = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("sim.workers"), ConfigError);
    cfg = {};
    cfg.csv_path.clear();
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("csv_path"), ConfigError);
}

TEST_CASE("scenario consistency is enforced, never silently fixed") {
    RunConfig cfg;
    cfg.scenario = Scenario::corollary;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("snr_at_d0_db"), ConfigError);
    cfg.params.snr_at_d0_db.reset();
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("side"), ConfigError);
    cfg.params.side_bs_db.reset();
    cfg.params.side_ue_db.reset();
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("beta1"), ConfigError);
    cfg.params.beta1 = 0.0;
    cfg.validate();

    RunConfig gen;
    gen.adaptation_k_per_km2 = 1.0;
    CHECK_THROWS_WITH_AS(gen.validate(), doctest::Contains("adapted"), ConfigError);

    RunConfig ad = preset_fig4();
    ad.adaptation_k_per_km2.reset();
    CHECK_THROWS_WITH_AS(ad.validate(), doctest::Contains("k_per_km2"), ConfigError);
    ad = preset_fig4();
    ad.sweep.var = SweepVar::threshold_db;
    ad.sweep.scale = SweepScale::linear;
    ad.sweep.from = 0.0;
    ad.sweep.to = 10.0;
    CHECK_THROWS_WITH_AS(ad.validate(), doctest::Contains("lambda"), ConfigError);
}

TEST_CASE("unit conversions into model space") {
    RunConfig cfg;
    const udn::NetworkParams p = cfg.base_params();
    CHECK(p.lambda == doctest::Approx(1e-3).epsilon(1e-14));
    CHECK(p.threshold == doctest::Approx(udn::db_to_linear(7.0)).epsilon(1e-14));
    CHECK(p.beams.main_bs == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(p.beams.side_bs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.beams.main_ue == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(p.beams.side_ue == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(p.sigma2 == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(p.model.alpha0 == 1.0);
    CHECK(p.beams.width_bs == std::numbers::pi / 6.0);

    cfg.params.snr_at_d0_db.reset();
    CHECK(cfg.base_params().sigma2 == 0.0);
    cfg.params.side_bs_db.reset();
    CHECK(cfg.base_params().beams.side_bs == 0.0);
}

TEST_CASE("sweep application semantics") {
    RunConfig cfg;
    const udn::NetworkParams p = cfg.at(5000.0);
    CHECK(p.lambda == doctest::Approx(5e-3).epsilon(1e-14));
    CHECK(p.threshold == cfg.base_params().threshold);

    RunConfig al;
    al.scenario = Scenario::corollary;
    al.params.snr_at_d0_db.reset();
    al.params.side_bs_db.reset();
    al.params.side_ue_db.reset();
    al.params.beta1 = 0.0;
    al.sweep = {SweepVar::alignment, SweepScale::linear, 0.05, 1.0, 20};
    const udn::NetworkParams a = al.at(0.25);
    CHECK(a.beams.width_bs == doctest::Approx(std::numbers::pi).epsilon(1e-14));
    CHECK(a.beams.alignment_probability() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(al.at(1.0).beams.alignment_probability() == doctest::Approx(1.0).epsilon(1e-12));

    RunConfig th;
    th.sweep = {SweepVar::threshold_db, SweepScale::linear, -10.0, 15.0, 6};
    CHECK(th.at(3.0).threshold == doctest::Approx(udn::db_to_linear(3.0)).epsilon(1e-14));

    RunConfig ad = preset_fig4();
    CHECK(ad.at(1.0).beams.width_bs == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-12));
    const udn::NetworkParams dense = ad.at(4.0);
    CHECK(dense.beams.alignment_probability() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK_THROWS_AS(ad.at(0.5), udn::InfeasibleError);
}

TEST_CASE("grid endpoints are exact") {
    const SweepSpec log_spec{SweepVar::lambda, SweepScale::log, 1.0, 1e6, 25};
    const std::vector<double> g = log_spec.grid();
    REQUIRE(g.size() == 25);
    CHECK(g.front() == 1.0);
    CHECK(g.back() == 1e6);
    CHECK(g[12] == doctest::Approx(1e3).epsilon(1e-12));

    const SweepSpec lin{SweepVar::threshold_db, SweepScale::linear, 0.0, 10.0, 5};
    const std::vector<double> l = lin.grid();
    CHECK(l == std::vector<double>{0.0, 2.5, 5.0, 7.5, 10.0});
}

TEST_CASE("provenance is deterministic and spells disengaged options") {
    RunConfig cfg = preset_fig3(7.0, 10.0);
    const auto a = cfg.provenance();
    const auto b = cfg.provenance();
    CHECK(a == b);
    std::string joined;
    for (const auto& line : a) joined += line + "\n";
    CHECK(joined.find("# scenario = corollary") != std::string::npos);
    CHECK(joined.find("# params.snr_at_d0_db = off") != std::string::npos);
    CHECK(joined.find("# params.side_bs_db = off") != std::string::npos);
    CHECK(joined.find("# toggles.mu_convention = paper") != std::string::npos);

    cfg.sim.enabled = true;
    std::string with_sim;
    for (const auto& line : cfg.provenance()) with_sim += line + "\n";
    CHECK(with_sim.find("# sim.window_radius_m = auto") != std::string::npos);
}

TEST_CASE("presets validate") {
    for (const double b : {1.0, 2.0, 3.0}) {
        const RunConfig cfg = preset_fig2(b);
        cfg.validate();
        CHECK(cfg.csv_path == "fig2_b" + std::to_string(static_cast<int>(b)) + ".csv");
    }
    for (const double t : {0.0, 7.0}) {
        for (const double d : {5.0, 10.0}) {
            preset_fig3(t, d).validate();
        }
    }
    preset_fig4().validate();
    preset_adjudicate().validate();
}

TEST_CASE("csv rows carry the schema and sane values") {
    RunConfig cfg = preset_fig3(7.0, 10.0);
    const SweepResult res = compute_sweep(cfg);
    REQUIRE(res.rows.size() == 20);
    const std::string text = render_csv(cfg, res);
    CHECK(text.find("# ase unit = bits/s/Hz/km^2") != std::string::npos);

    std::istringstream lines(text);
    std::string line;
    std::string header;
    int data_rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        if (header.empty()) {
            header = line;
            continue;
        }
        const auto cells = split(line, ',');
        REQUIRE(cells.size() == 9);
        CHECK(cells[0] == "alignment");
        const double cov = std::stod(cells[2]);
        CHECK(cov >= 0.0);
        CHECK(cov <= 1.0);
        CHECK(std::stod(cells[4]) >= 0.0);
        for (int k = 5; k < 9; ++k) CHECK(cells[k] == "nan");
        ++data_rows;
    }
    CHECK(header ==
          "sweep_var,sweep_value,coverage_analytic,coverage_err,ase_analytic,"
          "coverage_mc,coverage_mc_se,ase_mc,ase_mc_se");
    CHECK(data_rows == 20);

    // repeated computation renders byte-identically
    CHECK(render_csv(cfg, compute_sweep(cfg)) == text);
}

TEST_CASE("simulation columns populate when enabled") {
    RunConfig cfg;
    cfg.sweep = {SweepVar::lambda, SweepScale::log, 100.0, 10000.0, 3};
    cfg.sim.enabled = true;
    cfg.sim.trials = 2000;
    cfg.sim.seed = 5;
    const SweepResult res = compute_sweep(cfg);
    REQUIRE(res.rows.size() == 3);
    for (const SweepRow& r : res.rows) {
        CHECK(std::isfinite(r.coverage_mc));
        CHECK(r.coverage_mc >= 0.0);
        CHECK(r.coverage_mc <= 1.0);
        CHECK(r.coverage_mc_se > 0.0);
        CHECK(r.ase_mc >= 0.0);
        CHECK(std::abs(r.coverage_mc - r.coverage_analytic) <=
              5.0 * r.coverage_mc_se + 3.0 * r.coverage_err + 0.02);
    }
    const std::string once = render_csv(cfg, res);
    CHECK(render_csv(cfg, compute_sweep(cfg)) == once);
}

TEST_CASE("adapted sweep emits both convention notes") {
    RunConfig cfg = preset_fig4();
    cfg.sweep.points = 4;
    const SweepResult res = compute_sweep(cfg);
    std::string joined;
    for (const auto& n : res.notes) joined += n + "\n";
    CHECK(joined.find("mu_convention=paper [active]") != std::string::npos);
    CHECK(joined.find("mu_convention=campbell") != std::string::npos);
    CHECK(joined.find("adapted ase slope") != std::string::npos);
    for (const SweepRow& r : res.rows) {
        CHECK(r.coverage_analytic >= 0.0);
        CHECK(r.coverage_analytic <= 1.0);
        CHECK(r.ase_analytic >= 0.0);
    }
}

TEST_CASE("number formatting round-trips") {
    for (const double v : {0.1, 1.0 / 3.0, 1e-9, 12345.678, 0.0, 2.718281828459045,
                           6.02214076e23, 1e6}) {
        CHECK(std::stod(format_double(v)) == v);
        CHECK(std::stod(format_double(-v)) == -v);
    }
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(1e6) == "1e+06");
    CHECK(format_u64(0) == "0");
    CHECK(format_u64(18446744073709551615ull) == "18446744073709551615");
}

TEST_CASE("atomic write leaves no temp file") {
    const auto dir = std::filesystem::temp_directory_path() / "udn_csv_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "atomic.txt";
    write_file_atomic(path.string(), "alpha\nbeta\n");
    CHECK(read_file(path) == "alpha\nbeta\n");
    write_file_atomic(path.string(), "gamma\n");
    CHECK(read_file(path) == "gamma\n");
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("svg smoke") {
    RunConfig cfg = preset_fig3(7.0, 10.0);
    const SweepResult res = compute_sweep(cfg);
    PanelSpec panel;
    panel.ylabel = "coverage probability";
    for (const SweepRow& r : res.rows) {
        panel.line.x.push_back(r.sweep_value);
        panel.line.y.push_back(r.coverage_analytic);
    }
    const std::string svg = render_plot("smoke", "alignment", false, {panel});
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("coverage probability") != std::string::npos);
    CHECK(render_plot("smoke", "alignment", false, {panel}) == svg);
}

TEST_CASE("rendered csv matches the golden copies") {
    golden_compare("fig3_t7_d10.csv", preset_fig3(7.0, 10.0));
    golden_compare("general_5pt.csv", general_golden_config());
}
