#include "sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csv_out.hpp"
#include "svg_plot.hpp"
#include "udn/analytic.hpp"
#include "udn/mc/simulate.hpp"
#include "udn/units.hpp"

namespace udn::cli {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

mc::SimConfig sim_config_for(const RunConfig& cfg, const NetworkParams& p) {
    if (cfg.sim.window_radius_m > 0.0) {
        mc::SimConfig sc;
        sc.trials = cfg.sim.trials;
        sc.seed = cfg.sim.seed;
        sc.window_radius = cfg.sim.window_radius_m;
        sc.validate(p);
        return sc;
    }
    return mc::SimConfig::make(p, cfg.sim.trials, cfg.sim.seed);
}

void adapted_notes(const RunConfig& cfg, SweepResult& out) {
    const double k = per_km2_to_per_m2(*cfg.adaptation_k_per_km2);
    const NetworkParams dense = cfg.at(cfg.sweep.to);
    for (const MuConvention conv : {MuConvention::paper, MuConvention::campbell}) {
        const char* name = conv == MuConvention::paper ? "paper" : "campbell";
        const char* mark = conv == cfg.mu_convention ? " [active]" : "";
        const AdaptedCoverageLimit lim = adapted_coverage_limit(k, dense, conv);
        out.notes.push_back(std::string("# adapted coverage limit (mu_convention=") + name +
                            mark + ") = " + format_double(lim.value));
        std::string line = std::string("# adapted ase slope dASE/dlambda (mu_convention=") +
                           name + ", h = mean fading 1/mu) = ";
        try {
            const AdaptedAseSlope slope = adapted_ase_slope(k, dense, 1.0 / dense.mu, conv);
            line += format_double(slope.value) + " bits/s/Hz per BS";
            if (slope.suspect) line += "  (log argument <= 1; slope formula suspect here)";
        } catch (const DomainError&) {
            line += "undefined (log argument <= 0 at h = mean fading)";
        }
        out.notes.push_back(line);
    }
}

}  // namespace

SweepResult compute_sweep(const RunConfig& cfg) {
    cfg.validate();
    SweepResult out;
    const bool closed_form = cfg.scenario != Scenario::general;
    for (const double v : cfg.sweep.grid()) {
        const NetworkParams p = cfg.at(v);
        SweepRow row;
        row.sweep_value = v;
        if (closed_form) {
            row.coverage_analytic = coverage_simplified(p, cfg.quad);
            row.coverage_err = 0.0;
            const AseResult ar = ase_simplified_detail(p, cfg.quad);
            row.ase_analytic = per_m2_to_per_km2(ar.value);
        } else {
            const FadingSpec fading = FadingSpec::exponential(p.mu);
            const CoverageResult cr = coverage_probability(p, fading, cfg.quad);
            row.coverage_analytic = cr.value;
            row.coverage_err = cr.est_abs_error;
            row.ase_analytic = per_m2_to_per_km2(ase(p, fading, cfg.quad));
        }
        row.coverage_analytic = std::clamp(row.coverage_analytic, 0.0, 1.0);
        row.ase_analytic = std::max(0.0, row.ase_analytic);
        if (cfg.sim.enabled) {
            const mc::SimConfig sc = sim_config_for(cfg, p);
            const mc::PairEstimate pe =
                mc::estimate_pair(p, sc, mc::KernelKind::auto_detect, cfg.sim.workers);
            row.coverage_mc = pe.coverage.mean;
            row.coverage_mc_se = pe.coverage.std_error;
            row.ase_mc = per_m2_to_per_km2(pe.ase.mean);
            row.ase_mc_se = per_m2_to_per_km2(pe.ase.std_error);
            if (pe.sentinel_warning) {
                out.notes.push_back("# warning: sentinel fraction above 0.1% at " +
                                    std::string(sweep_var_name(cfg.sweep.var)) + " = " +
                                    format_double(v) + " (" +
                                    format_u64(pe.sentinel_count) + " trials)");
            }
        } else {
            row.coverage_mc = kNan;
            row.coverage_mc_se = kNan;
            row.ase_mc = kNan;
            row.ase_mc_se = kNan;
        }
        out.rows.push_back(row);
    }
    if (cfg.scenario == Scenario::adapted) adapted_notes(cfg, out);
    return out;
}

std::string render_csv(const RunConfig& cfg, const SweepResult& res) {
    std::string s;
    for (const std::string& line : cfg.provenance()) {
        s += line;
        s += '\n';
    }
    s += "# ase unit = bits/s/Hz/km^2\n";
    for (const std::string& line : res.notes) {
        s += line;
        s += '\n';
    }
    s += "sweep_var,sweep_value,coverage_analytic,coverage_err,ase_analytic,"
         "coverage_mc,coverage_mc_se,ase_mc,ase_mc_se\n";
    const char* var = sweep_var_name(cfg.sweep.var);
    for (const SweepRow& r : res.rows) {
        s += var;
        s += ',';
        s += format_double(r.sweep_value) + ',' + format_double(r.coverage_analytic) + ',' +
             format_double(r.coverage_err) + ',' + format_double(r.ase_analytic) + ',' +
             format_double(r.coverage_mc) + ',' + format_double(r.coverage_mc_se) + ',' +
             format_double(r.ase_mc) + ',' + format_double(r.ase_mc_se) + '\n';
    }
    return s;
}

void run_sweep(const RunConfig& cfg) {
    const SweepResult res = compute_sweep(cfg);
    write_file_atomic(cfg.csv_path, render_csv(cfg, res));
    if (cfg.svg_path.empty()) return;

    PanelSpec cov, ase_panel;
    cov.ylabel = "coverage probability";
    ase_panel.ylabel = "ASE (bits/s/Hz/km^2)";
    for (const SweepRow& r : res.rows) {
        cov.line.x.push_back(r.sweep_value);
        cov.line.y.push_back(r.coverage_analytic);
        ase_panel.line.x.push_back(r.sweep_value);
        ase_panel.line.y.push_back(r.ase_analytic);
        if (cfg.sim.enabled) {
            cov.points.x.push_back(r.sweep_value);
            cov.points.y.push_back(r.coverage_mc);
            cov.points.err.push_back(3.0 * r.coverage_mc_se);
            ase_panel.points.x.push_back(r.sweep_value);
            ase_panel.points.y.push_back(r.ase_mc);
            ase_panel.points.err.push_back(3.0 * r.ase_mc_se);
        }
    }
    const std::string title = std::string(scenario_name(cfg.scenario)) + " sweep over " +
                              sweep_var_name(cfg.sweep.var) +
                              (cfg.sim.enabled ? " (line: analytic, bars: simulation +-3se)"
                                               : " (analytic)");
    const bool log_x = cfg.sweep.scale == SweepScale::log;
    write_file_atomic(cfg.svg_path,
                      render_plot(title, sweep_var_name(cfg.sweep.var), log_x,
                                  {cov, ase_panel}));
}

}  // namespace udn::cli
