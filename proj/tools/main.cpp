#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "adjudicate.hpp"
#include "run_config.hpp"
#include "sweep.hpp"
#include "udn/errors.hpp"

namespace {

using udn::cli::ConfigError;
using udn::cli::RunConfig;

struct Overrides {
    std::string config_path;
    std::string out;
    std::optional<uint64_t> trials;
    std::optional<uint64_t> seed;
    std::optional<unsigned> workers;
    bool no_mc = false;
    std::string mu_conv;
    std::string thm3;
};

void add_common(CLI::App* sub, Overrides& o, bool with_config) {
    if (with_config) sub->add_option("--config", o.config_path, "JSON config file");
    sub->add_option("--out", o.out, "output path (for figure presets: the filename stem)");
    sub->add_option("--trials", o.trials, "Monte Carlo trials per grid point (enables sim)");
    sub->add_option("--seed", o.seed, "simulation seed");
    sub->add_option("--workers", o.workers, "simulation worker threads");
    sub->add_flag("--no-mc", o.no_mc, "disable the Monte Carlo columns");
    sub->add_option("--toggle-mu-convention", o.mu_conv, "fading-rate convention in limits")
        ->check(CLI::IsMember({"paper", "campbell"}));
    sub->add_option("--toggle-thm3-d0", o.thm3, "dense-bound tail variant")
        ->check(CLI::IsMember({"paper", "d0sq"}));
}

void apply(RunConfig& cfg, const Overrides& o) {
    if (o.trials) {
        cfg.sim.trials = *o.trials;
        cfg.sim.enabled = true;
    }
    if (o.seed) cfg.sim.seed = *o.seed;
    if (o.workers) cfg.sim.workers = *o.workers;
    if (o.no_mc) cfg.sim.enabled = false;
    if (!o.mu_conv.empty()) {
        cfg.mu_convention = o.mu_conv == "paper" ? udn::MuConvention::paper
                                                 : udn::MuConvention::campbell;
    }
    if (!o.thm3.empty()) {
        cfg.thm3_tail =
            o.thm3 == "paper" ? udn::DenseBoundTail::paper : udn::DenseBoundTail::d0sq;
    }
}

void set_preset_out(RunConfig& cfg, const Overrides& o, const std::string& suffix) {
    if (o.out.empty()) return;
    cfg.csv_path = o.out + suffix + ".csv";
    cfg.svg_path = o.out + suffix + ".svg";
}

void run_and_note(const RunConfig& cfg) {
    udn::cli::run_sweep(cfg);
    std::printf("wrote %s", cfg.csv_path.c_str());
    if (!cfg.svg_path.empty()) std::printf(" and %s", cfg.svg_path.c_str());
    std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coverage probability and constrained ASE of a dense directional network"};
    app.require_subcommand(1);
    Overrides o;

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "run the sweep described by a config file");
    add_common(cmd_sweep, o, true);
    CLI::App* cmd_fig2 =
        app.add_subcommand("fig2", "density sweeps at near-field exponents 1, 2, 3");
    add_common(cmd_fig2, o, false);
    CLI::App* cmd_fig3 =
        app.add_subcommand("fig3", "alignment-probability sweeps, interference-limited");
    add_common(cmd_fig3, o, false);
    CLI::App* cmd_fig4 =
        app.add_subcommand("fig4", "density sweep under the beam adaptation schedule");
    add_common(cmd_fig4, o, false);
    CLI::App* cmd_adj =
        app.add_subcommand("adjudicate", "convention toggles versus the simulation oracle");
    add_common(cmd_adj, o, true);
    CLI::App* cmd_val =
        app.add_subcommand("validate-config", "parse, validate, and echo a config file");
    cmd_val->add_option("--config", o.config_path, "JSON config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cmd_sweep->parsed()) {
            if (o.config_path.empty()) throw ConfigError("sweep requires --config");
            RunConfig cfg = udn::cli::parse_config_file(o.config_path);
            apply(cfg, o);
            if (!o.out.empty()) cfg.csv_path = o.out;
            cfg.validate();
            run_and_note(cfg);
        } else if (cmd_fig2->parsed()) {
            for (const double beta1 : {1.0, 2.0, 3.0}) {
                RunConfig cfg = udn::cli::preset_fig2(beta1);
                apply(cfg, o);
                set_preset_out(cfg, o, "_b" + std::to_string(static_cast<int>(beta1)));
                run_and_note(cfg);
            }
        } else if (cmd_fig3->parsed()) {
            for (const double t_db : {0.0, 7.0}) {
                for (const double d0 : {5.0, 10.0}) {
                    RunConfig cfg = udn::cli::preset_fig3(t_db, d0);
                    apply(cfg, o);
                    set_preset_out(cfg, o,
                                   "_t" + std::to_string(static_cast<int>(t_db)) + "_d" +
                                       std::to_string(static_cast<int>(d0)));
                    run_and_note(cfg);
                }
            }
        } else if (cmd_fig4->parsed()) {
            RunConfig cfg = udn::cli::preset_fig4();
            apply(cfg, o);
            set_preset_out(cfg, o, "");
            run_and_note(cfg);
        } else if (cmd_adj->parsed()) {
            RunConfig cfg = o.config_path.empty() ? udn::cli::preset_adjudicate()
                                                  : udn::cli::parse_config_file(o.config_path);
            apply(cfg, o);
            if (!o.out.empty()) cfg.csv_path = o.out;
            udn::cli::run_adjudicate(cfg);
        } else if (cmd_val->parsed()) {
            RunConfig cfg = udn::cli::parse_config_file(o.config_path);
            cfg.validate();
            for (const std::string& line : cfg.provenance()) std::printf("%s\n", line.c_str());
            std::printf("config ok\n");
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const udn::InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 4;
    } catch (const udn::NonConvergenceError& e) {
        std::fprintf(stderr, "non-convergence: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
