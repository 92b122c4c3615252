#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "udn/asymptotics.hpp"
#include "udn/network_model.hpp"
#include "udn/quadrature.hpp"

namespace udn::cli {

// Configuration problems carry the offending field in the message and map to
// exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scenario { general, corollary, adapted };
enum class SweepVar { lambda, alignment, threshold_db };
enum class SweepScale { log, linear };

const char* scenario_name(Scenario s);
const char* sweep_var_name(SweepVar v);
const char* sweep_scale_name(SweepScale s);

struct SweepSpec {
    SweepVar var = SweepVar::lambda;
    SweepScale scale = SweepScale::log;
    double from = 1.0;
    double to = 1e6;
    int points = 25;

    std::vector<double> grid() const;
};

// User-facing parameter set. Densities per km^2, distances in meters, gains
// and thresholds in dB. A disengaged optional means "off": no noise term or
// a hard-zero side lobe (both are -inf dB, which JSON cannot spell).
struct ParamSpec {
    double lambda_per_km2 = 1000.0;
    double mu = 1.0;
    double threshold_db = 7.0;
    std::optional<double> snr_at_d0_db = 20.0;
    double beta1 = 2.0;
    double beta2 = 4.0;
    double d0_m = 10.0;
    double alpha0_db = 0.0;
    double main_bs_db = 20.0;
    std::optional<double> side_bs_db = 0.0;
    double width_bs_rad = std::numbers::pi / 6.0;
    double main_ue_db = 10.0;
    std::optional<double> side_ue_db = -10.0;
    double width_ue_rad = std::numbers::pi / 2.0;
};

struct SimSpec {
    bool enabled = false;
    uint64_t trials = 100000;
    uint64_t seed = 0x8e51f2a64d33c871ull;
    double window_radius_m = 0.0;  // 0 selects the automatic window
    unsigned workers = 1;
};

struct RunConfig {
    Scenario scenario = Scenario::general;
    SweepSpec sweep;
    ParamSpec params;
    std::optional<double> adaptation_k_per_km2;
    SimSpec sim;
    // Tolerances for every analytic integral in the run; starving the budget
    // surfaces as a non-convergence failure, never a silent result.
    QuadratureSpec quad;
    MuConvention mu_convention = MuConvention::paper;
    DenseBoundTail thm3_tail = DenseBoundTail::paper;
    std::string csv_path = "sweep.csv";
    std::string svg_path;  // empty disables the plot

    // Field-by-field checks plus scenario consistency; throws ConfigError.
    void validate() const;

    // params converted to internal units, before any sweep value is applied.
    NetworkParams base_params() const;

    // base_params with the sweep variable set to v (user units). The adapted
    // scenario also applies the beamwidth schedule and may throw
    // InfeasibleError when K exceeds the density.
    NetworkParams at(double sweep_value) const;

    // '# key = value' comment lines echoing every resolved field.
    std::vector<std::string> provenance() const;
};

RunConfig parse_config_json(const std::string& text, const std::string& origin);
RunConfig parse_config_file(const std::string& path);

RunConfig preset_fig2(double beta1);
RunConfig preset_fig3(double threshold_db, double d0_m);
RunConfig preset_fig4();
RunConfig preset_adjudicate();

}  // namespace udn::cli
