#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace udn::cli {

struct SweepRow {
    double sweep_value = 0.0;
    double coverage_analytic = 0.0;
    double coverage_err = 0.0;
    double ase_analytic = 0.0;  // bits/s/Hz/km^2
    double coverage_mc = 0.0;
    double coverage_mc_se = 0.0;
    double ase_mc = 0.0;
    double ase_mc_se = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> notes;  // extra '#' comment lines
};

SweepResult compute_sweep(const RunConfig& cfg);
std::string render_csv(const RunConfig& cfg, const SweepResult& res);

// compute + CSV (+ SVG when configured), all writes atomic
void run_sweep(const RunConfig& cfg);

}  // namespace udn::cli
