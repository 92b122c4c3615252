#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"

namespace udn::cli {

// One density row of the fading-rate convention check: both candidate limit
// values against the simulated coverage.
struct MuToggleRow {
    double lambda_per_km2 = 0.0;
    double limit_paper = 0.0;
    double limit_campbell = 0.0;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    bool paper_inside = false;     // |limit - mc| <= 3 se
    bool campbell_inside = false;
};

// The dense-regime bound under both tail variants against simulated coverage.
struct TailToggleRow {
    double lambda_per_km2 = 0.0;
    double bound_paper = 0.0;
    double bound_d0sq = 0.0;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    bool paper_upper_bounds = false;  // bound >= mc mean
    bool d0sq_upper_bounds = false;
};

struct AdjudicationReport {
    std::vector<MuToggleRow> mu_rows;
    TailToggleRow tail_row;
    std::string mu_verdict;    // paper | campbell | inconclusive | neither
    std::string tail_verdict;  // paper | d0sq | neither
    double design_k_per_km2 = 0.0;
    double design_threshold = 0.0;  // linear
};

AdjudicationReport compute_adjudication(const RunConfig& cfg);
std::string render_report(const RunConfig& cfg, const AdjudicationReport& r);
void run_adjudicate(const RunConfig& cfg);

}  // namespace udn::cli
