#pragma once

#include <array>

#include "udn/errors.hpp"

namespace udn {

// Two-segment power-law attenuation with breakpoint d0. Near exponent beta1
// applies on (0, d0), far exponent beta2 on [d0, inf); the far branch carries
// a d0^(beta2-beta1) factor so the law is continuous at the breakpoint.
struct DualSlopeModel {
    double alpha0 = 1.0;  // reference gain at 1 m, linear
    double beta1 = 2.0;
    double beta2 = 4.0;
    double d0 = 10.0;  // breakpoint, meters

    void validate() const;
};

// Sectored pattern on each link end: main lobe gain over an angular width,
// side lobe gain elsewhere. Gains linear, widths in radians.
struct BeamPattern {
    double main_bs = 1.0;   // N_B
    double side_bs = 0.0;   // n_B
    double width_bs = 0.0;  // theta_B, in (0, 2pi]
    double main_ue = 1.0;   // N_U
    double side_ue = 0.0;   // n_U
    double width_ue = 0.0;  // theta_U, in (0, 2pi]

    void validate() const;

    // Fraction of directions covered by the main lobe.
    double width_fraction_bs() const;
    double width_fraction_ue() const;
    // Probability that an interferer's main lobe meets the user's main lobe.
    double alignment_probability() const;
};

inline BeamPattern omni_pattern() {
    BeamPattern b;
    b.main_bs = 1.0;
    b.side_bs = 0.0;
    b.width_bs = 6.283185307179586476925286766559;
    b.main_ue = 1.0;
    b.side_ue = 0.0;
    b.width_ue = 6.283185307179586476925286766559;
    return b;
}

// Four-point law of the composite interferer gain: gains[k] with mass
// probs[k], ordered (main*main, main_bs*side_ue, side_bs*main_ue, side*side).
struct GainDistribution {
    std::array<double, 4> gains{};
    std::array<double, 4> probs{};

    void validate() const;
};

struct NetworkParams {
    double lambda = 1e-3;   // BS density per m^2
    double mu = 1.0;        // fading rate of serving and interfering links
    double sigma2 = 0.0;    // noise power normalized by transmit power, linear
    double threshold = 1.0; // SINR threshold, linear
    DualSlopeModel model;
    BeamPattern beams;

    void validate() const;
};

// Attenuation at distance r meters. Requires r > 0 unless beta1 == 0.
double path_loss(double r, const DualSlopeModel& model);

// The four (gain, probability) mass points induced by independent uniform
// beam orientations on both ends.
GainDistribution gain_distribution(const BeamPattern& beams);

// Plane integral moment of the attenuation law: integral of r*L(r) over
// r in (0, inf). Finite only for beta1 < 2 (and beta2 > 2).
double gamma_moment(const DualSlopeModel& model);

// Mean of the composite gain: dot(gains, probs).
double expected_gain(const GainDistribution& dist);

}  // namespace udn
