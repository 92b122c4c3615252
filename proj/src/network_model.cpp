#include "udn/network_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace udn {
namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw PreconditionError(msg);
}

}  // namespace

void DualSlopeModel::validate() const {
    require(std::isfinite(alpha0) && alpha0 > 0.0, "DualSlopeModel: alpha0 must be > 0");
    require(std::isfinite(d0) && d0 > 0.0, "DualSlopeModel: d0 must be > 0");
    require(std::isfinite(beta1) && beta1 >= 0.0, "DualSlopeModel: beta1 must be >= 0");
    require(std::isfinite(beta2) && beta2 > 2.0, "DualSlopeModel: beta2 must be > 2");
    require(beta1 <= beta2, "DualSlopeModel: beta1 must not exceed beta2");
}

void BeamPattern::validate() const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    require(std::isfinite(main_bs) && main_bs > 0.0, "BeamPattern: main_bs must be > 0");
    require(std::isfinite(main_ue) && main_ue > 0.0, "BeamPattern: main_ue must be > 0");
    require(std::isfinite(side_bs) && side_bs >= 0.0, "BeamPattern: side_bs must be >= 0");
    require(std::isfinite(side_ue) && side_ue >= 0.0, "BeamPattern: side_ue must be >= 0");
    require(side_bs <= main_bs, "BeamPattern: side_bs must not exceed main_bs");
    require(side_ue <= main_ue, "BeamPattern: side_ue must not exceed main_ue");
    require(std::isfinite(width_bs) && width_bs > 0.0 && width_bs <= two_pi * (1.0 + 1e-12),
            "BeamPattern: width_bs must lie in (0, 2pi]");
    require(std::isfinite(width_ue) && width_ue > 0.0 && width_ue <= two_pi * (1.0 + 1e-12),
            "BeamPattern: width_ue must lie in (0, 2pi]");
}

double BeamPattern::width_fraction_bs() const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double q = width_bs / two_pi;
    return q < 1.0 ? q : 1.0;
}

double BeamPattern::width_fraction_ue() const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double q = width_ue / two_pi;
    return q < 1.0 ? q : 1.0;
}

double BeamPattern::alignment_probability() const {
    return width_fraction_bs() * width_fraction_ue();
}

void GainDistribution::validate() const {
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
        require(std::isfinite(gains[k]) && gains[k] >= 0.0,
                "GainDistribution: gains must be >= 0");
        require(std::isfinite(probs[k]) && probs[k] >= 0.0 && probs[k] <= 1.0,
                "GainDistribution: probs must lie in [0, 1]");
        sum += probs[k];
    }
    require(std::abs(sum - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon(),
            "GainDistribution: probs must sum to 1");
    require(gains[0] >= gains[1] && gains[0] >= gains[2] && gains[1] >= gains[3] &&
                gains[2] >= gains[3],
            "GainDistribution: gains must be ordered main*main first, side*side last");
}

void NetworkParams::validate() const {
    require(std::isfinite(lambda) && lambda > 0.0, "NetworkParams: lambda must be > 0");
    require(std::isfinite(mu) && mu > 0.0, "NetworkParams: mu must be > 0");
    require(std::isfinite(sigma2) && sigma2 >= 0.0, "NetworkParams: sigma2 must be >= 0");
    require(std::isfinite(threshold) && threshold > 0.0, "NetworkParams: threshold must be > 0");
    model.validate();
    beams.validate();
}

double path_loss(double r, const DualSlopeModel& model) {
    if (!(r >= 0.0)) throw DomainError("path_loss: r must be >= 0");
    if (r >= model.d0)
        return model.alpha0 * std::pow(model.d0, model.beta2 - model.beta1) *
               std::pow(r, -model.beta2);
    if (model.beta1 == 0.0) return model.alpha0;
    if (r == 0.0) throw DomainError("path_loss: r = 0 diverges for beta1 > 0");
    return model.alpha0 * std::pow(r, -model.beta1);
}

GainDistribution gain_distribution(const BeamPattern& beams) {
    beams.validate();
    const double qb = beams.width_fraction_bs();
    const double qu = beams.width_fraction_ue();
    GainDistribution d;
    d.gains = {beams.main_bs * beams.main_ue, beams.main_bs * beams.side_ue,
               beams.side_bs * beams.main_ue, beams.side_bs * beams.side_ue};
    d.probs = {qb * qu, qb * (1.0 - qu), (1.0 - qb) * qu, (1.0 - qb) * (1.0 - qu)};
    return d;
}

double gamma_moment(const DualSlopeModel& model) {
    model.validate();
    if (model.beta1 >= 2.0)
        throw DivergenceError("gamma_moment: near-field integral diverges for beta1 >= 2");
    // integral_0^d0 r^(1-b1) dr = d0^(2-b1)/(2-b1);
    // integral_d0^inf d0^(b2-b1) r^(1-b2) dr = d0^(2-b1)/(b2-2).
    const double head = std::pow(model.d0, 2.0 - model.beta1);
    return model.alpha0 * head * (1.0 / (2.0 - model.beta1) + 1.0 / (model.beta2 - 2.0));
}

double expected_gain(const GainDistribution& dist) {
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) sum += dist.gains[k] * dist.probs[k];
    return sum;
}

}  // namespace udn
