#include "udn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace udn::detail {
namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1,1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    double value;
    double error;
};

struct EvalContext {
    FuncRef f;
    bool mapped = false;   // semi-infinite fold active
    double map_a = 0.0;    // lower endpoint of the original range
    double map_c = 1.0;    // fold scale
};

double eval(const EvalContext& ctx, double s) {
    if (!ctx.mapped) {
        double v = ctx.f.fn(ctx.f.ctx, s);
        if (!std::isfinite(v))
            throw DomainError("integrate: integrand non-finite at t=" + std::to_string(s));
        return v;
    }
    double om = 1.0 - s;
    double t = ctx.map_a + ctx.map_c * s / om;
    double v = ctx.f.fn(ctx.f.ctx, t);
    if (!std::isfinite(v))
        throw DomainError("integrate: integrand non-finite at t=" + std::to_string(t));
    return v * ctx.map_c / (om * om);
}

Segment gk15(const EvalContext& ctx, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = eval(ctx, center);
    double resk = fc * kWgk[7];
    double resg = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = eval(ctx, center - dx);
        const double f2 = eval(ctx, center + dx);
        resk += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    Segment s;
    s.a = a;
    s.b = b;
    s.value = resk * half;
    s.error = std::abs((resk - resg) * half);
    return s;
}

}  // namespace

QuadratureResult integrate_core(FuncRef f, double lower, double upper, const QuadratureSpec& spec,
                                std::span<const double> split_points) {
    spec.validate();
    if (std::isnan(lower) || std::isnan(upper))
        throw PreconditionError("integrate: NaN integration bound");
    if (std::isinf(lower))
        throw PreconditionError("integrate: lower bound must be finite");
    if (!std::isinf(upper) && upper < lower)
        throw PreconditionError("integrate: upper bound below lower bound");
    if (upper == lower) return {0.0, 0.0, 0};

    EvalContext ctx{f};
    double a = lower, b = upper;
    if (std::isinf(upper)) {
        ctx.mapped = true;
        ctx.map_a = lower;
        const double p = spec.tail_cutoff_probability;
        ctx.map_c = (1.0 - p) / p;
        a = 0.0;
        b = 1.0;
    }

    // Initial segment boundaries: range endpoints plus any interior splits.
    std::vector<double> bounds;
    bounds.push_back(a);
    for (double t : split_points) {
        double s = t;
        if (ctx.mapped) {
            if (!(t > lower)) continue;
            s = (t - ctx.map_a) / (t - ctx.map_a + ctx.map_c);
        }
        if (s > a && s < b) bounds.push_back(s);
    }
    bounds.push_back(b);
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

    std::vector<Segment> segs;
    segs.reserve(static_cast<size_t>(spec.max_subdivisions) + bounds.size());
    for (size_t i = 0; i + 1 < bounds.size(); ++i) segs.push_back(gk15(ctx, bounds[i], bounds[i + 1]));

    int subdivisions = static_cast<int>(segs.size());
    for (;;) {
        double total = 0.0, err = 0.0;
        size_t worst = 0;
        for (size_t i = 0; i < segs.size(); ++i) {
            total += segs[i].value;
            err += segs[i].error;
            if (segs[i].error > segs[worst].error) worst = i;
        }
        const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
        if (err <= tol) return {total, err, subdivisions};
        if (subdivisions >= spec.max_subdivisions) {
            throw NonConvergenceError(
                "integrate: subdivision budget exhausted (estimate " + std::to_string(total) +
                    ", error bound " + std::to_string(err) + ")",
                total, err);
        }
        const Segment w = segs[worst];
        const double mid = 0.5 * (w.a + w.b);
        if (!(mid > w.a && mid < w.b)) {
            // Interval too narrow to split further; accept what we have.
            throw NonConvergenceError("integrate: interval collapsed before reaching tolerance",
                                      total, err);
        }
        segs[worst] = gk15(ctx, w.a, mid);
        segs.push_back(gk15(ctx, mid, w.b));
        ++subdivisions;
    }
}

}  // namespace udn::detail
