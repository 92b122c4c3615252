#pragma once

#include <cmath>

namespace udn {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Densities are kept in SI (per m^2) internally; user-facing values are
/// per km^2.
inline double per_km2_to_per_m2(double v) { return v * 1e-6; }
inline double per_m2_to_per_km2(double v) { return v * 1e6; }

}  // namespace udn
