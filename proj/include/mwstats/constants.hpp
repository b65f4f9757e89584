#pragma once

#include <cmath>
#include <numbers>

namespace mwstats {

// CODATA 2018 exact values.
inline constexpr double kPlanck = 6.62607015e-34;       // J s
inline constexpr double kBoltzmann = 1.380649e-23;      // J/K
inline constexpr double kFluxQuantum = 2.067833848e-15;  // Wb
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Ordinary frequency [Hz] to angular frequency [rad/s].
constexpr double angular(double hz) { return kTwoPi * hz; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

/// Power in watts to dBm (reference 1 mW).
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts / 1e-3); }
inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

}  // namespace mwstats
