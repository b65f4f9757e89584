#pragma once

#include <cstdint>
#include <vector>

#include "mwstats/states.hpp"

namespace mwstats {

/// Resonator parameters. All rates are ordinary frequencies (κ/2π) in Hz.
struct Resonator {
  double resonance_frequency = 0.0;
  double external_rate = 0.0;
  double internal_rate = 0.0;

  double total_rate() const { return external_rate + internal_rate; }
  /// Throws DomainError unless external_rate > 0 and internal_rate >= 0.
  void validate() const;
};

/// Photon-photon correlator C(τ) = variance · exp(-2π decay_rate τ).
struct Correlator {
  double variance = 0.0;
  double decay_rate = 0.0;  // Hz
};

/// Which loss channel sets the correlator decay. The internal loss is about
/// 0.6% of the external rate for the reference sample and is left out by default.
enum class DecayChannel { External, Total };

/// Intracavity correlator for a field of the given kind at occupation n_r.
/// Thermal and shot noise decay at the energy rate κ, coherent drive at κ/2.
Correlator correlator(StateKind kind, double n_r, const Resonator& res,
                      DecayChannel channel = DecayChannel::External);
Correlator correlator(const MicrowaveState& state, double n_r, const Resonator& res,
                      DecayChannel channel = DecayChannel::External);

double correlator_value(const Correlator& c, double tau);

/// Lorentzian filter F = (κ/2)/((κ/2)² + δ²) with δ = f_r - f, all in Hz.
double lorentzian_dos(double frequency, const Resonator& res);

enum class QubitState { Ground, Excited };

/// Qubit-state-dependent density of states D± = (κ/2)/(κ²/4 + (δ ± χ)²),
/// "+" for the excited and "-" for the ground state.
double shifted_dos(double frequency, const Resonator& res, double chi, QubitState state);

/// Integration window and tolerance for the spectral integrals.
///
/// The integrands decay as δ⁻⁴ (dephasing) or δ⁻² (occupation). Truncating at
/// |δ| = W κ leaves a relative tail of 4/(3π (2W)³) for the δ⁻⁴ integrals
/// (8.3e-7 for W = 40) and 2/(π 2W) for the Lorentzian itself (0.8% for W = 40).
struct SpectralOptions {
  double window_kappas = 40.0;
  double relative_tolerance = 1e-8;
  unsigned max_depth = 30;
};

struct QuadratureValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Gaussian-approximation dephasing rate Var·κ·θ₀² [Hz].
double dephasing_gaussian(double var_n, const Resonator& res, double theta0);

/// The same rate from θ₀² (4/π) ∫ dδ (κ/2)² F(δ)² Var by adaptive quadrature.
QuadratureValue dephasing_gaussian_quadrature(double var_n, const Resonator& res, double theta0,
                                              const SpectralOptions& opts = {});

/// Relative deviation (γ_gauss - γ_master)/γ_gauss of the dephasing rate once the
/// qubit-state-dependent pull of the resonator line (D±) is taken into account.
/// Requires |chi| < κ_x. Zero as chi → 0 and even in chi.
double dephasing_master_correction(const Resonator& res, double chi,
                                   const SpectralOptions& opts = {});

/// Steady-state calibrated occupation n_cal = (n₊ + n₋)/2 relative to the
/// unshifted Lorentzian occupation, both integrated over the same window.
double calibrated_occupation_ratio(const Resonator& res, double chi,
                                   const SpectralOptions& opts = {});

/// Adaptive Gauss-Kronrod integral of the Lorentzian over the spectral window,
/// normalized by π (unity on the full line).
QuadratureValue lorentzian_normalization(const Resonator& res, const SpectralOptions& opts = {});

/// Stochastic intracavity field driven through the external port, sampled on a
/// grid of step dt [s]. Thermal and shot inputs are white noise with occupation
/// n_r; a coherent input is a steady displacement √n_r plus vacuum fluctuations.
/// Uses the exact Ornstein-Uhlenbeck update, so dt only sets the sampling grid.
std::vector<Complex> simulate_cavity_field(StateKind kind, double n_r, const Resonator& res,
                                           double dt, std::size_t steps, std::uint64_t seed);

}  // namespace mwstats
