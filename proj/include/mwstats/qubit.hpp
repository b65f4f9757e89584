#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mwstats/cavity.hpp"
#include "mwstats/constants.hpp"
#include "mwstats/states.hpp"

namespace mwstats {

/// Extra qubit relaxation per intracavity photon [Hz], by field kind.
struct RelaxationPerPhoton {
  double thermal = 800e3;
  double coherent = -30e3;
  double shot = -30e3;

  double for_kind(StateKind kind) const;
};

/// Transmon parameters; frequencies and rates are ordinary frequencies in Hz.
struct QubitParams {
  double max_frequency = 6.92e9;
  double coupling = 67e6;
  double anharmonicity = -315e6;
  double intrinsic_relaxation = 3.9e6;
  RelaxationPerPhoton relaxation_per_photon;
  double intrinsic_dephasing = 0.05e6;
  double flux_quantum = kFluxQuantum;

  void validate() const;
};

/// Qubit plus readout resonator with the derived dispersive quantities.
struct DispersiveSystem {
  QubitParams qubit;
  Resonator resonator;
  double detuning = 0.0;  // ω_q - ω_r [Hz]
  double chi = 0.0;       // dispersive shift [Hz]
  double theta0 = 0.0;    // atan(2χ/κ_x) [rad]

  /// Derives detuning (at the sweet spot), χ and θ₀ from the parameters.
  static DispersiveSystem from_parameters(const QubitParams& qubit, const Resonator& resonator);

  /// |χ| well below |δ|; the dispersive formulas lose accuracy otherwise.
  bool dispersive_valid() const;
};

/// Resonator of the reference sample: 6.07 GHz, κ_x/2π = 8.5 MHz, κ_i/2π = 50 kHz.
Resonator reference_resonator();

/// Qubit-resonator sample with the reference parameters (χ/2π ≈ -3.11 MHz).
DispersiveSystem reference_system();

/// χ = g²/δ · α/(δ + α). Throws SingularityError at δ = 0 or δ = -α.
double dispersive_shift(double g, double delta, double alpha);

/// θ₀ = atan(2χ/κ_x).
double accumulated_phase(double chi, double kappa_x);

/// ω_q(Φ) = ω_q,0 √|cos(πΦ/Φ₀)|.
double flux_tuned_frequency(const QubitParams& params, double flux);

/// n_crit = δ²/(4g²).
double critical_photons(double delta, double g);

/// γ_P = κ_tot g²/δ².
double purcell_rate(double kappa_tot, double g, double delta);

/// AC Stark shift 2χ n_r of the qubit transition.
double ac_stark_shift(double chi, double n_r);

/// Photon number from a measured Stark shift, n_r = δω_q/(2χ).
double photons_from_stark_shift(double chi, double shift);

/// Field-induced dephasing rate [Hz]: κθ₀²(n²+n) thermal, 2κθ₀²n coherent,
/// κθ₀²n shot noise, zero for vacuum.
double dephasing_rate(StateKind kind, double n_r, const DispersiveSystem& sys);

/// Dephasing rate for an arbitrary correlator, κ_x θ₀² Var κ_x/κ̃ [Hz]. Used with
/// the beam-splitter variance when a thermal background is present.
double dephasing_rate(const Correlator& c, const DispersiveSystem& sys);

/// γ₁(n_r) = γ₁ + γ₁^d n_r with the per-kind slope.
double relaxation_rate(StateKind kind, double n_r, const DispersiveSystem& sys);

/// How the accumulated phase variance ⟨δφ²⟩(τ) is evaluated.
enum class EnvelopeForm {
  /// ⟨δφ²⟩/2 = γ_φn τ, the long-time limit.
  AsymptoticRate,
  /// Gaussian cumulant 2(κθ₀)² ∫₀^τ (τ - s) C(s) ds; reduces to 8χ²∫(τ-s)C for |χ| ≪ κ.
  GaussianIntegral,
  /// (κθ₀)² ∫₀^τ C(s) ds. Saturates at long times; kept for comparison only.
  SingleIntegral,
};

/// ⟨δφ²⟩(τ) for the correlator c.
double phase_variance(const Correlator& c, const DispersiveSystem& sys, double tau,
                      EnvelopeForm form);

/// Ramsey envelope exp[-γ₁(n_r)τ/2 - γ_φ0 τ - ⟨δφ²⟩/2], tau in seconds.
double ramsey_envelope(const DispersiveSystem& sys, StateKind kind, double n_r, double tau,
                       EnvelopeForm form);

struct RamseyPoint {
  double tau = 0.0;
  double p_excited = 0.0;
};

/// Default fringe detuning 5/max(τ): five fringes across the trace.
double default_fringe_detuning(std::span<const double> tau_grid);

/// Excited-state probability ½[1 + cos(2π f τ) envelope(τ)] without shot noise.
std::vector<RamseyPoint> ramsey_probabilities(const DispersiveSystem& sys, StateKind kind,
                                              double n_r, std::span<const double> tau_grid,
                                              double fringe_detuning,
                                              EnvelopeForm form = EnvelopeForm::AsymptoticRate);

/// Ramsey trace with binomial readout noise: each point is k/shots with
/// k ~ Binomial(shots, p_e). Each τ point draws from its own sub-stream of `seed`.
std::vector<RamseyPoint> simulate_ramsey(const DispersiveSystem& sys, StateKind kind, double n_r,
                                         std::span<const double> tau_grid, double fringe_detuning,
                                         int shots, std::uint64_t seed,
                                         EnvelopeForm form = EnvelopeForm::AsymptoticRate);

}  // namespace mwstats
