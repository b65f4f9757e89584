#pragma once

#include "mwstats/states.hpp"

namespace mwstats {

/// Beam splitter a = √η b + √(1-η) c with a thermal background c.
struct BeamSplitterStage {
  double transmissivity = 1.0;
  double background_photons = 0.0;

  /// Throws DomainError unless 0 ≤ η ≤ 1 and n_n ≥ 0.
  void validate() const;
};

/// How the idler-port noise of the amplifier is modelled.
enum class NoiseStatistics {
  /// Thermal idler: Var(n_n) = n_n² + n_n.
  QuantumThermal,
  /// Var(n_n) = n_n²: only the (G-1)² n_n variance term is dropped; commutator terms stay.
  Classical,
  /// Classical idler with ⟨cc†⟩ = ⟨c†c⟩ = n_n, i.e. no commutator contribution at all.
  ClassicalCommutatorFree,
};

std::string to_string(NoiseStatistics s);
/// Accepts "thermal"/"quantum_thermal", "classical", "classical_commutator_free".
NoiseStatistics noise_statistics_from_string(const std::string& name);

/// Phase-preserving amplifier a = √G b + √(G-1) c†.
struct JpaStage {
  double gain = 1.0;  // linear power gain
  double added_noise_photons = 0.0;
  NoiseStatistics noise_statistics = NoiseStatistics::QuantumThermal;

  static JpaStage from_db(double gain_db, double n_n,
                          NoiseStatistics stats = NoiseStatistics::QuantumThermal);
  double gain_db() const;
  void validate() const;
};

/// Room-temperature detection chain: gain, noise temperature [K], bandwidth [Hz].
struct LinearChain {
  double gain = 1.0;
  double noise_temperature = 0.0;
  double bandwidth = 1.0;

  static LinearChain from_db(double gain_db, double noise_temperature, double bandwidth);
  double gain_db() const;
  void validate() const;
};

struct PhotonStatistics {
  double mean = 0.0;
  double variance = 0.0;
};

/// Photon number and variance after the beam splitter. Only thermal and coherent
/// inputs are covered by the closed forms; other kinds throw DomainError.
PhotonStatistics attenuate(StateKind kind, double n_b, const BeamSplitterStage& stage);

/// Two beam splitters in sequence (first `a`, then `b`) as a single stage:
/// η = η_a η_b and the background mixed so the mean photon number is preserved.
/// With η_a η_b = 1 the background is irrelevant and reported as 0.
BeamSplitterStage compose(const BeamSplitterStage& a, const BeamSplitterStage& b);

/// Photon number and variance after the amplifier for a thermal input of n_jpa photons.
PhotonStatistics amplify(double n_jpa, const JpaStage& stage);

/// g̃²(0) = Var(n) - n + n².
double g2_unnormalized(double n, double variance);

struct JpaReferredG2 {
  double g2 = 0.0;
  double offset = 0.0;
  /// Set when G < 10, outside the large-gain regime of the closed form.
  bool low_gain = false;
};

/// g̃²(0)/G² referred to the amplifier input in the large-gain limit, with its
/// n_jpa = 0 offset. QuantumThermal gives 2(n_jpa + n_n + 1)².
JpaReferredG2 g2_jpa_referred(double n_jpa, const JpaStage& stage);

/// The same quantity evaluated exactly at finite gain from amplify().
JpaReferredG2 g2_jpa_referred_exact(double n_jpa, const JpaStage& stage);

/// Polynomial coefficients of g̃²/G² - offset = ρ n_jpa² + ξ n_jpa at finite gain.
struct JpaPolynomial {
  double rho = 0.0;
  double xi = 0.0;
  double offset = 0.0;
};
JpaPolynomial jpa_polynomial(const JpaStage& stage);

struct CompressionPower {
  double watts = 0.0;
  double dbm = 0.0;
};

/// P₁dB = κ_x k_B T₁dB with κ_x in Hz.
CompressionPower compression_power(double kappa_x, double t_1db);

}  // namespace mwstats
