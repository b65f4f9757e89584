#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mwstats/analysis.hpp"
#include "mwstats/chains.hpp"
#include "mwstats/states.hpp"

namespace mwstats {

/// Complex envelopes of both detection paths, with the chain gains used to make them.
struct DetectionRecord {
  std::vector<Complex> envelopes_1;
  std::vector<Complex> envelopes_2;
  std::array<double, 2> chain_gains{1.0, 1.0};
  double if_frequency = 11e6;  // metadata only
  std::uint64_t seed = 0;

  std::size_t size() const { return envelopes_1.size(); }
  /// Throws DomainError on unequal lengths or non-positive gains, InsufficientDataError for N < 2.
  void validate() const;
};

/// Real moments ⟨I₁ⁿ I₂ᵐ Q₁ᵏ Q₂ˡ⟩ for n + m + k + l ≤ 4 (70 entries).
class CrossMomentSet {
 public:
  static constexpr int kMaxOrder = 4;
  using Key = std::array<int, 4>;  // (n, m, k, l)

  double at(const Key& key) const;
  double operator()(int n, int m, int k, int l) const { return at({n, m, k, l}); }
  void set(const Key& key, double value);
  std::size_t size() const { return entries_.size(); }
  bool complete() const { return entries_.size() == keys().size(); }
  const std::map<Key, double>& entries() const { return entries_; }

  /// All keys with total order ≤ 4.
  static const std::vector<Key>& keys();

 private:
  std::map<Key, double> entries_;
};

/// 50:50 hybrid: ((s + v)/√2, (s - v)/√2) per sample.
std::pair<std::vector<Complex>, std::vector<Complex>> hybrid_split(std::span<const Complex> signal,
                                                                   std::span<const Complex> vacuum);

struct DetectionOptions {
  /// Thermal occupation of the hybrid's fourth port; exact vacuum by default.
  double vacuum_port_photons = 0.0;
};

/// Envelope-level dual-path detection. Each chain adds circular Gaussian noise of
/// n_chain photons (⟨|h|²⟩ = n_chain) referred to its input, then scales by √gain.
/// Streams: signal, vacuum port and the two chain noises use separate sub-seeds.
DetectionRecord simulate_detection(const MicrowaveState& state,
                                   std::array<double, 2> chain_noise_photons,
                                   std::array<double, 2> gains, std::size_t n, std::uint64_t seed,
                                   const DetectionOptions& opts = {});

/// Empirical cross moments over the whole record.
CrossMomentSet cross_moments(const DetectionRecord& rec);

/// Cross moments of `batches` equal contiguous slices (the remainder goes to the last slice).
std::vector<CrossMomentSet> cross_moments_batched(const DetectionRecord& rec, int batches);

/// ⟨w₁^p₁ w₂^p₂⟩ built from the cross-moment table, where w_j = z_j or conj(z_j).
Complex path_product_moment(const CrossMomentSet& cm, int p1, bool conj1, int p2, bool conj2);

/// Normal-ordered signal moments ⟨(a†)ⁿ aᵐ⟩ referred to the hybrid input.
///
/// Every estimator pairs conj(z) powers from one path with z powers from the
/// other (or only unconjugated powers), so the circular chain noise averages out.
/// A populated vacuum port is removed by an ordering shift of +n_v.
MomentSet reconstruct_signal_moments(const CrossMomentSet& cm, std::array<double, 2> gains,
                                     double vacuum_port_photons = 0.0);

struct ReconstructedMoments {
  MomentSet moments{Ordering::Normal};
  /// Standard errors of the real and imaginary parts, stored as a complex number.
  MomentSet standard_errors{Ordering::Normal};
  /// Per-batch estimates, for errors of derived quantities.
  std::vector<MomentSet> batch_moments;
  int batches = 0;
  std::size_t samples = 0;

  double photon_number() const { return moments(1, 1).real(); }
  double photon_number_error() const { return standard_errors(1, 1).real(); }
  /// g̃²(0) = ⟨(a†)² a²⟩.
  double g2() const { return moments(2, 2).real(); }
  double g2_error() const { return standard_errors(2, 2).real(); }
};

/// Standard error of f over the batch estimates.
double batch_standard_error(const ReconstructedMoments& r, double (*f)(const MomentSet&));

/// Full-record estimate with batch standard errors (default 20 batches).
ReconstructedMoments reconstruct_with_errors(const DetectionRecord& rec, int batches = 20,
                                             double vacuum_port_photons = 0.0);

struct PlanckPoint {
  double temperature = 0.0;  // K
  double power = 0.0;        // W
};

struct PlanckSweep {
  std::vector<PlanckPoint> points;
  ModeSpec mode;
  double bandwidth = 0.0;  // Hz

  void validate() const;
};

/// Chain noise temperature expressed as photons, n = k_B T / (h f).
double chain_noise_photons(const ModeSpec& mode, double noise_temperature);

/// P = G B h f [n_BE(T) + 1/2 + n_chain].
double planck_power(const LinearChain& chain, const ModeSpec& mode, double temperature);

struct PlanckFit {
  double gain = 0.0;
  double gain_db = 0.0;
  double noise_temperature = 0.0;  // K
  double noise_photons = 0.0;
  double gain_error = 0.0;
  double noise_temperature_error = 0.0;
  std::vector<double> residuals;  // relative, (P - model)/model
  FitResult raw;                  // linear parameters slope, intercept
};

/// Fits P(T) with relative (1/P²) weights. Needs ≥ 4 points spanning a factor ≥ 3 in T;
/// a degenerate sweep throws FitError.
PlanckFit planck_fit(const PlanckSweep& sweep);

struct CompressionResult {
  bool found = false;
  double t_1db = 0.0;  // K
  CompressionPower power;
  std::string note;  // "compression outside range" when no crossing exists
};

struct JpaPlanckFit {
  double gain = 0.0;
  double gain_db = 0.0;
  double noise_photons = 0.0;
  double gain_error = 0.0;
  double noise_photons_error = 0.0;
  std::size_t points_used = 0;
  CompressionResult compression;
  FitResult raw;
};

/// Fits the JPA-on sweep below `fit_range_max_t` with the calibrated chain:
/// P/(G_chain B h f) - 1/2 - n_chain = G n_BE + (G - 1)(n_n + 1).
/// T₁dB is the first interpolated temperature where this output falls 1 dB below
/// the fitted line; P₁dB = κ_x k_B T₁dB.
JpaPlanckFit jpa_planck_fit(const PlanckSweep& sweep, double fit_range_max_t,
                            const LinearChain& chain, double kappa_x);

/// Rapp-type soft saturation n_out = n / (1 + (n/n_sat)^p)^(1/p).
double rapp_saturation(double n, double n_sat, double smoothness);

struct SyntheticSweepOptions {
  double relative_noise = 0.0;  // multiplicative Gaussian power noise
  std::uint64_t seed = 0;
};

/// Planck sweep from the forward model, optionally with multiplicative noise.
PlanckSweep synthetic_planck_sweep(const ModeSpec& mode, const LinearChain& chain,
                                   std::span<const double> temperatures,
                                   const SyntheticSweepOptions& opts = {});

struct JpaSaturation {
  /// Target 1 dB compression temperature; 0 disables saturation.
  double t_1db = 0.0;
  double smoothness = 40.0;
};

/// JPA-on sweep: the amplifier output photons G n_BE + (G-1)(n_n+1) pass through
/// the Rapp saturation (tuned so the -1 dB point sits at `sat.t_1db`), then the chain.
PlanckSweep synthetic_jpa_sweep(const ModeSpec& mode, const LinearChain& chain,
                                const JpaStage& jpa, std::span<const double> temperatures,
                                const JpaSaturation& sat = {},
                                const SyntheticSweepOptions& opts = {});

struct QuadratureVariances {
  double var_p = 0.0;
  double var_q = 0.0;
};

/// Var(q) and Var(p) for q = (a† + a)/2, p = i(a† - a)/2 from normal moments up to order 2.
QuadratureVariances quadrature_variances(const MomentSet& m);

/// 1/e contour radius √(n + 1/2) of the Gaussian Wigner function.
double wigner_gaussian_contour(double n);

/// Real IF samples Re[z e^{iω_if t}] at `sample_rate` (250 MHz default).
std::vector<double> if_waveform(std::span<const Complex> envelopes, double if_frequency,
                                double sample_rate = 250e6);

}  // namespace mwstats
