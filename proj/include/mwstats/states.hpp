#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mwstats {

using Complex = std::complex<double>;

/// A single propagating mode; `frequency` is ω/2π in Hz.
struct ModeSpec {
  double frequency = 0.0;
};

enum class StateKind { Thermal, Coherent, ShotNoise, Vacuum };

std::string to_string(StateKind kind);
StateKind state_kind_from_string(const std::string& name);

/// Field state with its mean photon number. Coherent states also carry the
/// complex amplitude, with |amplitude|² equal to the mean photon number.
class MicrowaveState {
 public:
  static MicrowaveState thermal(double mean_photons);
  static MicrowaveState coherent(Complex amplitude);
  /// Phase-randomized Poissonian field (white incoherent noise at the resonator).
  static MicrowaveState shot_noise(double mean_photons);
  static MicrowaveState vacuum();

  StateKind kind() const { return kind_; }
  double mean_photons() const { return mean_photons_; }
  Complex amplitude() const { return amplitude_; }

 private:
  MicrowaveState(StateKind kind, double n, Complex amplitude)
      : kind_(kind), mean_photons_(n), amplitude_(amplitude) {}

  StateKind kind_;
  double mean_photons_;
  Complex amplitude_;
};

/// Mean thermal occupation 1/(exp(hf/kT) - 1).
double bose_einstein(const ModeSpec& mode, double temperature);

/// Temperature at which the mode holds `n` thermal photons; exact inverse of bose_einstein.
double effective_temperature(const ModeSpec& mode, double n);

/// Photon-number variance. With `classical_limit` set, returns n² (the classical
/// comparison curve for thermal light) regardless of kind.
double photon_variance(const MicrowaveState& state, bool classical_limit = false);

enum class Ordering { Normal, Symmetrized };

std::string to_string(Ordering ordering);

/// Single-mode moments ⟨(a†)ⁿaᵐ⟩ for n + m ≤ 4 in a given operator ordering.
///
/// Entries are stored sparsely; operations that need the full table check for
/// completeness and report the missing (n, m) pairs.
class MomentSet {
 public:
  static constexpr int kMaxOrder = 4;
  using Key = std::pair<int, int>;

  explicit MomentSet(Ordering ordering = Ordering::Normal) : ordering_(ordering) {}

  Ordering ordering() const { return ordering_; }

  /// Throws IncompleteMomentsError when (n, m) is absent and DomainError when out of range.
  Complex at(int n, int m) const;
  Complex operator()(int n, int m) const { return at(n, m); }
  void set(int n, int m, Complex value);
  bool contains(int n, int m) const { return entries_.count({n, m}) != 0; }

  /// Keys with n + m ≤ max_order that have no entry.
  std::vector<Key> missing(int max_order = kMaxOrder) const;
  bool complete(int max_order = kMaxOrder) const { return missing(max_order).empty(); }

  const std::map<Key, Complex>& entries() const { return entries_; }

  /// All (n, m) with n + m ≤ max_order, in (total order, n) sequence.
  static std::vector<Key> keys(int max_order = kMaxOrder);

 private:
  Ordering ordering_;
  std::map<Key, Complex> entries_;
};

/// Normally ordered moments implied by the state.
MomentSet analytic_moments(const MicrowaveState& state);

/// Draws `count` phase-space envelope samples from the Wigner distribution of the
/// state. Samples are generated in fixed blocks with independent sub-streams, so the
/// output depends only on (state, count, seed) and not on the thread count.
std::vector<Complex> sample_envelopes(const MicrowaveState& state, std::size_t count,
                                      std::uint64_t seed);

/// Block size used by sample_envelopes; exposed so callers can align batches.
inline constexpr std::size_t kSampleBlock = 8192;

/// Symmetrized moments: entry(n, m) = mean of conj(z)ⁿ zᵐ.
MomentSet empirical_moments(std::span<const Complex> samples);

/// Exact conversion between normal and symmetrized ordering for orders ≤ 4.
MomentSet ordering_convert(const MomentSet& moments, Ordering target);

/// Shifts a moment table between orderings separated by `shift` units of the
/// commutator: result(n,m) = Σ_k C(n,k) C(m,k) k! shift^k in(n-k, m-k).
/// shift = +1/2 maps normal to symmetrized, -1/2 the reverse.
MomentSet shift_ordering(const MomentSet& moments, double shift, Ordering result_ordering);

}  // namespace mwstats
