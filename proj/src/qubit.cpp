#include "mwstats/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mwstats/errors.hpp"
#include "mwstats/parallel.hpp"

namespace mwstats {

double RelaxationPerPhoton::for_kind(StateKind kind) const {
  switch (kind) {
    case StateKind::Thermal: return thermal;
    case StateKind::Coherent: return coherent;
    case StateKind::ShotNoise: return shot;
    case StateKind::Vacuum: return 0.0;
  }
  return 0.0;
}

void QubitParams::validate() const {
  if (!(coupling > 0.0)) throw DomainError("qubit coupling must be > 0");
  if (!(anharmonicity < 0.0)) throw DomainError("transmon anharmonicity must be < 0");
  if (!(intrinsic_relaxation >= 0.0)) throw DomainError("intrinsic relaxation must be >= 0");
  if (!(intrinsic_dephasing >= 0.0)) throw DomainError("intrinsic dephasing must be >= 0");
  if (!(max_frequency > 0.0)) throw DomainError("qubit max_frequency must be > 0");
  if (!(flux_quantum > 0.0)) throw DomainError("flux quantum must be > 0");
}

DispersiveSystem DispersiveSystem::from_parameters(const QubitParams& qubit,
                                                   const Resonator& resonator) {
  qubit.validate();
  resonator.validate();
  DispersiveSystem sys;
  sys.qubit = qubit;
  sys.resonator = resonator;
  sys.detuning = qubit.max_frequency - resonator.resonance_frequency;
  sys.chi = dispersive_shift(qubit.coupling, sys.detuning, qubit.anharmonicity);
  sys.theta0 = accumulated_phase(sys.chi, resonator.external_rate);
  return sys;
}

bool DispersiveSystem::dispersive_valid() const {
  return std::abs(chi) < 0.1 * std::abs(detuning);
}

Resonator reference_resonator() { return {6.07e9, 8.5e6, 50e3}; }

DispersiveSystem reference_system() {
  return DispersiveSystem::from_parameters(QubitParams{}, reference_resonator());
}

double dispersive_shift(double g, double delta, double alpha) {
  if (delta == 0.0) {
    throw SingularityError("dispersive_shift: qubit resonant with resonator (delta = 0)");
  }
  if (delta + alpha == 0.0) {
    throw SingularityError(
        "dispersive_shift: straddling-regime pole, delta + alpha = 0 (resonator at the 1-2 transition)");
  }
  return g * g / delta * (alpha / (delta + alpha));
}

double accumulated_phase(double chi, double kappa_x) {
  if (!(kappa_x > 0.0)) throw DomainError("accumulated_phase: kappa_x must be > 0");
  return std::atan(2.0 * chi / kappa_x);
}

double flux_tuned_frequency(const QubitParams& params, double flux) {
  return params.max_frequency *
         std::sqrt(std::abs(std::cos(std::numbers::pi * flux / params.flux_quantum)));
}

double critical_photons(double delta, double g) {
  if (!(g > 0.0)) throw DomainError("critical_photons: g must be > 0");
  return delta * delta / (4.0 * g * g);
}

double purcell_rate(double kappa_tot, double g, double delta) {
  if (delta == 0.0) throw SingularityError("purcell_rate: delta must be non-zero");
  return kappa_tot * g * g / (delta * delta);
}

double ac_stark_shift(double chi, double n_r) {
  if (!(n_r >= 0.0)) throw DomainError("ac_stark_shift: n_r must be >= 0");
  return 2.0 * chi * n_r;
}

double photons_from_stark_shift(double chi, double shift) {
  if (chi == 0.0) throw SingularityError("photons_from_stark_shift: chi must be non-zero");
  return shift / (2.0 * chi);
}

double dephasing_rate(StateKind kind, double n_r, const DispersiveSystem& sys) {
  if (!(n_r >= 0.0)) throw DomainError("dephasing_rate: n_r must be >= 0");
  const double s0 = sys.resonator.external_rate * sys.theta0 * sys.theta0;
  switch (kind) {
    case StateKind::Thermal: return s0 * (n_r * n_r + n_r);
    case StateKind::Coherent: return 2.0 * s0 * n_r;
    case StateKind::ShotNoise: return s0 * n_r;
    case StateKind::Vacuum: return 0.0;
  }
  return 0.0;
}

double dephasing_rate(const Correlator& c, const DispersiveSystem& sys) {
  const double kappa = sys.resonator.external_rate;
  return kappa * sys.theta0 * sys.theta0 * c.variance * (kappa / c.decay_rate);
}

double relaxation_rate(StateKind kind, double n_r, const DispersiveSystem& sys) {
  return sys.qubit.intrinsic_relaxation + sys.qubit.relaxation_per_photon.for_kind(kind) * n_r;
}

double phase_variance(const Correlator& c, const DispersiveSystem& sys, double tau,
                      EnvelopeForm form) {
  if (!(tau >= 0.0)) throw DomainError("phase_variance: tau must be >= 0");
  if (c.variance == 0.0 || tau == 0.0) return 0.0;
  const double coupling = angular(sys.resonator.external_rate) * sys.theta0;  // rad/s
  const double k = angular(c.decay_rate);
  const double x = k * tau;
  switch (form) {
    case EnvelopeForm::AsymptoticRate:
      return 2.0 * coupling * coupling * c.variance * tau / k;
    case EnvelopeForm::GaussianIntegral: {
      // ∫₀^τ (τ - s) e^{-ks} ds = (x - 1 + e^{-x}) / k²
      const double kernel = x < 1e-4 ? tau * tau * (0.5 - x / 6.0 + x * x / 24.0)
                                     : (x + std::expm1(-x)) / (k * k);
      return 2.0 * coupling * coupling * c.variance * kernel;
    }
    case EnvelopeForm::SingleIntegral:
      return coupling * coupling * c.variance * (-std::expm1(-x)) / k;
  }
  return 0.0;
}

double ramsey_envelope(const DispersiveSystem& sys, StateKind kind, double n_r, double tau,
                       EnvelopeForm form) {
  if (!(tau >= 0.0)) throw DomainError("ramsey_envelope: tau must be >= 0");
  const Correlator c = correlator(kind, n_r, sys.resonator);
  const double decoherence =
      angular(relaxation_rate(kind, n_r, sys) / 2.0 + sys.qubit.intrinsic_dephasing) * tau;
  return std::exp(-decoherence - phase_variance(c, sys, tau, form) / 2.0);
}

double default_fringe_detuning(std::span<const double> tau_grid) {
  if (tau_grid.empty()) throw InsufficientDataError("tau grid is empty");
  const double tmax = *std::max_element(tau_grid.begin(), tau_grid.end());
  if (!(tmax > 0.0)) throw DomainError("tau grid needs a positive delay");
  return 5.0 / tmax;
}

std::vector<RamseyPoint> ramsey_probabilities(const DispersiveSystem& sys, StateKind kind,
                                              double n_r, std::span<const double> tau_grid,
                                              double fringe_detuning, EnvelopeForm form) {
  std::vector<RamseyPoint> out;
  out.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    const double env = ramsey_envelope(sys, kind, n_r, tau, form);
    out.push_back({tau, 0.5 * (1.0 + std::cos(kTwoPi * fringe_detuning * tau) * env)});
  }
  return out;
}

std::vector<RamseyPoint> simulate_ramsey(const DispersiveSystem& sys, StateKind kind, double n_r,
                                         std::span<const double> tau_grid, double fringe_detuning,
                                         int shots, std::uint64_t seed, EnvelopeForm form) {
  if (shots < 1) throw DomainError("simulate_ramsey: shots must be >= 1");
  if (tau_grid.empty()) throw InsufficientDataError("simulate_ramsey: tau grid is empty");
  auto points = ramsey_probabilities(sys, kind, n_r, tau_grid, fringe_detuning, form);
  parallel_for_blocks(points.size(), [&](std::size_t i) {
    Engine engine = make_engine(seed, i);
    const double p = std::clamp(points[i].p_excited, 0.0, 1.0);
    std::binomial_distribution<int> draw(shots, p);
    points[i].p_excited = static_cast<double>(draw(engine)) / shots;
  });
  return points;
}

}  // namespace mwstats
