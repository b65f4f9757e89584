#include "mwstats/cavity.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "mwstats/constants.hpp"
#include "mwstats/errors.hpp"
#include "mwstats/parallel.hpp"

namespace mwstats {

namespace {

// Adaptive G7/K15 over [-W, W], split at the line centre, at ±shift and on a
// geometric grid so the peaks sit on panel edges.
template <class F>
QuadratureValue integrate_window(F f, double half_width, double shift, const SpectralOptions& opts,
                                 const char* what) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> cuts{-half_width, 0.0, half_width};
  if (shift != 0.0 && std::abs(shift) < half_width) {
    cuts.push_back(std::abs(shift));
    cuts.push_back(-std::abs(shift));
  }
  // Geometric panels out from the line: a single wide panel lets G7 and K15 agree
  // on a value that misses the peak entirely.
  const double kappa = half_width / opts.window_kappas;
  for (double r = kappa / 4.0; r < half_width; r *= 2.0) {
    cuts.push_back(r);
    cuts.push_back(-r);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  QuadratureValue total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    const double v = gauss_kronrod<double, 15>::integrate(f, cuts[i], cuts[i + 1], opts.max_depth,
                                                          opts.relative_tolerance, &err);
    total.value += v;
    total.error_estimate += err;
  }
  if (!std::isfinite(total.value) ||
      total.error_estimate > 100.0 * opts.relative_tolerance * std::abs(total.value) + 1e-300) {
    std::ostringstream os;
    os << what << ": quadrature did not converge (value " << total.value << ", error estimate "
       << total.error_estimate << ", tolerance " << opts.relative_tolerance << ", max depth "
       << opts.max_depth << ")";
    throw NumericalError(os.str());
  }
  return total;
}

}  // namespace

void Resonator::validate() const {
  if (!(external_rate > 0.0)) throw DomainError("resonator external_rate must be > 0");
  if (!(internal_rate >= 0.0)) throw DomainError("resonator internal_rate must be >= 0");
}

Correlator correlator(StateKind kind, double n_r, const Resonator& res, DecayChannel channel) {
  if (!(n_r >= 0.0)) throw DomainError("correlator: n_r must be >= 0");
  res.validate();
  const double kappa = channel == DecayChannel::Total ? res.total_rate() : res.external_rate;
  switch (kind) {
    case StateKind::Thermal: return {n_r * n_r + n_r, kappa};
    case StateKind::ShotNoise: return {n_r, kappa};
    case StateKind::Coherent: return {n_r, kappa / 2.0};
    case StateKind::Vacuum: return {0.0, kappa};
  }
  return {};
}

Correlator correlator(const MicrowaveState& state, double n_r, const Resonator& res,
                      DecayChannel channel) {
  return correlator(state.kind(), n_r, res, channel);
}

double correlator_value(const Correlator& c, double tau) {
  if (!(tau >= 0.0)) throw DomainError("correlator_value: tau must be >= 0");
  return c.variance * std::exp(-angular(c.decay_rate) * tau);
}

double lorentzian_dos(double frequency, const Resonator& res) {
  const double half = res.external_rate / 2.0;
  const double detuning = res.resonance_frequency - frequency;
  return half / (half * half + detuning * detuning);
}

double shifted_dos(double frequency, const Resonator& res, double chi, QubitState state) {
  const double half = res.external_rate / 2.0;
  const double detuning = res.resonance_frequency - frequency;
  const double shifted = state == QubitState::Excited ? detuning + chi : detuning - chi;
  return half / (half * half + shifted * shifted);
}

double dephasing_gaussian(double var_n, const Resonator& res, double theta0) {
  if (!(var_n >= 0.0)) throw DomainError("dephasing_gaussian: variance must be >= 0");
  return var_n * res.external_rate * theta0 * theta0;
}

QuadratureValue dephasing_gaussian_quadrature(double var_n, const Resonator& res, double theta0,
                                              const SpectralOptions& opts) {
  if (!(var_n >= 0.0)) throw DomainError("dephasing_gaussian: variance must be >= 0");
  res.validate();
  const double kappa = res.external_rate;
  const double half = kappa / 2.0;
  // Photon-number fluctuation spectrum per unit variance, (κ/2)² F(δ)².
  auto spectrum = [half](double d) {
    const double f = half / (half * half + d * d);
    return half * half * f * f;
  };
  auto q = integrate_window(spectrum, opts.window_kappas * kappa, 0.0, opts,
                            "dephasing_gaussian_quadrature");
  const double scale = theta0 * theta0 * (4.0 / std::numbers::pi) * var_n;
  return {scale * q.value, scale * q.error_estimate};
}

double dephasing_master_correction(const Resonator& res, double chi, const SpectralOptions& opts) {
  res.validate();
  const double kappa = res.external_rate;
  if (!(std::abs(chi) < kappa)) {
    throw DomainError("dephasing_master_correction: requires |chi| < kappa_x (weak pull)");
  }
  if (chi == 0.0) return 0.0;
  const double half = kappa / 2.0;
  // Fluctuation spectrum with the qubit-state-split line, normalized to the
  // Gaussian spectrum (κ/2)² F² at chi = 0.
  auto spectrum = [&](double d) {
    const double dp = half / (half * half + (d + chi) * (d + chi));
    const double dm = half / (half * half + (d - chi) * (d - chi));
    return half * half * (kappa / 4.0) * (dp + dm) / (half * half + d * d + chi * chi);
  };
  const auto q = integrate_window(spectrum, opts.window_kappas * kappa, chi, opts,
                                  "dephasing_master_correction");
  const double pull = 2.0 * chi / kappa;
  const double gamma_master = pull * pull * (4.0 / std::numbers::pi) * q.value;
  const double theta0 = std::atan(pull);
  const double gamma_gauss = kappa * theta0 * theta0;
  return (gamma_gauss - gamma_master) / gamma_gauss;
}

QuadratureValue lorentzian_normalization(const Resonator& res, const SpectralOptions& opts) {
  res.validate();
  const double half = res.external_rate / 2.0;
  auto f = [half](double d) { return half / (half * half + d * d) / std::numbers::pi; };
  return integrate_window(f, opts.window_kappas * res.external_rate, 0.0, opts,
                          "lorentzian_normalization");
}

double calibrated_occupation_ratio(const Resonator& res, double chi, const SpectralOptions& opts) {
  res.validate();
  const double half = res.external_rate / 2.0;
  const double w = opts.window_kappas * res.external_rate;
  auto plus = [&](double d) { return half / (half * half + (d + chi) * (d + chi)); };
  auto minus = [&](double d) { return half / (half * half + (d - chi) * (d - chi)); };
  auto flat = [&](double d) { return half / (half * half + d * d); };
  const double n_plus = integrate_window(plus, w, chi, opts, "n_plus").value;
  const double n_minus = integrate_window(minus, w, chi, opts, "n_minus").value;
  const double n_r = integrate_window(flat, w, 0.0, opts, "n_r").value;
  return 0.5 * (n_plus + n_minus) / n_r;
}

std::vector<Complex> simulate_cavity_field(StateKind kind, double n_r, const Resonator& res,
                                           double dt, std::size_t steps, std::uint64_t seed) {
  res.validate();
  if (!(dt > 0.0)) throw DomainError("simulate_cavity_field: dt must be > 0");
  if (!(n_r >= 0.0)) throw DomainError("simulate_cavity_field: n_r must be >= 0");
  const double kappa = angular(res.external_rate);
  const double decay = std::exp(-kappa * dt / 2.0);

  // Stationary variance of the fluctuating part: thermal/shot carry n_r photons,
  // the coherent drive only vacuum (Wigner 1/2).
  Complex mean{0.0, 0.0};
  double stationary = n_r;
  if (kind == StateKind::Coherent) {
    mean = std::sqrt(n_r);
    stationary = 0.5;
  } else if (kind == StateKind::Vacuum) {
    stationary = 0.5;
  }
  const double kick = std::sqrt(stationary * (1.0 - decay * decay) / 2.0);

  Engine engine = make_engine(seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Complex> field(steps);
  const double s0 = std::sqrt(stationary / 2.0);
  Complex fluct{s0 * gauss(engine), s0 * gauss(engine)};
  for (std::size_t i = 0; i < steps; ++i) {
    field[i] = mean + fluct;
    fluct = decay * fluct + Complex{kick * gauss(engine), kick * gauss(engine)};
  }
  return field;
}

}  // namespace mwstats
