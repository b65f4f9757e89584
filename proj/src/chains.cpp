#include "mwstats/chains.hpp"

#include <cmath>
#include <stdexcept>

#include "mwstats/constants.hpp"
#include "mwstats/errors.hpp"

namespace mwstats {

void BeamSplitterStage::validate() const {
  if (!(transmissivity >= 0.0 && transmissivity <= 1.0)) {
    throw DomainError("beam splitter transmissivity must lie in [0, 1]");
  }
  if (!(background_photons >= 0.0)) throw DomainError("background photons must be >= 0");
}

std::string to_string(NoiseStatistics s) {
  switch (s) {
    case NoiseStatistics::QuantumThermal: return "thermal";
    case NoiseStatistics::Classical: return "classical";
    case NoiseStatistics::ClassicalCommutatorFree: return "classical_commutator_free";
  }
  return "unknown";
}

NoiseStatistics noise_statistics_from_string(const std::string& name) {
  if (name == "thermal" || name == "quantum_thermal") return NoiseStatistics::QuantumThermal;
  if (name == "classical") return NoiseStatistics::Classical;
  if (name == "classical_commutator_free") return NoiseStatistics::ClassicalCommutatorFree;
  throw std::invalid_argument("unknown noise statistics '" + name +
                              "' (expected thermal, classical or classical_commutator_free)");
}

JpaStage JpaStage::from_db(double gain_db, double n_n, NoiseStatistics stats) {
  JpaStage s{db_to_linear(gain_db), n_n, stats};
  s.validate();
  return s;
}

double JpaStage::gain_db() const { return linear_to_db(gain); }

void JpaStage::validate() const {
  if (!(gain >= 1.0)) throw DomainError("JPA gain must be >= 1 (linear)");
  if (!(added_noise_photons >= 0.0)) throw DomainError("JPA added noise photons must be >= 0");
}

LinearChain LinearChain::from_db(double gain_db, double noise_temperature, double bandwidth) {
  LinearChain c{db_to_linear(gain_db), noise_temperature, bandwidth};
  c.validate();
  return c;
}

double LinearChain::gain_db() const { return linear_to_db(gain); }

void LinearChain::validate() const {
  if (!(gain > 0.0)) throw DomainError("chain gain must be > 0");
  if (!(bandwidth > 0.0)) throw DomainError("chain bandwidth must be > 0");
  if (!(noise_temperature >= 0.0)) throw DomainError("chain noise temperature must be >= 0");
}

PhotonStatistics attenuate(StateKind kind, double n_b, const BeamSplitterStage& stage) {
  stage.validate();
  if (!(n_b >= 0.0)) throw DomainError("attenuate: n_b must be >= 0");
  const double eta = stage.transmissivity;
  const double nn = stage.background_photons;
  const double mean = eta * n_b + (1.0 - eta) * nn;
  const double mixed = 2.0 * eta * (1.0 - eta) * n_b * nn + (1.0 - eta) * (1.0 - eta) * nn * nn +
                       (1.0 - eta) * nn;
  switch (kind) {
    case StateKind::Thermal: return {mean, eta * eta * n_b * n_b + eta * n_b + mixed};
    case StateKind::Coherent: return {mean, eta * n_b + mixed};
    default:
      throw DomainError("attenuate: closed forms exist for thermal and coherent inputs only, got " +
                        to_string(kind));
  }
}

BeamSplitterStage compose(const BeamSplitterStage& a, const BeamSplitterStage& b) {
  a.validate();
  b.validate();
  const double eta = a.transmissivity * b.transmissivity;
  if (eta == 1.0) return {1.0, 0.0};
  const double mixed = b.transmissivity * (1.0 - a.transmissivity) * a.background_photons +
                       (1.0 - b.transmissivity) * b.background_photons;
  return {eta, mixed / (1.0 - eta)};
}

PhotonStatistics amplify(double n_jpa, const JpaStage& stage) {
  stage.validate();
  if (!(n_jpa >= 0.0)) throw DomainError("amplify: n_jpa must be >= 0");
  const double g = stage.gain;
  const double nn = stage.added_noise_photons;
  const double n = n_jpa;
  switch (stage.noise_statistics) {
    case NoiseStatistics::QuantumThermal: {
      const double mean = g * n + (g - 1.0) * (nn + 1.0);
      // Equal to mean² + mean; written out term by term as in the input-output relation.
      const double var = g * g * n * n + g * g * n + g * (g - 1.0) * n +
                         2.0 * g * (g - 1.0) * n * nn + (g - 1.0) * (g - 1.0) * nn * nn +
                         (g - 1.0) * (g - 1.0) * nn + g * (g - 1.0) * nn + g * (g - 1.0);
      return {mean, var};
    }
    case NoiseStatistics::Classical: {
      const double mean = g * n + (g - 1.0) * (nn + 1.0);
      return {mean, mean * mean + mean - (g - 1.0) * (g - 1.0) * nn};
    }
    case NoiseStatistics::ClassicalCommutatorFree: {
      const double mean = g * n + (g - 1.0) * nn;
      const double var = g * g * n * n + g * g * n + (g - 1.0) * (g - 1.0) * nn * nn +
                         g * (g - 1.0) * (2.0 * n + 1.0) * nn;
      return {mean, var};
    }
  }
  return {};
}

double g2_unnormalized(double n, double variance) {
  if (!(n >= 0.0)) throw DomainError("g2_unnormalized: n must be >= 0");
  if (!(variance >= 0.0)) throw DomainError("g2_unnormalized: variance must be >= 0");
  return variance - n + n * n;
}

JpaReferredG2 g2_jpa_referred(double n_jpa, const JpaStage& stage) {
  stage.validate();
  if (!(n_jpa >= 0.0)) throw DomainError("g2_jpa_referred: n_jpa must be >= 0");
  const double nn = stage.added_noise_photons;
  JpaReferredG2 out;
  out.low_gain = stage.gain < 10.0;
  switch (stage.noise_statistics) {
    case NoiseStatistics::QuantumThermal: {
      const double a = n_jpa + nn + 1.0;
      out.g2 = 2.0 * a * a;
      out.offset = 2.0 * (nn + 1.0) * (nn + 1.0);
      break;
    }
    case NoiseStatistics::Classical: {
      const double a = n_jpa + nn + 1.0;
      out.g2 = 2.0 * a * a - nn;
      out.offset = 2.0 * (nn + 1.0) * (nn + 1.0) - nn;
      break;
    }
    case NoiseStatistics::ClassicalCommutatorFree: {
      const double a = n_jpa + nn;
      out.g2 = 2.0 * a * a + a;
      out.offset = 2.0 * nn * nn + nn;
      break;
    }
  }
  return out;
}

JpaReferredG2 g2_jpa_referred_exact(double n_jpa, const JpaStage& stage) {
  const double g2sq = stage.gain * stage.gain;
  const auto s = amplify(n_jpa, stage);
  const auto s0 = amplify(0.0, stage);
  return {g2_unnormalized(s.mean, s.variance) / g2sq, g2_unnormalized(s0.mean, s0.variance) / g2sq,
          stage.gain < 10.0};
}

JpaPolynomial jpa_polynomial(const JpaStage& stage) {
  // g̃²/G² is quadratic in n_jpa; three exact evaluations fix the coefficients.
  const double y0 = g2_jpa_referred_exact(0.0, stage).g2;
  const double y1 = g2_jpa_referred_exact(1.0, stage).g2;
  const double y2 = g2_jpa_referred_exact(2.0, stage).g2;
  const double rho = 0.5 * (y2 - 2.0 * y1 + y0);
  return {rho, y1 - y0 - rho, y0};
}

CompressionPower compression_power(double kappa_x, double t_1db) {
  if (!(kappa_x > 0.0)) throw DomainError("compression_power: kappa_x must be > 0");
  if (!(t_1db > 0.0)) throw DomainError("compression_power: T_1dB must be > 0");
  const double w = kappa_x * kBoltzmann * t_1db;
  return {w, watts_to_dbm(w)};
}

}  // namespace mwstats
