#include "mwstats/dualpath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mwstats/constants.hpp"
#include "mwstats/errors.hpp"
#include "mwstats/parallel.hpp"

namespace mwstats {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Complex ipow(Complex z, int k) {
  Complex r{1.0, 0.0};
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

// Cross moments over samples [begin, end), accumulated per block and merged in order.
CrossMomentSet cross_moments_range(const DetectionRecord& rec, std::size_t begin, std::size_t end) {
  const auto& keys = CrossMomentSet::keys();
  const std::size_t count = end - begin;
  const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  std::vector<std::vector<CompensatedSum>> partial(blocks, std::vector<CompensatedSum>(keys.size()));

  parallel_for_blocks(blocks, [&](std::size_t b) {
    auto& acc = partial[b];
    const std::size_t lo = begin + b * kSampleBlock;
    const std::size_t hi = std::min(end, lo + kSampleBlock);
    constexpr int kP = CrossMomentSet::kMaxOrder + 1;
    for (std::size_t i = lo; i < hi; ++i) {
      // Powers of I1, I2, Q1, Q2 in key order.
      const double base[4] = {rec.envelopes_1[i].real(), rec.envelopes_2[i].real(),
                              rec.envelopes_1[i].imag(), rec.envelopes_2[i].imag()};
      double pw[4][kP];
      for (int v = 0; v < 4; ++v) {
        pw[v][0] = 1.0;
        for (int k = 1; k < kP; ++k) pw[v][k] = pw[v][k - 1] * base[v];
      }
      for (std::size_t j = 0; j < keys.size(); ++j) {
        const auto& key = keys[j];
        acc[j].add(pw[0][key[0]] * pw[1][key[1]] * pw[2][key[2]] * pw[3][key[3]]);
      }
    }
  });

  CrossMomentSet out;
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t j = 0; j < keys.size(); ++j) {
    CompensatedSum total;
    for (std::size_t b = 0; b < blocks; ++b) total.merge(partial[b][j]);
    out.set(keys[j], total.value() * inv);
  }
  return out;
}

}  // namespace

void DetectionRecord::validate() const {
  if (envelopes_1.size() != envelopes_2.size()) {
    throw DomainError("detection record paths differ in length (" +
                      std::to_string(envelopes_1.size()) + " vs " +
                      std::to_string(envelopes_2.size()) + ")");
  }
  if (envelopes_1.size() < 2) {
    throw InsufficientDataError("detection record needs at least 2 samples, got " +
                                std::to_string(envelopes_1.size()));
  }
  if (!(chain_gains[0] > 0.0 && chain_gains[1] > 0.0)) {
    throw DomainError("detection record chain gains must be > 0");
  }
}

double CrossMomentSet::at(const Key& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    std::ostringstream os;
    os << "cross moment (" << key[0] << "," << key[1] << "," << key[2] << "," << key[3]
       << ") missing";
    throw IncompleteMomentsError(os.str());
  }
  return it->second;
}

void CrossMomentSet::set(const Key& key, double value) {
  int total = 0;
  for (int k : key) {
    if (k < 0) throw DomainError("cross moment indices must be >= 0");
    total += k;
  }
  if (total > kMaxOrder) throw DomainError("cross moment order exceeds 4");
  if (!std::isfinite(value)) throw NumericalError("cross moment entries must be finite");
  entries_[key] = value;
}

const std::vector<CrossMomentSet::Key>& CrossMomentSet::keys() {
  static const std::vector<Key> all = [] {
    std::vector<Key> out;
    for (int n = 0; n <= kMaxOrder; ++n)
      for (int m = 0; n + m <= kMaxOrder; ++m)
        for (int k = 0; n + m + k <= kMaxOrder; ++k)
          for (int l = 0; n + m + k + l <= kMaxOrder; ++l) out.push_back({n, m, k, l});
    return out;
  }();
  return all;
}

std::pair<std::vector<Complex>, std::vector<Complex>> hybrid_split(std::span<const Complex> signal,
                                                                   std::span<const Complex> vacuum) {
  if (signal.size() != vacuum.size()) {
    throw DomainError("hybrid_split: signal and vacuum lengths differ");
  }
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Complex> a(signal.size()), b(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    a[i] = (signal[i] + vacuum[i]) * r;
    b[i] = (signal[i] - vacuum[i]) * r;
  }
  return {std::move(a), std::move(b)};
}

DetectionRecord simulate_detection(const MicrowaveState& state,
                                   std::array<double, 2> chain_noise_photons,
                                   std::array<double, 2> gains, std::size_t n, std::uint64_t seed,
                                   const DetectionOptions& opts) {
  for (double c : chain_noise_photons) {
    if (!(c >= 0.0)) throw DomainError("chain noise photons must be >= 0");
  }
  if (!(opts.vacuum_port_photons >= 0.0)) throw DomainError("vacuum port photons must be >= 0");
  if (n < 2) throw InsufficientDataError("simulate_detection needs N >= 2");

  const auto signal = sample_envelopes(state, n, derive_seed(seed, 1));
  const MicrowaveState port = opts.vacuum_port_photons > 0.0
                                  ? MicrowaveState::thermal(opts.vacuum_port_photons)
                                  : MicrowaveState::vacuum();
  const auto vacuum = sample_envelopes(port, n, derive_seed(seed, 2));
  auto [out1, out2] = hybrid_split(signal, vacuum);

  DetectionRecord rec;
  rec.chain_gains = gains;
  rec.seed = seed;
  std::vector<Complex>* paths[2] = {&out1, &out2};
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  for (int j = 0; j < 2; ++j) {
    const double sigma = std::sqrt(chain_noise_photons[j] / 2.0);
    const double amp = std::sqrt(gains[j]);
    auto& path = *paths[j];
    const std::uint64_t stream_seed = derive_seed(seed, 3 + static_cast<std::uint64_t>(j));
    parallel_for_blocks(blocks, [&](std::size_t b) {
      Engine engine = make_engine(stream_seed, b);
      std::normal_distribution<double> gauss(0.0, 1.0);
      const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
      for (std::size_t i = b * kSampleBlock; i < end; ++i) {
        const double x = gauss(engine);
        const double y = gauss(engine);
        path[i] = amp * (path[i] + Complex{sigma * x, sigma * y});
      }
    });
  }
  rec.envelopes_1 = std::move(out1);
  rec.envelopes_2 = std::move(out2);
  rec.validate();
  return rec;
}

CrossMomentSet cross_moments(const DetectionRecord& rec) {
  rec.validate();
  return cross_moments_range(rec, 0, rec.size());
}

std::vector<CrossMomentSet> cross_moments_batched(const DetectionRecord& rec, int batches) {
  rec.validate();
  if (batches < 1) throw DomainError("batch count must be >= 1");
  const std::size_t n = rec.size();
  const auto nb = static_cast<std::size_t>(batches);
  if (n < 2 * nb) {
    throw InsufficientDataError("record of " + std::to_string(n) + " samples is too short for " +
                                std::to_string(batches) + " batches");
  }
  const std::size_t per = n / nb;
  std::vector<CrossMomentSet> out;
  out.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t end = b + 1 == nb ? n : (b + 1) * per;
    out.push_back(cross_moments_range(rec, b * per, end));
  }
  return out;
}

Complex path_product_moment(const CrossMomentSet& cm, int p1, bool conj1, int p2, bool conj2) {
  if (p1 < 0 || p2 < 0 || p1 + p2 > CrossMomentSet::kMaxOrder) {
    throw DomainError("path_product_moment: total order must lie in [0, 4]");
  }
  const Complex u1 = conj1 ? Complex{0.0, -1.0} : Complex{0.0, 1.0};
  const Complex u2 = conj2 ? Complex{0.0, -1.0} : Complex{0.0, 1.0};
  Complex acc{0.0, 0.0};
  for (int a = 0; a <= p1; ++a) {
    for (int b = 0; b <= p2; ++b) {
      const Complex c = binomial(p1, a) * binomial(p2, b) * ipow(u1, p1 - a) * ipow(u2, p2 - b);
      acc += c * cm.at({a, b, p1 - a, p2 - b});
    }
  }
  return acc;
}

MomentSet reconstruct_signal_moments(const CrossMomentSet& cm, std::array<double, 2> gains,
                                     double vacuum_port_photons) {
  if (!(gains[0] > 0.0 && gains[1] > 0.0)) {
    throw SingularityError("reconstruct_signal_moments: gains must be > 0 (system not invertible)");
  }
  if (!(vacuum_port_photons >= 0.0)) throw DomainError("vacuum port photons must be >= 0");
  if (!cm.complete()) {
    throw IncompleteMomentsError("cross-moment table has " + std::to_string(cm.size()) +
                                 " of 70 entries");
  }
  // ⟨w₁^p₁ w₂^p₂⟩ of the gain-normalized envelopes S_j = z_j/√G_j.
  auto s = [&](int p1, bool c1, int p2, bool c2) {
    return path_product_moment(cm, p1, c1, p2, c2) /
           std::sqrt(std::pow(gains[0], p1) * std::pow(gains[1], p2));
  };

  // Estimators for ⟨(a†)ᵖ a^q⟩ with the hybrid's 1/√2 per factor undone.
  auto annihilation_only = [&](int q) -> Complex {
    if (q == 0) return 1.0;
    if (q == 1) return (s(1, false, 0, false) + s(0, false, 1, false)) / std::sqrt(2.0);
    const int m1 = (q + 1) / 2, m2 = q - m1;
    return std::pow(2.0, q / 2.0) * 0.5 * (s(m1, false, m2, false) + s(m2, false, m1, false));
  };
  auto raw = [&](int p, int q) -> Complex {
    if (p == 0) return annihilation_only(q);
    if (q == 0) return std::conj(annihilation_only(p));
    return std::pow(2.0, (p + q) / 2.0) * 0.5 * (s(p, true, q, false) + s(q, false, p, true));
  };

  MomentSet measured(Ordering::Normal);
  for (const auto& [p, q] : MomentSet::keys()) {
    measured.set(p, q, 0.5 * (raw(p, q) + std::conj(raw(q, p))));
  }
  if (vacuum_port_photons == 0.0) return measured;
  return shift_ordering(measured, vacuum_port_photons, Ordering::Normal);
}

ReconstructedMoments reconstruct_with_errors(const DetectionRecord& rec, int batches,
                                             double vacuum_port_photons) {
  if (batches < 2) throw DomainError("reconstruct_with_errors needs at least 2 batches");
  const auto parts = cross_moments_batched(rec, batches);
  const std::size_t n = rec.size();
  const std::size_t per = n / parts.size();

  // The reconstruction is linear in the cross moments, so the full-record
  // estimate is the size-weighted mean of the batch estimates.
  std::vector<MomentSet> est;
  est.reserve(parts.size());
  for (const auto& cm : parts) {
    est.push_back(reconstruct_signal_moments(cm, rec.chain_gains, vacuum_port_photons));
  }
  ReconstructedMoments out;
  out.batches = batches;
  out.samples = n;
  const double nb = static_cast<double>(parts.size());
  for (const auto& [p, q] : MomentSet::keys()) {
    Complex full{0.0, 0.0}, plain{0.0, 0.0};
    for (std::size_t b = 0; b < parts.size(); ++b) {
      const std::size_t size = b + 1 == parts.size() ? n - b * per : per;
      full += est[b](p, q) * (static_cast<double>(size) / static_cast<double>(n));
      plain += est[b](p, q);
    }
    plain /= nb;
    double sr = 0.0, si = 0.0;
    for (const auto& e : est) {
      const Complex d = e(p, q) - plain;
      sr += d.real() * d.real();
      si += d.imag() * d.imag();
    }
    const double norm = 1.0 / ((nb - 1.0) * nb);
    out.moments.set(p, q, full);
    out.standard_errors.set(p, q, {std::sqrt(sr * norm), std::sqrt(si * norm)});
  }
  out.batch_moments = std::move(est);
  return out;
}

double batch_standard_error(const ReconstructedMoments& r, double (*f)(const MomentSet&)) {
  const auto nb = static_cast<double>(r.batch_moments.size());
  if (nb < 2) throw InsufficientDataError("batch_standard_error needs at least 2 batches");
  double mean = 0.0;
  for (const auto& m : r.batch_moments) mean += f(m);
  mean /= nb;
  double ss = 0.0;
  for (const auto& m : r.batch_moments) ss += (f(m) - mean) * (f(m) - mean);
  return std::sqrt(ss / ((nb - 1.0) * nb));
}

void PlanckSweep::validate() const {
  if (!(mode.frequency > 0.0)) throw DomainError("planck sweep: mode frequency must be > 0");
  if (!(bandwidth > 0.0)) throw DomainError("planck sweep: bandwidth must be > 0");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].temperature > 0.0)) throw DomainError("planck sweep: temperatures must be > 0");
    if (!(points[i].power > 0.0)) throw DomainError("planck sweep: powers must be > 0");
    if (i > 0 && !(points[i].temperature > points[i - 1].temperature)) {
      throw DomainError("planck sweep: temperatures must be strictly increasing");
    }
  }
}

double chain_noise_photons(const ModeSpec& mode, double noise_temperature) {
  if (!(mode.frequency > 0.0)) throw DomainError("chain_noise_photons: frequency must be > 0");
  return kBoltzmann * noise_temperature / (kPlanck * mode.frequency);
}

double planck_power(const LinearChain& chain, const ModeSpec& mode, double temperature) {
  chain.validate();
  return chain.gain * chain.bandwidth * kPlanck * mode.frequency *
         (bose_einstein(mode, temperature) + 0.5 + chain_noise_photons(mode, chain.noise_temperature));
}

PlanckFit planck_fit(const PlanckSweep& sweep) {
  if (sweep.points.size() < 4) {
    throw InsufficientDataError("planck_fit needs at least 4 points, got " +
                                std::to_string(sweep.points.size()));
  }
  double tmin = sweep.points.front().temperature, tmax = tmin;
  for (const auto& pt : sweep.points) {
    tmin = std::min(tmin, pt.temperature);
    tmax = std::max(tmax, pt.temperature);
  }
  if (!(tmin > 0.0) || tmax < 3.0 * tmin) {
    std::ostringstream os;
    os << "degenerate Planck sweep: temperatures span " << tmin << " K to " << tmax
       << " K, a factor >= 3 is required";
    throw FitError(os.str());
  }
  sweep.validate();

  const auto n = static_cast<Eigen::Index>(sweep.points.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  std::vector<double> w(sweep.points.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pt = sweep.points[static_cast<std::size_t>(i)];
    x(i, 0) = bose_einstein(sweep.mode, pt.temperature) + 0.5;
    x(i, 1) = 1.0;
    y(i) = pt.power;
    w[static_cast<std::size_t>(i)] = 1.0 / (pt.power * pt.power);
  }
  PlanckFit out;
  out.raw = linear_least_squares(x, y, {"slope", "intercept"}, WeightOptions{w, false});
  const double a = out.raw.values(0), c = out.raw.values(1);
  const double unit = sweep.bandwidth * kPlanck * sweep.mode.frequency;
  if (!(a > 0.0)) throw FitError("planck_fit: fitted slope is not positive");
  out.gain = a / unit;
  out.gain_db = linear_to_db(out.gain);
  out.noise_photons = c / a;
  const double photon_to_kelvin = kPlanck * sweep.mode.frequency / kBoltzmann;
  out.noise_temperature = out.noise_photons * photon_to_kelvin;
  const auto& cov = out.raw.covariance;
  out.gain_error = std::sqrt(cov(0, 0)) / unit;
  const double var_nc = cov(1, 1) / (a * a) + c * c * cov(0, 0) / (a * a * a * a) -
                        2.0 * c * cov(0, 1) / (a * a * a);
  out.noise_temperature_error = std::sqrt(std::max(var_nc, 0.0)) * photon_to_kelvin;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double model = a * x(i, 0) + c;
    out.residuals.push_back((y(i) - model) / model);
  }
  return out;
}

JpaPlanckFit jpa_planck_fit(const PlanckSweep& sweep, double fit_range_max_t,
                            const LinearChain& chain, double kappa_x) {
  sweep.validate();
  chain.validate();
  if (sweep.points.empty() || !(sweep.points.back().temperature > fit_range_max_t)) {
    throw InsufficientDataError("jpa_planck_fit: sweep must extend beyond the fit range (" +
                                std::to_string(fit_range_max_t) + " K)");
  }
  const double unit = chain.gain * sweep.bandwidth * kPlanck * sweep.mode.frequency;
  const double nc = chain_noise_photons(sweep.mode, chain.noise_temperature);
  std::vector<double> nbe, out_photons;
  for (const auto& pt : sweep.points) {
    nbe.push_back(bose_einstein(sweep.mode, pt.temperature));
    out_photons.push_back(pt.power / unit - 0.5 - nc);
  }
  std::vector<Eigen::Index> used;
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    if (sweep.points[i].temperature <= fit_range_max_t) used.push_back(static_cast<Eigen::Index>(i));
  }
  if (used.size() < 3) {
    throw InsufficientDataError("jpa_planck_fit needs at least 3 points below " +
                                std::to_string(fit_range_max_t) + " K, got " +
                                std::to_string(used.size()));
  }
  const auto m = static_cast<Eigen::Index>(used.size());
  Eigen::MatrixXd x(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x(i, 0) = nbe[static_cast<std::size_t>(used[static_cast<std::size_t>(i)])];
    x(i, 1) = 1.0;
    y(i) = out_photons[static_cast<std::size_t>(used[static_cast<std::size_t>(i)])];
  }
  JpaPlanckFit out;
  out.points_used = used.size();
  out.raw = linear_least_squares(x, y, {"gain", "intercept"});
  const double g = out.raw.values(0), c = out.raw.values(1);
  if (!(g > 1.0)) throw FitError("jpa_planck_fit: fitted gain is not above 1");
  out.gain = g;
  out.gain_db = linear_to_db(g);
  out.noise_photons = c / (g - 1.0) - 1.0;
  const auto& cov = out.raw.covariance;
  out.gain_error = std::sqrt(cov(0, 0));
  const double d_g = -c / ((g - 1.0) * (g - 1.0)), d_c = 1.0 / (g - 1.0);
  out.noise_photons_error =
      std::sqrt(std::max(d_g * d_g * cov(0, 0) + d_c * d_c * cov(1, 1) + 2.0 * d_g * d_c * cov(0, 1), 0.0));

  // First -1 dB crossing of measured over fitted output, linearly interpolated in T.
  double prev_db = 0.0, prev_t = 0.0;
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    const double line = g * nbe[i] + c;
    const double ratio_db = out_photons[i] > 0.0 && line > 0.0 ? linear_to_db(out_photons[i] / line)
                                                                : -std::numeric_limits<double>::infinity();
    const double t = sweep.points[i].temperature;
    if (ratio_db <= -1.0) {
      double t1 = t;
      if (i > 0 && std::isfinite(ratio_db) && ratio_db != prev_db) {
        t1 = prev_t + (t - prev_t) * (-1.0 - prev_db) / (ratio_db - prev_db);
      }
      out.compression.found = true;
      out.compression.t_1db = t1;
      out.compression.power = compression_power(kappa_x, t1);
      break;
    }
    prev_db = ratio_db;
    prev_t = t;
  }
  if (!out.compression.found) out.compression.note = "compression outside range";
  return out;
}

double rapp_saturation(double n, double n_sat, double smoothness) {
  if (!(n_sat > 0.0) || !(smoothness > 0.0)) throw DomainError("rapp_saturation: n_sat and p must be > 0");
  return n / std::pow(1.0 + std::pow(n / n_sat, smoothness), 1.0 / smoothness);
}

PlanckSweep synthetic_planck_sweep(const ModeSpec& mode, const LinearChain& chain,
                                   std::span<const double> temperatures,
                                   const SyntheticSweepOptions& opts) {
  PlanckSweep sweep;
  sweep.mode = mode;
  sweep.bandwidth = chain.bandwidth;
  Engine engine = make_engine(opts.seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double t : temperatures) {
    double p = planck_power(chain, mode, t);
    if (opts.relative_noise > 0.0) p *= 1.0 + opts.relative_noise * gauss(engine);
    sweep.points.push_back({t, p});
  }
  sweep.validate();
  return sweep;
}

PlanckSweep synthetic_jpa_sweep(const ModeSpec& mode, const LinearChain& chain,
                                const JpaStage& jpa, std::span<const double> temperatures,
                                const JpaSaturation& sat, const SyntheticSweepOptions& opts) {
  chain.validate();
  jpa.validate();
  double n_sat = 0.0;
  if (sat.t_1db > 0.0) {
    // Rapp output is 1 dB low where (n/n_sat)^p = 10^(p/10) - 1.
    const double x = std::pow(std::pow(10.0, sat.smoothness / 10.0) - 1.0, 1.0 / sat.smoothness);
    n_sat = amplify(bose_einstein(mode, sat.t_1db), jpa).mean / x;
  }
  const double unit = chain.gain * chain.bandwidth * kPlanck * mode.frequency;
  const double nc = chain_noise_photons(mode, chain.noise_temperature);
  PlanckSweep sweep;
  sweep.mode = mode;
  sweep.bandwidth = chain.bandwidth;
  Engine engine = make_engine(opts.seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double t : temperatures) {
    double n_out = amplify(bose_einstein(mode, t), jpa).mean;
    if (n_sat > 0.0) n_out = rapp_saturation(n_out, n_sat, sat.smoothness);
    double p = unit * (n_out + 0.5 + nc);
    if (opts.relative_noise > 0.0) p *= 1.0 + opts.relative_noise * gauss(engine);
    sweep.points.push_back({t, p});
  }
  sweep.validate();
  return sweep;
}

QuadratureVariances quadrature_variances(const MomentSet& m) {
  if (m.ordering() != Ordering::Normal) {
    throw DomainError("quadrature_variances expects normally ordered moments");
  }
  const auto missing = m.missing(2);
  if (!missing.empty()) {
    std::ostringstream os;
    os << "quadrature_variances: missing moments";
    for (const auto& [a, b] : missing) os << " (" << a << "," << b << ")";
    throw IncompleteMomentsError(os.str());
  }
  const Complex mean = m(0, 1);
  const double pair = (m(2, 0) + m(0, 2)).real();
  const double n = m(1, 1).real();
  QuadratureVariances out;
  out.var_q = (pair + 2.0 * n + 1.0) / 4.0 - mean.real() * mean.real();
  out.var_p = (-pair + 2.0 * n + 1.0) / 4.0 - mean.imag() * mean.imag();
  return out;
}

double wigner_gaussian_contour(double n) {
  if (!(n >= 0.0)) throw DomainError("wigner_gaussian_contour: n must be >= 0");
  return std::sqrt(n + 0.5);
}

std::vector<double> if_waveform(std::span<const Complex> envelopes, double if_frequency,
                                double sample_rate) {
  if (!(sample_rate > 0.0)) throw DomainError("if_waveform: sample rate must be > 0");
  if (!(if_frequency < sample_rate / 2.0)) {
    throw DomainError("if_waveform: IF frequency must lie below the Nyquist frequency");
  }
  std::vector<double> out(envelopes.size());
  const double w = kTwoPi * if_frequency / sample_rate;
  for (std::size_t k = 0; k < envelopes.size(); ++k) {
    out[k] = (envelopes[k] * std::polar(1.0, w * static_cast<double>(k))).real();
  }
  return out;
}

}  // namespace mwstats
