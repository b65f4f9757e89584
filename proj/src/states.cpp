#include "mwstats/states.hpp"

#include <algorithm>
#include <array>
#include <cmath>
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

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

void check_key(int n, int m) {
  if (n < 0 || m < 0 || n + m > MomentSet::kMaxOrder) {
    std::ostringstream os;
    os << "moment index (" << n << "," << m << ") outside 0 <= n+m <= " << MomentSet::kMaxOrder;
    throw DomainError(os.str());
  }
}

}  // namespace

std::string to_string(StateKind kind) {
  switch (kind) {
    case StateKind::Thermal: return "thermal";
    case StateKind::Coherent: return "coherent";
    case StateKind::ShotNoise: return "shot";
    case StateKind::Vacuum: return "vacuum";
  }
  return "unknown";
}

StateKind state_kind_from_string(const std::string& name) {
  if (name == "thermal") return StateKind::Thermal;
  if (name == "coherent") return StateKind::Coherent;
  if (name == "shot" || name == "shot_noise") return StateKind::ShotNoise;
  if (name == "vacuum") return StateKind::Vacuum;
  throw std::invalid_argument("unknown state kind '" + name +
                              "' (expected thermal, coherent, shot or vacuum)");
}

std::string to_string(Ordering ordering) {
  return ordering == Ordering::Normal ? "normal" : "symmetrized";
}

MicrowaveState MicrowaveState::thermal(double mean_photons) {
  if (!(mean_photons >= 0.0)) throw DomainError("thermal state needs mean_photons >= 0");
  return {StateKind::Thermal, mean_photons, {0.0, 0.0}};
}

MicrowaveState MicrowaveState::coherent(Complex amplitude) {
  return {StateKind::Coherent, std::norm(amplitude), amplitude};
}

MicrowaveState MicrowaveState::shot_noise(double mean_photons) {
  if (!(mean_photons >= 0.0)) throw DomainError("shot-noise state needs mean_photons >= 0");
  return {StateKind::ShotNoise, mean_photons, {0.0, 0.0}};
}

MicrowaveState MicrowaveState::vacuum() { return {StateKind::Vacuum, 0.0, {0.0, 0.0}}; }

double bose_einstein(const ModeSpec& mode, double temperature) {
  if (!(mode.frequency > 0.0)) throw DomainError("bose_einstein: frequency must be > 0");
  if (!(temperature > 0.0)) throw DomainError("bose_einstein: temperature must be > 0");
  const double x = kPlanck * mode.frequency / (kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

double effective_temperature(const ModeSpec& mode, double n) {
  if (!(mode.frequency > 0.0)) throw DomainError("effective_temperature: frequency must be > 0");
  if (!(n > 0.0)) throw DomainError("effective_temperature: photon number must be > 0");
  return kPlanck * mode.frequency / (kBoltzmann * std::log1p(1.0 / n));
}

double photon_variance(const MicrowaveState& state, bool classical_limit) {
  const double n = state.mean_photons();
  if (classical_limit) return n * n;
  switch (state.kind()) {
    case StateKind::Thermal: return n * n + n;
    case StateKind::Coherent:
    case StateKind::ShotNoise: return n;
    case StateKind::Vacuum: return 0.0;
  }
  return 0.0;
}

Complex MomentSet::at(int n, int m) const {
  check_key(n, m);
  const auto it = entries_.find({n, m});
  if (it == entries_.end()) {
    std::ostringstream os;
    os << "moment (" << n << "," << m << ") missing from " << to_string(ordering_) << " set";
    throw IncompleteMomentsError(os.str());
  }
  return it->second;
}

void MomentSet::set(int n, int m, Complex value) {
  check_key(n, m);
  entries_[{n, m}] = value;
}

std::vector<MomentSet::Key> MomentSet::keys(int max_order) {
  std::vector<Key> out;
  for (int order = 0; order <= max_order; ++order) {
    for (int n = 0; n <= order; ++n) out.emplace_back(n, order - n);
  }
  return out;
}

std::vector<MomentSet::Key> MomentSet::missing(int max_order) const {
  std::vector<Key> out;
  for (const auto& key : keys(max_order)) {
    if (!entries_.count(key)) out.push_back(key);
  }
  return out;
}

MomentSet analytic_moments(const MicrowaveState& state) {
  MomentSet m(Ordering::Normal);
  const double n = state.mean_photons();
  for (const auto& [p, q] : MomentSet::keys()) {
    Complex value{0.0, 0.0};
    switch (state.kind()) {
      case StateKind::Thermal:
        if (p == q) value = factorial(p) * std::pow(n, p);
        break;
      case StateKind::Coherent:
        value = ipow(std::conj(state.amplitude()), p) * ipow(state.amplitude(), q);
        break;
      case StateKind::ShotNoise:
        // Phase-randomized Poissonian field: ⟨(a†)ᵏaᵏ⟩ = nᵏ.
        if (p == q) value = std::pow(n, p);
        break;
      case StateKind::Vacuum:
        if (p == 0 && q == 0) value = 1.0;
        break;
    }
    m.set(p, q, value);
  }
  return m;
}

std::vector<Complex> sample_envelopes(const MicrowaveState& state, std::size_t count,
                                      std::uint64_t seed) {
  std::vector<Complex> out(count);
  if (count == 0) return out;
  const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;

  // Per-quadrature standard deviation of the fluctuating part of the Wigner function.
  const double n = state.mean_photons();
  const double sigma_thermal = std::sqrt((2.0 * n + 1.0) / 4.0);
  const double sigma_vacuum = 0.5;
  const double shot_radius = std::sqrt(n);
  const StateKind kind = state.kind();
  const Complex alpha = state.amplitude();

  parallel_for_blocks(blocks, [&](std::size_t b) {
    Engine engine = make_engine(seed, b);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    const std::size_t begin = b * kSampleBlock;
    const std::size_t end = std::min(count, begin + kSampleBlock);
    for (std::size_t i = begin; i < end; ++i) {
      const double x = gauss(engine);
      const double y = gauss(engine);
      switch (kind) {
        case StateKind::Thermal:
          out[i] = {sigma_thermal * x, sigma_thermal * y};
          break;
        case StateKind::Vacuum:
          out[i] = {sigma_vacuum * x, sigma_vacuum * y};
          break;
        case StateKind::Coherent:
          out[i] = alpha + Complex{sigma_vacuum * x, sigma_vacuum * y};
          break;
        case StateKind::ShotNoise:
          out[i] = std::polar(shot_radius, phase(engine)) + Complex{sigma_vacuum * x, sigma_vacuum * y};
          break;
      }
    }
  });
  return out;
}

MomentSet empirical_moments(std::span<const Complex> samples) {
  if (samples.size() < 2) {
    throw InsufficientDataError("empirical_moments needs at least 2 samples, got " +
                                std::to_string(samples.size()));
  }
  const auto keys = MomentSet::keys();
  const std::size_t blocks = (samples.size() + kSampleBlock - 1) / kSampleBlock;
  // Per-block partial sums, merged in block order for schedule-independent results.
  std::vector<std::vector<std::array<CompensatedSum, 2>>> partial(
      blocks, std::vector<std::array<CompensatedSum, 2>>(keys.size()));

  parallel_for_blocks(blocks, [&](std::size_t b) {
    auto& acc = partial[b];
    const std::size_t begin = b * kSampleBlock;
    const std::size_t end = std::min(samples.size(), begin + kSampleBlock);
    for (std::size_t i = begin; i < end; ++i) {
      std::array<Complex, MomentSet::kMaxOrder + 1> zp{}, zc{};
      zp[0] = zc[0] = 1.0;
      for (int k = 1; k <= MomentSet::kMaxOrder; ++k) {
        zp[k] = zp[k - 1] * samples[i];
        zc[k] = zc[k - 1] * std::conj(samples[i]);
      }
      for (std::size_t j = 0; j < keys.size(); ++j) {
        const Complex v = zc[keys[j].first] * zp[keys[j].second];
        acc[j][0].add(v.real());
        acc[j][1].add(v.imag());
      }
    }
  });

  MomentSet out(Ordering::Symmetrized);
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (std::size_t j = 0; j < keys.size(); ++j) {
    CompensatedSum re, im;
    for (std::size_t b = 0; b < blocks; ++b) {
      re.merge(partial[b][j][0]);
      im.merge(partial[b][j][1]);
    }
    out.set(keys[j].first, keys[j].second, {re.value() * inv, im.value() * inv});
  }
  return out;
}

MomentSet shift_ordering(const MomentSet& moments, double shift, Ordering result_ordering) {
  const auto missing = moments.missing();
  if (!missing.empty()) {
    std::ostringstream os;
    os << "incomplete moment set, missing:";
    for (const auto& [n, m] : missing) os << " (" << n << "," << m << ")";
    throw IncompleteMomentsError(os.str());
  }
  MomentSet out(result_ordering);
  for (const auto& [n, m] : MomentSet::keys()) {
    Complex acc = 0.0;
    double shift_power = 1.0;
    for (int k = 0; k <= std::min(n, m); ++k, shift_power *= shift) {
      acc += binomial(n, k) * binomial(m, k) * factorial(k) * shift_power *
             moments.at(n - k, m - k);
    }
    out.set(n, m, acc);
  }
  return out;
}

MomentSet ordering_convert(const MomentSet& moments, Ordering target) {
  if (moments.ordering() == target) {
    // Still validate completeness so callers get the same contract either way.
    return shift_ordering(moments, 0.0, target);
  }
  const double shift = target == Ordering::Symmetrized ? 0.5 : -0.5;
  return shift_ordering(moments, shift, target);
}

}  // namespace mwstats
