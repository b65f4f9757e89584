#include <cmath>
#include <random>

#include "doctest.h"
#include "mwstats/errors.hpp"
#include "mwstats/parallel.hpp"
#include "mwstats/states.hpp"
#include "oracles.hpp"

using namespace mwstats;

namespace {
const ModeSpec kMode{6.07e9};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }
}  // namespace

TEST_CASE("bose_einstein values") {
  CHECK(bose_einstein(kMode, 1e-4) < 1e-100);
  CHECK(bose_einstein(kMode, 0.143) == doctest::Approx(0.15).epsilon(0.02));
  CHECK(bose_einstein(kMode, 0.2914) == doctest::Approx(0.582).epsilon(0.002));
  double prev = 0;
  for (double t = 0.01; t < 3; t += 0.05) {
    const double n = bose_einstein(kMode, t);
    CHECK(n > prev);
    prev = n;
  }
  CHECK_THROWS_AS(bose_einstein(kMode, 0.0), DomainError);
  CHECK_THROWS_AS(bose_einstein(ModeSpec{-1.0}, 1.0), DomainError);
}

TEST_CASE("effective_temperature inverts bose_einstein") {
  CHECK(effective_temperature(kMode, 0.15) == doctest::Approx(0.143).epsilon(0.01));
  CHECK(effective_temperature(kMode, 0.19) == doctest::Approx(0.15).epsilon(0.02));
  for (double n : {0.05, 0.5, 1.5}) {
    CHECK(rel(bose_einstein(kMode, effective_temperature(kMode, n)), n) < 1e-12);
  }
  CHECK_THROWS_AS(effective_temperature(kMode, 0.0), DomainError);
}

TEST_CASE("photon_variance by kind") {
  CHECK(photon_variance(MicrowaveState::thermal(1.0)) == 2.0);
  CHECK(photon_variance(MicrowaveState::coherent(1.0)) == doctest::Approx(1.0));
  CHECK(photon_variance(MicrowaveState::shot_noise(0.7)) == doctest::Approx(0.7));
  CHECK(photon_variance(MicrowaveState::vacuum()) == 0.0);
  CHECK(photon_variance(MicrowaveState::thermal(0.5), true) == 0.25);
}

TEST_CASE("state invariants") {
  CHECK_THROWS(MicrowaveState::thermal(-0.1));
  const auto c = MicrowaveState::coherent({0.6, 0.8});
  CHECK(std::abs(std::norm(c.amplitude()) - c.mean_photons()) < 1e-12);
  CHECK(MicrowaveState::vacuum().mean_photons() == 0.0);
}

TEST_CASE("analytic moments: examples and variance identity") {
  const auto th = analytic_moments(MicrowaveState::thermal(1.0));
  CHECK(th(2, 2).real() == doctest::Approx(2.0));
  CHECK(std::abs(th(1, 0)) == 0.0);
  CHECK(analytic_moments(MicrowaveState::coherent(1.0))(2, 2).real() == doctest::Approx(1.0));
  CHECK(analytic_moments(MicrowaveState::vacuum())(1, 1).real() == 0.0);
  for (const auto& s : {MicrowaveState::thermal(0.3), MicrowaveState::coherent({0.4, -0.9}),
                        MicrowaveState::vacuum(), MicrowaveState::shot_noise(1.2)}) {
    const auto m = analytic_moments(s);
    CHECK(m(1, 1).real() == doctest::Approx(s.mean_photons()));
    CHECK(m(0, 0) == Complex(1.0));
    for (const auto& [n, k] : MomentSet::keys()) CHECK(std::abs(m(n, k) - std::conj(m(k, n))) < 1e-15);
    if (s.kind() != StateKind::ShotNoise) {
      const double n = m(1, 1).real();
      CHECK(m(2, 2).real() + n - n * n == doctest::Approx(photon_variance(s)));
    }
  }
  CHECK(analytic_moments(MicrowaveState::shot_noise(0.8))(2, 2).real() == doctest::Approx(0.64));
}

TEST_CASE("analytic moments match Fock brute force (cutoff 60)") {
  for (double n : {0.1, 0.5, 1.0, 1.5}) {
    const auto ana = analytic_moments(MicrowaveState::thermal(n));
    const auto fock = oracle::thermal_fock(n);
    for (const auto& [p, q] : MomentSet::keys()) {
      const auto ref = oracle::normal_moment(fock, p, q);
      CHECK(std::abs(ana(p, q) - ref) <= 1e-6 * std::max(1.0, std::abs(ref)));
    }
  }
  const Complex alpha{0.7, -0.4};
  const auto ana = analytic_moments(MicrowaveState::coherent(alpha));
  const auto fock = oracle::coherent_fock(alpha);
  for (const auto& [p, q] : MomentSet::keys()) {
    CHECK(std::abs(ana(p, q) - oracle::normal_moment(fock, p, q)) < 1e-9);
  }
}

TEST_CASE("ordering_convert matches operator-ordering brute force") {
  for (double n : {0.0, 0.4, 1.5}) {
    const auto sym = ordering_convert(analytic_moments(MicrowaveState::thermal(n)), Ordering::Symmetrized);
    const auto fock = oracle::thermal_fock(n);
    for (const auto& [p, q] : MomentSet::keys()) {
      const auto ref = oracle::symmetric_moment(fock, p, q);
      CHECK(std::abs(sym(p, q) - ref) <= 1e-8 * std::max(1.0, std::abs(ref)));
    }
    CHECK(sym(1, 1).real() == doctest::Approx(n + 0.5));
  }
  const Complex alpha{-0.3, 1.1};
  const auto sym = ordering_convert(analytic_moments(MicrowaveState::coherent(alpha)), Ordering::Symmetrized);
  const auto fock = oracle::coherent_fock(alpha);
  for (const auto& [p, q] : MomentSet::keys()) {
    CHECK(std::abs(sym(p, q) - oracle::symmetric_moment(fock, p, q)) < 1e-9);
  }
}

TEST_CASE("ordering_convert round trip and incomplete sets") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    MomentSet m(Ordering::Normal);
    for (const auto& [p, q] : MomentSet::keys()) {
      if (p > q) continue;
      const Complex v = p == q ? Complex(p == 0 ? 1.0 : std::abs(g(rng))) : Complex(g(rng), g(rng));
      m.set(p, q, v);
      m.set(q, p, std::conj(v));
    }
    const auto back = ordering_convert(ordering_convert(m, Ordering::Symmetrized), Ordering::Normal);
    for (const auto& [p, q] : MomentSet::keys()) CHECK(std::abs(back(p, q) - m(p, q)) < 1e-12);
  }
  MomentSet partial(Ordering::Normal);
  partial.set(0, 0, 1.0);
  partial.set(1, 1, 0.5);
  CHECK_THROWS_AS(ordering_convert(partial, Ordering::Symmetrized), IncompleteMomentsError);
  CHECK(ordering_convert(analytic_moments(MicrowaveState::vacuum()), Ordering::Symmetrized)(1, 1).real() ==
        doctest::Approx(0.5));
}

TEST_CASE("sample_envelopes statistics") {
  const auto vac = sample_envelopes(MicrowaveState::vacuum(), 1000000, 3);
  double sx = 0, sy = 0;
  for (const auto& z : vac) {
    sx += z.real() * z.real();
    sy += z.imag() * z.imag();
  }
  const double se = 0.25 * std::sqrt(2.0 / 1e6);
  CHECK(std::abs(sx / 1e6 - 0.25) < 3 * se);
  CHECK(std::abs(sy / 1e6 - 0.25) < 3 * se);

  const auto th = empirical_moments(sample_envelopes(MicrowaveState::thermal(1.0), 1000000, 4));
  CHECK(th.ordering() == Ordering::Symmetrized);
  CHECK(th(1, 1).real() == doctest::Approx(1.5).epsilon(0.01));

  const auto coh = sample_envelopes(MicrowaveState::coherent(2.0), 100000, 5);
  Complex mean = 0;
  for (const auto& z : coh) mean += z;
  mean /= 1e5;
  CHECK(std::abs(mean - Complex(2.0)) < 5 * std::sqrt(0.5 / 1e5));
  CHECK(sample_envelopes(MicrowaveState::thermal(1.0), 0, 1).empty());
}

TEST_CASE("sampling is deterministic and independent of the thread count") {
  set_max_threads(1);
  const auto a = sample_envelopes(MicrowaveState::thermal(0.7), 50000, 11);
  set_max_threads(4);
  const auto b = sample_envelopes(MicrowaveState::thermal(0.7), 50000, 11);
  set_max_threads(0);
  CHECK(a == b);
  const auto c = sample_envelopes(MicrowaveState::thermal(0.7), 50000, 12);
  CHECK(a != c);
}

TEST_CASE("empirical moments converge as 1/sqrt(N)") {
  // rms error over independent seeds at N = 1e4, 1e5, 1e6 against the symmetrized target.
  for (const auto& state : {MicrowaveState::thermal(1.0), MicrowaveState::shot_noise(0.8)}) {
    const auto target = ordering_convert(analytic_moments(state), Ordering::Symmetrized);
    std::vector<double> rms;
    for (std::size_t n : {10000u, 100000u, 1000000u}) {
      double acc = 0;
      const int reps = n == 1000000u ? 4 : 8;
      for (int r = 0; r < reps; ++r) {
        const auto m = empirical_moments(sample_envelopes(state, n, 100 + r));
        acc += std::norm(m(2, 2) - target(2, 2)) + std::norm(m(1, 1) - target(1, 1));
      }
      rms.push_back(std::sqrt(acc / reps));
    }
    // Expected ratio √10 per decade; allow the scatter of a few repetitions.
    CHECK(rms[0] / rms[1] > 1.5);
    CHECK(rms[1] / rms[2] > 1.5);
    CHECK(rms[0] / rms[2] > 5.0);
  }
}

TEST_CASE("empirical moments need two samples") {
  std::vector<Complex> one{{1.0, 0.0}};
  CHECK_THROWS_AS(empirical_moments(one), InsufficientDataError);
  std::vector<Complex> ones(5, Complex(1.0, 0.0));
  CHECK(empirical_moments(ones)(1, 1).real() == 1.0);
}
