#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mwstats/constants.hpp"
#include "mwstats/dualpath.hpp"
#include "mwstats/errors.hpp"
#include "mwstats/io.hpp"
#include "mwstats/parallel.hpp"

using namespace mwstats;

namespace {
std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}
}  // namespace

TEST_CASE("hybrid split") {
  const std::vector<Complex> s{{std::numbers::sqrt2, 0}, {0, 0}}, v{{0, 0}, {std::numbers::sqrt2, 0}};
  const auto [a, b] = hybrid_split(s, v);
  CHECK(std::abs(a[0] - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(b[0] - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(a[1] - Complex(1, 0)) < 1e-15);
  CHECK(std::abs(b[1] - Complex(-1, 0)) < 1e-15);
  CHECK_THROWS_AS(hybrid_split(s, std::vector<Complex>(3)), DomainError);

  const auto sig = sample_envelopes(MicrowaveState::thermal(1.0), 1000000, 1);
  const auto vac = sample_envelopes(MicrowaveState::vacuum(), 1000000, 2);
  const auto [o1, o2] = hybrid_split(sig, vac);
  Complex cross = 0;
  double worst = 0;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    worst = std::max(worst, std::abs(std::norm(o1[i]) + std::norm(o2[i]) - std::norm(sig[i]) - std::norm(vac[i])));
    cross += o1[i] * std::conj(o2[i]);
  }
  CHECK(worst < 1e-12);
  cross /= 1e6;
  // Var of o1 conj(o2) per sample is about (n+1)^2/4 at n = 1.
  CHECK(std::abs(cross - Complex(0.5, 0)) < 5 * std::sqrt(1.0 / 1e6));
}

TEST_CASE("simulated detection") {
  const auto rec = simulate_detection(MicrowaveState::vacuum(), {0, 0}, {1, 1}, 400000, 3);
  double p1 = 0;
  for (const auto& z : rec.envelopes_1) p1 += std::norm(z);
  CHECK(p1 / 4e5 == doctest::Approx(0.5).epsilon(0.01));

  const auto lo = cross_moments(simulate_detection(MicrowaveState::thermal(1.0), {0, 0}, {1, 1}, 400000, 5));
  const auto hi = cross_moments(simulate_detection(MicrowaveState::thermal(1.0), {12, 12}, {1, 1}, 400000, 5));
  const Complex c_lo = path_product_moment(lo, 1, false, 1, true);
  const Complex c_hi = path_product_moment(hi, 1, false, 1, true);
  // Same signal stream, so the difference is chain noise only: sigma ~ sqrt(n_chain (2n+1)) / sqrt(N).
  CHECK(std::abs(c_lo - c_hi) < 4 * std::sqrt(12.0 * 13 / 4e5));

  const auto g1 = simulate_detection(MicrowaveState::thermal(0.5), {1, 2}, {1, 1}, 10000, 8);
  const auto g2 = simulate_detection(MicrowaveState::thermal(0.5), {1, 2}, {2, 2}, 10000, 8);
  const auto m1 = cross_moments(g1), m2 = cross_moments(g2);
  for (const auto& k : CrossMomentSet::keys()) {
    if (k[0] + k[1] + k[2] + k[3] == 2) CHECK(m2.at(k) == doctest::Approx(2 * m1.at(k)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(simulate_detection(MicrowaveState::vacuum(), {-1, 0}, {1, 1}, 10, 1), DomainError);
  CHECK_THROWS(simulate_detection(MicrowaveState::vacuum(), {0, 0}, {1, 1}, 1, 1));
}

TEST_CASE("detection is independent of the thread count") {
  set_max_threads(1);
  const auto a = simulate_detection(MicrowaveState::thermal(0.7), {5, 5}, {1, 2}, 100000, 17);
  const auto ca = cross_moments(a);
  set_max_threads(3);
  const auto b = simulate_detection(MicrowaveState::thermal(0.7), {5, 5}, {1, 2}, 100000, 17);
  const auto cb = cross_moments(b);
  set_max_threads(0);
  CHECK(a.envelopes_1 == b.envelopes_1);
  CHECK(a.envelopes_2 == b.envelopes_2);
  for (const auto& k : CrossMomentSet::keys()) CHECK(ca.at(k) == cb.at(k));
}

TEST_CASE("cross moments") {
  CHECK(CrossMomentSet::keys().size() == 70);
  DetectionRecord one;
  one.envelopes_1.assign(10, Complex(1, 0));
  one.envelopes_2.assign(10, Complex(1, 0));
  const auto c = cross_moments(one);
  CHECK(c.size() == 70);
  CHECK(c.complete());
  CHECK(c(1, 1, 0, 0) == 1.0);
  CHECK(c(0, 0, 0, 0) == 1.0);

  const auto vac = cross_moments(simulate_detection(MicrowaveState::vacuum(), {0, 0}, {1, 1}, 200000, 4));
  for (const auto& k : CrossMomentSet::keys()) {
    // Moments up to order 3 of quadratures with variance 1/4: per-sample spread below 1.
    if ((k[0] + k[1] + k[2] + k[3]) % 2 == 1) CHECK(std::abs(vac.at(k)) < 5.0 / std::sqrt(2e5));
  }
  const auto batches = cross_moments_batched(simulate_detection(MicrowaveState::vacuum(), {0, 0}, {1, 1}, 1003, 4), 10);
  CHECK(batches.size() == 10);
  CrossMomentSet empty;
  CHECK_FALSE(empty.complete());
}

TEST_CASE("reconstruction of thermal and coherent inputs") {
  const auto vac = reconstruct_with_errors(simulate_detection(MicrowaveState::vacuum(), {5, 5}, {1, 1}, 1000000, 21));
  CHECK(std::abs(vac.photon_number()) < 5 * vac.photon_number_error());

  const auto th = reconstruct_with_errors(simulate_detection(MicrowaveState::thermal(1.0), {5, 5}, {2, 3}, 1000000, 22));
  CHECK(std::abs(th.photon_number() - 1.0) < 5 * th.photon_number_error());
  CHECK(std::abs(th.g2() - 2.0) < 5 * th.g2_error());
  CHECK(th.batches == 20);
  CHECK(th.samples == 1000000);

  // Input vs Wick-consistent targets for every entry.
  const auto target = analytic_moments(MicrowaveState::thermal(1.0));
  for (const auto& [n, m] : MomentSet::keys()) {
    const Complex d = th.moments(n, m) - target(n, m);
    const Complex se = th.standard_errors(n, m);
    CHECK(std::abs(d.real()) <= 5 * se.real() + 1e-12);
    CHECK(std::abs(d.imag()) <= 5 * se.imag() + 1e-12);
  }
  const auto q = quadrature_variances(th.moments);
  CHECK(q.var_p == doctest::Approx(0.75).epsilon(0.03));
  CHECK(q.var_q == doctest::Approx(0.75).epsilon(0.03));

  CHECK_THROWS(reconstruct_signal_moments(cross_moments(simulate_detection(MicrowaveState::vacuum(), {0, 0}, {1, 1}, 100, 1)), {0.0, 1.0}));
  CrossMomentSet partial;
  partial.set({0, 0, 0, 0}, 1.0);
  CHECK_THROWS(reconstruct_signal_moments(partial, {1, 1}));
}

TEST_CASE("reconstruction converges as 1/sqrt(N)") {
  std::vector<MicrowaveState> states{MicrowaveState::thermal(0.1), MicrowaveState::thermal(0.5),
                                     MicrowaveState::thermal(1.0), MicrowaveState::thermal(1.5),
                                     MicrowaveState::coherent(0.5), MicrowaveState::coherent(1.0)};
  int seed = 300;
  for (const auto& s : states) {
    const auto target = analytic_moments(s);
    std::vector<double> se;
    for (std::size_t n : {10000u, 100000u, 1000000u}) {
      const auto r = reconstruct_with_errors(simulate_detection(s, {2, 2}, {1, 1}, n, ++seed));
      for (const auto& [p, q] : std::vector<MomentSet::Key>{{1, 1}, {2, 2}, {0, 1}, {1, 2}}) {
        const Complex d = r.moments(p, q) - target(p, q);
        CHECK(std::abs(d.real()) <= 5 * r.standard_errors(p, q).real() + 1e-12);
        CHECK(std::abs(d.imag()) <= 5 * r.standard_errors(p, q).imag() + 1e-12);
      }
      se.push_back(r.photon_number_error());
    }
    // Expected factor sqrt(10) per decade.
    CHECK(se[0] / se[1] == doctest::Approx(std::sqrt(10.0)).epsilon(0.4));
    CHECK(se[1] / se[2] == doctest::Approx(std::sqrt(10.0)).epsilon(0.4));
  }
}

TEST_CASE("chain-noise invariance and vacuum port") {
  std::vector<double> n;
  std::vector<double> e;
  for (double chain : {0.0, 5.0, 12.0}) {
    const auto r = reconstruct_with_errors(simulate_detection(MicrowaveState::thermal(1.0), {chain, chain}, {1, 1}, 500000, 40));
    n.push_back(r.photon_number());
    e.push_back(r.photon_number_error());
  }
  for (std::size_t i = 1; i < n.size(); ++i) {
    CHECK(std::abs(n[i] - n[0]) < 4 * std::hypot(e[i], e[0]));
  }

  DetectionOptions port;
  port.vacuum_port_photons = 0.3;
  const auto r = reconstruct_with_errors(simulate_detection(MicrowaveState::thermal(0.8), {2, 2}, {1, 1}, 1000000, 41, port), 20, 0.3);
  CHECK(std::abs(r.photon_number() - 0.8) < 5 * r.photon_number_error());
  CHECK(std::abs(r.g2() - 2 * 0.64) < 5 * r.g2_error());
}

TEST_CASE("quadrature variances and contours") {
  const auto vac = quadrature_variances(analytic_moments(MicrowaveState::vacuum()));
  CHECK(vac.var_p == doctest::Approx(0.25));
  CHECK(vac.var_q == doctest::Approx(0.25));
  for (double n : {0.1, 1.0, 3.0}) {
    const auto v = quadrature_variances(analytic_moments(MicrowaveState::thermal(n)));
    CHECK(v.var_p == doctest::Approx(n / 2 + 0.25));
    CHECK(v.var_q == v.var_p);
  }
  const auto coh = quadrature_variances(analytic_moments(MicrowaveState::coherent({0.8, -0.3})));
  CHECK(coh.var_p == doctest::Approx(0.25));
  CHECK(coh.var_q == doctest::Approx(0.25));
  CHECK(wigner_gaussian_contour(0.0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(wigner_gaussian_contour(1.0) == doctest::Approx(std::sqrt(1.5)));
  for (double n : {0.1, 1.0, 4.0}) {
    CHECK(std::abs(wigner_gaussian_contour(n) / wigner_gaussian_contour(0) - std::sqrt(2 * n + 1)) < 1e-14);
  }
}

TEST_CASE("Planck fit round trip and noise") {
  const ModeSpec mode{5.4e9};
  const auto chain = LinearChain::from_db(145, 3.0, 400e3);
  const auto temps = linspace(0.05, 1.5, 100);
  const auto fit = planck_fit(synthetic_planck_sweep(mode, chain, temps));
  CHECK(std::abs(fit.gain / chain.gain - 1) < 1e-9);
  CHECK(std::abs(fit.noise_temperature / 3.0 - 1) < 1e-9);
  CHECK(fit.gain_db == doctest::Approx(145));

  const auto quiet = LinearChain::from_db(145, 0.0, 400e3);
  const auto q = planck_fit(synthetic_planck_sweep(mode, quiet, temps));
  CHECK(std::abs(q.noise_photons) < 1e-9);
  CHECK(planck_power(quiet, mode, 1e-3) == doctest::Approx(quiet.gain * 400e3 * kPlanck * 5.4e9 * 0.5));

  PlanckSweep degenerate = synthetic_planck_sweep(mode, chain, linspace(0.5, 0.5001, 6));
  CHECK_THROWS_AS(planck_fit(degenerate), FitError);
  CHECK_THROWS(planck_fit(synthetic_planck_sweep(mode, chain, linspace(0.1, 1.0, 3))));

  // Scatter over repeated noisy sweeps against the reported uncertainty.
  double sum = 0, sum2 = 0, err = 0, gain_ms = 0, temp_ms = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const auto f = planck_fit(synthetic_planck_sweep(mode, chain, temps, {0.01, 500u + t}));
    gain_ms += std::pow(f.gain / chain.gain - 1, 2) / trials;
    temp_ms += std::pow(f.noise_temperature / 3.0 - 1, 2) / trials;
    sum += f.noise_temperature;
    sum2 += f.noise_temperature * f.noise_temperature;
    err += f.noise_temperature_error;
  }
  CHECK(std::sqrt(gain_ms) < 0.02);
  CHECK(std::sqrt(temp_ms) < 0.02);
  const double sd = std::sqrt((sum2 - sum * sum / trials) / (trials - 1));
  CHECK(sd / (err / trials) == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("JPA Planck fit") {
  const ModeSpec mode{5.4e9};
  const auto chain = LinearChain::from_db(145, 3.0, 400e3);
  const auto temps = linspace(0.05, 1.5, 100);
  struct Device {
    double gain_db, n_n, t_1db, kappa;
  };
  for (const auto& d : {Device{14.3, 1.47, 0.0, 18.7e6}, Device{15.8, 0.66, 0.59, 14.9e6}, Device{15.2, 0.97, 0.44, 14.6e6}}) {
    const auto sweep = synthetic_jpa_sweep(mode, chain, JpaStage::from_db(d.gain_db, d.n_n), temps, {d.t_1db, 40.0});
    const auto fit = jpa_planck_fit(sweep, 0.2, chain, d.kappa);
    CHECK(fit.noise_photons == doctest::Approx(d.n_n).epsilon(0.05));
    CHECK(fit.gain_db == doctest::Approx(d.gain_db).epsilon(0.01));
    if (d.t_1db > 0) {
      REQUIRE(fit.compression.found);
      CHECK(fit.compression.t_1db == doctest::Approx(d.t_1db).epsilon(0.02));
      CHECK(fit.compression.power.dbm == doctest::Approx(compression_power(d.kappa, fit.compression.t_1db).dbm));
    } else {
      CHECK_FALSE(fit.compression.found);
      CHECK(fit.compression.note == "compression outside range");
    }
  }
  CHECK(rapp_saturation(1e-6, 1.0, 40.0) == doctest::Approx(1e-6));
  CHECK(rapp_saturation(100.0, 1.0, 40.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("record and moment IO round trips") {
  const auto dir = std::filesystem::temp_directory_path() / "mwstats_io_test";
  std::filesystem::create_directories(dir);
  auto rec = simulate_detection(MicrowaveState::thermal(0.4), {1, 1}, {2, 3}, 1000, 9);
  write_record_binary(rec, dir / "rec");
  const auto back = read_record_binary(dir / "rec");
  CHECK(back.envelopes_1 == rec.envelopes_1);
  CHECK(back.envelopes_2 == rec.envelopes_2);
  CHECK(back.chain_gains == rec.chain_gains);
  CHECK(back.seed == rec.seed);
  CHECK(std::filesystem::file_size(dir / "rec.bin") == 1000 * 4 * 8);

  write_record_csv(rec, dir / "rec.csv");
  const auto csv = read_record_csv(dir / "rec.csv");
  CHECK(csv.envelopes_1 == rec.envelopes_1);
  CHECK(csv.envelopes_2 == rec.envelopes_2);

  const auto m = analytic_moments(MicrowaveState::coherent({0.3, 0.9}));
  const auto mb = moments_from_json(moments_to_json(m));
  CHECK(mb.ordering() == Ordering::Normal);
  for (const auto& [p, q] : MomentSet::keys()) CHECK(mb(p, q) == m(p, q));
  const auto cm = cross_moments(rec);
  const auto cb = cross_moments_from_json(cross_moments_to_json(cm));
  for (const auto& k : CrossMomentSet::keys()) CHECK(cb.at(k) == cm.at(k));
  std::filesystem::remove_all(dir);
}

TEST_CASE("IF waveform") {
  const std::vector<Complex> z{{1, 0}, {0, 1}, {0.5, 0.5}};
  const auto w = if_waveform(z, 11e6);
  CHECK(w.size() == 3);
  CHECK(w[0] == doctest::Approx(1.0));
  const double ph = kTwoPi * 11e6 / 250e6;
  CHECK(w[1] == doctest::Approx(-std::sin(ph)));
}
