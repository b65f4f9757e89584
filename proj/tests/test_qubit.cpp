#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "mwstats/analysis.hpp"
#include "mwstats/errors.hpp"
#include "mwstats/qubit.hpp"

using namespace mwstats;

TEST_CASE("dispersive shift") {
  CHECK(dispersive_shift(67e6, 850e6, -315e6) == doctest::Approx(-3.11e6).epsilon(0.01));
  CHECK(dispersive_shift(67e6, 850e6, -1e15) == doctest::Approx(67e6 * 67e6 / 850e6).epsilon(1e-6));
  // g^2/delta = -5.2812 MHz, alpha/(delta+alpha) = 315/1165.
  CHECK(dispersive_shift(67e6, -850e6, -315e6) == doctest::Approx(-5.28118e6 * 315.0 / 1165.0).epsilon(1e-5));
  CHECK_THROWS_AS(dispersive_shift(67e6, 0.0, -315e6), SingularityError);
  CHECK_THROWS_AS(dispersive_shift(67e6, 315e6, -315e6), SingularityError);
}

TEST_CASE("accumulated phase") {
  CHECK(accumulated_phase(0.0, 8.5e6) == 0.0);
  CHECK(accumulated_phase(-3.11e6, 8.5e6) == doctest::Approx(-0.632).epsilon(0.002));
  CHECK(accumulated_phase(4.25e6, 8.5e6) == doctest::Approx(std::numbers::pi / 4));
  CHECK(accumulated_phase(1e6, 8.5e6) == doctest::Approx(-accumulated_phase(-1e6, 8.5e6)));
  const double th = accumulated_phase(-3.11e6, 8.5e6);
  CHECK(8.5e6 * th * th == doctest::Approx(3.4e6).epsilon(0.02));
}

TEST_CASE("flux tuning") {
  QubitParams q;
  CHECK(flux_tuned_frequency(q, 0.0) == 6.92e9);
  CHECK(std::abs(flux_tuned_frequency(q, q.flux_quantum / 2)) < 1e2);
  CHECK(flux_tuned_frequency(q, q.flux_quantum / 4) == doctest::Approx(0.840896 * 6.92e9).epsilon(1e-6));
  CHECK(flux_tuned_frequency(q, 0.3 * q.flux_quantum) ==
        doctest::Approx(flux_tuned_frequency(q, 1.3 * q.flux_quantum)));
}

TEST_CASE("critical photons, Purcell and Stark shift") {
  CHECK(critical_photons(850e6, 67e6) == doctest::Approx(40).epsilon(0.02));
  CHECK(critical_photons(134e6, 67e6) == doctest::Approx(1.0));
  CHECK(critical_photons(425e6, 67e6) == doctest::Approx(10).epsilon(0.02));
  CHECK(purcell_rate(8.55e6, 67e6, 850e6) == doctest::Approx(53e3).epsilon(0.03));
  CHECK(purcell_rate(8.55e6, 0.0, 850e6) == 0.0);
  CHECK(purcell_rate(8.55e6, 67e6, 1700e6) == doctest::Approx(purcell_rate(8.55e6, 67e6, 850e6) / 4));
  CHECK(ac_stark_shift(-3.11e6, 0.0) == 0.0);
  CHECK(ac_stark_shift(-3.11e6, 1.0) == doctest::Approx(-6.22e6));
  CHECK(photons_from_stark_shift(-3.11e6, -6.22e6) == doctest::Approx(1.0));
}

TEST_CASE("reference system") {
  const auto sys = reference_system();
  CHECK(sys.detuning == doctest::Approx(850e6));
  CHECK(sys.chi == doctest::Approx(-3.11e6).epsilon(0.01));
  CHECK(sys.theta0 == doctest::Approx(std::atan(2 * sys.chi / 8.5e6)));
  CHECK(sys.dispersive_valid());
  QubitParams bad;
  bad.anharmonicity = 10e6;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("dephasing rate laws") {
  const auto sys = reference_system();
  const double s0 = sys.resonator.external_rate * sys.theta0 * sys.theta0;
  CHECK(s0 == doctest::Approx(3.4e6).epsilon(0.02));
  CHECK(dephasing_rate(StateKind::Thermal, 1e-6, sys) / 1e-6 == doctest::Approx(s0).epsilon(1e-5));
  for (double n : {0.0, 0.05, 0.3, 1.0, 1.5, 7.0}) {
    const double th = dephasing_rate(StateKind::Thermal, n, sys);
    const double coh = dephasing_rate(StateKind::Coherent, n, sys);
    const double sh = dephasing_rate(StateKind::ShotNoise, n, sys);
    CHECK(th - sh == doctest::Approx(s0 * n * n));
    CHECK(coh == doctest::Approx(2 * sh));
    CHECK(dephasing_rate(StateKind::Vacuum, n, sys) == 0.0);
    // Correlator route agrees with the closed forms.
    CHECK(dephasing_rate(correlator(StateKind::Thermal, n, sys.resonator), sys) == doctest::Approx(th));
    CHECK(dephasing_rate(correlator(StateKind::Coherent, n, sys.resonator), sys) == doctest::Approx(coh));
  }
  CHECK(relaxation_rate(StateKind::Thermal, 1.0, sys) == doctest::Approx(4.7e6));
  CHECK(relaxation_rate(StateKind::Coherent, 1.0, sys) == doctest::Approx(3.87e6));
}

TEST_CASE("Ramsey envelope forms") {
  const auto sys = reference_system();
  for (auto form : {EnvelopeForm::AsymptoticRate, EnvelopeForm::GaussianIntegral}) {
    CHECK(ramsey_envelope(sys, StateKind::Thermal, 1.0, 0.0, form) == 1.0);
  }
  for (auto kind : {StateKind::Thermal, StateKind::Coherent, StateKind::ShotNoise}) {
    const double n = 0.8;
    const double t1 = 2e-6, t2 = 3e-6;
    const double slope = (std::log(ramsey_envelope(sys, kind, n, t2, EnvelopeForm::GaussianIntegral)) -
                          std::log(ramsey_envelope(sys, kind, n, t1, EnvelopeForm::GaussianIntegral))) /
                         (t2 - t1) / (-2 * std::numbers::pi);
    const double expected =
        relaxation_rate(kind, n, sys) / 2 + sys.qubit.intrinsic_dephasing + dephasing_rate(kind, n, sys);
    CHECK(slope == doctest::Approx(expected).epsilon(0.01));
    // Finite-time deficit: the Gaussian integral never dephases faster than the asymptotic rate.
    for (double tau = 0; tau < 1e-6; tau += 2e-8) {
      CHECK(ramsey_envelope(sys, kind, n, tau, EnvelopeForm::GaussianIntegral) >=
            ramsey_envelope(sys, kind, n, tau, EnvelopeForm::AsymptoticRate));
    }
    const double late = 5e-6;
    const double ratio = std::log(ramsey_envelope(sys, kind, n, late, EnvelopeForm::GaussianIntegral)) /
                         std::log(ramsey_envelope(sys, kind, n, late, EnvelopeForm::AsymptoticRate));
    CHECK(ratio == doctest::Approx(1.0).epsilon(0.01));
  }
  // Exponent additivity: rates add in the log of the envelope.
  const double tau = 1e-7;
  const double e0 = ramsey_envelope(sys, StateKind::Thermal, 0.0, tau, EnvelopeForm::AsymptoticRate);
  const double e1 = ramsey_envelope(sys, StateKind::Thermal, 0.4, tau, EnvelopeForm::AsymptoticRate);
  const double extra = kTwoPi * (dephasing_rate(StateKind::Thermal, 0.4, sys) +
                                 sys.qubit.relaxation_per_photon.thermal * 0.4 / 2) * tau;
  CHECK(std::log(e1) == doctest::Approx(std::log(e0) - extra));
}

TEST_CASE("Ramsey traces") {
  DispersiveSystem free = reference_system();
  free.qubit.intrinsic_relaxation = 0;
  free.qubit.intrinsic_dephasing = 0;
  free.qubit.relaxation_per_photon = {0, 0, 0};
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(i * 1e-8);
  const double f = default_fringe_detuning(grid);
  CHECK(f == doctest::Approx(5.0 / 49e-8));
  const auto pure = ramsey_probabilities(free, StateKind::Vacuum, 0.0, grid, f);
  for (const auto& p : pure) CHECK(p.p_excited == doctest::Approx(0.5 * (1 + std::cos(kTwoPi * f * p.tau))));

  const auto sys = reference_system();
  std::vector<double> long_grid;
  for (int i = 0; i < 200; ++i) long_grid.push_back(i * 1e-9);
  auto contrast = [&](double n) {
    const auto pts = ramsey_probabilities(sys, StateKind::Thermal, n, long_grid, 0.0);
    return pts[150].p_excited - 0.5;
  };
  // n at 1 K versus 50 mK for the 6.07 GHz line.
  const ModeSpec mode{6.07e9};
  CHECK(contrast(bose_einstein(mode, 1.0)) < 0.5 * contrast(bose_einstein(mode, 0.05)));

  const auto a = simulate_ramsey(sys, StateKind::Thermal, 0.5, long_grid, 2e7, 10000, 99);
  const auto b = simulate_ramsey(sys, StateKind::Thermal, 0.5, long_grid, 2e7, 10000, 99);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].p_excited == b[i].p_excited);
  CHECK_THROWS_AS(simulate_ramsey(sys, StateKind::Thermal, 0.5, long_grid, 2e7, 0, 1), DomainError);
}

TEST_CASE("simulated Ramsey trace: fitted gamma2 within 3 sigma") {
  const auto sys = reference_system();
  int covered = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const double n = 0.1 + 0.07 * t;
    const double gamma2 = relaxation_rate(StateKind::Thermal, n, sys) / 2 + sys.qubit.intrinsic_dephasing +
                          dephasing_rate(StateKind::Thermal, n, sys);
    std::vector<double> grid;
    const double tmax = 4.0 / (kTwoPi * gamma2);
    for (int i = 0; i < 401; ++i) grid.push_back(tmax * i / 400.0);
    const auto pts = simulate_ramsey(sys, StateKind::Thermal, n, grid, 5.0 / tmax, 10000, 1000 + t);
    std::vector<TracePoint> trace;
    for (const auto& p : pts) trace.push_back({p.tau, p.p_excited});
    const auto fit = fit_ramsey_binomial(trace, 10000);
    CHECK(fit.converged);
    if (std::abs(fit.value("gamma2") - gamma2) <= 3 * fit.standard_error("gamma2")) ++covered;
  }
  CHECK(covered >= trials - 1);
}
