// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mwstats/chains.hpp"
#include "mwstats/constants.hpp"
#include "mwstats/experiments.hpp"
#include "mwstats/parallel.hpp"
#include "mwstats/qubit.hpp"
#include "mwstats/states.hpp"
#include "oracles.hpp"

using namespace mwstats;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, double a, double b = NAN) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    if (!detail.empty()) detail += "; ";
    detail += buf;
    if (!ok) {
      detail += " [x]";
      pass = false;
    }
  }
};

bool within_rel(double v, double ref, double tol) { return std::abs(v / ref - 1) <= tol; }

Json results_of(const std::string& experiment) {
  static std::map<std::string, Json> cache;
  if (!cache.count(experiment)) {
    Json c = default_config();
    c["experiment"] = experiment;
    cache[experiment] = run_experiment(c).results;
  }
  return cache[experiment];
}

Outcome criterion1() {
  Outcome o;
  const double chi = dispersive_shift(67e6, 850e6, -315e6);
  o.require(within_rel(chi, -3.11e6, 0.01), "chi %.4g MHz", chi / 1e6);
  const double theta = accumulated_phase(chi, 8.5e6);
  o.require(within_rel(8.5e6 * theta * theta, 3.4e6, 0.02), "kappa theta0^2 %.4g MHz", 8.5 * theta * theta);
  const double ncrit = critical_photons(850e6, 67e6);
  o.require(within_rel(ncrit, 40, 0.02), "n_crit %.4g", ncrit);
  const double gp = purcell_rate(8.55e6, 67e6, 850e6);
  o.require(within_rel(gp, 53e3, 0.03), "gamma_P %.4g kHz", gp / 1e3);
  const double p = compression_power(14.9e6, 0.59).dbm;
  o.require(std::abs(p + 129) <= 0.3, "P1dB %.4g dBm", p);
  return o;
}

Outcome criterion2(const Json& r) {
  Outcome o;
  const double ratio = r["slope_ratio_coh_over_shot"].get<double>();
  o.require(std::abs(ratio - 2.0) <= 0.05, "s_coh/s_sh %.4f", ratio);
  const Json c = default_config();
  o.require(c["ramsey"]["n_points"].get<int>() == 12 && c["ramsey"]["shots"].get<int>() == 10000,
            "%.0f photon points, %.0f shots", c["ramsey"]["n_points"].get<double>(), c["ramsey"]["shots"].get<double>());
  return o;
}

Outcome criterion3(const Json& r) {
  Outcome o;
  const auto& th = r["states"]["thermal"];
  const double q = th["rho_over_xi"].get<double>();
  o.require(std::abs(q - 1.0) <= 0.05, "rho/xi %.4f", q);
  const double s2 = th["distinction"]["sigma_vs_n2"].get<double>();
  const double s1 = th["distinction"]["sigma_vs_n"].get<double>();
  o.require(s2 >= 5, "vs n^2 %.1f sigma", s2);
  o.require(s1 >= 5, "vs n %.1f sigma", s1);
  return o;
}

Outcome criterion4(const Json& r) {
  Outcome o;
  const double rho = r["rho"].get<double>();
  o.require(rho >= 1.9 && rho <= 2.1, "rho %.4f", rho);
  double z12 = NAN;
  for (const auto& l : r["invariance"]["levels"]) {
    if (l["chain_noise_photons"].get<double>() == 12.0) z12 = l["z"].get<double>();
  }
  o.require(z12 < 4, "shift at n_chain 12: %.2f sigma", z12);
  return o;
}

Outcome criterion5(const Json& r) {
  Outcome o;
  const double nn = r["n_n"].get<double>();
  const auto& th = r["variants"]["thermal"];
  o.require(std::abs(th["rho"].get<double>() - 2) <= 1e-9, "|rho - 2| %.2g", std::abs(th["rho"].get<double>() - 2));
  o.require(std::abs(th["xi"].get<double>() - (4 + 4 * nn)) <= 1e-9, "|xi - (4 + 4 n_n)| %.2g",
            std::abs(th["xi"].get<double>() - (4 + 4 * nn)));
  // Two-mode Fock brute force, truncation 80.
  double worst = 0;
  for (double G : {2.0, 5.0, 10.0}) {
    for (double nb : {0.0, 0.5, 1.0}) {
      for (double n_n : {0.0, 0.66, 1.0}) {
        const auto ana = amplify(nb, {G, n_n, NoiseStatistics::QuantumThermal});
        const auto ref = oracle::amplifier_fock(G, nb, n_n, 80);
        worst = std::max({worst, std::abs(ana.mean / ref.mean - 1), std::abs(ana.variance / ref.variance - 1)});
      }
    }
  }
  o.require(worst <= 1e-6, "Fock oracle worst rel. error %.2g", worst);
  const double lowered = th["offset"].get<double>() - r["variants"]["classical"]["offset"].get<double>();
  o.require(lowered > 0, "classical offset lowered by %.3f", lowered);
  o.require(!r["measured"].empty(), "measured comparison rows %.0f", static_cast<double>(r["measured"].size()));
  return o;
}

Outcome criterion6(const Json& r) {
  Outcome o;
  const double g0 = std::abs(r["noiseless"]["gain_rel_err"].get<double>());
  const double t0 = std::abs(r["noiseless"]["noise_temperature_rel_err"].get<double>());
  o.require(g0 <= 1e-9 && t0 <= 1e-9, "noiseless errors %.1g / %.1g", g0, t0);
  const double gn = r["noise_trials"]["gain_rms_rel_err"].get<double>();
  const double tn = r["noise_trials"]["noise_temperature_rms_rel_err"].get<double>();
  o.require(gn <= 0.02 && tn <= 0.02, "1%% noise rms %.3f / %.3f", gn, tn);
  for (const char* d : {"jpa1", "jpa2a", "jpa2b"}) {
    const double e = std::abs(r["devices"][d]["n_n_rel_err"].get<double>());
    o.require(e <= 0.05, (std::string(d) + " n_n error %.2g").c_str(), e);
  }
  return o;
}

Outcome criterion7(const Json& r) {
  Outcome o;
  const double z = r["max_abs_z"].get<double>();
  o.require(z <= 4, "max |z| %.2f", z);
  const double dev = r["max_contour_ratio_deviation"].get<double>();
  o.require(dev <= 1e-12, "contour ratio deviation %.1g", dev);
  return o;
}

Outcome criterion8() {
  Outcome o;
  const std::size_t n = 1000000;
  const int batches = 20;
  double worst = 0;
  for (double nth : {0.1, 0.5, 1.0, 1.5}) {
    const auto state = MicrowaveState::thermal(nth);
    const auto samples = sample_envelopes(state, n, derive_seed(20160, static_cast<std::uint64_t>(nth * 100)));
    const auto full = ordering_convert(empirical_moments(samples), Ordering::Normal);
    std::vector<MomentSet> parts;
    const std::size_t len = n / batches;
    for (int b = 0; b < batches; ++b) {
      parts.push_back(ordering_convert(
          empirical_moments(std::span<const Complex>(samples).subspan(b * len, len)), Ordering::Normal));
    }
    const auto fock = oracle::thermal_fock(nth, 60);
    for (const auto& [p, q] : MomentSet::keys()) {
      const Complex ref = oracle::normal_moment(fock, p, q);
      Complex mean = 0;
      for (const auto& m : parts) mean += m(p, q);
      mean /= static_cast<double>(batches);
      double vr = 0, vi = 0;
      for (const auto& m : parts) {
        vr += std::pow(m(p, q).real() - mean.real(), 2);
        vi += std::pow(m(p, q).imag() - mean.imag(), 2);
      }
      const double ser = std::sqrt(vr / (batches - 1) / batches), sei = std::sqrt(vi / (batches - 1) / batches);
      const Complex d = full(p, q) - ref;
      if (p + q == 0) continue;
      worst = std::max({worst, std::abs(d.real()) / ser, std::abs(d.imag()) / sei});
    }
  }
  o.require(worst <= 5, "worst deviation %.2f standard errors", worst);
  return o;
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* what;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items{
      {1, "parameter formulas", criterion1},
      {2, "factor-of-two law", [] { return criterion2(results_of("ramsey_sweep")); }},
      {3, "thermal super-Poissonian law", [] { return criterion3(results_of("ramsey_sweep")); }},
      {4, "dual-path rho and chain-noise invariance", [] { return criterion4(results_of("dualpath_sweep")); }},
      {5, "JPA-referred statistics", [] { return criterion5(results_of("jpa_sweep")); }},
      {6, "Planck calibration round trip", [] { return criterion6(results_of("planck_calibration")); }},
      {7, "quadratures and Wigner contours", [] { return criterion7(results_of("quadrature_check")); }},
      {8, "moment-oracle equivalence", criterion8},
  };
  int failed = 0;
  for (const auto& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s  %s (%s) [%.1f s]\n", it.id, o.pass ? "PASS" : "FAIL", it.what, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
