#include "mwstats/experiments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <map>
#include <tuple>
#include <sstream>

#include "mwstats/analysis.hpp"
#include "mwstats/cavity.hpp"
#include "mwstats/chains.hpp"
#include "mwstats/constants.hpp"
#include "mwstats/dualpath.hpp"
#include "mwstats/errors.hpp"
#include "mwstats/parallel.hpp"
#include "mwstats/qubit.hpp"
#include "mwstats/states.hpp"

#ifndef MWSTATS_VERSION
#define MWSTATS_VERSION "0.0.0"
#endif

namespace mwstats {

namespace {

// ---- config access ---------------------------------------------------------

const Json& node(const Json& c, std::initializer_list<const char*> path) {
  const Json* cur = &c;
  std::string where;
  for (const char* key : path) {
    where += where.empty() ? key : std::string(".") + key;
    if (!cur->is_object() || !cur->contains(key)) throw ConfigError(where, "missing");
    cur = &(*cur)[key];
  }
  return *cur;
}

std::string dotted(std::initializer_list<const char*> path) {
  std::string s;
  for (const char* k : path) s += s.empty() ? k : std::string(".") + k;
  return s;
}

double num(const Json& c, std::initializer_list<const char*> path) {
  return node(c, path).get<double>();
}

long long integer(const Json& c, std::initializer_list<const char*> path) {
  const double v = node(c, path).get<double>();
  if (v != std::floor(v)) throw ConfigError(dotted(path), "must be an integer");
  return static_cast<long long>(v);
}

std::string text(const Json& c, std::initializer_list<const char*> path) {
  return node(c, path).get<std::string>();
}

std::vector<double> numbers(const Json& c, std::initializer_list<const char*> path) {
  std::vector<double> out;
  for (const auto& v : node(c, path)) out.push_back(v.get<double>());
  return out;
}

void require(bool ok, std::initializer_list<const char*> path, const std::string& what) {
  if (!ok) throw ConfigError(dotted(path), what);
}

std::vector<double> linspace(double a, double b, long long n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

// ---- model construction ----------------------------------------------------

DispersiveSystem system_from(const Json& c) {
  QubitParams q;
  q.max_frequency = num(c, {"qubit", "max_frequency_ghz"}) * 1e9;
  q.coupling = num(c, {"qubit", "coupling_mhz"}) * 1e6;
  q.anharmonicity = num(c, {"qubit", "anharmonicity_mhz"}) * 1e6;
  q.intrinsic_relaxation = num(c, {"qubit", "intrinsic_relaxation_mhz"}) * 1e6;
  q.intrinsic_dephasing = num(c, {"qubit", "intrinsic_dephasing_mhz"}) * 1e6;
  q.relaxation_per_photon.thermal = num(c, {"qubit", "relaxation_per_photon_thermal_khz"}) * 1e3;
  q.relaxation_per_photon.coherent = num(c, {"qubit", "relaxation_per_photon_coherent_khz"}) * 1e3;
  q.relaxation_per_photon.shot = num(c, {"qubit", "relaxation_per_photon_shot_khz"}) * 1e3;
  Resonator r;
  r.resonance_frequency = num(c, {"resonator", "frequency_ghz"}) * 1e9;
  r.external_rate = num(c, {"resonator", "kappa_x_mhz"}) * 1e6;
  r.internal_rate = num(c, {"resonator", "kappa_i_khz"}) * 1e3;
  return DispersiveSystem::from_parameters(q, r);
}

EnvelopeForm envelope_form_from(const std::string& s) {
  if (s == "asymptotic") return EnvelopeForm::AsymptoticRate;
  if (s == "gaussian_integral") return EnvelopeForm::GaussianIntegral;
  if (s == "single_integral") return EnvelopeForm::SingleIntegral;
  throw ConfigError("ramsey.envelope_form", "expected asymptotic, gaussian_integral or single_integral");
}

bool weighted_laws(const Json& c) { return text(c, {"analysis", "law_fit_weighting"}) == "inverse_variance"; }

std::vector<StateKind> ramsey_kinds(const std::string& s) {
  if (s == "all") return {StateKind::Thermal, StateKind::Coherent, StateKind::ShotNoise};
  return {state_kind_from_string(s)};
}

std::array<double, 2> gain_pair(const Json& c, std::initializer_list<const char*> path) {
  const auto v = numbers(c, path);
  return {db_to_linear(v.at(0)), db_to_linear(v.at(1))};
}

LinearChain chain_from(const Json& c) {
  return LinearChain::from_db(num(c, {"planck", "chain_gain_db"}),
                              num(c, {"planck", "chain_noise_temperature_k"}),
                              num(c, {"planck", "bandwidth_khz"}) * 1e3);
}

// ---- output helpers --------------------------------------------------------

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) os_ << ',';
      os_ << h;
      first = false;
    }
    os_ << '\n';
  }
  Csv& cell(const std::string& s) {
    sep();
    os_ << s;
    return *this;
  }
  Csv& cell(double v) { return cell(format_double(v)); }
  Csv& cell(long long v) { return cell(std::to_string(v)); }
  Csv& cell(std::size_t v) { return cell(std::to_string(v)); }
  Csv& cell(bool v) { return cell(std::string(v ? "true" : "false")); }
  void end() {
    os_ << '\n';
    fresh_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  void sep() {
    if (!fresh_) os_ << ',';
    fresh_ = false;
  }
  std::ostringstream os_;
  bool fresh_ = true;
};

Json law_fit_json(const FitResult& f) { return fit_to_json(f); }

std::vector<LawPoint> as_law_points(const std::vector<LawPoint>& pts, bool weighted) {
  std::vector<LawPoint> out = pts;
  if (!weighted) {
    for (auto& p : out) p.sigma = 0.0;
  }
  return out;
}

/// sqrt(χ²_alt - χ²_true) over the points below `n_max`, each model being s·f(n) fitted
/// with inverse-variance weights.
Json distinction(const std::vector<LawPoint>& pts, double n_max) {
  struct Model {
    const char* name;
    double (*f)(double);
  };
  const Model models[] = {{"n2_plus_n", [](double n) { return n * n + n; }},
                          {"n2", [](double n) { return n * n; }},
                          {"n", [](double n) { return n; }}};
  std::vector<LawPoint> low;
  for (const auto& p : pts) {
    if (p.n < n_max && p.sigma > 0.0) low.push_back(p);
  }
  Json out;
  out["n_max"] = n_max;
  out["points"] = low.size();
  if (low.size() < 2) {
    out["note"] = "fewer than two weighted points below n_max";
    return out;
  }
  double chi2[3];
  for (int k = 0; k < 3; ++k) {
    double sxy = 0, sxx = 0;
    for (const auto& p : low) {
      const double f = models[k].f(p.n), w = 1.0 / (p.sigma * p.sigma);
      sxy += w * f * p.y;
      sxx += w * f * f;
    }
    const double s = sxy / sxx;
    double c2 = 0;
    for (const auto& p : low) {
      const double r = (p.y - s * models[k].f(p.n)) / p.sigma;
      c2 += r * r;
    }
    chi2[k] = c2;
    out["chi2_" + std::string(models[k].name)] = c2;
  }
  out["sigma_vs_n2"] = std::sqrt(std::max(0.0, chi2[1] - chi2[0]));
  out["sigma_vs_n"] = std::sqrt(std::max(0.0, chi2[2] - chi2[0]));
  return out;
}

// ---- experiments -----------------------------------------------------------

RunArtifacts run_variance_curves(const Json& c) {
  const auto grid = linspace(0.0, num(c, {"variance_curves", "n_max"}),
                             integer(c, {"variance_curves", "n_points"}));
  Csv csv({"state", "n", "sqrt_var"});
  struct Curve {
    const char* name;
    double (*var)(double);
  };
  const Curve curves[] = {
      {"thermal", [](double n) { return photon_variance(MicrowaveState::thermal(n)); }},
      {"classical", [](double n) { return photon_variance(MicrowaveState::thermal(n), true); }},
      {"coherent", [](double n) { return photon_variance(MicrowaveState::coherent(std::sqrt(n))); }},
      {"shot", [](double n) { return photon_variance(MicrowaveState::shot_noise(n)); }},
  };
  Json checks = Json::object();
  for (const auto& cv : curves) {
    for (double n : grid) csv.cell(std::string(cv.name)).cell(n).cell(std::sqrt(cv.var(n))).end();
    checks[cv.name] = std::sqrt(cv.var(1.0));
  }
  RunArtifacts a;
  a.files.emplace_back("variance_curves.csv", csv.str());
  a.results["points_per_curve"] = grid.size();
  a.results["sqrt_var_at_n1"] = std::move(checks);
  a.results["fits"] = Json::object();
  return a;
}

RunArtifacts run_ramsey_sweep(const Json& c) {
  const auto sys = system_from(c);
  const auto seed = static_cast<std::uint64_t>(integer(c, {"seed"}));
  const auto kinds = ramsey_kinds(text(c, {"ramsey", "state"}));
  const auto grid = linspace(num(c, {"ramsey", "n_min"}), num(c, {"ramsey", "n_max"}),
                             integer(c, {"ramsey", "n_points"}));
  const int shots = static_cast<int>(integer(c, {"ramsey", "shots"}));
  const auto tau_points = integer(c, {"ramsey", "tau_points"});
  const double decay_times = num(c, {"ramsey", "decay_times"});
  const double fringe_cycles = num(c, {"ramsey", "fringe_cycles"});
  const auto form = envelope_form_from(text(c, {"ramsey", "envelope_form"}));
  const bool weighted = weighted_laws(c);
  const double s0_expected = sys.resonator.external_rate * sys.theta0 * sys.theta0;

  Csv points({"state", "n_r", "gamma2_hz", "gamma2_err_hz", "gamma1_hz", "gamma_phi_n_hz",
              "gamma_phi_n_err_hz", "predicted_hz", "fit_converged", "negative_warning"});
  Csv traces({"state", "point", "n_r", "tau_s", "p_excited", "p_fit"});

  RunArtifacts a;
  Json fits = Json::object();
  Json per_state = Json::object();
  std::map<StateKind, double> slopes, slope_errors;
  int unconverged = 0;

  for (StateKind kind : kinds) {
    const auto kind_name = to_string(kind);
    std::vector<LawPoint> law;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double n = grid[i];
      const double g1 = relaxation_rate(kind, n, sys);
      const double g2_pred = g1 / 2.0 + sys.qubit.intrinsic_dephasing + dephasing_rate(kind, n, sys);
      const double tau_max = decay_times / (kTwoPi * g2_pred);
      const auto taus = linspace(0.0, tau_max, tau_points);
      const double fringe = fringe_cycles / tau_max;
      const auto stream = 1000u * static_cast<std::uint64_t>(kind) + i;
      const auto trace = simulate_ramsey(sys, kind, n, taus, fringe, shots, derive_seed(seed, stream), form);
      std::vector<TracePoint> tp;
      for (const auto& p : trace) tp.push_back({p.tau, p.p_excited});
      const auto fit = fit_ramsey_binomial(tp, shots);
      if (!fit.converged) ++unconverged;
      const double g2 = fit.value("gamma2");
      const double g2_err = fit.standard_error("gamma2");
      const auto d = extract_dephasing(g2, g1, sys.qubit.intrinsic_dephasing, g2_err);
      law.push_back({n, d.value, d.uncertainty});
      points.cell(kind_name).cell(n).cell(g2).cell(g2_err).cell(g1).cell(d.value).cell(d.uncertainty)
          .cell(dephasing_rate(kind, n, sys)).cell(fit.converged).cell(d.negative_warning).end();

      const double amp = fit.value("amplitude"), f = fit.value("frequency"),
                   off = fit.value("offset"), ph = fit.value("phase");
      for (const auto& p : trace) {
        const double model = off + amp * std::cos(kTwoPi * f * p.tau + ph) * std::exp(-kTwoPi * g2 * p.tau);
        traces.cell(kind_name).cell(i).cell(n).cell(p.tau).cell(p.p_excited).cell(model).end();
      }
    }

    const auto pts = as_law_points(law, weighted);
    Json sf;
    const auto lin = fit_variance_law(pts, VarianceModel::Linear);
    sf["linear"] = law_fit_json(lin);
    slopes[kind] = lin.value("s");
    slope_errors[kind] = lin.standard_error("s");
    Json st;
    st["slope_hz"] = lin.value("s");
    st["slope_err_hz"] = lin.standard_error("s");
    if (kind == StateKind::Thermal) {
      const auto qpl = fit_variance_law(pts, VarianceModel::QuadraticPlusLinear);
      sf["quadratic_plus_linear"] = law_fit_json(qpl);
      sf["pure_quadratic"] = law_fit_json(fit_variance_law(pts, VarianceModel::PureQuadratic));
      // s0 with the thermal law shape fixed.
      Eigen::MatrixXd X(static_cast<Eigen::Index>(pts.size()), 1);
      Eigen::VectorXd y(X.rows());
      std::vector<double> w;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        X(k, 0) = pts[i].n * pts[i].n + pts[i].n;
        y(k) = pts[i].y;
        if (weighted) w.push_back(1.0 / (pts[i].sigma * pts[i].sigma));
      }
      const auto s0 = linear_least_squares(X, y, {"s0"}, {w, true});
      sf["thermal_law_s0"] = law_fit_json(s0);
      sf["background"] = law_fit_json(fit_dephasing_background(pts));
      const double rho = qpl.value("rho"), xi = qpl.value("xi");
      const double rs = qpl.standard_error("rho") / rho, xs = qpl.standard_error("xi") / xi;
      const double corr = qpl.correlation()(0, 1);
      st["rho_hz"] = rho;
      st["xi_hz"] = xi;
      st["rho_over_xi"] = rho / xi;
      st["rho_over_xi_err"] = std::abs(rho / xi) * std::sqrt(std::max(0.0, rs * rs + xs * xs - 2 * corr * rs * xs));
      st["s0_hz"] = s0.value("s0");
      st["s0_err_hz"] = s0.standard_error("s0");
      st["s0_expected_hz"] = s0_expected;
      st["distinction"] = distinction(law, 0.5);
    }
    fits[kind_name] = std::move(sf);
    per_state[kind_name] = std::move(st);
  }

  a.files.emplace_back("ramsey_points.csv", points.str());
  a.files.emplace_back("ramsey_traces.csv", traces.str());
  Json r;
  r["chi_hz"] = sys.chi;
  r["theta0_rad"] = sys.theta0;
  r["s0_expected_hz"] = s0_expected;
  r["law_fit_weighting"] = weighted ? "inverse_variance" : "unweighted";
  r["unconverged_fits"] = unconverged;
  r["states"] = std::move(per_state);
  if (slopes.count(StateKind::Coherent) && slopes.count(StateKind::ShotNoise)) {
    const double sc = slopes[StateKind::Coherent], ss = slopes[StateKind::ShotNoise];
    const double ratio = sc / ss;
    r["slope_ratio_coh_over_shot"] = ratio;
    r["slope_ratio_err"] = std::abs(ratio) * std::hypot(slope_errors[StateKind::Coherent] / sc,
                                                        slope_errors[StateKind::ShotNoise] / ss);
  }
  r["fits"] = std::move(fits);
  a.results = std::move(r);
  return a;
}

RunArtifacts run_dualpath_sweep(const Json& c) {
  const auto seed = static_cast<std::uint64_t>(integer(c, {"seed"}));
  const ModeSpec mode{num(c, {"dualpath", "mode_frequency_ghz"}) * 1e9};
  const auto grid = linspace(num(c, {"dualpath", "n_min"}), num(c, {"dualpath", "n_max"}),
                             integer(c, {"dualpath", "n_points"}));
  const auto samples = static_cast<std::size_t>(integer(c, {"dualpath", "samples"}));
  const double nc = num(c, {"dualpath", "chain_noise_photons"});
  const auto gains = gain_pair(c, {"dualpath", "chain_gain_db"});
  const int batches = static_cast<int>(integer(c, {"dualpath", "batches"}));
  const double nv = num(c, {"dualpath", "vacuum_port_photons"});
  const bool weighted = weighted_laws(c);
  DetectionOptions opts;
  opts.vacuum_port_photons = nv;

  Csv points({"temperature_k", "n_true", "n_rec", "n_rec_err", "g2_rec", "g2_rec_err", "g2_expected",
              "var_q", "var_p"});
  Json table = Json::array();
  std::vector<LawPoint> law;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double n = grid[i];
    const double temp = effective_temperature(mode, n);
    const auto state = MicrowaveState::thermal(bose_einstein(mode, temp));
    const auto rec = simulate_detection(state, {nc, nc}, gains, samples, derive_seed(seed, 100 + i), opts);
    const auto r = reconstruct_with_errors(rec, batches, nv);
    const auto q = quadrature_variances(r.moments);
    law.push_back({r.photon_number(), r.g2(), r.g2_error()});
    points.cell(temp).cell(state.mean_photons()).cell(r.photon_number()).cell(r.photon_number_error())
        .cell(r.g2()).cell(r.g2_error()).cell(2 * state.mean_photons() * state.mean_photons())
        .cell(q.var_q).cell(q.var_p).end();
    Json e;
    e["temperature_k"] = temp;
    e["n_true"] = state.mean_photons();
    e["moments"] = moments_to_json(r.moments);
    e["standard_errors"] = moments_to_json(r.standard_errors);
    e["cross_moments"] = cross_moments_to_json(cross_moments(rec));
    table.push_back(std::move(e));
  }
  const auto pts = as_law_points(law, weighted);
  const auto pq = fit_variance_law(pts, VarianceModel::PureQuadratic);
  const auto qpl = fit_variance_law(pts, VarianceModel::QuadraticPlusLinear);

  // Same seed at every noise level, so only the chain-noise streams differ.
  const double n_inv = num(c, {"dualpath", "invariance_n"});
  const auto levels = numbers(c, {"dualpath", "invariance_noise_photons"});
  Csv inv({"chain_noise_photons", "n_rec", "n_rec_err", "shift", "shift_sigma", "z"});
  Json inv_json = Json::array();
  double ref = 0, ref_err = 0, max_z = 0;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const auto rec = simulate_detection(MicrowaveState::thermal(n_inv), {levels[k], levels[k]}, gains,
                                        samples, derive_seed(seed, 900), opts);
    const auto r = reconstruct_with_errors(rec, batches, nv);
    if (k == 0) {
      ref = r.photon_number();
      ref_err = r.photon_number_error();
    }
    const double shift = r.photon_number() - ref;
    const double sig = std::hypot(ref_err, r.photon_number_error());
    const double z = k == 0 ? 0.0 : std::abs(shift) / sig;
    max_z = std::max(max_z, z);
    inv.cell(levels[k]).cell(r.photon_number()).cell(r.photon_number_error()).cell(shift).cell(sig).cell(z).end();
    Json e;
    e["chain_noise_photons"] = levels[k];
    e["n_rec"] = r.photon_number();
    e["n_rec_err"] = r.photon_number_error();
    e["z"] = z;
    inv_json.push_back(std::move(e));
  }

  RunArtifacts a;
  a.files.emplace_back("dualpath_points.csv", points.str());
  a.files.emplace_back("invariance.csv", inv.str());
  Json mj;
  mj["points"] = std::move(table);
  a.files.emplace_back("moments.json", mj.dump(2) + "\n");

  if (node(c, {"dualpath", "export_record"}).get<bool>()) {
    const auto rec = simulate_detection(MicrowaveState::thermal(grid.front()), {nc, nc}, gains, samples,
                                        derive_seed(seed, 100), opts);
    std::string bin;
    bin.reserve(rec.size() * 32);
    for (std::size_t i = 0; i < rec.size(); ++i) {
      for (double v : {rec.envelopes_1[i].real(), rec.envelopes_1[i].imag(), rec.envelopes_2[i].real(),
                       rec.envelopes_2[i].imag()}) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) bin.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
      }
    }
    Json side;
    side["N"] = rec.size();
    side["gains"] = {rec.chain_gains[0], rec.chain_gains[1]};
    side["if_frequency"] = rec.if_frequency;
    side["seed"] = rec.seed;
    a.files.emplace_back("record.bin", std::move(bin));
    a.files.emplace_back("record.json", side.dump(2) + "\n");
  }

  Json r;
  r["samples_per_point"] = samples;
  r["chain_noise_photons"] = nc;
  r["law_fit_weighting"] = weighted ? "inverse_variance" : "unweighted";
  r["rho"] = pq.value("rho");
  r["rho_err"] = pq.standard_error("rho");
  r["qpl_rho"] = qpl.value("rho");
  r["qpl_xi"] = qpl.value("xi");
  Json ij;
  ij["n"] = n_inv;
  ij["levels"] = std::move(inv_json);
  ij["max_z"] = max_z;
  r["invariance"] = std::move(ij);
  Json fits;
  fits["pure_quadratic"] = law_fit_json(pq);
  fits["quadratic_plus_linear"] = law_fit_json(qpl);
  r["fits"] = std::move(fits);
  a.results = std::move(r);
  return a;
}

struct MeasuredRun {
  const char* device;
  double gain_db, n_n, rho, xi, offset;
};
// Measured values for the three amplifier runs.
constexpr MeasuredRun kMeasuredRuns[] = {
    {"jpa1", 14.3, 1.47, 2.24, 8.14, 7.1},
    {"jpa2a", 15.8, 0.66, 2.23, 3.29, 1.1},
    {"jpa2b", 15.2, 0.97, 2.21, 3.29, 1.8},
};

std::vector<NoiseStatistics> jpa_variants(const std::string& s) {
  if (s == "all") {
    return {NoiseStatistics::QuantumThermal, NoiseStatistics::Classical,
            NoiseStatistics::ClassicalCommutatorFree};
  }
  return {noise_statistics_from_string(s)};
}

/// ρ, ξ from a fit of g̃²/G² - offset over the n_jpa grid.
std::pair<FitResult, double> referred_fit(const JpaStage& stage, const std::vector<double>& grid, bool exact) {
  std::vector<LawPoint> pts;
  double offset = 0;
  for (double n : grid) {
    const auto g = exact ? g2_jpa_referred_exact(n, stage) : g2_jpa_referred(n, stage);
    offset = g.offset;
    pts.push_back({n, g.g2 - g.offset, 0.0});
  }
  return {fit_variance_law(pts, VarianceModel::QuadraticPlusLinear), offset};
}

RunArtifacts run_jpa_sweep(const Json& c) {
  const double gain_db = num(c, {"jpa", "gain_db"});
  const double nn = num(c, {"jpa", "n_n"});
  const auto variants = jpa_variants(text(c, {"jpa", "noise_statistics"}));
  const auto grid = linspace(0.0, num(c, {"jpa", "n_max"}), integer(c, {"jpa", "n_points"}));

  Csv sweep({"noise_statistics", "n_jpa", "g2_referred", "offset", "g2_referred_finite_gain",
             "offset_finite_gain"});
  Csv cmp({"device", "noise_statistics", "gain_db", "n_n", "rho", "xi", "offset", "xi_thermal_closed_form",
           "rho_finite_gain", "xi_finite_gain", "offset_finite_gain", "measured_rho", "measured_xi",
           "measured_offset"});
  Json variants_json = Json::object();
  Json fits = Json::object();

  auto add_row = [&](const char* device, double gdb, double n_n, NoiseStatistics ns,
                     const MeasuredRun* measured) {
    const auto stage = JpaStage::from_db(gdb, n_n, ns);
    const auto [f, off] = referred_fit(stage, grid, false);
    const auto [fe, offe] = referred_fit(stage, grid, true);
    cmp.cell(std::string(device)).cell(to_string(ns)).cell(gdb).cell(n_n).cell(f.value("rho"))
        .cell(f.value("xi")).cell(off).cell(4 + 4 * n_n).cell(fe.value("rho")).cell(fe.value("xi"))
        .cell(offe);
    if (measured) {
      cmp.cell(measured->rho).cell(measured->xi).cell(measured->offset);
    } else {
      cmp.cell(std::string()).cell(std::string()).cell(std::string());
    }
    cmp.end();
    return std::make_tuple(f, off, fe, offe);
  };

  for (NoiseStatistics ns : variants) {
    const auto stage = JpaStage::from_db(gain_db, nn, ns);
    for (double n : grid) {
      const auto g = g2_jpa_referred(n, stage);
      const auto ge = g2_jpa_referred_exact(n, stage);
      sweep.cell(to_string(ns)).cell(n).cell(g.g2).cell(g.offset).cell(ge.g2).cell(ge.offset).end();
    }
    const auto [f, off, fe, offe] = add_row("configured", gain_db, nn, ns, nullptr);
    Json v;
    v["rho"] = f.value("rho");
    v["xi"] = f.value("xi");
    v["offset"] = off;
    v["rho_finite_gain"] = fe.value("rho");
    v["xi_finite_gain"] = fe.value("xi");
    v["offset_finite_gain"] = offe;
    v["xi_thermal_closed_form"] = 4 + 4 * nn;
    v["offset_thermal_closed_form"] = 2 * (nn + 1) * (nn + 1);
    v["low_gain"] = stage.gain < 10.0;
    variants_json[to_string(ns)] = std::move(v);
    fits[to_string(ns)] = law_fit_json(f);
  }
  Json measured = Json::array();
  for (const auto& m : kMeasuredRuns) {
    for (NoiseStatistics ns : variants) add_row(m.device, m.gain_db, m.n_n, ns, &m);
    Json e;
    e["device"] = m.device;
    e["gain_db"] = m.gain_db;
    e["n_n"] = m.n_n;
    e["rho"] = m.rho;
    e["xi"] = m.xi;
    e["offset"] = m.offset;
    measured.push_back(std::move(e));
  }

  RunArtifacts a;
  a.files.emplace_back("jpa_sweep.csv", sweep.str());
  a.files.emplace_back("jpa_comparison.csv", cmp.str());
  Json r;
  r["gain_db"] = gain_db;
  r["n_n"] = nn;
  r["variants"] = std::move(variants_json);
  r["measured"] = std::move(measured);
  r["fits"] = std::move(fits);
  a.results = std::move(r);
  return a;
}

RunArtifacts run_planck_calibration(const Json& c) {
  const auto seed = static_cast<std::uint64_t>(integer(c, {"seed"}));
  const ModeSpec mode{num(c, {"planck", "mode_frequency_ghz"}) * 1e9};
  const auto chain = chain_from(c);
  const auto temps = linspace(num(c, {"planck", "t_min_k"}), num(c, {"planck", "t_max_k"}),
                              integer(c, {"planck", "n_points"}));
  const double noise = num(c, {"planck", "relative_noise"});
  const auto trials = integer(c, {"planck", "noise_trials"});

  const auto clean = synthetic_planck_sweep(mode, chain, temps);
  const auto noisy = synthetic_planck_sweep(mode, chain, temps, {noise, derive_seed(seed, 1)});
  const auto f0 = planck_fit(clean);
  const auto f1 = planck_fit(noisy);

  Csv chain_csv({"temperature_k", "power_w", "power_noisy_w", "model_w", "model_noisy_w"});
  LinearChain fitted0{f0.gain, f0.noise_temperature, chain.bandwidth};
  LinearChain fitted1{f1.gain, f1.noise_temperature, chain.bandwidth};
  for (std::size_t i = 0; i < temps.size(); ++i) {
    chain_csv.cell(temps[i]).cell(clean.points[i].power).cell(noisy.points[i].power)
        .cell(planck_power(fitted0, mode, temps[i])).cell(planck_power(fitted1, mode, temps[i])).end();
  }

  // Scatter of repeated noisy fits against the reported standard errors.
  std::vector<double> eg(static_cast<std::size_t>(trials)), et(eg.size()), zg(eg.size()), zt(eg.size());
  parallel_for_blocks(eg.size(), [&](std::size_t t) {
    const auto f = planck_fit(synthetic_planck_sweep(mode, chain, temps, {noise, derive_seed(seed, 1000 + t)}));
    eg[t] = f.gain / chain.gain - 1;
    et[t] = f.noise_temperature / chain.noise_temperature - 1;
    zg[t] = (f.gain - chain.gain) / f.gain_error;
    zt[t] = (f.noise_temperature - chain.noise_temperature) / f.noise_temperature_error;
  });
  Csv trials_csv({"trial", "gain_rel_err", "noise_temperature_rel_err", "gain_z", "noise_temperature_z"});
  double rg = 0, rt = 0, szg = 0, szt = 0;
  for (std::size_t t = 0; t < eg.size(); ++t) {
    trials_csv.cell(t).cell(eg[t]).cell(et[t]).cell(zg[t]).cell(zt[t]).end();
    rg += eg[t] * eg[t];
    rt += et[t] * et[t];
    szg += zg[t] * zg[t];
    szt += zt[t] * zt[t];
  }
  const double nt = static_cast<double>(std::max<long long>(trials, 1));

  const double fit_max = num(c, {"planck", "fit_range_max_k"});
  const double smooth = num(c, {"planck", "saturation_smoothness"});
  const double jpa_noise = num(c, {"planck", "jpa_relative_noise"});
  Csv jpa_csv({"device", "temperature_k", "power_w", "fitted_line_w"});
  Json devices = Json::object();
  Json fits = Json::object();
  fits["chain_noiseless"] = fit_to_json(f0.raw);
  fits["chain_noisy"] = fit_to_json(f1.raw);
  std::uint64_t dev_index = 0;
  for (const auto& [name, d] : node(c, {"planck", "devices"}).items()) {
    const ModeSpec dm{d.at("mode_frequency_ghz").get<double>() * 1e9};
    const auto jpa = JpaStage::from_db(d.at("gain_db").get<double>(), d.at("n_n").get<double>());
    const double kx = d.at("kappa_x_mhz").get<double>() * 1e6;
    const JpaSaturation sat{d.at("t_1db_k").get<double>(), smooth};
    const auto sw = synthetic_jpa_sweep(dm, chain, jpa, temps, sat, {jpa_noise, derive_seed(seed, 50 + dev_index++)});
    const auto jf = jpa_planck_fit(sw, fit_max, chain, kx);
    const double unit = chain.gain * chain.bandwidth * kPlanck * dm.frequency;
    const double nch = chain_noise_photons(dm, chain.noise_temperature);
    for (const auto& p : sw.points) {
      const double line = unit * (jf.gain * bose_einstein(dm, p.temperature) +
                                  (jf.gain - 1) * (jf.noise_photons + 1) + 0.5 + nch);
      jpa_csv.cell(name).cell(p.temperature).cell(p.power).cell(line).end();
    }
    Json e;
    e["gain_db_injected"] = jpa.gain_db();
    e["n_n_injected"] = jpa.added_noise_photons;
    e["t_1db_injected_k"] = sat.t_1db;
    e["gain_db"] = jf.gain_db;
    e["n_n"] = jf.noise_photons;
    e["n_n_err"] = jf.noise_photons_error;
    e["n_n_rel_err"] = jf.noise_photons / jpa.added_noise_photons - 1;
    e["points_used"] = jf.points_used;
    e["compression_found"] = jf.compression.found;
    if (jf.compression.found) {
      e["t_1db_k"] = jf.compression.t_1db;
      e["p_1db_dbm"] = jf.compression.power.dbm;
    } else {
      e["compression_note"] = jf.compression.note;
    }
    devices[name] = std::move(e);
    fits[name] = fit_to_json(jf.raw);
  }

  RunArtifacts a;
  a.files.emplace_back("planck_chain.csv", chain_csv.str());
  a.files.emplace_back("planck_noise_trials.csv", trials_csv.str());
  a.files.emplace_back("planck_jpa.csv", jpa_csv.str());
  Json r;
  r["gain_db_injected"] = chain.gain_db();
  r["noise_temperature_injected_k"] = chain.noise_temperature;
  Json nl;
  nl["gain_db"] = f0.gain_db;
  nl["gain_rel_err"] = f0.gain / chain.gain - 1;
  nl["noise_temperature_k"] = f0.noise_temperature;
  nl["noise_temperature_rel_err"] = f0.noise_temperature / chain.noise_temperature - 1;
  r["noiseless"] = std::move(nl);
  Json ny;
  ny["relative_noise"] = noise;
  ny["gain_db"] = f1.gain_db;
  ny["gain_rel_err"] = f1.gain / chain.gain - 1;
  ny["gain_rel_sigma"] = f1.gain_error / f1.gain;
  ny["noise_temperature_k"] = f1.noise_temperature;
  ny["noise_temperature_rel_err"] = f1.noise_temperature / chain.noise_temperature - 1;
  ny["noise_temperature_rel_sigma"] = f1.noise_temperature_error / f1.noise_temperature;
  r["noisy"] = std::move(ny);
  Json tr;
  tr["trials"] = trials;
  tr["gain_rms_rel_err"] = std::sqrt(rg / nt);
  tr["noise_temperature_rms_rel_err"] = std::sqrt(rt / nt);
  tr["gain_rms_z"] = std::sqrt(szg / nt);
  tr["noise_temperature_rms_z"] = std::sqrt(szt / nt);
  r["noise_trials"] = std::move(tr);
  r["fit_range_max_k"] = fit_max;
  r["devices"] = std::move(devices);
  r["fits"] = std::move(fits);
  a.results = std::move(r);
  return a;
}

RunArtifacts run_quadrature_check(const Json& c) {
  const auto seed = static_cast<std::uint64_t>(integer(c, {"seed"}));
  const auto ns = numbers(c, {"quadrature", "photon_numbers"});
  const auto samples = static_cast<std::size_t>(integer(c, {"quadrature", "samples"}));
  const double nc = num(c, {"quadrature", "chain_noise_photons"});
  const auto gains = gain_pair(c, {"quadrature", "chain_gain_db"});
  const int batches = static_cast<int>(integer(c, {"quadrature", "batches"}));

  Csv csv({"n", "var_q", "var_q_err", "var_p", "var_p_err", "expected", "z_q", "z_p", "z_pq",
           "contour_ratio", "contour_ratio_expected"});
  Json pts = Json::array();
  double max_z = 0, max_contour_dev = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double n = ns[i];
    const auto rec = simulate_detection(MicrowaveState::thermal(n), {nc, nc}, gains, samples,
                                        derive_seed(seed, 200 + i));
    const auto r = reconstruct_with_errors(rec, batches);
    const auto q = quadrature_variances(r.moments);
    const double eq = batch_standard_error(r, [](const MomentSet& m) { return quadrature_variances(m).var_q; });
    const double ep = batch_standard_error(r, [](const MomentSet& m) { return quadrature_variances(m).var_p; });
    const double epq = batch_standard_error(r, [](const MomentSet& m) {
      const auto v = quadrature_variances(m);
      return v.var_p - v.var_q;
    });
    const double expected = n / 2 + 0.25;
    const double zq = (q.var_q - expected) / eq, zp = (q.var_p - expected) / ep,
                 zpq = (q.var_p - q.var_q) / epq;
    const double ratio = wigner_gaussian_contour(n) / wigner_gaussian_contour(0.0);
    const double ratio_expected = std::sqrt(2 * n + 1);
    max_z = std::max({max_z, std::abs(zq), std::abs(zp), std::abs(zpq)});
    max_contour_dev = std::max(max_contour_dev, std::abs(ratio - ratio_expected));
    csv.cell(n).cell(q.var_q).cell(eq).cell(q.var_p).cell(ep).cell(expected).cell(zq).cell(zp).cell(zpq)
        .cell(ratio).cell(ratio_expected).end();
    Json e;
    e["n"] = n;
    e["var_q"] = q.var_q;
    e["var_p"] = q.var_p;
    e["z_q"] = zq;
    e["z_p"] = zp;
    e["z_pq"] = zpq;
    e["contour_ratio"] = ratio;
    pts.push_back(std::move(e));
  }
  RunArtifacts a;
  a.files.emplace_back("quadrature.csv", csv.str());
  Json r;
  r["samples_per_point"] = samples;
  r["chain_noise_photons"] = nc;
  r["points"] = std::move(pts);
  r["max_abs_z"] = max_z;
  r["max_contour_ratio_deviation"] = max_contour_dev;
  r["fits"] = Json::object();
  a.results = std::move(r);
  return a;
}

// ---- merge / validation ------------------------------------------------------

const char* type_name(const Json& j) {
  if (j.is_boolean()) return "boolean";
  if (j.is_number()) return "number";
  if (j.is_string()) return "string";
  if (j.is_array()) return "array";
  if (j.is_object()) return "object";
  return "null";
}

void merge_at(Json& base, const Json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) throw ConfigError(path, "unknown key");
    Json& target = base[key];
    if (target.is_object()) {
      merge_at(target, value, path);
      continue;
    }
    if (std::string(type_name(target)) != type_name(value)) {
      throw ConfigError(path, std::string("expected ") + type_name(target) + ", got " + type_name(value));
    }
    if (target.is_array() && !target.empty()) {
      for (const auto& el : value) {
        if (std::string(type_name(el)) != type_name(target.front())) {
          throw ConfigError(path, std::string("array elements must be ") + type_name(target.front()));
        }
      }
    }
    target = value;
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"variance_curves", "ramsey_sweep", "dualpath_sweep",
                                              "jpa_sweep", "planck_calibration", "quadrature_check"};
  return names;
}

std::string version_string() { return MWSTATS_VERSION; }

Json default_config() {
  return Json::parse(R"({
  "experiment": "variance_curves",
  "seed": 20160,
  "output_dir": "",
  "threads": 0,
  "qubit": {
    "max_frequency_ghz": 6.92,
    "coupling_mhz": 67.0,
    "anharmonicity_mhz": -315.0,
    "intrinsic_relaxation_mhz": 3.9,
    "intrinsic_dephasing_mhz": 0.05,
    "relaxation_per_photon_thermal_khz": 800.0,
    "relaxation_per_photon_coherent_khz": -30.0,
    "relaxation_per_photon_shot_khz": -30.0
  },
  "resonator": {
    "frequency_ghz": 6.07,
    "kappa_x_mhz": 8.5,
    "kappa_i_khz": 50.0
  },
  "analysis": {
    "law_fit_weighting": "unweighted"
  },
  "variance_curves": {
    "n_max": 10.0,
    "n_points": 101
  },
  "ramsey": {
    "state": "all",
    "n_points": 12,
    "n_min": 0.05,
    "n_max": 1.5,
    "shots": 10000,
    "tau_points": 401,
    "decay_times": 4.0,
    "fringe_cycles": 5.0,
    "envelope_form": "asymptotic"
  },
  "dualpath": {
    "n_points": 10,
    "n_min": 0.1,
    "n_max": 1.5,
    "samples": 1000000,
    "batches": 20,
    "chain_noise_photons": 0.0,
    "chain_gain_db": [0.0, 3.0],
    "vacuum_port_photons": 0.0,
    "mode_frequency_ghz": 5.4,
    "invariance_n": 1.0,
    "invariance_noise_photons": [0.0, 5.0, 12.0],
    "export_record": false
  },
  "jpa": {
    "gain_db": 15.8,
    "n_n": 0.66,
    "noise_statistics": "all",
    "n_points": 21,
    "n_max": 2.0
  },
  "planck": {
    "mode_frequency_ghz": 5.4,
    "bandwidth_khz": 400.0,
    "chain_gain_db": 145.0,
    "chain_noise_temperature_k": 3.0,
    "t_min_k": 0.05,
    "t_max_k": 1.5,
    "n_points": 100,
    "relative_noise": 0.01,
    "noise_trials": 100,
    "jpa_relative_noise": 0.0,
    "fit_range_max_k": 0.2,
    "saturation_smoothness": 40.0,
    "devices": {
      "jpa1": {"gain_db": 14.3, "n_n": 1.47, "mode_frequency_ghz": 5.4, "kappa_x_mhz": 18.7, "t_1db_k": 0.0},
      "jpa2a": {"gain_db": 15.8, "n_n": 0.66, "mode_frequency_ghz": 5.4, "kappa_x_mhz": 14.9, "t_1db_k": 0.59},
      "jpa2b": {"gain_db": 15.2, "n_n": 0.97, "mode_frequency_ghz": 5.3, "kappa_x_mhz": 14.6, "t_1db_k": 0.44}
    }
  },
  "quadrature": {
    "photon_numbers": [0.1, 1.0],
    "samples": 1000000,
    "batches": 20,
    "chain_noise_photons": 5.0,
    "chain_gain_db": [0.0, 3.0]
  }
})");
}

void merge_config(Json& base, const Json& patch) { merge_at(base, patch, ""); }

Json read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string body = ss.str();
  try {
    return Json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, body.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (body[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path.string() + ":" + std::to_string(line) + ":" + std::to_string(col), e.what());
  }
}

void validate_config(const Json& c) {
  const auto exp = text(c, {"experiment"});
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), exp) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("experiment", "unknown experiment '" + exp + "' (expected one of " + list + ")");
  }
  require(integer(c, {"seed"}) >= 0, {"seed"}, "must be >= 0");
  require(integer(c, {"threads"}) >= 0, {"threads"}, "must be >= 0");
  const auto weighting = text(c, {"analysis", "law_fit_weighting"});
  require(weighting == "unweighted" || weighting == "inverse_variance", {"analysis", "law_fit_weighting"},
          "expected unweighted or inverse_variance");

  auto positive = [&](std::initializer_list<const char*> p) { require(num(c, p) > 0, p, "must be > 0"); };
  auto nonneg = [&](std::initializer_list<const char*> p) { require(num(c, p) >= 0, p, "must be >= 0"); };
  auto at_least = [&](std::initializer_list<const char*> p, long long lo) {
    require(integer(c, p) >= lo, p, "must be an integer >= " + std::to_string(lo));
  };
  auto range = [&](std::initializer_list<const char*> lo, std::initializer_list<const char*> hi) {
    require(num(c, hi) > num(c, lo), hi, "must exceed " + dotted(lo));
  };

  if (exp == "variance_curves") {
    positive({"variance_curves", "n_max"});
    at_least({"variance_curves", "n_points"}, 2);
  } else if (exp == "ramsey_sweep") {
    try {
      system_from(c);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError("qubit", e.what());
    }
    const auto st = text(c, {"ramsey", "state"});
    require(st == "all" || st == "thermal" || st == "coherent" || st == "shot", {"ramsey", "state"},
            "expected all, thermal, coherent or shot");
    positive({"ramsey", "n_min"});
    range({"ramsey", "n_min"}, {"ramsey", "n_max"});
    at_least({"ramsey", "n_points"}, 3);
    at_least({"ramsey", "shots"}, 1);
    at_least({"ramsey", "tau_points"}, 8);
    positive({"ramsey", "decay_times"});
    positive({"ramsey", "fringe_cycles"});
    envelope_form_from(text(c, {"ramsey", "envelope_form"}));
  } else if (exp == "dualpath_sweep") {
    positive({"dualpath", "n_min"});
    range({"dualpath", "n_min"}, {"dualpath", "n_max"});
    at_least({"dualpath", "n_points"}, 3);
    at_least({"dualpath", "batches"}, 2);
    require(integer(c, {"dualpath", "samples"}) >= 2 * integer(c, {"dualpath", "batches"}),
            {"dualpath", "samples"}, "must be at least two samples per batch");
    nonneg({"dualpath", "chain_noise_photons"});
    nonneg({"dualpath", "vacuum_port_photons"});
    positive({"dualpath", "mode_frequency_ghz"});
    nonneg({"dualpath", "invariance_n"});
    require(numbers(c, {"dualpath", "chain_gain_db"}).size() == 2, {"dualpath", "chain_gain_db"},
            "must hold two values");
    const auto lv = numbers(c, {"dualpath", "invariance_noise_photons"});
    require(!lv.empty(), {"dualpath", "invariance_noise_photons"}, "must not be empty");
    for (double v : lv) require(v >= 0, {"dualpath", "invariance_noise_photons"}, "must be >= 0");
  } else if (exp == "jpa_sweep") {
    require(num(c, {"jpa", "gain_db"}) >= 0, {"jpa", "gain_db"}, "gain must be >= 0 dB (G >= 1)");
    nonneg({"jpa", "n_n"});
    const auto s = text(c, {"jpa", "noise_statistics"});
    if (s != "all") {
      try {
        noise_statistics_from_string(s);
      } catch (const std::exception& e) {
        throw ConfigError("jpa.noise_statistics", e.what());
      }
    }
    at_least({"jpa", "n_points"}, 3);
    positive({"jpa", "n_max"});
  } else if (exp == "planck_calibration") {
    positive({"planck", "mode_frequency_ghz"});
    positive({"planck", "bandwidth_khz"});
    nonneg({"planck", "chain_noise_temperature_k"});
    positive({"planck", "t_min_k"});
    range({"planck", "t_min_k"}, {"planck", "t_max_k"});
    at_least({"planck", "n_points"}, 4);
    nonneg({"planck", "relative_noise"});
    at_least({"planck", "noise_trials"}, 0);
    nonneg({"planck", "jpa_relative_noise"});
    positive({"planck", "fit_range_max_k"});
    require(num(c, {"planck", "fit_range_max_k"}) < num(c, {"planck", "t_max_k"}), {"planck", "fit_range_max_k"},
            "sweep must extend beyond the fit range");
    positive({"planck", "saturation_smoothness"});
    for (const auto& [name, d] : node(c, {"planck", "devices"}).items()) {
      const std::string base = "planck.devices." + name;
      for (const char* key : {"gain_db", "n_n", "mode_frequency_ghz", "kappa_x_mhz", "t_1db_k"}) {
        if (!d.contains(key) || !d[key].is_number()) throw ConfigError(base + "." + key, "missing or not a number");
      }
      if (d.at("gain_db").get<double>() < 0) throw ConfigError(base + ".gain_db", "must be >= 0");
      if (d.at("n_n").get<double>() < 0) throw ConfigError(base + ".n_n", "must be >= 0");
      if (d.at("mode_frequency_ghz").get<double>() <= 0) throw ConfigError(base + ".mode_frequency_ghz", "must be > 0");
      if (d.at("kappa_x_mhz").get<double>() <= 0) throw ConfigError(base + ".kappa_x_mhz", "must be > 0");
      if (d.at("t_1db_k").get<double>() < 0) throw ConfigError(base + ".t_1db_k", "must be >= 0");
    }
  } else if (exp == "quadrature_check") {
    const auto ns = numbers(c, {"quadrature", "photon_numbers"});
    require(!ns.empty(), {"quadrature", "photon_numbers"}, "must not be empty");
    for (double v : ns) require(v >= 0, {"quadrature", "photon_numbers"}, "must be >= 0");
    at_least({"quadrature", "batches"}, 2);
    require(integer(c, {"quadrature", "samples"}) >= 2 * integer(c, {"quadrature", "batches"}),
            {"quadrature", "samples"}, "must be at least two samples per batch");
    nonneg({"quadrature", "chain_noise_photons"});
    require(numbers(c, {"quadrature", "chain_gain_db"}).size() == 2, {"quadrature", "chain_gain_db"},
            "must hold two values");
  }
}

RunArtifacts run_experiment(const Json& config) {
  validate_config(config);
  set_max_threads(static_cast<unsigned>(integer(config, {"threads"})));
  const auto exp = text(config, {"experiment"});
  RunArtifacts a;
  if (exp == "variance_curves") a = run_variance_curves(config);
  else if (exp == "ramsey_sweep") a = run_ramsey_sweep(config);
  else if (exp == "dualpath_sweep") a = run_dualpath_sweep(config);
  else if (exp == "jpa_sweep") a = run_jpa_sweep(config);
  else if (exp == "planck_calibration") a = run_planck_calibration(config);
  else a = run_quadrature_check(config);

  Json results;
  results["experiment"] = exp;
  results["seed"] = config.at("seed");
  Json fits = a.results.contains("fits") ? a.results["fits"] : Json::object();
  a.results.erase("fits");
  for (auto& [k, v] : a.results.items()) results[k] = v;
  a.results = std::move(results);
  a.files.emplace_back("fits.json", fits.dump(2) + "\n");
  return a;
}

std::vector<std::string> expected_files(const std::string& experiment) {
  std::vector<std::string> f;
  if (experiment == "variance_curves") f = {"variance_curves.csv"};
  else if (experiment == "ramsey_sweep") f = {"ramsey_points.csv", "ramsey_traces.csv"};
  else if (experiment == "dualpath_sweep") f = {"dualpath_points.csv", "invariance.csv", "moments.json"};
  else if (experiment == "jpa_sweep") f = {"jpa_sweep.csv", "jpa_comparison.csv"};
  else if (experiment == "planck_calibration") f = {"planck_chain.csv", "planck_noise_trials.csv", "planck_jpa.csv"};
  else if (experiment == "quadrature_check") f = {"quadrature.csv"};
  f.insert(f.end(), {"fits.json", "results.json", "manifest.json"});
  return f;
}

void write_run(const Json& config, const RunArtifacts& artifacts, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Json manifest;
  manifest["tool"] = "mwstats";
  manifest["version"] = version_string();
  manifest["experiment"] = config.at("experiment");
  manifest["seed"] = config.at("seed");
  manifest["config"] = config;
  Json outputs = Json::array();
  auto put = [&](const std::string& name, const std::string& body) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << body;
    Json e;
    e["file"] = name;
    e["bytes"] = body.size();
    e["fnv1a64"] = hex64(fnv1a(body));
    outputs.push_back(std::move(e));
  };
  for (const auto& [name, body] : artifacts.files) put(name, body);
  put("results.json", artifacts.results.dump(2) + "\n");
  manifest["outputs"] = std::move(outputs);
  std::ofstream os(dir / "manifest.json");
  os << manifest.dump(2) << '\n';
}

std::filesystem::path resolve_output_dir(const Json& config) {
  const auto explicit_dir = config.at("output_dir").get<std::string>();
  if (!explicit_dir.empty()) return explicit_dir;
  const std::string leaf = config.at("experiment").get<std::string>() + "-seed" +
                           std::to_string(config.at("seed").get<long long>());
  if (const char* root = std::getenv("MWSTATS_OUTPUT_ROOT"); root && *root) return std::filesystem::path(root) / leaf;
  return std::filesystem::path("mwstats-runs") / leaf;
}

}  // namespace mwstats
