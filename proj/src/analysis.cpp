#include "mwstats/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mwstats/constants.hpp"
#include "mwstats/errors.hpp"

namespace mwstats {

namespace {

Eigen::VectorXd sqrt_weights(const WeightOptions& w, Eigen::Index n) {
  Eigen::VectorXd s = Eigen::VectorXd::Ones(n);
  if (w.weights.empty()) return s;
  if (static_cast<Eigen::Index>(w.weights.size()) != n) {
    throw DomainError("weights length " + std::to_string(w.weights.size()) +
                      " does not match data length " + std::to_string(n));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double wi = w.weights[static_cast<std::size_t>(i)];
    if (!(wi >= 0.0) || !std::isfinite(wi)) throw DomainError("weights must be finite and >= 0");
    s(i) = std::sqrt(wi);
  }
  return s;
}

double covariance_scale(const WeightOptions& w, double rss, Eigen::Index n, Eigen::Index p) {
  if (!w.weights.empty() && w.absolute_weights) return 1.0;
  return rss / static_cast<double>(std::max<Eigen::Index>(n - p, 1));
}

// Inverse of a symmetric normal matrix; flags singular systems instead of
// returning garbage.
bool invert_normal(const Eigen::MatrixXd& m, Eigen::MatrixXd& inv) {
  // Equilibrate to unit diagonal so parameter units do not masquerade as rank loss.
  const Eigen::Index p = m.rows();
  Eigen::VectorXd d(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    if (!(m(i, i) > 0.0)) {
      inv = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
      return false;
    }
    d(i) = 1.0 / std::sqrt(m(i, i));
  }
  const Eigen::MatrixXd scaled = d.asDiagonal() * m * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  const auto& ev = eig.eigenvalues();
  if (ev.size() == 0 || !(ev.maxCoeff() > 0.0) || ev.minCoeff() <= 1e-13 * ev.maxCoeff()) {
    inv = Eigen::MatrixXd::Constant(p, p, std::numeric_limits<double>::quiet_NaN());
    return false;
  }
  inv = d.asDiagonal() *
        (eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose()) *
        d.asDiagonal();
  return true;
}

double wrap_phase(double phi) {
  phi = std::remainder(phi, kTwoPi);
  return phi <= -std::numbers::pi ? phi + kTwoPi : phi;
}

void ramsey_model(std::span<const TracePoint> trace, const Eigen::VectorXd& p, Eigen::VectorXd& f,
                  Eigen::MatrixXd& jac) {
  const double amp = p(0), freq = p(1), gamma = p(2), off = p(3), phase = p(4);
  const auto n = static_cast<Eigen::Index>(trace.size());
  f.resize(n);
  jac.resize(n, 5);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tau = trace[static_cast<std::size_t>(i)].tau;
    const double e = std::exp(-kTwoPi * gamma * tau);
    const double arg = kTwoPi * freq * tau + phase;
    const double c = std::cos(arg), s = std::sin(arg);
    f(i) = off + amp * c * e;
    jac(i, 0) = c * e;
    jac(i, 1) = -amp * s * e * kTwoPi * tau;
    jac(i, 2) = -amp * c * e * kTwoPi * tau;
    jac(i, 3) = 1.0;
    jac(i, 4) = -amp * s * e;
  }
}

// Solves the linear parameters (e·cos, e·sin, offset) at fixed f, γ; returns the RSS.
double ramsey_linear_rss(std::span<const TracePoint> trace, const Eigen::VectorXd& sw, double freq,
                         double gamma, Eigen::Vector3d& coef) {
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  double btb = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& pt = trace[i];
    const double s = sw(static_cast<Eigen::Index>(i));
    const double e = s * std::exp(-kTwoPi * gamma * pt.tau);
    const Eigen::Vector3d row(e * std::cos(kTwoPi * freq * pt.tau),
                              e * std::sin(kTwoPi * freq * pt.tau), s);
    ata += row * row.transpose();
    atb += row * (s * pt.p);
    btb += s * s * pt.p * pt.p;
  }
  coef = ata.ldlt().solve(atb);
  return btb - coef.dot(atb);
}

FitResult fit_ramsey_impl(std::span<const TracePoint> trace, std::span<const double> weights) {
  if (trace.size() < 8) {
    throw InsufficientDataError("fit_ramsey needs at least 8 points, got " +
                                std::to_string(trace.size()));
  }
  const auto n = static_cast<Eigen::Index>(trace.size());
  WeightOptions wopt{weights, true};
  const Eigen::VectorXd sw = sqrt_weights(wopt, n);

  double tmin = trace.front().tau, tmax = trace.front().tau, mean = 0.0;
  for (const auto& pt : trace) {
    tmin = std::min(tmin, pt.tau);
    tmax = std::max(tmax, pt.tau);
    mean += pt.p;
  }
  mean /= static_cast<double>(n);
  const double span_t = tmax - tmin;
  if (!(span_t > 0.0)) throw InsufficientDataError("fit_ramsey: all delays are equal");

  // Frequency guess: DFT magnitude peak between one cycle per span and Nyquist.
  const double f_nyq = 0.5 * static_cast<double>(n - 1) / span_t;
  const double df = 0.1 / span_t;
  double best_f = 1.0 / span_t, best_mag = -1.0;
  for (double f = 0.5 / span_t; f <= f_nyq; f += df) {
    std::complex<double> acc{0.0, 0.0};
    for (const auto& pt : trace) acc += (pt.p - mean) * std::polar(1.0, -kTwoPi * f * pt.tau);
    if (std::abs(acc) > best_mag) {
      best_mag = std::abs(acc);
      best_f = f;
    }
  }

  // Decay guess: scan γ₂ (and a small neighbourhood of f) with the linear parameters profiled out.
  double best_rss = std::numeric_limits<double>::infinity();
  double guess_f = best_f, guess_g = 0.0;
  Eigen::Vector3d guess_coef = Eigen::Vector3d::Zero();
  for (int k = -5; k <= 5; ++k) {
    const double f = best_f + 0.1 * k * df;
    if (f <= 0.0) continue;
    for (int j = 0; j <= 160; ++j) {
      const double g = j == 0 ? 0.0 : 0.01 / (kTwoPi * span_t) * std::pow(10.0, j / 40.0);
      Eigen::Vector3d coef;
      const double rss = ramsey_linear_rss(trace, sw, f, g, coef);
      if (rss < best_rss) {
        best_rss = rss;
        guess_f = f;
        guess_g = g;
        guess_coef = coef;
      }
    }
  }
  Eigen::VectorXd p0(5);
  p0 << std::hypot(guess_coef(0), guess_coef(1)), guess_f, guess_g, guess_coef(2),
      std::atan2(-guess_coef(1), guess_coef(0));

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = trace[static_cast<std::size_t>(i)].p;
  auto model = [trace](const Eigen::VectorXd& p, Eigen::VectorXd& f, Eigen::MatrixXd& jac) {
    ramsey_model(trace, p, f, jac);
  };
  FitResult r = levenberg_marquardt(model, y, p0, {"amplitude", "frequency", "gamma2", "offset", "phase"},
                                    wopt);
  if (r.values(0) < 0.0) {
    r.values(0) = -r.values(0);
    r.values(4) += std::numbers::pi;
    // Flipping the amplitude sign flips its correlations.
    r.covariance.row(0) *= -1.0;
    r.covariance.col(0) *= -1.0;
  }
  r.values(4) = wrap_phase(r.values(4));
  return r;
}

}  // namespace

std::size_t FitResult::index(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("fit has no parameter '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

double FitResult::standard_error(const std::string& name) const {
  const auto i = static_cast<Eigen::Index>(index(name));
  return std::sqrt(covariance(i, i));
}

Eigen::MatrixXd FitResult::correlation() const {
  const Eigen::VectorXd d = covariance.diagonal().cwiseSqrt();
  Eigen::MatrixXd c = covariance;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      c(i, j) = (d(i) > 0.0 && d(j) > 0.0) ? covariance(i, j) / (d(i) * d(j)) : (i == j ? 1.0 : 0.0);
    }
  }
  return c;
}

FitResult linear_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                               std::vector<std::string> names, const WeightOptions& w) {
  const Eigen::Index n = design.rows(), p = design.cols();
  if (y.size() != n) throw DomainError("design rows and data length differ");
  if (static_cast<Eigen::Index>(names.size()) != p) throw DomainError("one name per column required");
  if (n < p) {
    throw InsufficientDataError("least squares needs at least " + std::to_string(p) +
                                " points, got " + std::to_string(n));
  }
  const Eigen::VectorXd sw = sqrt_weights(w, n);
  Eigen::MatrixXd a = sw.asDiagonal() * design;
  const Eigen::VectorXd b = sw.asDiagonal() * y;

  Eigen::VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = a.col(j).norm();
    if (!(norm > 0.0)) throw FitError("design column '" + names[static_cast<std::size_t>(j)] + "' is zero");
    scale(j) = 1.0 / norm;
  }
  a = a * scale.asDiagonal();
  const Eigen::MatrixXd normal = a.transpose() * a;
  Eigen::MatrixXd inv;
  if (!invert_normal(normal, inv)) {
    throw FitError("rank-deficient design: columns are (nearly) linearly dependent");
  }
  const Eigen::VectorXd gamma = inv * (a.transpose() * b);

  FitResult r;
  r.names = std::move(names);
  r.values = scale.asDiagonal() * gamma;
  const Eigen::VectorXd resid = b - a * gamma;
  const double rss = resid.squaredNorm();
  r.residual_norm = std::sqrt(rss);
  r.covariance = scale.asDiagonal() * inv * scale.asDiagonal() * covariance_scale(w, rss, n, p);
  r.converged = true;
  r.iterations = 1;
  r.weighted = !w.weights.empty();
  return r;
}

FitResult levenberg_marquardt(const ModelFunction& model, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& initial, std::vector<std::string> names,
                              const WeightOptions& w, const LmOptions& opts) {
  const Eigen::Index n = y.size(), p = initial.size();
  if (static_cast<Eigen::Index>(names.size()) != p) throw DomainError("one name per parameter required");
  if (n < p) {
    throw InsufficientDataError("nonlinear fit needs at least " + std::to_string(p) +
                                " points, got " + std::to_string(n));
  }
  const Eigen::VectorXd sw = sqrt_weights(w, n);

  Eigen::VectorXd params = initial, f, f_trial;
  Eigen::MatrixXd jac, jac_trial;
  model(params, f, jac);
  if (!f.allFinite() || !jac.allFinite()) throw NumericalError("model is not finite at the initial guess");
  Eigen::VectorXd r = sw.asDiagonal() * (y - f);
  double cost = r.squaredNorm();
  double lambda = -1.0;

  FitResult out;
  out.names = std::move(names);
  out.weighted = !w.weights.empty();
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const Eigen::MatrixXd jw = sw.asDiagonal() * jac;
    const Eigen::MatrixXd h = jw.transpose() * jw;
    const Eigen::VectorXd g = jw.transpose() * r;
    Eigen::VectorXd diag = h.diagonal().cwiseMax(1e-300);
    if (lambda < 0.0) lambda = 1e-3;
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = h;
      damped.diagonal() += lambda * diag;
      const Eigen::VectorXd step = damped.ldlt().solve(g);
      const double step_tol = opts.relative_step_tolerance * (params.norm() + opts.relative_step_tolerance);
      const bool tiny = step.allFinite() && step.norm() <= step_tol;
      const Eigen::VectorXd trial = params + step;
      double trial_cost = std::numeric_limits<double>::infinity();
      if (step.allFinite()) {
        model(trial, f_trial, jac_trial);
        if (f_trial.allFinite() && jac_trial.allFinite()) {
          trial_cost = (sw.asDiagonal() * (y - f_trial)).squaredNorm();
        }
      }
      if (trial_cost <= cost) {
        params = trial;
        f = f_trial;
        jac = jac_trial;
        r = sw.asDiagonal() * (y - f);
        cost = trial_cost;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        if (tiny) out.converged = true;
      } else {
        // No improvement possible at the step resolution: the minimum is reached.
        if (tiny) {
          out.converged = true;
          break;
        }
        lambda *= 10.0;
        if (lambda > 1e20) {
          out.message = "damping exceeded 1e20 without reducing the cost";
          break;
        }
      }
    }
    if (out.converged || !out.message.empty()) break;
  }
  out.iterations = it + (out.converged ? 1 : 0);
  if (!out.converged && out.message.empty()) {
    std::ostringstream os;
    os << "no convergence after " << opts.max_iterations << " iterations (cost " << cost << ")";
    out.message = os.str();
  }

  out.values = params;
  out.residual_norm = std::sqrt(cost);
  const Eigen::MatrixXd jw = sw.asDiagonal() * jac;
  Eigen::MatrixXd inv;
  if (!invert_normal(jw.transpose() * jw, inv)) {
    if (out.message.empty()) out.message = "singular normal matrix: covariance undefined";
  }
  out.covariance = inv * covariance_scale(w, cost, n, p);
  return out;
}

FitResult fit_ramsey(std::span<const TracePoint> trace, std::span<const double> weights) {
  return fit_ramsey_impl(trace, weights);
}

FitResult fit_ramsey_binomial(std::span<const TracePoint> trace, int shots) {
  if (shots < 1) throw DomainError("fit_ramsey_binomial: shots must be >= 1");
  const FitResult first = fit_ramsey_impl(trace, {});
  Eigen::VectorXd f;
  Eigen::MatrixXd jac;
  ramsey_model(trace, first.values, f, jac);
  std::vector<double> w(trace.size());
  const double floor = 0.5 / shots;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double p = std::clamp(f(static_cast<Eigen::Index>(i)), floor, 1.0 - floor);
    w[i] = shots / (p * (1.0 - p));
  }
  return fit_ramsey_impl(trace, w);
}

DephasingEstimate extract_dephasing(double gamma2, double gamma1, double gamma_phi0,
                                    double sigma_gamma2, double sigma_gamma1,
                                    double sigma_gamma_phi0) {
  DephasingEstimate e;
  e.value = gamma2 - gamma1 / 2.0 - gamma_phi0;
  e.uncertainty = std::sqrt(sigma_gamma2 * sigma_gamma2 + 0.25 * sigma_gamma1 * sigma_gamma1 +
                            sigma_gamma_phi0 * sigma_gamma_phi0);
  e.negative_warning = e.value < 0.0;
  return e;
}

std::string to_string(VarianceModel m) {
  switch (m) {
    case VarianceModel::QuadraticPlusLinear: return "quadratic_plus_linear";
    case VarianceModel::PureQuadratic: return "pure_quadratic";
    case VarianceModel::Linear: return "linear";
  }
  return "unknown";
}

FitResult fit_variance_law(std::span<const LawPoint> points, VarianceModel model) {
  const std::size_t need = model == VarianceModel::Linear ? 2 : 3;
  if (points.size() < need) {
    throw InsufficientDataError("fit_variance_law (" + to_string(model) + ") needs at least " +
                                std::to_string(need) + " points, got " +
                                std::to_string(points.size()));
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  const Eigen::Index p = model == VarianceModel::QuadraticPlusLinear ? 2 : 1;
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  std::vector<double> w;
  bool all_sigma = true;
  for (const auto& pt : points) all_sigma = all_sigma && pt.sigma > 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pt = points[static_cast<std::size_t>(i)];
    switch (model) {
      case VarianceModel::QuadraticPlusLinear:
        x(i, 0) = pt.n * pt.n;
        x(i, 1) = pt.n;
        break;
      case VarianceModel::PureQuadratic: x(i, 0) = pt.n * pt.n; break;
      case VarianceModel::Linear: x(i, 0) = pt.n; break;
    }
    y(i) = pt.y;
    if (all_sigma) w.push_back(1.0 / (pt.sigma * pt.sigma));
  }
  std::vector<std::string> names;
  switch (model) {
    case VarianceModel::QuadraticPlusLinear: names = {"rho", "xi"}; break;
    case VarianceModel::PureQuadratic: names = {"rho"}; break;
    case VarianceModel::Linear: names = {"s"}; break;
  }
  return linear_least_squares(x, y, std::move(names), WeightOptions{w, true});
}

double fano_factor(double n, double variance) {
  if (!(n > 0.0)) throw DomainError("fano_factor: n must be > 0");
  return variance / n;
}

FitResult fit_stark_temperature_sweep(std::span<const StarkPoint> points, const ModeSpec& mode,
                                      double chi) {
  if (points.size() < 4) {
    throw InsufficientDataError("fit_stark_temperature_sweep needs at least 4 temperatures, got " +
                                std::to_string(points.size()));
  }
  if (chi == 0.0) throw SingularityError("fit_stark_temperature_sweep: chi must be non-zero");
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd nbe(n), y(n);
  std::vector<double> w;
  bool all_sigma = true;
  for (const auto& pt : points) all_sigma = all_sigma && pt.sigma > 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pt = points[static_cast<std::size_t>(i)];
    nbe(i) = bose_einstein(mode, pt.temperature);
    y(i) = pt.shift;
    if (all_sigma) w.push_back(1.0 / (pt.sigma * pt.sigma));
  }

  // Linear pre-fit y = 2χ[a n_BE + b] gives η = a and n_n = b/(1 - η).
  Eigen::MatrixXd x(n, 2);
  x.col(0) = 2.0 * chi * nbe;
  x.col(1).setConstant(2.0 * chi);
  const FitResult lin = linear_least_squares(x, y, {"a", "b"}, WeightOptions{w, true});
  const double eta0 = lin.values(0);
  const double nn0 = std::abs(1.0 - eta0) > 1e-9 ? std::max(lin.values(1) / (1.0 - eta0), 0.0) : 0.0;

  auto model = [&nbe, chi](const Eigen::VectorXd& p, Eigen::VectorXd& f, Eigen::MatrixXd& jac) {
    const double eta = p(0), nn = p(1);
    f = 2.0 * chi * (eta * nbe.array() + (1.0 - eta) * nn).matrix();
    jac.resize(nbe.size(), 2);
    jac.col(0) = 2.0 * chi * (nbe.array() - nn).matrix();
    jac.col(1).setConstant(2.0 * chi * (1.0 - eta));
  };
  Eigen::VectorXd p0(2);
  p0 << eta0, nn0;
  return levenberg_marquardt(model, y, p0, {"coupling_efficiency", "background_photons"},
                             WeightOptions{w, true});
}

FitResult fit_dephasing_background(std::span<const LawPoint> points) {
  if (points.size() < 3) {
    throw InsufficientDataError("fit_dephasing_background needs at least 3 points, got " +
                                std::to_string(points.size()));
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd nr(n), y(n);
  std::vector<double> w;
  bool all_sigma = true;
  for (const auto& pt : points) all_sigma = all_sigma && pt.sigma > 0.0;
  Eigen::MatrixXd x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& pt = points[static_cast<std::size_t>(i)];
    nr(i) = pt.n;
    y(i) = pt.y;
    x(i, 0) = pt.n * pt.n;
    x(i, 1) = pt.n;
    x(i, 2) = 1.0;
    if (all_sigma) w.push_back(1.0 / (pt.sigma * pt.sigma));
  }
  // Quadratic with intercept: c₂ = s₀, c₁ = s₀(2b + 1).
  const FitResult quad = linear_least_squares(x, y, {"c2", "c1", "c0"}, WeightOptions{w, true});
  const double s0 = quad.values(0);
  const double b0 = s0 != 0.0 ? std::max(0.5 * (quad.values(1) / s0 - 1.0), 0.0) : 0.0;

  auto model = [&nr](const Eigen::VectorXd& p, Eigen::VectorXd& f, Eigen::MatrixXd& jac) {
    const Eigen::ArrayXd m = nr.array() + p(1);
    f = (p(0) * (m * m + m)).matrix();
    jac.resize(nr.size(), 2);
    jac.col(0) = (m * m + m).matrix();
    jac.col(1) = (p(0) * (2.0 * m + 1.0)).matrix();
  };
  Eigen::VectorXd p0(2);
  p0 << s0, b0;
  return levenberg_marquardt(model, y, p0, {"s0", "background_photons"}, WeightOptions{w, true});
}

}  // namespace mwstats
