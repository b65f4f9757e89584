#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mwstats/states.hpp"

namespace mwstats {

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd values;
  Eigen::MatrixXd covariance;
  /// sqrt of the (weighted) residual sum of squares.
  double residual_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  /// Whether the data were weighted; unweighted fits scale the covariance by RSS/(N-p).
  bool weighted = false;
  /// Non-empty when the fit stopped without converging or flagged something.
  std::string message;

  std::size_t index(const std::string& name) const;
  double value(const std::string& name) const { return values(index(name)); }
  double standard_error(const std::string& name) const;
  Eigen::MatrixXd correlation() const;
};

/// Weights w_i multiply the squared residuals. With `absolute_weights` they are
/// taken as 1/σ_i² and the covariance is (JᵀWJ)⁻¹; otherwise (and always for
/// unweighted fits) it is scaled by RSS/(N - p).
struct WeightOptions {
  std::span<const double> weights;
  bool absolute_weights = true;
};

/// Linear least squares y ≈ X β via column-scaled normal equations.
/// Throws FitError when the scaled design is rank deficient.
FitResult linear_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                               std::vector<std::string> names, const WeightOptions& w = {});

/// Model callback: fills the predictions f(x; p) and the Jacobian ∂f/∂p.
using ModelFunction =
    std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& f, Eigen::MatrixXd& jac)>;

struct LmOptions {
  int max_iterations = 200;
  double relative_step_tolerance = 1e-10;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) on Σ w_i (y_i - f_i)².
/// Hitting the iteration limit yields converged = false and a diagnostic message.
FitResult levenberg_marquardt(const ModelFunction& model, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& initial, std::vector<std::string> names,
                              const WeightOptions& w = {}, const LmOptions& opts = {});

struct TracePoint {
  double tau = 0.0;  // s
  double p = 0.0;
};

/// Fits p(τ) = offset + amplitude cos(2π f τ + phase) exp(-2π γ₂ τ).
/// Parameters: amplitude, frequency [Hz], gamma2 [Hz], offset, phase [rad].
/// The frequency guess is the peak of a DFT scan; the decay guess comes from a
/// 1-D scan over γ₂ with the linear parameters solved at each step.
FitResult fit_ramsey(std::span<const TracePoint> trace, std::span<const double> weights = {});

/// Two-pass fit for binomial data: unweighted first, then weighted with
/// shots / (p(1-p)) evaluated on the first-pass model.
FitResult fit_ramsey_binomial(std::span<const TracePoint> trace, int shots);

struct DephasingEstimate {
  double value = 0.0;        // Hz
  double uncertainty = 0.0;  // Hz
  /// Set when the estimate is negative; the value is reported unchanged.
  bool negative_warning = false;
};

/// γ_φn = γ₂ - γ₁/2 - γ_φ0; uncertainties add in quadrature.
DephasingEstimate extract_dephasing(double gamma2, double gamma1, double gamma_phi0,
                                    double sigma_gamma2 = 0.0, double sigma_gamma1 = 0.0,
                                    double sigma_gamma_phi0 = 0.0);

enum class VarianceModel {
  QuadraticPlusLinear,  // ρ n² + ξ n  → rho, xi
  PureQuadratic,        // ρ n²       → rho
  Linear,               // s n        → s
};

std::string to_string(VarianceModel m);

struct LawPoint {
  double n = 0.0;
  double y = 0.0;
  /// Standard error of y; zero means unknown (the fit is then unweighted).
  double sigma = 0.0;
};

/// Polynomial fit through the origin. Weighted by 1/σ² when every point has σ > 0.
FitResult fit_variance_law(std::span<const LawPoint> points, VarianceModel model);

/// Var(n)/n.
double fano_factor(double n, double variance);

struct StarkPoint {
  double temperature = 0.0;  // K
  double shift = 0.0;        // Hz
  double sigma = 0.0;        // Hz, optional
};

/// Fits δω_q = 2χ[η n_BE(T) + (1 - η) n_n] for η ("coupling_efficiency") and
/// n_n ("background_photons").
FitResult fit_stark_temperature_sweep(std::span<const StarkPoint> points, const ModeSpec& mode,
                                      double chi);

/// Fits γ_φn = s₀[(n + b)² + (n + b)] for s₀ ("s0") and the background occupation
/// b ("background_photons"), i.e. thermal dephasing with the field mixed with a
/// thermal background on a beam splitter.
FitResult fit_dephasing_background(std::span<const LawPoint> points);

}  // namespace mwstats
