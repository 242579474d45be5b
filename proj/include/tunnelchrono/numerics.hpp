#ifndef TUNNELCHRONO_NUMERICS_HPP
#define TUNNELCHRONO_NUMERICS_HPP

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

// Shared numerical kernels: differentiation, quadrature, root finding and
// damped least-squares fitting. Everything here is a pure function of its
// arguments and safe to call concurrently.
namespace tunnelchrono::numerics {

// A function evaluated to a non-finite value where a finite one was required.
class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature ran out of refinement depth; carries the best estimate so far.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double best)
      : std::runtime_error(what), best_estimate(best) {}
  double best_estimate;
};

// find_root was handed a bracket without a sign change.
class BracketError : public std::runtime_error {
 public:
  explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

// Normal equations unusable (no parameter sensitivity at all).
class DegenerateFitError : public std::runtime_error {
 public:
  explicit DegenerateFitError(const std::string& what) : std::runtime_error(what) {}
};

// Default step for derivative(): 1e-4 * max(|x|, 1). Energies and potentials
// in this project span 0.01-10 eV, which balances truncation against
// cancellation at 64-bit precision.
inline double default_derivative_scale(double x) {
  return 1e-4 * std::max(std::abs(x), 1.0);
}

// Central difference with one Richardson extrapolation level (steps scale and
// scale/2). Exact for cubics up to roundoff.
double derivative(const std::function<double(double)>& f, double x, double scale);

// Adaptive composite Simpson quadrature over [a, b]. The error target is
// tol * (1 + |I|), i.e. absolute-plus-relative below tol.
double integrate(const std::function<double(double)>& f, double a, double b, double tol);

// Bracketing bisection/secant hybrid. Requires f(lo) * f(hi) <= 0. Stops when
// |f| < tol or the bracket width drops below tol * |root|.
double find_root(const std::function<double(double)>& f, double lo, double hi, double tol);

struct FitResult {
  Eigen::VectorXd params;
  double residual_norm = 0.0;  // sqrt(sum of weighted squared residuals)
  Eigen::MatrixXd covariance;  // symmetric positive semidefinite
  bool converged = false;
  int iterations = 0;
  // Condition estimate of J^T J at the solution; huge/infinite values flag a
  // direction the data does not constrain.
  double normal_condition = 0.0;
};

struct FitPoint {
  double input = 0.0;
  double target = 0.0;
  double weight = 1.0;
};

struct FitOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;
  double residual_tolerance = 1e-10;
  double initial_damping = 1e-3;
};

using Model = std::function<double(const Eigen::VectorXd&, double)>;

// Levenberg-Marquardt minimisation of sum_i [w_i (model(p, x_i) - y_i)]^2.
// Damping starts at 1e-3, x10 on a rejected step, /10 on an accepted one.
// Converged means both the relative step and the relative residual change
// dropped below their tolerances; hitting the iteration cap returns the best
// parameters with converged = false.
FitResult fit_curve(const Model& model, const Eigen::VectorXd& initial,
                    std::span<const FitPoint> data, const FitOptions& options = {});

}  // namespace tunnelchrono::numerics

#endif
