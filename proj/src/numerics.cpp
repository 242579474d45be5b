#include "tunnelchrono/numerics.hpp"

#include <cmath>
#include <limits>

namespace tunnelchrono::numerics {

namespace {

double checked_eval(const std::function<double(double)>& f, double x, const char* who) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw EvaluationError(std::string(who) + ": non-finite function value at x = " + std::to_string(x));
  }
  return v;
}

}  // namespace

double derivative(const std::function<double(double)>& f, double x, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale) || !std::isfinite(x)) {
    throw std::invalid_argument("derivative: scale must be positive and arguments finite");
  }
  auto central = [&](double h) {
    return (checked_eval(f, x + h, "derivative") - checked_eval(f, x - h, "derivative")) / (2.0 * h);
  };
  const double coarse = central(scale);
  const double fine = central(0.5 * scale);
  return (4.0 * fine - coarse) / 3.0;
}

namespace {

struct SimpsonScratch {
  const std::function<double(double)>* f = nullptr;
  bool depth_exhausted = false;
  int max_depth = 48;
};

double simpson_eval(SimpsonScratch& s, double x) { return checked_eval(*s.f, x, "integrate"); }

// Classic adaptive Simpson with the 1/15 Richardson correction.
double simpson_recurse(SimpsonScratch& s, double a, double fa, double b, double fb, double m,
                       double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = simpson_eval(s, lm);
  const double frm = simpson_eval(s, rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || depth >= s.max_depth) {
    if (std::abs(delta) > 15.0 * tol) s.depth_exhausted = true;
    return left + right + delta / 15.0;
  }
  return simpson_recurse(s, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
         simpson_recurse(s, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate: requires tol > 0");
  SimpsonScratch s;
  s.f = &f;
  const double fa = simpson_eval(s, a);
  const double fb = simpson_eval(s, b);
  const double m = 0.5 * (a + b);
  const double fm = simpson_eval(s, m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double budget = tol * (1.0 + std::abs(whole));
  const double value = simpson_recurse(s, a, fa, b, fb, m, fm, whole, budget, 0);
  if (s.depth_exhausted) {
    throw ToleranceError("integrate: tolerance not reached at max refinement depth", value);
  }
  return value;
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("find_root: requires lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("find_root: requires tol > 0");
  double a = lo, b = hi;
  double fa = checked_eval(f, a, "find_root");
  double fb = checked_eval(f, b, "find_root");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) {
    throw BracketError("find_root: no sign change over [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
  double best = 0.5 * (a + b);
  for (int iter = 0; iter < 200; ++iter) {
    double x;
    if (iter % 2 == 0 && fb != fa) {
      // secant candidate, fall back to bisection when it leaves the bracket
      x = b - fb * (b - a) / (fb - fa);
      if (!(x > a && x < b)) x = 0.5 * (a + b);
    } else {
      x = 0.5 * (a + b);
    }
    const double fx = checked_eval(f, x, "find_root");
    best = x;
    if (std::abs(fx) <= tol || (b - a) <= tol * std::abs(x)) return x;
    if (fa * fx <= 0.0) {
      b = x;
      fb = fx;
    } else {
      a = x;
      fa = fx;
    }
  }
  return best;
}

namespace {

Eigen::VectorXd weighted_residuals(const Model& model, const Eigen::VectorXd& params,
                                   std::span<const FitPoint> data) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(data.size()));
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const FitPoint& pt = data[static_cast<std::size_t>(i)];
    const double value = model(params, pt.input);
    if (!std::isfinite(value)) {
      throw EvaluationError("fit_curve: model returned a non-finite value");
    }
    r[i] = pt.weight * (value - pt.target);
  }
  return r;
}

Eigen::MatrixXd finite_difference_jacobian(const Model& model, const Eigen::VectorXd& params,
                                           std::span<const FitPoint> data) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::Index p = params.size();
  Eigen::MatrixXd jac(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double h = 1e-6 * std::max(std::abs(params[j]), 1.0);
    Eigen::VectorXd fwd = params, bwd = params;
    fwd[j] += h;
    bwd[j] -= h;
    jac.col(j) = (weighted_residuals(model, fwd, data) - weighted_residuals(model, bwd, data)) /
                 (2.0 * h);
  }
  return jac;
}

}  // namespace

FitResult fit_curve(const Model& model, const Eigen::VectorXd& initial,
                    std::span<const FitPoint> data, const FitOptions& options) {
  const Eigen::Index p = initial.size();
  if (p == 0) throw std::invalid_argument("fit_curve: empty parameter vector");
  if (static_cast<Eigen::Index>(data.size()) < p) {
    throw std::invalid_argument("fit_curve: need at least as many data points as parameters");
  }
  if (!initial.allFinite()) throw std::invalid_argument("fit_curve: non-finite initial parameters");

  Eigen::VectorXd params = initial;
  Eigen::VectorXd resid = weighted_residuals(model, params, data);
  double cost = resid.squaredNorm();
  double lambda = options.initial_damping;
  bool converged = false;
  int iter = 0;

  for (; iter < options.max_iterations && !converged; ++iter) {
    const Eigen::MatrixXd jac = finite_difference_jacobian(model, params, data);
    // Column equilibration: parameters here span many orders of magnitude
    // (barrier widths vs phonon frequencies), and the raw normal equations
    // cannot resolve the small-norm directions at double precision.
    Eigen::VectorXd colnorm(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      colnorm[j] = jac.col(j).norm();
      if (!(colnorm[j] > 0.0)) colnorm[j] = 1.0;  // dead direction, step stays 0
    }
    const Eigen::MatrixXd jac_s = jac * colnorm.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd jtj = jac_s.transpose() * jac_s;
    const Eigen::VectorXd grad = jac_s.transpose() * resid;
    const double diag_max = jtj.diagonal().maxCoeff();
    if (!(diag_max > 0.0)) {
      if (cost <= options.residual_tolerance * options.residual_tolerance) {
        converged = true;
        break;
      }
      throw DegenerateFitError("fit_curve: singular normal equations (model has no sensitivity)");
    }
    const Eigen::VectorXd scale = jtj.diagonal().cwiseMax(1e-12 * diag_max);

    bool accepted = false;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += lambda * scale;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      const Eigen::VectorXd step = colnorm.cwiseInverse().asDiagonal() * ldlt.solve(-grad);
      if (ldlt.info() != Eigen::Success || !step.allFinite()) {
        lambda = std::min(lambda * 10.0, 1e14);
        continue;
      }
      const Eigen::VectorXd trial = params + step;
      double trial_cost = std::numeric_limits<double>::infinity();
      Eigen::VectorXd trial_resid;
      bool evaluable = true;
      try {
        trial_resid = weighted_residuals(model, trial, data);
        trial_cost = trial_resid.squaredNorm();
      } catch (const EvaluationError&) {
        evaluable = false;  // treat as a rejected step and retreat
      }
      if (evaluable && trial_cost <= cost) {
        // per-parameter relative step: a norm-based measure would let one
        // large-scale parameter (phonon frequencies ~ 1e13) mask motion in
        // the others
        double step_rel = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
          step_rel = std::max(step_rel, std::abs(step[j]) / std::max(std::abs(params[j]), 1.0));
        }
        const double res_rel = (std::sqrt(cost) - std::sqrt(trial_cost)) /
                               std::max(std::sqrt(cost), 1e-300);
        params = trial;
        resid = trial_resid;
        cost = trial_cost;
        lambda = std::max(lambda * 0.1, 1e-14);
        accepted = true;
        if (step_rel < options.step_tolerance && res_rel < options.residual_tolerance) {
          converged = true;
        }
      } else {
        lambda = std::min(lambda * 10.0, 1e14);
      }
    }
    if (!accepted) break;  // damping exhausted, report best point found
  }

  FitResult out;
  out.params = params;
  out.residual_norm = std::sqrt(cost);
  out.converged = converged;
  out.iterations = iter;

  // Covariance from the pseudo-inverse of J^T J, assembled from the
  // column-equilibrated factorisation so it stays meaningful across mixed
  // parameter scales. The condition estimate of the equilibrated normal
  // matrix flags directions the data does not constrain (infinite for an
  // exactly dead parameter).
  const Eigen::MatrixXd jac = finite_difference_jacobian(model, params, data);
  Eigen::VectorXd colnorm(p), colnorm_inv(p);
  bool dead_direction = false;
  for (Eigen::Index j = 0; j < p; ++j) {
    colnorm[j] = jac.col(j).norm();
    if (!(colnorm[j] > 0.0)) {
      colnorm[j] = 1.0;
      dead_direction = true;
    }
    colnorm_inv[j] = 1.0 / colnorm[j];
  }
  const Eigen::MatrixXd jac_s = jac * colnorm_inv.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac_s.transpose() * jac_s);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double ev_max = ev.cwiseAbs().maxCoeff();
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const double sigma2 = n > p ? cost / static_cast<double>(n - p) : 0.0;
  const double cutoff = std::max(ev_max, 1e-300) * 1e-14;
  Eigen::VectorXd inv_ev = Eigen::VectorXd::Zero(p);
  double ev_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < p; ++i) {
    ev_min = std::min(ev_min, std::max(ev[i], 0.0));
    if (ev[i] > cutoff) inv_ev[i] = 1.0 / ev[i];
  }
  const Eigen::MatrixXd pinv_s =
      eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose();
  out.covariance =
      sigma2 * (colnorm_inv.asDiagonal() * pinv_s * colnorm_inv.asDiagonal());
  out.normal_condition = (!dead_direction && ev_min > cutoff)
                             ? ev_max / ev_min
                             : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace tunnelchrono::numerics
