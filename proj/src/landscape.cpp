#include "quartic/landscape.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "quartic/decompose.hpp"
#include "quartic/errors.hpp"
#include "quartic/parallel.hpp"
#include "quartic/random.hpp"

namespace quartic {

namespace {

// Change of the scale-invariant objective F(v) = -1/4 sum_i a_i (u_i^T v)^4 / |v|^4
// along the ray v = w - s g. Subtracting two evaluations of f loses the decrease
// (about s |g|^2) to the norm error of a normalized iterate once |g| nears 1e-8;
// expanding numerator and denominator in s keeps every term free of cancellation.
class RayObjective {
 public:
  RayObjective(const Rank1SumTensor& t, const Vector& w, const Vector& g)
      : coeffs_(t.coefficients().array()),
        p_(t.directions().transpose() * w),
        h_(t.directions().transpose() * g),
        rho_(w.squaredNorm()),
        gamma_(w.dot(g)),
        g2_(g.squaredNorm()),
        n0_((coeffs_ * p_.square().square()).sum()) {
    const auto p2 = p_.square();
    const auto h2 = h_.square();
    c1_ = -4.0 * (coeffs_ * p2 * p_ * h_).sum();
    c2_ = 6.0 * (coeffs_ * p2 * h2).sum();
    c3_ = -4.0 * (coeffs_ * p_ * h2 * h_).sum();
    c4_ = (coeffs_ * h2.square()).sum();
  }

  double change(double s) const {
    const double dn = s * (c1_ + s * (c2_ + s * (c3_ + s * c4_)));
    const double dq = s * (s * g2_ - 2.0 * gamma_);  // |w - s g|^2 - |w|^2
    const double d0 = rho_ * rho_;
    const double dd = dq * (2.0 * rho_ + dq);
    const double ds = d0 + dd;
    return -0.25 * (d0 * dn - n0_ * dd) / (ds * d0);
  }

 private:
  Eigen::ArrayXd coeffs_;
  Eigen::ArrayXd p_;
  Eigen::ArrayXd h_;
  double rho_, gamma_, g2_, n0_;
  double c1_ = 0.0, c2_ = 0.0, c3_ = 0.0, c4_ = 0.0;
};

}  // namespace

DescentResult manifold_gradient_descent(const Rank1SumTensor& t, VectorCRef w0, double step,
                                        std::size_t max_iters, double grad_tol) {
  if (!(step > 0.0)) throw InvalidArgument("manifold_gradient_descent: step must be positive");
  detail::require_dim(t.dim(), static_cast<std::size_t>(w0.size()), "manifold_gradient_descent");
  detail::require_unit(w0, kOperationUnitTolerance, "manifold_gradient_descent");

  DescentResult result;
  Vector w = w0;
  double f = objective(t, w);
  result.objective_trace.push_back(f);
  for (;;) {
    const Vector g = riemannian_gradient(t, w);
    result.gradient_norm = g.norm();
    if (result.gradient_norm <= grad_tol) {
      result.converged = true;
      break;
    }
    if (result.iterations == max_iters) break;

    const RayObjective ray(t, w, g);
    double trial_step = step;
    bool accepted = false;
    double change = 0.0;
    for (int halvings = 0; halvings <= kMaxStepHalvings; ++halvings, trial_step *= 0.5) {
      change = ray.change(trial_step);
      if (change <= 0.0) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw StalledDescent(w, fmt::format("manifold_gradient_descent: no decrease after {} halvings "
                                          "(iteration {}, |grad| = {:.3g})",
                                          kMaxStepHalvings, result.iterations, result.gradient_norm));
    }
    w -= trial_step * g;
    w.normalize();
    f += change;
    result.objective_trace.push_back(f);
    ++result.iterations;
  }
  result.point = std::move(w);
  return result;
}

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::minimum:
      return "minimum";
    case PointKind::saddle:
      return "saddle";
    case PointKind::non_critical:
      return "non-critical";
  }
  return "non-critical";
}

CriticalPointCertificate certify(const Rank1SumTensor& t, VectorCRef w, double grad_tol,
                                 double eig_tol) {
  CriticalPointCertificate cert;
  cert.point = w;
  cert.gradient_norm = riemannian_gradient(t, w).norm();
  cert.lambda_value = contract_full(t, w);
  if (w.size() >= 2) {
    const Matrix tangent = restrict_to_tangent(riemannian_hessian(t, w), w);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(tangent, Eigen::EigenvaluesOnly);
    cert.tangent_spectrum = solver.eigenvalues();
    cert.min_tangent_eigenvalue = cert.tangent_spectrum.minCoeff();
  } else {
    cert.min_tangent_eigenvalue = std::numeric_limits<double>::infinity();
  }
  if (cert.gradient_norm > grad_tol) {
    cert.classification = PointKind::non_critical;
  } else if (cert.min_tangent_eigenvalue >= -eig_tol) {
    cert.classification = PointKind::minimum;
  } else {
    cert.classification = PointKind::saddle;
  }
  return cert;
}

bool gap_check(const CorrelationProfile& profile) {
  if (profile.order.size() < 2) throw InvalidArgument("gap_check: need k >= 2");
  const double first = std::abs(profile.values(static_cast<Eigen::Index>(profile.order[0])));
  const double second = std::abs(profile.values(static_cast<Eigen::Index>(profile.order[1])));
  return first > std::sqrt(2.0) * second;
}

ProximityResult proximity_check(VectorCRef w, const ComponentSet& truth) {
  detail::require_unit(w, kOperationUnitTolerance, "proximity_check");
  const CorrelationProfile profile = correlation_profile(truth, w);
  ProximityResult r;
  r.index = profile.order.front();
  r.sign = profile.values(static_cast<Eigen::Index>(r.index)) >= 0.0 ? 1 : -1;
  r.error = (w - r.sign * truth.vector(r.index)).norm();
  r.bound = recovery_bound(truth.kappa(), truth.rank(), measure_incoherence(truth));
  r.within = r.error <= r.bound + kRoundoffAllowance;
  return r;
}

double correlation_ratio(VectorCRef w, const ComponentSet& truth, std::size_t i) {
  if (i >= truth.rank()) throw InvalidArgument("correlation_ratio: index out of range");
  detail::require_dim(truth.dim(), static_cast<std::size_t>(w.size()), "correlation_ratio");
  return off_component_ratio(w, truth.vector(i));
}

namespace {

double retracted_objective(const Rank1SumTensor& t, VectorCRef w, VectorCRef direction, double h) {
  Vector probe = w + h * direction;
  probe.normalize();
  return objective(t, probe);
}

void check_step(double h) {
  if (!(h >= 1e-8 && h <= 1e-3)) {
    throw InvalidArgument(fmt::format("finite differences: step {} outside [1e-8, 1e-3]", h));
  }
}

}  // namespace

Vector finite_difference_gradient(const Rank1SumTensor& t, VectorCRef w, double h) {
  check_step(h);
  detail::require_unit(w, kOperationUnitTolerance, "finite_difference_gradient");
  const Matrix basis = tangent_basis(w);
  Vector g = Vector::Zero(w.size());
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    const auto b = basis.col(j);
    const double slope = (retracted_objective(t, w, b, h) - retracted_objective(t, w, b, -h)) / (2.0 * h);
    g += slope * b;
  }
  return g;
}

double finite_difference_curvature(const Rank1SumTensor& t, VectorCRef w, VectorCRef v, double h) {
  check_step(h);
  detail::require_unit(w, kOperationUnitTolerance, "finite_difference_curvature");
  detail::require_unit(v, kOperationUnitTolerance, "finite_difference_curvature");
  const double center = objective(t, w);
  return (retracted_objective(t, w, v, h) - 2.0 * center + retracted_objective(t, w, v, -h)) / (h * h);
}

std::vector<SweepRow> landscape_sweep(const ComponentSet& truth, std::size_t n_starts,
                                      std::uint64_t seed, const DescentOptions& options) {
  const Rank1SumTensor t = build_tensor(truth);
  const ConditioningReport cond = conditioning_report(truth);
  std::vector<SweepRow> rows(n_starts);
  parallel_for(n_starts, options.threads, [&](std::size_t s) {
    Engine engine = stream_engine(seed, s, 0);
    const Vector start = uniform_on_sphere(truth.dim(), engine);
    Vector point;
    bool stalled = false;
    try {
      point = manifold_gradient_descent(t, start, options.step, options.max_iters, options.grad_tol).point;
    } catch (const StalledDescent& e) {
      point = e.point();
      stalled = true;
    }
    const CriticalPointCertificate cert = certify(t, point, options.grad_tol, options.eig_tol);
    const ProximityResult prox = proximity_check(point, truth);
    SweepRow& row = rows[s];
    row.seed = seed;
    row.d = truth.dim();
    row.k = truth.rank();
    row.tau = cond.tau;
    row.delta = cond.delta;
    row.kappa = cond.kappa;
    row.point_kind = stalled ? std::string_view("stalled") : to_string(cert.classification);
    row.gradient_norm = cert.gradient_norm;
    row.min_eig = cert.min_tangent_eigenvalue;
    row.nearest_index = prox.index;
    row.error = prox.error;
    row.bound = prox.bound;
    row.within = prox.within;
    row.gap = truth.rank() >= 2 ? gap_check(correlation_profile(truth, point)) : true;
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "seed,d,k,tau,delta,kappa,point_kind,gradient_norm,min_eig,nearest_index,error,bound,within\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{},{:.17g},{:.17g},{}\n",
               r.seed, r.d, r.k, r.tau, r.delta, r.kappa, r.point_kind, r.gradient_norm, r.min_eig,
               r.nearest_index, r.error, r.bound, r.within ? "true" : "false");
  }
}

}  // namespace quartic
