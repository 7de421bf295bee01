#include "quartic/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "quartic/errors.hpp"

namespace quartic {

namespace {

void check_point(const Rank1SumTensor& t, VectorCRef w, const char* what) {
  detail::require_dim(t.dim(), static_cast<std::size_t>(w.size()), what);
  detail::require_unit(w, kOperationUnitTolerance, what);
}

// Householder vector v and beta = 2 / v^T v with (I - beta v v^T) w = -sign(w_0) e_1.
std::pair<Vector, double> reflector(VectorCRef w) {
  Vector v = w;
  const double sign = w(0) >= 0.0 ? 1.0 : -1.0;
  v(0) += sign * w.norm();
  return {v, 2.0 / v.squaredNorm()};
}

}  // namespace

double objective(const Rank1SumTensor& t, VectorCRef w) { return -0.25 * contract_full(t, w); }

Vector riemannian_gradient(const Rank1SumTensor& t, VectorCRef w) {
  check_point(t, w, "riemannian_gradient");
  const Vector v = contract_vector(t, w);
  return -(v - w * w.dot(v));
}

Matrix riemannian_hessian(const Rank1SumTensor& t, VectorCRef w) {
  check_point(t, w, "riemannian_hessian");
  const Vector c = t.directions().transpose() * w;
  const double scale = (t.coefficients().array() * c.array().square().square()).sum();

  // Columns P_w u_i, and the weighted copy a_i c_i^2 P_w u_i.
  const Matrix projected = t.directions() - w * c.transpose();
  const Vector curvature = (t.coefficients().array() * c.array().square()).matrix();
  const Matrix weighted = projected * curvature.asDiagonal();

  Matrix h = -3.0 * (weighted * projected.transpose());
  h.diagonal().array() += scale;
  h.noalias() -= scale * (w * w.transpose());
  // The product above is symmetric only up to roundoff.
  return 0.5 * (h + h.transpose());
}

double measure_incoherence(const ComponentSet& components) {
  const std::size_t k = components.rank();
  double tau = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      tau = std::max(tau, std::abs(components.vector(i).dot(components.vector(j))));
  return tau;
}

double measure_rip(const ComponentSet& components) {
  const Matrix gram = components.vectors().transpose() * components.vectors();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw DegenerateComponents("measure_rip: eigen-solve of the Gram matrix failed");
  }
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (lo <= 1e-10) {
    throw DegenerateComponents(
        fmt::format("measure_rip: Gram matrix is singular (smallest eigenvalue {:.3g})", lo));
  }
  return std::max({hi - 1.0, 1.0 - lo, 0.0});
}

CorrelationProfile correlation_profile(const ComponentSet& components, VectorCRef w) {
  detail::require_dim(components.dim(), static_cast<std::size_t>(w.size()), "correlation_profile");
  CorrelationProfile profile;
  profile.values = components.vectors().transpose() * w;
  profile.order.resize(components.rank());
  std::iota(profile.order.begin(), profile.order.end(), std::size_t{0});
  const auto& c = profile.values;
  std::stable_sort(profile.order.begin(), profile.order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(c(static_cast<Eigen::Index>(a))) > std::abs(c(static_cast<Eigen::Index>(b)));
  });
  return profile;
}

ConditioningReport conditioning_report(const ComponentSet& components) {
  ConditioningReport r;
  r.tau = measure_incoherence(components);
  r.delta = measure_rip(components);
  r.kappa = components.kappa();
  r.k_tau = static_cast<double>(components.rank()) * r.tau;
  r.passes_geometric = r.k_tau <= kGeometricKTauLimit;
  r.passes_kappa = r.kappa <= kKappaLimit;
  return r;
}

Json to_json(const ConditioningReport& report) {
  Json j;
  j["tau"] = report.tau;
  j["delta"] = report.delta;
  j["kappa"] = report.kappa;
  j["k_tau"] = report.k_tau;
  j["passes_geometric"] = report.passes_geometric;
  j["passes_kappa"] = report.passes_kappa;
  return j;
}

Matrix tangent_basis(VectorCRef w) {
  if (w.size() < 2) throw InvalidArgument("tangent_basis: need d >= 2");
  const auto [v, beta] = reflector(w);
  const Eigen::Index d = w.size();
  // Columns 1..d-1 of I - beta v v^T.
  Matrix basis = -beta * v * v.tail(d - 1).transpose();
  basis.bottomRows(d - 1).diagonal().array() += 1.0;
  return basis;
}

Matrix restrict_to_tangent(const Matrix& m, VectorCRef w) {
  if (w.size() < 2) throw InvalidArgument("restrict_to_tangent: need d >= 2");
  detail::require_dim(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(w.size()),
                      "restrict_to_tangent");
  const auto [v, beta] = reflector(w);
  const Vector y = m * v;
  const Vector z = m.transpose() * v;
  const double vy = v.dot(y);
  // Q M Q with Q = I - beta v v^T.
  Matrix q = m;
  q.noalias() -= beta * v * z.transpose();
  q.noalias() -= beta * y * v.transpose();
  q.noalias() += (beta * beta * vy) * (v * v.transpose());
  const Eigen::Index d = w.size();
  return q.bottomRightCorner(d - 1, d - 1);
}

}  // namespace quartic
