#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "quartic/cli.hpp"
#include "quartic/generate.hpp"
#include "quartic/geometry.hpp"
#include "quartic/landscape.hpp"
#include "quartic/random.hpp"

namespace quartic::cli {

namespace {

constexpr std::uint64_t kSelftestSeed = 20240917;

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Random signed tensor: k unit directions with coefficients in [-1, -0.25] u [0.25, 1].
Rank1SumTensor random_tensor(std::size_t dim, std::size_t k, Engine& engine) {
  std::uniform_real_distribution<double> magnitude(0.25, 1.0);
  std::bernoulli_distribution negative(0.3);
  Matrix u(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
  Vector c(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    u.col(static_cast<Eigen::Index>(i)) = uniform_on_sphere(dim, engine);
    const double m = magnitude(engine);
    c(static_cast<Eigen::Index>(i)) = negative(engine) ? -m : m;
  }
  return Rank1SumTensor(std::move(c), std::move(u));
}

double scale(const Rank1SumTensor& t) { return t.coefficients().cwiseAbs().sum(); }

Check oracle_equivalence(const SelftestHooks& hooks) {
  Engine engine = stream_engine(kSelftestSeed, 1, 0);
  double worst = 0.0;
  for (std::size_t n = 0; n < 10; ++n) {
    const std::size_t dim = 2 + n % 5;
    const std::size_t k = 1 + n % std::min<std::size_t>(dim, 4);
    const Rank1SumTensor t = random_tensor(dim, k, engine);
    const DenseTensor4 dense = to_dense(t);
    for (int p = 0; p < 20; ++p) {
      const Vector w = uniform_on_sphere(dim, engine);
      const double expected = dense.contract_full(w);
      const double full = std::abs(hooks.contract_full(t, w) - expected) / std::max(1.0, std::abs(expected));
      const double vec = (hooks.contract_vector(t, w) - dense.contract_vector(w)).norm();
      worst = std::max({worst, full, vec});
    }
  }
  return {"oracle-equivalence", worst <= 1e-10, fmt::format("max error {:.3g}", worst)};
}

Check gradient_check() {
  Engine engine = stream_engine(kSelftestSeed, 2, 0);
  double worst = 0.0;
  for (std::size_t n = 0; n < 10; ++n) {
    const std::size_t dim = 3 + n % 6;
    const Rank1SumTensor t = random_tensor(dim, 1 + n % 4, engine);
    const Vector w = uniform_on_sphere(dim, engine);
    const Vector g = riemannian_gradient(t, w);
    const Vector fd = finite_difference_gradient(t, w, 1e-5);
    worst = std::max(worst, (g - fd).norm() / std::max(g.norm(), 1e-3 * scale(t)));
  }
  return {"gradient-finite-difference", worst <= 1e-6, fmt::format("max relative error {:.3g}", worst)};
}

Check hessian_check() {
  Engine engine = stream_engine(kSelftestSeed, 3, 0);
  double worst = 0.0;
  for (std::size_t n = 0; n < 10; ++n) {
    const std::size_t dim = 3 + n % 6;
    const Rank1SumTensor t = random_tensor(dim, 1 + n % 4, engine);
    const Vector w = uniform_on_sphere(dim, engine);
    Vector v = gaussian_vector(dim, engine);
    v -= v.dot(w) * w;
    v.normalize();
    const double exact = v.dot(riemannian_hessian(t, w) * v);
    const double fd = finite_difference_curvature(t, w, v, 1e-4);
    worst = std::max(worst, std::abs(exact - fd) / std::max(std::abs(exact), 1e-2 * scale(t)));
  }
  return {"hessian-finite-difference", worst <= 1e-4, fmt::format("max relative error {:.3g}", worst)};
}

Check analytic_fixtures() {
  const ComponentSet set = orthonormal_components(6, 3, kSelftestSeed);
  const Rank1SumTensor t = build_tensor(set);

  const CriticalPointCertificate at_component = certify(t, set.vector(0));
  const double spread = (at_component.tangent_spectrum.array() - 1.0).abs().maxCoeff();

  const Vector mid = (set.vector(0) + set.vector(1)) / std::sqrt(2.0);
  const CriticalPointCertificate at_mid = certify(t, mid);
  const double saddle_gap = std::abs(at_mid.min_tangent_eigenvalue + 1.0);
  const double lambda_gap = std::abs(at_mid.lambda_value - 0.5);

  const bool ok = at_component.classification == PointKind::minimum && spread <= 1e-8 &&
                  at_mid.classification == PointKind::saddle && saddle_gap <= 1e-8 && lambda_gap <= 1e-8;
  return {"analytic-fixtures", ok,
          fmt::format("u1: {} (spectrum off by {:.3g}); (u1+u2)/sqrt2: {} (min eig {:.17g}, lambda {:.17g})",
                      to_string(at_component.classification), spread, to_string(at_mid.classification),
                      at_mid.min_tangent_eigenvalue, at_mid.lambda_value)};
}

}  // namespace

SelftestHooks library_contractions() {
  return {[](const Rank1SumTensor& t, VectorCRef w) { return contract_full(t, w); },
          [](const Rank1SumTensor& t, VectorCRef w) { return contract_vector(t, w); }};
}

int cmd_selftest(std::ostream& log, const SelftestHooks& hooks) {
  const Check checks[] = {oracle_equivalence(hooks), gradient_check(), hessian_check(), analytic_fixtures()};
  bool all = true;
  for (const auto& c : checks) {
    fmt::print(log, "{} {}: {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
    all = all && c.passed;
  }
  return all ? exit_code::ok : exit_code::invariant_failure;
}

}  // namespace quartic::cli
