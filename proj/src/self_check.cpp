#include "nbc/manufactured.hpp"
#include "nbc/ocp.hpp"
#include "nbc/study.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace nbc {

namespace {

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Largest monomial error of a rule over all exponents with total degree <= its degree.
template <int Dim>
double monomial_defect(const SimplexRule<Dim>& rule) {
  double worst = 0.0;
  std::array<int, Dim> e{};
  auto visit = [&](auto&& self, int axis, int budget) -> void {
    if (axis == Dim) {
      int total = 0;
      double exact = 1.0;
      for (int k : e) {
        exact *= factorial(k);
        total += k;
      }
      exact /= factorial(total + Dim);
      double sum = 0.0;
      for (Eigen::Index q = 0; q < rule.size(); ++q) {
        double m = rule.weights(q);
        for (int d = 0; d < Dim; ++d) m *= std::pow(rule.points(d + 1, q), e[d]);
        sum += m;
      }
      worst = std::max(worst, std::abs(sum - exact) / exact);
      return;
    }
    for (int k = 0; k <= budget; ++k) {
      e[axis] = k;
      self(self, axis + 1, budget - k);
    }
  };
  visit(visit, 0, rule.degree);
  return worst;
}

} // namespace

std::vector<CheckResult> run_self_checks() {
  std::vector<CheckResult> results;
  const Angle angles[] = {Angle::HalfPi, Angle::TwoThirdsPi, Angle::ThreeQuartersPi};

  for (Angle a : angles) {
    const OracleReport report = run_oracle_suite(angle_case(a));
    for (const auto& c : report.checks)
      results.push_back({"manufactured[" + to_string(a) + "] " + c.name, c.passed(),
                         "max " + sci(c.max_error) + " (tol " + sci(c.tolerance) + ")"});
  }

  for (Angle a : angles) {
    for (int level = 0; level <= 3; ++level) {
      const Diagnostics d = validate(generate_mesh(angle_case(a), level));
      results.push_back({"mesh[" + to_string(a) + ", level " + std::to_string(level) + "]", d.ok,
                         d.ok ? "edge ratio " + sci(d.edge_ratio) : d.first_violation});
    }
  }

  for (int degree : {1, 2, 4, 5, 7}) {
    const double tet = monomial_defect(tet_rule(degree));
    const double tri = monomial_defect(triangle_rule(degree));
    results.push_back({"tet rule degree " + std::to_string(degree) + " exactness", tet < 1e-12,
                       "max rel error " + sci(tet)});
    results.push_back({"triangle rule degree " + std::to_string(degree) + " exactness",
                       tri < 1e-12, "max rel error " + sci(tri)});
  }

  for (Angle a : angles) {
    const Mesh mesh = generate_mesh(angle_case(a), 2);
    const SparseMatrix A = assemble_system(mesh);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_vertices());
    const double vol = domain_volume(mesh.omega);
    const double err = std::abs(ones.dot(A * ones) - vol) / vol;
    results.push_back({"1^T A 1 = |domain| [" + to_string(a) + "]", err < 1e-10, sci(err)});
  }

  // Small optimal control problem: gradient vs central difference of the
  // cost, Hessian symmetry, KKT residual after the solve.
  {
    const AngleCase omega = angle_case(Angle::ThreeQuartersPi);
    const ManufacturedCase data = build_case(omega, false);
    const Mesh mesh = generate_mesh(omega, 1);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    for (ControlKind kind : {ControlKind::PwConstant, ControlKind::PwLinear}) {
      const ControlSpace space(mesh, kind);
      const OcpProblem problem(space, {data.f, data.g, data.desired, 1.0, 4, 1e-13});
      const Eigen::Index n = space.size();
      auto random = [&] {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
        return v;
      };
      const Eigen::VectorXd q = random(), d = random();
      const double eps = 1e-5;
      const double fd = (eval_cost(problem, q + eps * d) - eval_cost(problem, q - eps * d)) / (2 * eps);
      const double exact = d.dot(reduced_gradient(problem, q));
      const double grad_err = std::abs(fd - exact) / std::abs(exact);
      results.push_back({"reduced gradient vs central difference [" + to_string(kind) + "]",
                         grad_err < 1e-5, sci(grad_err)});

      const Eigen::VectorXd d2 = random();
      const double h12 = d.dot(apply_reduced_hessian(problem, d2));
      const double h21 = d2.dot(apply_reduced_hessian(problem, d));
      const double sym = std::abs(h12 - h21) / std::max(std::abs(h12), std::abs(h21));
      results.push_back({"reduced Hessian symmetry [" + to_string(kind) + "]", sym < 1e-8, sci(sym)});

      const OcpSolution sol = solve_ocp(problem);
      results.push_back({"KKT residual after solve [" + to_string(kind) + "]",
                         sol.relative_kkt_residual < 1e-8, sci(sol.relative_kkt_residual)});
    }
  }
  return results;
}

} // namespace nbc
