#include "nbc/ocp.hpp"

#include "nbc/errors.hpp"

#include <cmath>

namespace nbc {

OcpProblem::OcpProblem(const ControlSpace& space, OcpData data)
    : space_(&space), data_(std::move(data)) {
  if (!(data_.alpha > 0.0)) throw ConfigError("alpha must be positive");
  const Mesh& m = space.mesh();
  A_ = assemble_system(m);
  M_ = assemble_mass(m);
  N_ = nbc::coupling(space);
  MQ_ = gram(space);
  fixed_load_ = Eigen::VectorXd::Zero(m.num_vertices());
  if (data_.f) fixed_load_ += assemble_volume_load(m, data_.f, data_.quad_degree);
  if (data_.g) fixed_load_ += assemble_boundary_load(m, data_.g, data_.quad_degree);
  desired_load_ = data_.desired ? assemble_volume_load(m, data_.desired, data_.quad_degree)
                                : Eigen::VectorXd::Zero(m.num_vertices());
}

Eigen::VectorXd OcpProblem::solve_system(const Eigen::VectorXd& rhs) const {
  return solve_spd<double>(A_, rhs, data_.inner_tol);
}

Eigen::VectorXd OcpProblem::solve_gram(const Eigen::VectorXd& v) const {
  if (space_->kind() == ControlKind::PwConstant) return v.cwiseQuotient(MQ_.diagonal());
  return solve_spd<double>(MQ_, v, data_.inner_tol);
}

FeFunction state_of(const OcpProblem& problem, const Eigen::VectorXd& q) {
  return FeFunction(problem.mesh(),
                    problem.solve_system(problem.coupling() * q + problem.fixed_load()));
}

FeFunction linear_state_of(const OcpProblem& problem, const Eigen::VectorXd& d) {
  return FeFunction(problem.mesh(), problem.solve_system(problem.coupling() * d));
}

FeFunction adjoint_of(const OcpProblem& problem, const FeFunction& u) {
  return FeFunction(problem.mesh(), problem.solve_system(problem.mass() * u.coefficients() -
                                                         problem.desired_load()));
}

Eigen::VectorXd reduced_gradient(const OcpProblem& problem, const Eigen::VectorXd& q) {
  const FeFunction z = adjoint_of(problem, state_of(problem, q));
  return problem.alpha() * (problem.control_gram() * q) +
         problem.coupling().transpose() * z.coefficients();
}

Eigen::VectorXd apply_reduced_hessian(const OcpProblem& problem, const Eigen::VectorXd& d) {
  const Eigen::VectorXd du = problem.solve_system(problem.coupling() * d);
  const Eigen::VectorXd dz = problem.solve_system(problem.mass() * du);
  return problem.alpha() * (problem.control_gram() * d) + problem.coupling().transpose() * dz;
}

Eigen::VectorXd reduced_rhs(const OcpProblem& problem) {
  const Eigen::VectorXd u0 = problem.solve_system(problem.fixed_load());
  const Eigen::VectorXd w = problem.solve_system(problem.desired_load() - problem.mass() * u0);
  return problem.coupling().transpose() * w;
}

double eval_cost(const OcpProblem& problem, const Eigen::VectorXd& q) {
  const FeFunction u = state_of(problem, q);
  const Mesh& mesh = problem.mesh();
  const ScalarField& desired = problem.data().desired;
  const double tracking = integrate_volume(
      mesh, problem.data().quad_degree,
      [&](Eigen::Index t, const Eigen::Vector4d& bary, const Eigen::Vector3d& x) {
        double uh = 0.0;
        for (int i = 0; i < 4; ++i) uh += bary(i) * u[mesh.tets(i, t)];
        const double e = uh - (desired ? desired(x) : 0.0);
        return e * e;
      });
  return 0.5 * tracking + 0.5 * problem.alpha() * q.dot(problem.control_gram() * q);
}

OcpSolution solve_ocp(const OcpProblem& problem, const OcpSolveOptions& options) {
  if (!(options.tol > 0.0)) throw ConfigError("outer tolerance must be positive");
  const Eigen::VectorXd b = reduced_rhs(problem);
  const double bnorm = b.norm();
  const Eigen::Index n = problem.space().size();

  Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
  if (options.initial_guess) {
    if (options.initial_guess->size() != n) throw ConfigError("initial guess has wrong size");
    q = *options.initial_guess;
  }

  int iter = 0;
  if (bnorm > 0.0 || q.squaredNorm() > 0.0) {
    Eigen::VectorXd r = b - apply_reduced_hessian(problem, q);
    const double target = options.tol * (bnorm > 0.0 ? bnorm : 1.0);
    Eigen::VectorXd z = problem.solve_gram(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    while (r.norm() > target) {
      if (iter >= options.max_iterations)
        throw ConvergenceError("solve_ocp: no convergence after " + std::to_string(iter) +
                                   " outer iterations",
                               r.norm() / (bnorm > 0.0 ? bnorm : 1.0), iter);
      const Eigen::VectorXd Hp = apply_reduced_hessian(problem, p);
      const double step = rz / p.dot(Hp);
      q += step * p;
      r -= step * Hp;
      z = problem.solve_gram(r);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
      ++iter;
    }
  }

  OcpSolution sol;
  sol.control = q;
  const FeFunction u = state_of(problem, q);
  const FeFunction z = adjoint_of(problem, u);
  sol.state = u.coefficients();
  sol.adjoint = z.coefficients();
  sol.cost = eval_cost(problem, q);
  sol.kkt_residual = (problem.alpha() * (problem.control_gram() * q) +
                      problem.coupling().transpose() * z.coefficients())
                         .norm();
  sol.rhs_norm = bnorm;
  sol.relative_kkt_residual = bnorm > 0.0 ? sol.kkt_residual / bnorm : sol.kkt_residual;
  sol.outer_iterations = iter;
  return sol;
}

} // namespace nbc
