#ifndef NBC_OCP_HPP
#define NBC_OCP_HPP

#include "nbc/controls.hpp"
#include "nbc/fem.hpp"

#include <optional>

namespace nbc {

/// Data of the state equation -Lap u + u = f, d_n u = q + g and of the cost
///   j(q) = 1/2 ||u(q) - u_d||^2 + alpha/2 ||q||^2_boundary.
/// Empty fields are treated as zero.
struct OcpData {
  ScalarField f;
  ScalarField g;
  ScalarField desired;
  double alpha = 1.0;
  int quad_degree = 4;
  double inner_tol = 1e-11;
};

/// Discrete reduced problem over a control space. All operators are built
/// once and shared by every evaluation. Non-owning; the space (and its mesh)
/// must outlive the problem.
class OcpProblem {
public:
  OcpProblem(const ControlSpace& space, OcpData data);

  const Mesh& mesh() const { return space_->mesh(); }
  const ControlSpace& space() const { return *space_; }
  const OcpData& data() const { return data_; }
  double alpha() const { return data_.alpha; }
  double inner_tol() const { return data_.inner_tol; }

  const SparseMatrix& system() const { return A_; }       ///< A = K + M
  const SparseMatrix& mass() const { return M_; }         ///< volume mass M
  const SparseMatrix& coupling() const { return N_; }     ///< N
  const SparseMatrix& control_gram() const { return MQ_; } ///< M_Q
  const Eigen::VectorXd& fixed_load() const { return fixed_load_; } ///< F + G
  const Eigen::VectorXd& desired_load() const { return desired_load_; } ///< l_d

  /// A^{-1} rhs with the inner tolerance.
  Eigen::VectorXd solve_system(const Eigen::VectorXd& rhs) const;
  /// M_Q^{-1} v.
  Eigen::VectorXd solve_gram(const Eigen::VectorXd& v) const;

private:
  const ControlSpace* space_;
  OcpData data_;
  SparseMatrix A_, M_, N_, MQ_;
  Eigen::VectorXd fixed_load_;
  Eigen::VectorXd desired_load_;
};

/// u = A^{-1}(N q + F + G).
FeFunction state_of(const OcpProblem& problem, const Eigen::VectorXd& q);
/// Linear part of the control-to-state map, A^{-1} N d.
FeFunction linear_state_of(const OcpProblem& problem, const Eigen::VectorXd& d);
/// z = A^{-1}(M u - l_d).
FeFunction adjoint_of(const OcpProblem& problem, const FeFunction& u);

/// alpha M_Q q + N^T z(q): the coefficient vector of j'(q) tested with every
/// basis function of the control space.
Eigen::VectorXd reduced_gradient(const OcpProblem& problem, const Eigen::VectorXd& q);
/// (alpha M_Q + N^T A^{-1} M A^{-1} N) d.
Eigen::VectorXd apply_reduced_hessian(const OcpProblem& problem, const Eigen::VectorXd& d);
/// Right-hand side b = N^T A^{-1}(l_d - M A^{-1}(F + G)) of H q = b.
Eigen::VectorXd reduced_rhs(const OcpProblem& problem);

/// j(q), with the tracking term integrated against the desired-state field.
double eval_cost(const OcpProblem& problem, const Eigen::VectorXd& q);

struct OcpSolution {
  Eigen::VectorXd control;
  Eigen::VectorXd state;
  Eigen::VectorXd adjoint;
  double cost = 0.0;
  double kkt_residual = 0.0;          ///< ||alpha M_Q q + N^T z||
  double relative_kkt_residual = 0.0; ///< kkt_residual / ||b||
  double rhs_norm = 0.0;              ///< ||b||
  int outer_iterations = 0;
};

struct OcpSolveOptions {
  double tol = 1e-10;
  int max_iterations = 500;
  std::optional<Eigen::VectorXd> initial_guess;
};

/// M_Q-preconditioned CG on the reduced Hessian. Throws ConvergenceError
/// when the iteration cap is reached.
OcpSolution solve_ocp(const OcpProblem& problem, const OcpSolveOptions& options = {});

} // namespace nbc

#endif // NBC_OCP_HPP
