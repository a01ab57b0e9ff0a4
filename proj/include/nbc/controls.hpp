#ifndef NBC_CONTROLS_HPP
#define NBC_CONTROLS_HPP

#include "nbc/fem.hpp"

#include <string>
#include <vector>

namespace nbc {

enum class ControlKind {
  PwConstant, ///< one value per boundary face
  PwLinear,   ///< traces of P1 functions, one value per boundary vertex
};

/// Parses "pw-constant" / "pw-linear". Throws ConfigError otherwise.
ControlKind parse_control_kind(const std::string& token);
std::string to_string(ControlKind kind);

/// Discrete control space on the boundary of a mesh. Non-owning; the mesh
/// must outlive the space.
class ControlSpace {
public:
  ControlSpace(const Mesh& mesh, ControlKind kind);

  ControlKind kind() const { return kind_; }
  const Mesh& mesh() const { return *mesh_; }
  Eigen::Index size() const { return kind_ == ControlKind::PwConstant
                                          ? static_cast<Eigen::Index>(mesh_->boundary_faces.size())
                                          : static_cast<Eigen::Index>(vertices_.size()); }

  /// PwLinear: mesh vertex carrying dof j. PwConstant: empty.
  const std::vector<int>& dof_vertices() const { return vertices_; }
  /// PwLinear: dof of a mesh vertex, -1 for interior vertices.
  int vertex_dof(int vertex) const { return vertex_to_dof_[static_cast<std::size_t>(vertex)]; }

  /// Value at barycentric point `bary` of boundary face f.
  double evaluate(const Eigen::VectorXd& coefficients, std::size_t f,
                  const Eigen::Vector3d& bary) const;

private:
  const Mesh* mesh_;
  ControlKind kind_;
  std::vector<int> vertices_;
  std::vector<int> vertex_to_dof_;
};

inline ControlSpace build_space(const Mesh& mesh, ControlKind kind) { return {mesh, kind}; }

class ControlFunction {
public:
  ControlFunction(const ControlSpace& space, Eigen::VectorXd coefficients);
  static ControlFunction zero(const ControlSpace& space);

  const ControlSpace& space() const { return *space_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }

private:
  const ControlSpace* space_;
  Eigen::VectorXd coefficients_;
};

/// Boundary Gram matrix (psi_i, psi_j): face areas on the diagonal for
/// PwConstant, the surface P1 mass matrix for PwLinear.
SparseMatrix gram(const ControlSpace& space);

/// N(i, j) = boundary integral of psi_j * phi_i; maps control coefficients to
/// a load vector indexed by mesh vertices.
SparseMatrix coupling(const ControlSpace& space);

/// r_j = boundary integral of g * psi_j.
Eigen::VectorXd assemble_control_load(const ControlSpace& space, const ScalarField& g, int degree);

/// L2(boundary) projection onto the control space.
ControlFunction project_boundary(const ControlSpace& space, const ScalarField& g, int degree,
                                 double tol = 1e-11);

/// L2(boundary) norm of exact - q_h.
double l2_error_boundary(const ControlFunction& q_h, const ScalarField& exact, int degree);

/// Per-face mean of the trace of a P1 function (its projection onto
/// face-wise constants).
Eigen::VectorXd face_averages(const FeFunction& u);

} // namespace nbc

#endif // NBC_CONTROLS_HPP
