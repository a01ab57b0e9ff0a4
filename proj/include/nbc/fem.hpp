#ifndef NBC_FEM_HPP
#define NBC_FEM_HPP

#include "nbc/mesh.hpp"
#include "nbc/quadrature.hpp"
#include "nbc/sparse.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace nbc {

/// Pointwise data: right-hand sides, desired states, exact solutions.
using ScalarField = std::function<double(const Eigen::Vector3d&)>;

/// Continuous piecewise-linear function, one coefficient per mesh vertex.
/// Holds a non-owning pointer to the mesh, which must outlive it.
class FeFunction {
public:
  FeFunction(const Mesh& mesh, Eigen::VectorXd coefficients);
  static FeFunction zero(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  double operator[](Eigen::Index i) const { return coefficients_(i); }

private:
  const Mesh* mesh_;
  Eigen::VectorXd coefficients_;
};

/// Gradients of the four barycentric coordinates of tet t (one per column).
/// Throws AssemblyError for a degenerate tet.
Eigen::Matrix<double, 3, 4> barycentric_gradients(const Mesh& mesh, Eigen::Index t);

/// Physical point of tet t at barycentric coordinates `bary`.
inline Eigen::Vector3d tet_point(const Mesh& mesh, Eigen::Index t, const Eigen::Vector4d& bary) {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int i = 0; i < 4; ++i) x += bary(i) * mesh.vertices.col(mesh.tets(i, t));
  return x;
}

/// Physical point of boundary face f at barycentric coordinates `bary`.
inline Eigen::Vector3d face_point(const Mesh& mesh, std::size_t f, const Eigen::Vector3d& bary) {
  const auto& v = mesh.boundary_faces[f].vertices;
  return bary(0) * mesh.vertices.col(v[0]) + bary(1) * mesh.vertices.col(v[1]) +
         bary(2) * mesh.vertices.col(v[2]);
}

/// Sum over tets of the quadrature of integrand(t, bary, x).
template <typename Integrand>
double integrate_volume(const Mesh& mesh, int degree, Integrand&& integrand) {
  const TetRule& rule = tet_rule(degree);
  double total = 0.0;
  for (Eigen::Index t = 0; t < mesh.num_tets(); ++t) {
    const double scale = mesh.tet_volume(t) / TetRule::reference_measure();
    double local = 0.0;
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Eigen::Vector4d bary = rule.points.col(q);
      local += rule.weights(q) * integrand(t, bary, tet_point(mesh, t, bary));
    }
    total += scale * local;
  }
  return total;
}

/// Sum over boundary faces of the quadrature of integrand(f, bary, x).
template <typename Integrand>
double integrate_boundary(const Mesh& mesh, int degree, Integrand&& integrand) {
  const TriangleRule& rule = triangle_rule(degree);
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.boundary_faces.size(); ++f) {
    const double scale = mesh.face_area(f) / TriangleRule::reference_measure();
    double local = 0.0;
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d bary = rule.points.col(q);
      local += rule.weights(q) * integrand(f, bary, face_point(mesh, f, bary));
    }
    total += scale * local;
  }
  return total;
}

/// Exact P1 stiffness matrix (grad u, grad v).
SparseMatrix assemble_stiffness(const Mesh& mesh);
/// Exact P1 mass matrix (u, v).
SparseMatrix assemble_mass(const Mesh& mesh);
/// System matrix of -Lap u + u with natural boundary conditions: K + M.
SparseMatrix assemble_system(const Mesh& mesh);

/// Entry i = integral of f * phi_i over the domain.
Eigen::VectorXd assemble_volume_load(const Mesh& mesh, const ScalarField& f, int degree);
/// Entry i = integral of g * phi_i over the boundary; zero at interior vertices.
Eigen::VectorXd assemble_boundary_load(const Mesh& mesh, const ScalarField& g, int degree);

/// Solves A u = volume_load + boundary_load. The result is the Ritz
/// projection of the continuous solution with the same data.
FeFunction solve_state(const Mesh& mesh, const SparseMatrix& A, const Eigen::VectorXd& volume_load,
                       const Eigen::VectorXd& boundary_load, double tol,
                       SolveStats* stats = nullptr);

/// Convenience form that assembles A and the volume load of f itself.
FeFunction solve_state(const Mesh& mesh, const ScalarField& f, const Eigen::VectorXd& boundary_load,
                       double tol, int degree = 4);

FeFunction nodal_interpolate(const Mesh& mesh, const ScalarField& exact);

/// L2(domain) norm of exact - u_h.
double l2_error_volume(const FeFunction& u_h, const ScalarField& exact, int degree);
/// L2(boundary) norm of exact - trace(u_h).
double l2_error_boundary(const FeFunction& u_h, const ScalarField& exact, int degree);

/// Sorted indices of vertices that lie on some boundary face.
std::vector<int> boundary_vertices(const Mesh& mesh);

} // namespace nbc

#endif // NBC_FEM_HPP
