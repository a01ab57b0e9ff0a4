#include "nbc/fem.hpp"

#include "nbc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace nbc {

namespace {

using Triplets = std::vector<Eigen::Triplet<double, int>>;

SparseMatrix from_triplets(Eigen::Index n, const Triplets& triplets) {
  SparseMatrix A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

void add_mass(const Mesh& mesh, Eigen::Index t, Triplets& out) {
  const double vol = mesh.tet_volume(t);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out.emplace_back(mesh.tets(i, t), mesh.tets(j, t), vol / 20.0 * (i == j ? 2.0 : 1.0));
}

void add_stiffness(const Mesh& mesh, Eigen::Index t, Triplets& out) {
  const Eigen::Matrix<double, 3, 4> grads = barycentric_gradients(mesh, t);
  const Eigen::Matrix4d local = mesh.tet_volume(t) * grads.transpose() * grads;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.emplace_back(mesh.tets(i, t), mesh.tets(j, t), local(i, j));
}

} // namespace

FeFunction::FeFunction(const Mesh& mesh, Eigen::VectorXd coefficients)
    : mesh_(&mesh), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != mesh.num_vertices())
    throw ConfigError("FeFunction: coefficient count does not match vertex count");
}

FeFunction FeFunction::zero(const Mesh& mesh) {
  return FeFunction(mesh, Eigen::VectorXd::Zero(mesh.num_vertices()));
}

Eigen::Matrix<double, 3, 4> barycentric_gradients(const Mesh& mesh, Eigen::Index t) {
  Eigen::Matrix3d J;
  const Eigen::Vector3d p0 = mesh.vertices.col(mesh.tets(0, t));
  for (int k = 0; k < 3; ++k) J.col(k) = mesh.vertices.col(mesh.tets(k + 1, t)) - p0;
  const double det = J.determinant();
  const double scale = J.colwise().norm().prod();
  if (!(std::abs(det) > 1e-14 * scale))
    throw AssemblyError("degenerate tet " + std::to_string(t));
  // Rows of J^{-1} are the gradients of lambda_1..lambda_3.
  const Eigen::Matrix3d inv = J.inverse();
  Eigen::Matrix<double, 3, 4> grads;
  grads.rightCols<3>() = inv.transpose();
  grads.col(0) = -grads.rightCols<3>().rowwise().sum();
  return grads;
}

SparseMatrix assemble_stiffness(const Mesh& mesh) {
  Triplets triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_tets()) * 16);
  for (Eigen::Index t = 0; t < mesh.num_tets(); ++t) add_stiffness(mesh, t, triplets);
  return from_triplets(mesh.num_vertices(), triplets);
}

SparseMatrix assemble_mass(const Mesh& mesh) {
  Triplets triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_tets()) * 16);
  for (Eigen::Index t = 0; t < mesh.num_tets(); ++t) add_mass(mesh, t, triplets);
  return from_triplets(mesh.num_vertices(), triplets);
}

SparseMatrix assemble_system(const Mesh& mesh) {
  Triplets triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_tets()) * 32);
  for (Eigen::Index t = 0; t < mesh.num_tets(); ++t) {
    add_stiffness(mesh, t, triplets);
    add_mass(mesh, t, triplets);
  }
  return from_triplets(mesh.num_vertices(), triplets);
}

Eigen::VectorXd assemble_volume_load(const Mesh& mesh, const ScalarField& f, int degree) {
  const TetRule& rule = tet_rule(degree);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (Eigen::Index t = 0; t < mesh.num_tets(); ++t) {
    const double scale = mesh.tet_volume(t) / TetRule::reference_measure();
    Eigen::Vector4d local = Eigen::Vector4d::Zero();
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Eigen::Vector4d bary = rule.points.col(q);
      local += rule.weights(q) * f(tet_point(mesh, t, bary)) * bary;
    }
    for (int i = 0; i < 4; ++i) load(mesh.tets(i, t)) += scale * local(i);
  }
  return load;
}

Eigen::VectorXd assemble_boundary_load(const Mesh& mesh, const ScalarField& g, int degree) {
  const TriangleRule& rule = triangle_rule(degree);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (std::size_t f = 0; f < mesh.boundary_faces.size(); ++f) {
    const double scale = mesh.face_area(f) / TriangleRule::reference_measure();
    Eigen::Vector3d local = Eigen::Vector3d::Zero();
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d bary = rule.points.col(q);
      local += rule.weights(q) * g(face_point(mesh, f, bary)) * bary;
    }
    const auto& v = mesh.boundary_faces[f].vertices;
    for (int i = 0; i < 3; ++i) load(v[i]) += scale * local(i);
  }
  return load;
}

FeFunction solve_state(const Mesh& mesh, const SparseMatrix& A, const Eigen::VectorXd& volume_load,
                       const Eigen::VectorXd& boundary_load, double tol, SolveStats* stats) {
  Eigen::VectorXd rhs = volume_load + boundary_load;
  return FeFunction(mesh, solve_spd<double>(A, rhs, tol, stats));
}

FeFunction solve_state(const Mesh& mesh, const ScalarField& f, const Eigen::VectorXd& boundary_load,
                       double tol, int degree) {
  return solve_state(mesh, assemble_system(mesh), assemble_volume_load(mesh, f, degree),
                     boundary_load, tol);
}

FeFunction nodal_interpolate(const Mesh& mesh, const ScalarField& exact) {
  Eigen::VectorXd values(mesh.num_vertices());
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) values(i) = exact(mesh.vertices.col(i));
  return FeFunction(mesh, std::move(values));
}

double l2_error_volume(const FeFunction& u_h, const ScalarField& exact, int degree) {
  const Mesh& mesh = u_h.mesh();
  const double sq = integrate_volume(
      mesh, degree, [&](Eigen::Index t, const Eigen::Vector4d& bary, const Eigen::Vector3d& x) {
        double uh = 0.0;
        for (int i = 0; i < 4; ++i) uh += bary(i) * u_h[mesh.tets(i, t)];
        const double e = exact(x) - uh;
        return e * e;
      });
  return std::sqrt(sq);
}

double l2_error_boundary(const FeFunction& u_h, const ScalarField& exact, int degree) {
  const Mesh& mesh = u_h.mesh();
  const double sq = integrate_boundary(
      mesh, degree, [&](std::size_t f, const Eigen::Vector3d& bary, const Eigen::Vector3d& x) {
        const auto& v = mesh.boundary_faces[f].vertices;
        const double uh = bary(0) * u_h[v[0]] + bary(1) * u_h[v[1]] + bary(2) * u_h[v[2]];
        const double e = exact(x) - uh;
        return e * e;
      });
  return std::sqrt(sq);
}

std::vector<int> boundary_vertices(const Mesh& mesh) {
  std::vector<int> ids;
  ids.reserve(mesh.boundary_faces.size() * 3);
  for (const auto& face : mesh.boundary_faces)
    ids.insert(ids.end(), face.vertices.begin(), face.vertices.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

} // namespace nbc
