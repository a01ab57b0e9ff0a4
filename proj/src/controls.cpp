#include "nbc/controls.hpp"

#include "nbc/errors.hpp"

#include <cmath>

namespace nbc {

namespace {

using Triplets = std::vector<Eigen::Triplet<double, int>>;

} // namespace

ControlKind parse_control_kind(const std::string& token) {
  if (token == "pw-constant") return ControlKind::PwConstant;
  if (token == "pw-linear") return ControlKind::PwLinear;
  throw ConfigError("unknown control space '" + token + "' (expected pw-constant or pw-linear)");
}

std::string to_string(ControlKind kind) {
  return kind == ControlKind::PwConstant ? "pw-constant" : "pw-linear";
}

ControlSpace::ControlSpace(const Mesh& mesh, ControlKind kind) : mesh_(&mesh), kind_(kind) {
  if (kind_ == ControlKind::PwLinear) {
    vertices_ = boundary_vertices(mesh);
    vertex_to_dof_.assign(static_cast<std::size_t>(mesh.num_vertices()), -1);
    for (std::size_t j = 0; j < vertices_.size(); ++j)
      vertex_to_dof_[static_cast<std::size_t>(vertices_[j])] = static_cast<int>(j);
  }
}

double ControlSpace::evaluate(const Eigen::VectorXd& coefficients, std::size_t f,
                              const Eigen::Vector3d& bary) const {
  if (kind_ == ControlKind::PwConstant) return coefficients(static_cast<Eigen::Index>(f));
  const auto& v = mesh_->boundary_faces[f].vertices;
  double value = 0.0;
  for (int i = 0; i < 3; ++i) value += bary(i) * coefficients(vertex_dof(v[i]));
  return value;
}

ControlFunction::ControlFunction(const ControlSpace& space, Eigen::VectorXd coefficients)
    : space_(&space), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != space.size())
    throw ConfigError("ControlFunction: coefficient count does not match the space");
}

ControlFunction ControlFunction::zero(const ControlSpace& space) {
  return ControlFunction(space, Eigen::VectorXd::Zero(space.size()));
}

SparseMatrix gram(const ControlSpace& space) {
  const Mesh& mesh = space.mesh();
  Triplets triplets;
  for (std::size_t f = 0; f < mesh.boundary_faces.size(); ++f) {
    const double area = mesh.face_area(f);
    if (space.kind() == ControlKind::PwConstant) {
      triplets.emplace_back(static_cast<int>(f), static_cast<int>(f), area);
      continue;
    }
    const auto& v = mesh.boundary_faces[f].vertices;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        triplets.emplace_back(space.vertex_dof(v[i]), space.vertex_dof(v[j]),
                              area / 12.0 * (i == j ? 2.0 : 1.0));
  }
  SparseMatrix M(space.size(), space.size());
  M.setFromTriplets(triplets.begin(), triplets.end());
  M.makeCompressed();
  return M;
}

SparseMatrix coupling(const ControlSpace& space) {
  const Mesh& mesh = space.mesh();
  Triplets triplets;
  for (std::size_t f = 0; f < mesh.boundary_faces.size(); ++f) {
    const double area = mesh.face_area(f);
    const auto& v = mesh.boundary_faces[f].vertices;
    for (int i = 0; i < 3; ++i) {
      if (space.kind() == ControlKind::PwConstant) {
        triplets.emplace_back(v[i], static_cast<int>(f), area / 3.0);
        continue;
      }
      for (int j = 0; j < 3; ++j)
        triplets.emplace_back(v[i], space.vertex_dof(v[j]), area / 12.0 * (i == j ? 2.0 : 1.0));
    }
  }
  SparseMatrix N(mesh.num_vertices(), space.size());
  N.setFromTriplets(triplets.begin(), triplets.end());
  N.makeCompressed();
  return N;
}

Eigen::VectorXd assemble_control_load(const ControlSpace& space, const ScalarField& g, int degree) {
  const Mesh& mesh = space.mesh();
  const TriangleRule& rule = triangle_rule(degree);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.size());
  for (std::size_t f = 0; f < mesh.boundary_faces.size(); ++f) {
    const double scale = mesh.face_area(f) / TriangleRule::reference_measure();
    Eigen::Vector3d local = Eigen::Vector3d::Zero();
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d bary = rule.points.col(q);
      local += rule.weights(q) * g(face_point(mesh, f, bary)) * bary;
    }
    if (space.kind() == ControlKind::PwConstant) {
      load(static_cast<Eigen::Index>(f)) += scale * local.sum();
    } else {
      const auto& v = mesh.boundary_faces[f].vertices;
      for (int i = 0; i < 3; ++i) load(space.vertex_dof(v[i])) += scale * local(i);
    }
  }
  return load;
}

ControlFunction project_boundary(const ControlSpace& space, const ScalarField& g, int degree,
                                 double tol) {
  const Eigen::VectorXd rhs = assemble_control_load(space, g, degree);
  const SparseMatrix M = gram(space);
  if (space.kind() == ControlKind::PwConstant)
    return ControlFunction(space, rhs.cwiseQuotient(M.diagonal()));
  return ControlFunction(space, solve_spd<double>(M, rhs, tol));
}

double l2_error_boundary(const ControlFunction& q_h, const ScalarField& exact, int degree) {
  const ControlSpace& space = q_h.space();
  const double sq = integrate_boundary(
      space.mesh(), degree,
      [&](std::size_t f, const Eigen::Vector3d& bary, const Eigen::Vector3d& x) {
        const double e = exact(x) - space.evaluate(q_h.coefficients(), f, bary);
        return e * e;
      });
  return std::sqrt(sq);
}

Eigen::VectorXd face_averages(const FeFunction& u) {
  const Mesh& mesh = u.mesh();
  Eigen::VectorXd avg(static_cast<Eigen::Index>(mesh.boundary_faces.size()));
  for (std::size_t f = 0; f < mesh.boundary_faces.size(); ++f) {
    const auto& v = mesh.boundary_faces[f].vertices;
    avg(static_cast<Eigen::Index>(f)) = (u[v[0]] + u[v[1]] + u[v[2]]) / 3.0;
  }
  return avg;
}

} // namespace nbc
