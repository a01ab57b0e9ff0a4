#ifndef NBC_MESH_HPP
#define NBC_MESH_HPP

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nbc {

/// Interior angle of the singular edge of the prism domain.
enum class Angle { HalfPi, TwoThirdsPi, ThreeQuartersPi };

/// Opening angle and the singular exponent lambda = pi / omega.
struct AngleCase {
  Angle id;
  double omega;
  double lambda;
};

AngleCase angle_case(Angle id);

/// Parses "pi2", "2pi3", "3pi4". Throws ConfigError otherwise.
Angle parse_angle(const std::string& token);
std::string to_string(Angle id);

/// Planar cross-section of the prism: quadrilateral (0,0),(1,0),(1,1),(c,1)
/// with c = cot(omega), split along the diagonal (0,0)-(1,1).
struct CrossSection {
  std::array<Eigen::Vector2d, 4> vertices;
  std::array<std::array<int, 3>, 2> triangles;

  double area() const;
  double perimeter() const;
};

CrossSection build_cross_section(const AngleCase& omega);

/// Exact measures of the prism cross-section x (0,1).
double domain_volume(const AngleCase& omega);
double domain_boundary_area(const AngleCase& omega);

/// A boundary triangle, vertices ordered so that the right-hand normal points
/// out of the domain.
struct BoundaryFace {
  int tet;
  int local_face; ///< index of the tet vertex opposite to this face
  std::array<int, 3> vertices;
};

/// Conforming tetrahedral mesh. Immutable after construction.
struct Mesh {
  AngleCase omega;
  int level = 0;
  double h = 0.0; ///< max edge length
  Eigen::Matrix3Xd vertices;
  Eigen::Matrix4Xi tets;
  std::vector<BoundaryFace> boundary_faces;

  Eigen::Index num_vertices() const { return vertices.cols(); }
  Eigen::Index num_tets() const { return tets.cols(); }

  Eigen::Vector3d vertex(Eigen::Index i) const { return vertices.col(i); }
  double tet_volume(Eigen::Index t) const;
  double face_area(std::size_t f) const;
  /// Unit outward normal of a boundary face.
  Eigen::Vector3d face_normal(std::size_t f) const;
};

/// Vertex limit for generate_mesh; exceeding it raises ResourceError.
inline constexpr std::int64_t kDefaultVertexLimit = 50'000'000;

/// Structured mesh: each cross-section triangle is red-refined `level` times,
/// extruded into 2^level layers, and every prism is cut into three tets by a
/// vertex-index rule that makes neighbouring prisms agree on face diagonals.
Mesh generate_mesh(const AngleCase& omega, int level,
                   std::int64_t vertex_limit = kDefaultVertexLimit);

/// Vertex count generate_mesh would produce, without building anything.
std::int64_t predicted_vertex_count(int level);

/// Recomputes the boundary face list from the tet connectivity.
/// Throws std::runtime_error if some face is shared by more than two tets.
std::vector<BoundaryFace> extract_boundary(const Eigen::Matrix3Xd& vertices,
                                           const Eigen::Matrix4Xi& tets);

struct Diagnostics {
  bool ok = true;
  std::string first_violation;
  double volume = 0.0;
  double boundary_area = 0.0;
  double edge_ratio = 0.0;

  explicit operator bool() const { return ok; }
};

/// Checks conformity, orientation, quasi-uniformity, outward normals and the
/// measure identities. Reports the first violation; never throws.
Diagnostics validate(const Mesh& mesh);

/// Plain-text dump: vertex count, one "x y z" line per vertex, tet count, one
/// "a b c d" line per tet (0-based indices).
void write_mesh(const Mesh& mesh, std::ostream& out);
void write_mesh(const Mesh& mesh, const std::string& path);

} // namespace nbc

#endif // NBC_MESH_HPP
