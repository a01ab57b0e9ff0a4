#include "nbc/mesh.hpp"

#include "nbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace nbc {

namespace {

constexpr double kPi = std::numbers::pi;

// Local vertex triples of the faces of a tet; face f is opposite vertex f.
constexpr std::array<std::array<int, 3>, 4> kTetFaces = {{
    {1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}}};

double signed_volume(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                     const Eigen::Vector3d& c, const Eigen::Vector3d& d) {
  return (b - a).cross(c - a).dot(d - a) / 6.0;
}

struct FaceEntry {
  std::array<int, 3> key; // sorted vertex indices
  int tet;
  int local_face;
};

std::vector<FaceEntry> all_faces(const Eigen::Matrix4Xi& tets) {
  std::vector<FaceEntry> faces;
  faces.reserve(static_cast<std::size_t>(tets.cols()) * 4);
  for (Eigen::Index t = 0; t < tets.cols(); ++t) {
    for (int f = 0; f < 4; ++f) {
      std::array<int, 3> key{tets(kTetFaces[f][0], t), tets(kTetFaces[f][1], t),
                             tets(kTetFaces[f][2], t)};
      std::sort(key.begin(), key.end());
      faces.push_back({key, static_cast<int>(t), f});
    }
  }
  std::sort(faces.begin(), faces.end(), [](const FaceEntry& a, const FaceEntry& b) {
    if (a.key != b.key) return a.key < b.key;
    if (a.tet != b.tet) return a.tet < b.tet;
    return a.local_face < b.local_face;
  });
  return faces;
}

BoundaryFace oriented_face(const Eigen::Matrix3Xd& vertices, const Eigen::Matrix4Xi& tets,
                           int t, int f) {
  BoundaryFace face{t, f,
                    {tets(kTetFaces[f][0], t), tets(kTetFaces[f][1], t),
                     tets(kTetFaces[f][2], t)}};
  const Eigen::Vector3d a = vertices.col(face.vertices[0]);
  const Eigen::Vector3d b = vertices.col(face.vertices[1]);
  const Eigen::Vector3d c = vertices.col(face.vertices[2]);
  const Eigen::Vector3d opposite = vertices.col(tets(f, t));
  if ((b - a).cross(c - a).dot(opposite - a) > 0.0) std::swap(face.vertices[1], face.vertices[2]);
  return face;
}

// Max and min edge length over all tets.
std::pair<double, double> edge_extent(const Mesh& mesh) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (Eigen::Index t = 0; t < mesh.num_tets(); ++t) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        const double len = (mesh.vertices.col(mesh.tets(i, t)) -
                            mesh.vertices.col(mesh.tets(j, t))).norm();
        lo = std::min(lo, len);
        hi = std::max(hi, len);
      }
    }
  }
  return {lo, hi};
}

} // namespace

AngleCase angle_case(Angle id) {
  double omega = 0.0;
  switch (id) {
  case Angle::HalfPi: omega = kPi / 2.0; break;
  case Angle::TwoThirdsPi: omega = 2.0 * kPi / 3.0; break;
  case Angle::ThreeQuartersPi: omega = 3.0 * kPi / 4.0; break;
  default: throw ConfigError("unsupported edge angle");
  }
  return {id, omega, kPi / omega};
}

Angle parse_angle(const std::string& token) {
  if (token == "pi2") return Angle::HalfPi;
  if (token == "2pi3") return Angle::TwoThirdsPi;
  if (token == "3pi4") return Angle::ThreeQuartersPi;
  throw ConfigError("unsupported edge angle '" + token + "' (expected pi2, 2pi3 or 3pi4)");
}

std::string to_string(Angle id) {
  switch (id) {
  case Angle::HalfPi: return "pi2";
  case Angle::TwoThirdsPi: return "2pi3";
  case Angle::ThreeQuartersPi: return "3pi4";
  }
  return "?";
}

double CrossSection::area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const auto& p = vertices[i];
    const auto& q = vertices[(i + 1) % vertices.size()];
    twice += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * twice;
}

double CrossSection::perimeter() const {
  double len = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    len += (vertices[(i + 1) % vertices.size()] - vertices[i]).norm();
  return len;
}

CrossSection build_cross_section(const AngleCase& omega) {
  // cot(omega); pi/2 is pinned to exactly zero so the section is the unit square.
  double c = 0.0;
  switch (omega.id) {
  case Angle::HalfPi: c = 0.0; break;
  case Angle::TwoThirdsPi: c = -1.0 / std::sqrt(3.0); break;
  case Angle::ThreeQuartersPi: c = -1.0; break;
  default: throw ConfigError("unsupported edge angle");
  }
  CrossSection section;
  section.vertices = {Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 0.0),
                      Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(c, 1.0)};
  section.triangles = {{{0, 1, 2}, {0, 2, 3}}};
  return section;
}

double domain_volume(const AngleCase& omega) { return build_cross_section(omega).area(); }

double domain_boundary_area(const AngleCase& omega) {
  const CrossSection section = build_cross_section(omega);
  return 2.0 * section.area() + section.perimeter();
}

double Mesh::tet_volume(Eigen::Index t) const {
  return signed_volume(vertices.col(tets(0, t)), vertices.col(tets(1, t)),
                       vertices.col(tets(2, t)), vertices.col(tets(3, t)));
}

double Mesh::face_area(std::size_t f) const {
  const auto& v = boundary_faces[f].vertices;
  return 0.5 * (vertices.col(v[1]) - vertices.col(v[0]))
                   .cross(vertices.col(v[2]) - vertices.col(v[0]))
                   .norm();
}

Eigen::Vector3d Mesh::face_normal(std::size_t f) const {
  const auto& v = boundary_faces[f].vertices;
  return (vertices.col(v[1]) - vertices.col(v[0]))
      .cross(vertices.col(v[2]) - vertices.col(v[0]))
      .normalized();
}

std::int64_t predicted_vertex_count(int level) {
  if (level < 0) throw ConfigError("mesh level must be non-negative");
  if (level > 20) return std::numeric_limits<std::int64_t>::max();
  const std::int64_t n = std::int64_t{1} << level;
  const std::int64_t planar = (n + 1) * (n + 2) - (n + 1);
  return planar * (n + 1);
}

Mesh generate_mesh(const AngleCase& omega, int level, std::int64_t vertex_limit) {
  const std::int64_t count = predicted_vertex_count(level);
  if (count > vertex_limit)
    throw ResourceError("level " + std::to_string(level) + " needs " + std::to_string(count) +
                        " vertices, limit is " + std::to_string(vertex_limit));

  const CrossSection section = build_cross_section(omega);
  const int n = 1 << level;
  const int layers = n + 1;

  // Planar lattice. Points of triangle k are A + (i/n)(B-A) + (j/n)(C-A); both
  // triangles start at (0,0) and meet along A-B of the second one, which is
  // A-C of the first, so (1, i, 0) is identified with (0, 0, i).
  std::vector<Eigen::Vector2d> planar;
  std::vector<std::vector<int>> index(2, std::vector<int>((n + 1) * (n + 1), -1));
  auto slot = [n](int i, int j) { return i * (n + 1) + j; };
  for (int k = 0; k < 2; ++k) {
    const auto& tri = section.triangles[k];
    const Eigen::Vector2d a = section.vertices[tri[0]];
    const Eigen::Vector2d b = section.vertices[tri[1]];
    const Eigen::Vector2d c = section.vertices[tri[2]];
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; i + j <= n; ++j) {
        if (k == 1 && j == 0) {
          index[1][slot(i, j)] = index[0][slot(0, i)];
          continue;
        }
        index[k][slot(i, j)] = static_cast<int>(planar.size());
        planar.push_back(a + (static_cast<double>(i) * (b - a) + static_cast<double>(j) * (c - a)) /
                                 static_cast<double>(n));
      }
    }
  }

  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; i + j < n; ++j) {
        triangles.push_back({index[k][slot(i, j)], index[k][slot(i + 1, j)],
                             index[k][slot(i, j + 1)]});
        if (i + j + 2 <= n)
          triangles.push_back({index[k][slot(i + 1, j)], index[k][slot(i + 1, j + 1)],
                               index[k][slot(i, j + 1)]});
      }
    }
  }

  Mesh mesh;
  mesh.omega = omega;
  mesh.level = level;
  mesh.vertices.resize(3, static_cast<Eigen::Index>(planar.size()) * layers);
  auto vid = [layers](int p, int layer) { return p * layers + layer; };
  for (std::size_t p = 0; p < planar.size(); ++p) {
    for (int layer = 0; layer < layers; ++layer) {
      mesh.vertices.col(vid(static_cast<int>(p), layer))
          << planar[p], static_cast<double>(layer) / static_cast<double>(n);
    }
  }

  mesh.tets.resize(4, static_cast<Eigen::Index>(triangles.size()) * n * 3);
  Eigen::Index t = 0;
  for (auto tri : triangles) {
    std::sort(tri.begin(), tri.end());
    for (int layer = 0; layer < n; ++layer) {
      const int b0 = vid(tri[0], layer), b1 = vid(tri[1], layer), b2 = vid(tri[2], layer);
      const int t0 = vid(tri[0], layer + 1), t1 = vid(tri[1], layer + 1),
                t2 = vid(tri[2], layer + 1);
      // Every quad side (p,q), p < q, is cut along bottom(p)-top(q).
      const std::array<std::array<int, 4>, 3> split = {
          {{b0, b1, b2, t2}, {b0, b1, t1, t2}, {b0, t0, t1, t2}}};
      for (auto tet : split) {
        const double vol = signed_volume(mesh.vertices.col(tet[0]), mesh.vertices.col(tet[1]),
                                         mesh.vertices.col(tet[2]), mesh.vertices.col(tet[3]));
        if (vol < 0.0) std::swap(tet[2], tet[3]);
        mesh.tets.col(t++) << tet[0], tet[1], tet[2], tet[3];
      }
    }
  }

  mesh.boundary_faces = extract_boundary(mesh.vertices, mesh.tets);
  mesh.h = edge_extent(mesh).second;
  return mesh;
}

std::vector<BoundaryFace> extract_boundary(const Eigen::Matrix3Xd& vertices,
                                           const Eigen::Matrix4Xi& tets) {
  const auto faces = all_faces(tets);
  std::vector<BoundaryFace> boundary;
  for (std::size_t i = 0; i < faces.size();) {
    std::size_t j = i;
    while (j < faces.size() && faces[j].key == faces[i].key) ++j;
    if (j - i > 2)
      throw std::runtime_error("face shared by " + std::to_string(j - i) + " tets");
    if (j - i == 1)
      boundary.push_back(oriented_face(vertices, tets, faces[i].tet, faces[i].local_face));
    i = j;
  }
  std::sort(boundary.begin(), boundary.end(), [](const BoundaryFace& a, const BoundaryFace& b) {
    return a.tet != b.tet ? a.tet < b.tet : a.local_face < b.local_face;
  });
  return boundary;
}

Diagnostics validate(const Mesh& mesh) {
  Diagnostics diag;
  auto fail = [&diag](std::string message) {
    if (diag.ok) {
      diag.ok = false;
      diag.first_violation = std::move(message);
    }
  };

  const Eigen::Index nv = mesh.num_vertices();
  for (Eigen::Index t = 0; t < mesh.num_tets(); ++t) {
    for (int i = 0; i < 4; ++i) {
      if (mesh.tets(i, t) < 0 || mesh.tets(i, t) >= nv) {
        fail("tet " + std::to_string(t) + " references a missing vertex");
        return diag;
      }
    }
  }

  for (Eigen::Index t = 0; t < mesh.num_tets(); ++t) {
    const double vol = mesh.tet_volume(t);
    diag.volume += vol;
    if (!(vol > 0.0)) fail("orientation: tet " + std::to_string(t) + " has non-positive volume");
  }

  const auto faces = all_faces(mesh.tets);
  std::size_t boundary_count = 0;
  for (std::size_t i = 0; i < faces.size();) {
    std::size_t j = i;
    while (j < faces.size() && faces[j].key == faces[i].key) ++j;
    if (j - i > 2) {
      std::ostringstream msg;
      msg << "conformity: face (" << faces[i].key[0] << "," << faces[i].key[1] << ","
          << faces[i].key[2] << ") shared by " << (j - i) << " tets";
      fail(msg.str());
    }
    if (j - i == 1) ++boundary_count;
    i = j;
  }
  if (boundary_count != mesh.boundary_faces.size())
    fail("boundary: stored face list has " + std::to_string(mesh.boundary_faces.size()) +
         " entries, connectivity implies " + std::to_string(boundary_count));

  for (std::size_t f = 0; f < mesh.boundary_faces.size(); ++f) {
    const auto& face = mesh.boundary_faces[f];
    diag.boundary_area += mesh.face_area(f);
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i = 0; i < 4; ++i) centroid += mesh.vertices.col(mesh.tets(i, face.tet)) / 4.0;
    if (mesh.face_normal(f).dot(mesh.vertices.col(face.vertices[0]) - centroid) <= 0.0)
      fail("boundary: face " + std::to_string(f) + " normal points into its tet");
  }

  if (mesh.num_tets() > 0) {
    const auto [lo, hi] = edge_extent(mesh);
    diag.edge_ratio = hi / lo;
    if (!(diag.edge_ratio <= 10.0))
      fail("quasi-uniformity: edge ratio " + std::to_string(diag.edge_ratio) + " exceeds 10");
  }

  const double volume = domain_volume(mesh.omega);
  if (std::abs(diag.volume - volume) > 1e-12 * volume)
    fail("measure: tet volumes sum to " + std::to_string(diag.volume) + ", expected " +
         std::to_string(volume));
  const double area = domain_boundary_area(mesh.omega);
  if (std::abs(diag.boundary_area - area) > 1e-12 * area)
    fail("measure: boundary faces sum to " + std::to_string(diag.boundary_area) +
         ", expected " + std::to_string(area));
  return diag;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  char buf[96];
  out << mesh.num_vertices() << '\n';
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", mesh.vertices(0, i),
                  mesh.vertices(1, i), mesh.vertices(2, i));
    out << buf;
  }
  out << mesh.num_tets() << '\n';
  for (Eigen::Index t = 0; t < mesh.num_tets(); ++t)
    out << mesh.tets(0, t) << ' ' << mesh.tets(1, t) << ' ' << mesh.tets(2, t) << ' '
        << mesh.tets(3, t) << '\n';
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_mesh(mesh, out);
  if (!out) throw std::runtime_error("failed writing mesh to '" + path + "'");
}

} // namespace nbc
