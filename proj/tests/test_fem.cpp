#include "nbc/errors.hpp"
#include "nbc/fem.hpp"
#include "nbc/manufactured.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace nbc;

namespace {

Mesh reference_tet() {
  Mesh mesh;
  mesh.omega = angle_case(Angle::HalfPi);
  mesh.vertices.resize(3, 4);
  mesh.vertices << 0, 1, 0, 0,
                   0, 0, 1, 0,
                   0, 0, 0, 1;
  mesh.tets.resize(4, 1);
  mesh.tets << 0, 1, 2, 3;
  mesh.boundary_faces = extract_boundary(mesh.vertices, mesh.tets);
  mesh.h = std::sqrt(2.0);
  return mesh;
}

// Affine hat functions of a single tet from the 4x4 interpolation matrix,
// independent of the barycentric-gradient route used by the assembler.
Eigen::Matrix<double, 3, 4> hat_gradients(const Mesh& mesh, Eigen::Index t) {
  Eigen::Matrix4d V;
  for (int i = 0; i < 4; ++i) {
    V(i, 0) = 1.0;
    V.block<1, 3>(i, 1) = mesh.vertices.col(mesh.tets(i, t)).transpose();
  }
  const Eigen::Matrix4d coeffs = V.inverse(); // column j: coefficients of phi_j
  return coeffs.bottomRows<3>();
}

} // namespace

TEST_CASE("reference tet mass matrix") {
  const Mesh mesh = reference_tet();
  const SparseMatrix M = assemble_mass(mesh);
  const Eigen::MatrixXd dense(M);
  for (int i = 0; i < 4; ++i) CHECK(dense.row(i).sum() == doctest::Approx(1.0 / 24.0));
  // Degree-2 quadrature of lambda_i lambda_j.
  const TetRule& rule = tet_rule(2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double q = 0.0;
      for (Eigen::Index k = 0; k < rule.size(); ++k)
        q += rule.weights(k) * rule.points(i, k) * rule.points(j, k);
      CHECK(dense(i, j) == doctest::Approx(q).epsilon(1e-14));
    }
}

TEST_CASE("stiffness matches hat-function gradients") {
  const Mesh mesh = generate_mesh(angle_case(Angle::ThreeQuartersPi), 1);
  const Eigen::MatrixXd K(assemble_stiffness(mesh));
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(K.rows(), K.cols());
  for (Eigen::Index t = 0; t < mesh.num_tets(); ++t) {
    const auto g = hat_gradients(mesh, t);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        ref(mesh.tets(i, t), mesh.tets(j, t)) += mesh.tet_volume(t) * g.col(i).dot(g.col(j));
  }
  CHECK((K - ref).norm() <= 1e-13 * ref.norm());
}

TEST_CASE("system matrix properties") {
  for (Angle a : {Angle::HalfPi, Angle::TwoThirdsPi, Angle::ThreeQuartersPi}) {
    const Mesh mesh = generate_mesh(angle_case(a), 2);
    const SparseMatrix K = assemble_stiffness(mesh);
    const SparseMatrix M = assemble_mass(mesh);
    const SparseMatrix A = assemble_system(mesh);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.num_vertices());
    CHECK((K * ones).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(ones.dot(M * ones) == doctest::Approx(domain_volume(mesh.omega)).epsilon(1e-13));
    CHECK(ones.dot(A * ones) == doctest::Approx(domain_volume(mesh.omega)).epsilon(1e-13));

    const SparseMatrix asym = SparseMatrix(A.transpose()) - A;
    CHECK(asym.norm() <= 1e-13 * A.norm());
    for (int i = 0; i < A.outerSize(); ++i) {
      int prev = -1;
      for (SparseMatrix::InnerIterator it(A, i); it; ++it) {
        CHECK(it.col() > prev);
        prev = static_cast<int>(it.col());
      }
    }
    std::mt19937_64 rng(11);
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd x = test::random_vector(A.rows(), rng);
      CHECK(x.dot(A * x) > 0.0);
    }
  }
}

TEST_CASE("degenerate tet is rejected") {
  Mesh mesh = reference_tet();
  mesh.vertices.col(3) << 0.5, 0.5, 0.0;
  CHECK_THROWS_AS(assemble_stiffness(mesh), AssemblyError);
}

TEST_CASE("volume loads") {
  const Mesh cube = generate_mesh(angle_case(Angle::HalfPi), 1);
  CHECK(assemble_volume_load(cube, [](const Eigen::Vector3d&) { return 1.0; }, 2).sum() ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(assemble_volume_load(cube, [](const Eigen::Vector3d&) { return 0.0; }, 2).norm() == 0.0);
  CHECK(assemble_volume_load(cube, [](const Eigen::Vector3d& x) { return x(0); }, 2).sum() ==
        doctest::Approx(0.5).epsilon(1e-14));
  const Mesh wedge = generate_mesh(angle_case(Angle::ThreeQuartersPi), 2);
  CHECK(assemble_volume_load(wedge, [](const Eigen::Vector3d&) { return 1.0; }, 4).sum() ==
        doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("boundary loads") {
  const Mesh cube = generate_mesh(angle_case(Angle::HalfPi), 1);
  const Eigen::VectorXd one = assemble_boundary_load(cube, [](const Eigen::Vector3d&) { return 1.0; }, 2);
  CHECK(one.sum() == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(assemble_boundary_load(cube, [](const Eigen::Vector3d&) { return 0.0; }, 2).norm() == 0.0);

  // Corner (0,0,0): one third of the area of the boundary patch around it.
  int corner = -1;
  for (Eigen::Index i = 0; i < cube.num_vertices(); ++i)
    if (cube.vertices.col(i).norm() == 0.0) corner = static_cast<int>(i);
  REQUIRE(corner >= 0);
  double patch = 0.0;
  for (std::size_t f = 0; f < cube.boundary_faces.size(); ++f) {
    const auto& v = cube.boundary_faces[f].vertices;
    if (v[0] == corner || v[1] == corner || v[2] == corner) patch += cube.face_area(f);
  }
  CHECK(one(corner) == doctest::Approx(patch / 3.0).epsilon(1e-14));

  // The centre vertex is interior.
  for (Eigen::Index i = 0; i < cube.num_vertices(); ++i)
    if ((cube.vertices.col(i) - Eigen::Vector3d(0.5, 0.5, 0.5)).norm() == 0.0) CHECK(one(i) == 0.0);
}

TEST_CASE("state solves") {
  const Mesh mesh = generate_mesh(angle_case(Angle::TwoThirdsPi), 2);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(mesh.num_vertices());

  SUBCASE("f = 1, g = 0 gives the constant 1") {
    const FeFunction u = solve_state(mesh, [](const Eigen::Vector3d&) { return 1.0; }, zero, 1e-12);
    CHECK((u.coefficients().array() - 1.0).abs().maxCoeff() <= 1e-10);
  }
  SUBCASE("zero data gives zero") {
    const FeFunction u = solve_state(mesh, [](const Eigen::Vector3d&) { return 0.0; }, zero, 1e-12);
    CHECK(u.coefficients().norm() == 0.0);
  }
  SUBCASE("Galerkin orthogonality") {
    const ScalarField f = [](const Eigen::Vector3d& x) { return std::sin(3 * x(0)) + x(2); };
    const ScalarField g = [](const Eigen::Vector3d& x) { return x(1) * x(1); };
    const SparseMatrix A = assemble_system(mesh);
    const Eigen::VectorXd F = assemble_volume_load(mesh, f, 4);
    const Eigen::VectorXd G = assemble_boundary_load(mesh, g, 4);
    const double tol = 1e-11;
    const FeFunction u = solve_state(mesh, A, F, G, tol);
    const Eigen::VectorXd residual = F + G - A * u.coefficients();
    std::mt19937_64 rng(3);
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd v = test::random_vector(mesh.num_vertices(), rng);
      CHECK(std::abs(v.dot(residual)) <= tol * (F + G).norm() * v.norm());
    }
  }
  SUBCASE("Ritz projection reproduces P1 functions") {
    const SparseMatrix A = assemble_system(mesh);
    std::mt19937_64 rng(9);
    const Eigen::VectorXd v = test::random_vector(mesh.num_vertices(), rng);
    const FeFunction u = solve_state(mesh, A, A * v, zero, 1e-13);
    CHECK((u.coefficients() - v).norm() <= 1e-10 * v.norm());
  }
  SUBCASE("Ritz projection of an affine function from its strong data") {
    // v = 1 + 2x - y + 3z: -Lap v + v = v, d_n v = (2,-1,3).n face by face.
    const Eigen::Vector3d grad(2.0, -1.0, 3.0);
    const ScalarField v = [&](const Eigen::Vector3d& x) { return 1.0 + grad.dot(x); };
    Eigen::VectorXd G = zero;
    for (std::size_t f = 0; f < mesh.boundary_faces.size(); ++f) {
      const double flux = grad.dot(mesh.face_normal(f)) * mesh.face_area(f) / 3.0;
      for (int k : mesh.boundary_faces[f].vertices) G(k) += flux;
    }
    const FeFunction u = solve_state(mesh, assemble_system(mesh), assemble_volume_load(mesh, v, 2), G, 1e-13);
    CHECK((u.coefficients() - nodal_interpolate(mesh, v).coefficients()).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("interpolation and error norms") {
  const Mesh mesh = generate_mesh(angle_case(Angle::ThreeQuartersPi), 2);
  const ScalarField affine = [](const Eigen::Vector3d& x) { return 0.5 - x(0) + 2 * x(1) + x(2); };
  const FeFunction ih = nodal_interpolate(mesh, affine);
  CHECK(l2_error_volume(ih, affine, 4) <= 1e-13);
  CHECK(l2_error_boundary(ih, affine, 4) <= 1e-13);

  const FeFunction zero = nodal_interpolate(mesh, [](const Eigen::Vector3d&) { return 0.0; });
  CHECK(zero.coefficients().norm() == 0.0);
  const ScalarField one = [](const Eigen::Vector3d&) { return 1.0; };
  CHECK(l2_error_volume(zero, one, 4) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
  CHECK(l2_error_boundary(zero, one, 4) ==
        doctest::Approx(std::sqrt(7.0 + std::sqrt(2.0))).epsilon(1e-14));
}

TEST_CASE("interpolation error of the exact solution converges at second order") {
  SUBCASE("omega = pi/2") {
    const AngleCase omega = angle_case(Angle::HalfPi);
    const ManufacturedCase data = build_case(omega, false);
    const Mesh m2 = generate_mesh(omega, 2), m3 = generate_mesh(omega, 3);
    const double e2 = l2_error_volume(nodal_interpolate(m2, data.state), data.state, 4);
    const double e3 = l2_error_volume(nodal_interpolate(m3, data.state), data.state, 4);
    CHECK(test::eoc(e2, e3, m2.h, m3.h) == doctest::Approx(2.0).epsilon(0.05));
  }
  SUBCASE("omega = 3pi/4") {
    const AngleCase omega = angle_case(Angle::ThreeQuartersPi);
    const ManufacturedCase data = build_case(omega, false);
    const Mesh m3 = generate_mesh(omega, 3), m4 = generate_mesh(omega, 4);
    const double e3 = l2_error_volume(nodal_interpolate(m3, data.state), data.state, 4);
    const double e4 = l2_error_volume(nodal_interpolate(m4, data.state), data.state, 4);
    CHECK(test::eoc(e3, e4, m3.h, m4.h) >= 1.8);
  }
}

TEST_CASE("Ritz projection of the exact adjoint converges at second order") {
  const AngleCase omega = angle_case(Angle::HalfPi);
  const ManufacturedCase data = build_case(omega, false);
  double prev = 0.0, prev_h = 0.0;
  for (int level = 2; level <= 4; ++level) {
    const Mesh mesh = generate_mesh(omega, level);
    const FeFunction u = solve_state(mesh, data.f, Eigen::VectorXd::Zero(mesh.num_vertices()), 1e-11);
    const double e = l2_error_volume(u, data.state, 4);
    if (level == 4) CHECK(test::eoc(prev, e, prev_h, mesh.h) >= 1.8);
    prev = e;
    prev_h = mesh.h;
  }
}

TEST_CASE("boundary vertex list") {
  const Mesh cube = generate_mesh(angle_case(Angle::HalfPi), 1);
  const auto ids = boundary_vertices(cube);
  CHECK(ids.size() == 26);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  CHECK(boundary_vertices(generate_mesh(angle_case(Angle::HalfPi), 0)).size() == 8);
}
