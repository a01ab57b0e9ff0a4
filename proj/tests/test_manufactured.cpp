#include "nbc/errors.hpp"
#include "nbc/manufactured.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace nbc;

namespace {

constexpr Angle kAngles[] = {Angle::HalfPi, Angle::TwoThirdsPi, Angle::ThreeQuartersPi};
constexpr double kPi = std::numbers::pi;

using Point = Eigen::Matrix<long double, 3, 1>;

// Second-order 7-point Laplacian in long double.
long double fd_laplacian(long double lambda, const Point& x, long double h) {
  const long double c = exact_state(lambda, x);
  long double sum = 0.0L;
  for (int d = 0; d < 3; ++d) {
    Point p = x, m = x;
    p(d) += h;
    m(d) -= h;
    sum += exact_state(lambda, p) + exact_state(lambda, m) - 2.0L * c;
  }
  return sum / (h * h);
}

Point random_point_in_sector(double omega, double r_min, double r_max, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ur(r_min, r_max), uphi(0.0, omega), uz(0.0, 1.0);
  const double r = ur(rng), phi = uphi(rng);
  return Point(r * std::cos(phi), r * std::sin(phi), uz(rng));
}

} // namespace

TEST_CASE("cut-off values") {
  CHECK(cutoff(0.0) == 1.0);
  CHECK(cutoff(1.0) == 0.0);
  CHECK(cutoff(1.5) == 0.0);
  CHECK(cutoff(0.5) == doctest::Approx(2.5 * 0.125));
  CHECK(cutoff_prime(0.0) == 0.0);
  CHECK(cutoff_prime(0.5) == doctest::Approx(-1.5));
  CHECK(cutoff_prime(1.0) == 0.0);
  CHECK(cutoff_second(1.0 / 3.0) == doctest::Approx(0.0));
  CHECK(cutoff_second(0.0) == doctest::Approx(-12.0));
  CHECK(cutoff_prime_over_r(0.0) == doctest::Approx(-12.0));
}

TEST_CASE("cut-off derivatives against central differences") {
  const long double h = 1e-6L;
  for (int i = 0; i <= 120; ++i) {
    const long double r = 0.01L * i;
    if (std::abs(r - 1.0L) < 1e-3L) continue; // eta'' jumps at r = 1
    CAPTURE(static_cast<double>(r));
    const long double d1 = (cutoff(r + h) - cutoff(r - h)) / (2 * h);
    const long double d2 = (cutoff_prime(r + h) - cutoff_prime(r - h)) / (2 * h);
    CHECK(static_cast<double>(std::abs(d1 - cutoff_prime(r))) <= 1e-8);
    CHECK(static_cast<double>(std::abs(d2 - cutoff_second(r))) <= 1e-8);
    if (r > 0) CHECK(static_cast<double>(std::abs(cutoff_prime(r) / r - cutoff_prime_over_r(r))) <= 1e-12);
  }
}

TEST_CASE("exact state samples") {
  const double lambda = 2.0;
  // On the x1 axis: r^2 eta(r) cos(pi x3).
  CHECK(exact_state(lambda, Eigen::Vector3d(0.5, 0.0, 0.0)) == doctest::Approx(0.25 * 0.3125));
  CHECK(exact_state(lambda, Eigen::Vector3d(0.5, 0.0, 1.0)) == doctest::Approx(-0.25 * 0.3125));
  CHECK(exact_state(lambda, Eigen::Vector3d(0.5, 0.0, 0.5)) == doctest::Approx(0.0).epsilon(1e-15));
  // On the edge and outside the cut-off radius.
  CHECK(exact_state(lambda, Eigen::Vector3d(0.0, 0.0, 0.3)) == 0.0);
  CHECK(exact_state(lambda, Eigen::Vector3d(1.0, 0.5, 0.3)) == 0.0);
  // cos(2 * pi/4) = 0 on the diagonal for lambda = 2.
  CHECK(exact_state(lambda, Eigen::Vector3d(0.3, 0.3, 0.1)) == doctest::Approx(0.0).epsilon(1e-15));
  // Laplacian vanishes where the cut-off does.
  CHECK(exact_laplacian(lambda, Eigen::Vector3d(1.2, 0.1, 0.4)) == 0.0);
}

TEST_CASE("Laplacian against a finite-difference stencil") {
  std::mt19937_64 rng(99);
  for (Angle a : kAngles) {
    const AngleCase c = angle_case(a);
    CAPTURE(to_string(a));
    const long double lambda = c.lambda;
    for (int k = 0; k < 200; ++k) {
      // Keep the stencil inside the sector and away from r = 1.
      Point x = random_point_in_sector(c.omega, 0.1, 0.98, rng);
      const long double r = std::hypot(x(0), x(1));
      const long double phi = std::atan2(x(1), x(0));
      if (r * std::sin(phi) < 2e-4L || r * std::sin(c.omega - phi) < 2e-4L) continue;
      const long double fd = fd_laplacian(lambda, x, 1e-4L);
      const long double ex = exact_laplacian(lambda, x);
      CHECK(static_cast<double>(std::abs(fd - ex) / std::max(std::abs(ex), 1.0L)) <= 1e-5);
    }
  }
}

TEST_CASE("homogeneous normal derivative on every facet") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const long double h = 1e-6L;
  for (Angle a : kAngles) {
    const AngleCase c = angle_case(a);
    const long double lambda = c.lambda;
    const CrossSection s = build_cross_section(c);
    for (int k = 0; k < 100; ++k) {
      const double t = u(rng), z = u(rng);
      auto dn = [&](const Point& p, const Point& n) {
        return (exact_state(lambda, Point(p + h * n)) - exact_state(lambda, Point(p - h * n))) / (2 * h);
      };
      // Bottom leg of the sector: x2 = 0.
      CHECK(static_cast<double>(std::abs(dn(Point(t, 0, z), Point(0, -1, 0)))) <= 1e-6);
      // Slanted leg: points at angle omega.
      const Point on_ray(t * std::cos(c.omega), t * std::sin(c.omega), z);
      const Point n_ray(-std::sin(c.omega), std::cos(c.omega), 0);
      CHECK(static_cast<double>(std::abs(dn(on_ray, n_ray))) <= 1e-6);
      // Caps x3 = 0 and x3 = 1.
      CHECK(static_cast<double>(std::abs(dn(Point(0.5 * t, 0.3 * t, 0), Point(0, 0, -1)))) <= 1e-6);
      CHECK(static_cast<double>(std::abs(dn(Point(0.5 * t, 0.3 * t, 1), Point(0, 0, 1)))) <= 1e-6);
      // The outer sides x1 = 1 and x2 = 1 lie beyond the cut-off radius.
      const Point right(1, t, z), top(s.vertices[3].x() + t * (1 - s.vertices[3].x()), 1, z);
      CHECK(exact_state(lambda, right) == 0.0L);
      CHECK(exact_state(lambda, top) == 0.0L);
    }
  }
}

TEST_CASE("manufactured case relations") {
  std::mt19937_64 rng(31);
  for (Angle a : kAngles) {
    const AngleCase c = angle_case(a);
    const ManufacturedCase data = build_case(c);
    CHECK(data.alpha == 1.0);
    for (int k = 0; k < 100; ++k) {
      const Point pl = random_point_in_sector(c.omega, 0.0, 1.1, rng);
      const Eigen::Vector3d x = pl.cast<double>();
      const double z = exact_state(c.lambda, x);
      const double lap = exact_laplacian(c.lambda, x);
      CHECK(data.state(x) == doctest::Approx(z));
      CHECK(data.adjoint(x) == data.state(x));
      CHECK(data.control(x) == doctest::Approx(-z));
      CHECK(data.g(x) == doctest::Approx(z));
      CHECK(data.f(x) == doctest::Approx(-lap + z));
      // Adjoint equation -Lap z + z = u - u_d with u = z.
      CHECK(-lap + z == doctest::Approx(data.state(x) - data.desired(x)).epsilon(1e-12));
      // Optimality q = -z / alpha.
      CHECK(data.control(x) == doctest::Approx(-data.adjoint(x) / data.alpha));
    }
  }
}

TEST_CASE("source and desired state stay bounded at the edge") {
  for (Angle a : kAngles) {
    const ManufacturedCase data = build_case(angle_case(a), false);
    const double lambda = angle_case(a).lambda;
    const double bound = 2 * lambda * 16.0 / 9.0 + 24.0 + kPi * kPi + 2.0;
    for (double r : {1e-8, 1e-6, 1e-4, 1e-2}) {
      const Eigen::Vector3d x(r * std::cos(0.3), r * std::sin(0.3), 0.2);
      CHECK(std::abs(data.f(x)) <= bound);
      CHECK(std::abs(data.desired(x)) <= bound);
    }
  }
}

TEST_CASE("oracle suite passes for every angle") {
  for (Angle a : kAngles) {
    const OracleReport report = run_oracle_suite(angle_case(a));
    CHECK(report.checks.size() >= 5);
    for (const auto& c : report.checks) {
      CAPTURE(c.name);
      CHECK(c.passed());
      CHECK(c.samples > 0);
    }
    CHECK(report.passed());
  }
}

TEST_CASE("meshes stay inside the sector") {
  for (Angle a : kAngles)
    for (int level = 0; level <= 3; ++level)
      CHECK(vertices_in_sector(generate_mesh(angle_case(a), level)));
  Mesh moved = generate_mesh(angle_case(Angle::HalfPi), 1);
  moved.vertices(1, 0) = -0.5;
  moved.vertices(0, 0) = 0.5;
  CHECK_FALSE(vertices_in_sector(moved));
}
