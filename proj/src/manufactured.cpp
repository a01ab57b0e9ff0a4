#include "nbc/manufactured.hpp"

#include "nbc/errors.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace nbc {

namespace {

using Real = long double;
using Point = Eigen::Matrix<Real, 3, 1>;

double max_abs_in(double a, double b) { return std::max(a, std::abs(b)); }

Real state_at(const AngleCase& omega, const Point& x) {
  return exact_state<Real>(static_cast<Real>(omega.lambda), x);
}

class Sampler {
public:
  Sampler(const AngleCase& omega, unsigned seed)
      : cot_(build_cross_section(omega).vertices[3].x()), rng_(seed) {}

  Real uniform(Real lo, Real hi) {
    return lo + (hi - lo) * static_cast<Real>(unit_(rng_));
  }

  // Interior point at distance > margin from every facet with r in [r_lo, r_hi].
  Point interior(Real margin, Real r_lo, Real r_hi) {
    while (true) {
      const Real y = uniform(margin, 1 - margin);
      const Real x = uniform(static_cast<Real>(cot_) * y + 2 * margin, 1 - margin);
      const Real z = uniform(margin, 1 - margin);
      const Real r = std::sqrt(x * x + y * y);
      if (r >= r_lo && r <= r_hi) return Point(x, y, z);
    }
  }

  Real cot() const { return static_cast<Real>(cot_); }

private:
  double cot_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

OracleCheck check_cutoff_derivatives(Sampler& sampler, int samples, bool second) {
  const Real step = 1e-6L;
  OracleCheck check{second ? "cutoff second derivative vs central difference"
                           : "cutoff first derivative vs central difference",
                    0.0, 1e-8, samples};
  for (int i = 0; i < samples; ++i) {
    const Real r = sampler.uniform(0, 1.2L);
    Real fd, exact;
    if (second) {
      fd = (cutoff_prime(r + step) - cutoff_prime(r - step)) / (2 * step);
      exact = cutoff_second(r);
    } else {
      fd = (cutoff(r + step) - cutoff(r - step)) / (2 * step);
      exact = cutoff_prime(r);
    }
    check.max_error = max_abs_in(check.max_error, static_cast<double>(fd - exact));
  }
  return check;
}

// Relative error guarded by unit scale, so sign changes of the Laplacian do
// not blow up the quotient.
OracleCheck check_laplacian(const AngleCase& omega, Sampler& sampler, int samples) {
  const Real step = 1e-4L;
  const Real lambda = static_cast<Real>(omega.lambda);
  OracleCheck check{"Laplacian vs 7-point finite difference (relative)", 0.0, 1e-5, samples};
  for (int i = 0; i < samples; ++i) {
    // Stay clear of the edge singularity and of the jump of eta''' at r = 1.
    const Point x = sampler.interior(4 * step, 0.1L, 0.98L);
    Real fd = -6 * state_at(omega, x);
    for (int d = 0; d < 3; ++d) {
      Point e = Point::Zero();
      e(d) = step;
      fd += state_at(omega, x + e) + state_at(omega, x - e);
    }
    fd /= step * step;
    const Real exact = exact_laplacian<Real>(lambda, x);
    const Real rel = std::abs(fd - exact) / std::max<Real>(std::abs(exact), 1);
    check.max_error = max_abs_in(check.max_error, static_cast<double>(rel));
  }
  return check;
}

OracleCheck check_normal_derivative(const AngleCase& omega, Sampler& sampler, int samples) {
  const Real step = 1e-6L;
  const Real c = sampler.cot();
  const Real sin_w = std::sin(static_cast<Real>(omega.omega));
  const Real cos_w = std::cos(static_cast<Real>(omega.omega));
  OracleCheck check{"normal derivative on all facets", 0.0, 1e-6, 0};

  auto probe = [&](const Point& x, const Point& normal) {
    const Real d = (state_at(omega, x + step * normal) - state_at(omega, x - step * normal)) /
                   (2 * step);
    check.max_error = max_abs_in(check.max_error, static_cast<double>(d));
    ++check.samples;
  };
  for (int i = 0; i < samples; ++i) {
    const Real s = sampler.uniform(0, 1);
    const Real z = sampler.uniform(0, 1);
    probe(Point(s, 0, z), Point(0, -1, 0));                    // phi = 0
    probe(Point(1, s, z), Point(1, 0, 0));                     // x1 = 1
    probe(Point(c + (1 - c) * s, 1, z), Point(0, 1, 0));       // x2 = 1
    probe(Point(c * s, s, z), Point(-sin_w, cos_w, 0));        // phi = omega
    const Point p = sampler.interior(0, 0, 2);
    probe(Point(p(0), p(1), 0), Point(0, 0, -1));              // x3 = 0
    probe(Point(p(0), p(1), 1), Point(0, 0, 1));               // x3 = 1
  }
  return check;
}

} // namespace

bool OracleReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed(); });
}

OracleReport run_oracle_suite(const AngleCase& omega, int samples, unsigned seed) {
  Sampler sampler(omega, seed);
  OracleReport report;
  report.checks.push_back(check_cutoff_derivatives(sampler, samples, false));
  report.checks.push_back(check_cutoff_derivatives(sampler, samples, true));
  report.checks.push_back(check_laplacian(omega, sampler, samples));
  report.checks.push_back(check_normal_derivative(omega, sampler, samples));

  const ManufacturedCase data = build_case(omega, false);

  OracleCheck same{"state equals adjoint", 0.0, 0.0, 10 * samples};
  for (int i = 0; i < same.samples; ++i) {
    const Eigen::Vector3d x = sampler.interior(0, 0, 2).cast<double>();
    same.max_error = max_abs_in(same.max_error, data.state(x) - data.adjoint(x));
  }
  report.checks.push_back(same);

  // |Lap z| <= 2 lambda max|eta'| + max|eta''| + max|eta'/r| + pi^2 with
  // max|eta'| = 16/9 and the other two equal to 12; |z| <= 1.
  const double pi = std::numbers::pi;
  const double lap_bound = 2.0 * omega.lambda * 16.0 / 9.0 + 24.0 + pi * pi;
  OracleCheck bounded{"f and u_d bounded near the singular edge (ratio to bound)", 0.0, 1.0,
                      samples};
  for (int i = 0; i < samples; ++i) {
    const Eigen::Vector3d x = sampler.interior(0, 1e-9L, 1e-2L).cast<double>();
    bounded.max_error = max_abs_in(bounded.max_error, data.f(x) / (lap_bound + 1.0));
    bounded.max_error = max_abs_in(bounded.max_error, data.desired(x) / (lap_bound + 2.0));
  }
  report.checks.push_back(bounded);
  return report;
}

ManufacturedCase build_case(const AngleCase& omega, bool self_check) {
  if (self_check) {
    const OracleReport report = run_oracle_suite(omega);
    if (!report.passed()) {
      std::ostringstream msg;
      msg << "manufactured solution oracle failed for omega = " << to_string(omega.id) << ":";
      for (const auto& c : report.checks)
        if (!c.passed()) msg << " [" << c.name << ": " << c.max_error << " > " << c.tolerance << "]";
      throw OracleError(msg.str());
    }
  }

  const double lambda = omega.lambda;
  ManufacturedCase data;
  data.omega = omega;
  data.alpha = 1.0;
  data.state = [lambda](const Eigen::Vector3d& x) { return exact_state(lambda, x); };
  data.adjoint = data.state;
  data.laplacian = [lambda](const Eigen::Vector3d& x) { return exact_laplacian(lambda, x); };
  data.control = [lambda](const Eigen::Vector3d& x) { return -exact_state(lambda, x); };
  data.g = [lambda](const Eigen::Vector3d& x) { return exact_state(lambda, x); };
  data.f = [lambda](const Eigen::Vector3d& x) {
    return -exact_laplacian(lambda, x) + exact_state(lambda, x);
  };
  data.desired = [lambda](const Eigen::Vector3d& x) {
    // u + Lap z - z with u = z.
    return exact_laplacian(lambda, x);
  };
  return data;
}

bool vertices_in_sector(const Mesh& mesh) {
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
    const double x = mesh.vertices(0, i), y = mesh.vertices(1, i);
    if (x == 0.0 && y == 0.0) continue;
    const double phi = std::atan2(y, x);
    if (phi < -1e-12 || phi > mesh.omega.omega + 1e-12) return false;
  }
  return true;
}

} // namespace nbc
