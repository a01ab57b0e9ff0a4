#ifndef NBC_MANUFACTURED_HPP
#define NBC_MANUFACTURED_HPP

#include "nbc/fem.hpp"
#include "nbc/mesh.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace nbc {

// Exact optimal solution on the prism domains. The state and the adjoint
// coincide:
//
//   z(x) = r^lambda cos(lambda phi) eta(r) cos(pi x3),   lambda = pi / omega,
//
// with the C^1 cut-off eta(r) = (1 + 3r)(1 - r)^3 on [0, 1] and 0 beyond.
// z has zero normal derivative on every facet, so with q = -z, g = z,
// f = -Lap z + z and u_d = z + Lap z - z the pair (q, z) is optimal for
// alpha = 1.
//
// Everything here is templated on the scalar so the finite-difference
// oracles can run in extended precision.

template <typename Scalar>
Scalar cutoff(Scalar r) {
  if (r > Scalar(1)) return Scalar(0);
  const Scalar s = Scalar(1) - r;
  return (Scalar(1) + Scalar(3) * r) * s * s * s;
}

template <typename Scalar>
Scalar cutoff_prime(Scalar r) {
  if (r > Scalar(1)) return Scalar(0);
  const Scalar s = Scalar(1) - r;
  return Scalar(-12) * r * s * s;
}

template <typename Scalar>
Scalar cutoff_second(Scalar r) {
  if (r > Scalar(1)) return Scalar(0);
  return Scalar(-12) * (Scalar(1) - r) * (Scalar(1) - Scalar(3) * r);
}

/// eta'(r) / r, finite at r = 0.
template <typename Scalar>
Scalar cutoff_prime_over_r(Scalar r) {
  if (r > Scalar(1)) return Scalar(0);
  const Scalar s = Scalar(1) - r;
  return Scalar(-12) * s * s;
}

template <typename Scalar>
Scalar exact_state(Scalar lambda, const Eigen::Matrix<Scalar, 3, 1>& x) {
  using std::atan2, std::cos, std::pow, std::sqrt;
  const Scalar r = sqrt(x(0) * x(0) + x(1) * x(1));
  if (r >= Scalar(1)) return Scalar(0);
  const Scalar phi = atan2(x(1), x(0));
  return pow(r, lambda) * cos(lambda * phi) * cutoff(r) *
         cos(std::numbers::pi_v<Scalar> * x(2));
}

/// Closed-form Laplacian of exact_state. r^lambda cos(lambda phi) is harmonic
/// in the plane, so only the cut-off products and the x3 factor survive.
template <typename Scalar>
Scalar exact_laplacian(Scalar lambda, const Eigen::Matrix<Scalar, 3, 1>& x) {
  using std::atan2, std::cos, std::pow, std::sqrt;
  const Scalar r = sqrt(x(0) * x(0) + x(1) * x(1));
  if (r >= Scalar(1)) return Scalar(0);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar phi = atan2(x(1), x(0));
  const Scalar angular = cos(lambda * phi);
  const Scalar axial = cos(pi * x(2));
  const Scalar r_lm1 = pow(r, lambda - Scalar(1));
  const Scalar planar =
      angular * (Scalar(2) * lambda * r_lm1 * cutoff_prime(r) +
                 pow(r, lambda) * cutoff_second(r) + r_lm1 * r * cutoff_prime_over_r(r));
  return axial * planar - pi * pi * exact_state(lambda, x);
}

/// Data of the manufactured optimal control problem for one angle.
struct ManufacturedCase {
  AngleCase omega;
  double alpha = 1.0;
  ScalarField state;   ///< optimal state u
  ScalarField adjoint; ///< optimal adjoint z (equal to the state)
  ScalarField control; ///< optimal control q = -z on the boundary
  ScalarField f;       ///< volume source -Lap u + u
  ScalarField g;       ///< fixed boundary flux -q
  ScalarField desired; ///< desired state u + Lap z - z
  ScalarField laplacian;
};

struct OracleCheck {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  bool passed() const { return max_error <= tolerance; }
};

struct OracleReport {
  std::vector<OracleCheck> checks;
  bool passed() const;
};

/// Finite-difference and consistency oracles for the closed forms:
/// cut-off derivatives, the 7-point Laplacian at interior points, the normal
/// derivative on every facet, ū = z̄, and boundedness of f and u_d near the
/// singular edge.
OracleReport run_oracle_suite(const AngleCase& omega, int samples = 100, unsigned seed = 2024);

/// Wires the callables. With `self_check` the oracle suite runs first and an
/// OracleError aborts construction.
ManufacturedCase build_case(const AngleCase& omega, bool self_check = true);

/// Polar angle of every mesh vertex lies in [0, omega].
bool vertices_in_sector(const Mesh& mesh);

} // namespace nbc

#endif // NBC_MANUFACTURED_HPP
