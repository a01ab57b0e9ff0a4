#ifndef NBC_QUADRATURE_HPP
#define NBC_QUADRATURE_HPP

#include <Eigen/Dense>

namespace nbc {

/// Quadrature on the reference simplex of dimension Dim (2: triangle,
/// 3: tetrahedron). Points are barycentric coordinates, one column each;
/// weights sum to the reference measure 1/Dim!.
template <int Dim>
struct SimplexRule {
  Eigen::Matrix<double, Dim + 1, Eigen::Dynamic> points;
  Eigen::VectorXd weights;
  int degree = 0;

  Eigen::Index size() const { return weights.size(); }
  static constexpr double reference_measure() { return Dim == 2 ? 0.5 : 1.0 / 6.0; }
};

using TriangleRule = SimplexRule<2>;
using TetRule = SimplexRule<3>;

/// Smallest available rule that is exact for polynomials of total degree
/// `degree`. Degrees 1, 2, 4 and 5 use symmetric rules with positive weights
/// (degree 3 and 4 share the degree-5 rule on tets); higher degrees fall back
/// to collapsed Gauss-Legendre products. All points are strictly interior.
const TriangleRule& triangle_rule(int degree);
const TetRule& tet_rule(int degree);

/// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

} // namespace nbc

#endif // NBC_QUADRATURE_HPP
