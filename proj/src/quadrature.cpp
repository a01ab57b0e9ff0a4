#include "nbc/quadrature.hpp"

#include "nbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace nbc {

namespace {

// Appends every distinct permutation of a barycentric orbit.
template <int Dim>
void add_orbit(std::vector<Eigen::Matrix<double, Dim + 1, 1>>& pts, std::vector<double>& wts,
               Eigen::Matrix<double, Dim + 1, 1> base, double weight) {
  std::sort(base.data(), base.data() + Dim + 1);
  do {
    pts.push_back(base);
    wts.push_back(weight);
  } while (std::next_permutation(base.data(), base.data() + Dim + 1));
}

template <int Dim>
SimplexRule<Dim> pack(const std::vector<Eigen::Matrix<double, Dim + 1, 1>>& pts,
                      const std::vector<double>& wts, int degree) {
  SimplexRule<Dim> rule;
  rule.points.resize(Dim + 1, static_cast<Eigen::Index>(pts.size()));
  rule.weights.resize(static_cast<Eigen::Index>(wts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rule.points.col(static_cast<Eigen::Index>(i)) = pts[i];
    rule.weights(static_cast<Eigen::Index>(i)) = wts[i];
  }
  rule.degree = degree;
  return rule;
}

TriangleRule make_triangle_rule(int degree) {
  using P = Eigen::Vector3d;
  std::vector<P> pts;
  std::vector<double> wts;
  if (degree <= 1) {
    add_orbit<2>(pts, wts, P(1.0 / 3, 1.0 / 3, 1.0 / 3), 0.5);
    return pack<2>(pts, wts, 1);
  }
  if (degree == 2) {
    add_orbit<2>(pts, wts, P(2.0 / 3, 1.0 / 6, 1.0 / 6), 1.0 / 6);
    return pack<2>(pts, wts, 2);
  }
  if (degree <= 4) {
    // 6-point symmetric rule.
    const double a = 0.4459484909159648863183293;
    const double b = 0.09157621350977074345957146;
    add_orbit<2>(pts, wts, P(a, a, 1.0 - 2.0 * a), 0.1116907948390057328475035);
    add_orbit<2>(pts, wts, P(b, b, 1.0 - 2.0 * b), 0.05497587182766093381916316);
    return pack<2>(pts, wts, 4);
  }
  if (degree == 5) {
    // 7-point rule with closed-form orbits (6 -/+ sqrt 15)/21.
    const double s = std::sqrt(15.0);
    const double a = (6.0 - s) / 21.0;
    const double b = (6.0 + s) / 21.0;
    add_orbit<2>(pts, wts, P(1.0 / 3, 1.0 / 3, 1.0 / 3), 9.0 / 80.0);
    add_orbit<2>(pts, wts, P(a, a, 1.0 - 2.0 * a), (155.0 - s) / 2400.0);
    add_orbit<2>(pts, wts, P(b, b, 1.0 - 2.0 * b), (155.0 + s) / 2400.0);
    return pack<2>(pts, wts, 5);
  }
  // Collapsed product: x = u, y = (1-u) v with Jacobian (1-u).
  const int m = (degree + 3) / 2;
  Eigen::VectorXd x, w;
  gauss_legendre(m, x, w);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double u = x(i);
      const double v = (1.0 - u) * x(j);
      pts.push_back(P(1.0 - u - v, u, v));
      wts.push_back(w(i) * w(j) * (1.0 - u));
    }
  }
  return pack<2>(pts, wts, degree);
}

TetRule make_tet_rule(int degree) {
  using P = Eigen::Vector4d;
  std::vector<P> pts;
  std::vector<double> wts;
  if (degree <= 1) {
    add_orbit<3>(pts, wts, P(0.25, 0.25, 0.25, 0.25), 1.0 / 6);
    return pack<3>(pts, wts, 1);
  }
  if (degree == 2) {
    const double a = (5.0 - std::sqrt(5.0)) / 20.0;
    add_orbit<3>(pts, wts, P(a, a, a, 1.0 - 3.0 * a), 1.0 / 24);
    return pack<3>(pts, wts, 2);
  }
  if (degree <= 5) {
    // 14-point symmetric rule, exact to degree 5.
    const double a1 = 0.09273525031089122640232391;
    const double a2 = 0.3108859192633006097973457;
    const double b = 0.04550370412564964949188053;
    add_orbit<3>(pts, wts, P(a1, a1, a1, 1.0 - 3.0 * a1), 0.01224884051939365825728503);
    add_orbit<3>(pts, wts, P(a2, a2, a2, 1.0 - 3.0 * a2), 0.01878132095300264179986428);
    add_orbit<3>(pts, wts, P(b, b, 0.5 - b, 0.5 - b), 0.007091003462846911073011571);
    return pack<3>(pts, wts, 5);
  }
  // Collapsed product over the cube, Jacobian (1-u)^2 (1-v).
  const int m = (degree + 4) / 2;
  Eigen::VectorXd x, w;
  gauss_legendre(m, x, w);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        const double u = x(i);
        const double v = (1.0 - u) * x(j);
        const double s = (1.0 - u) * (1.0 - x(j)) * x(k);
        pts.push_back(P(1.0 - u - v - s, u, v, s));
        wts.push_back(w(i) * w(j) * w(k) * (1.0 - u) * (1.0 - u) * (1.0 - x(j)));
      }
    }
  }
  return pack<3>(pts, wts, degree);
}

template <typename Rule, typename Make>
const Rule& cached(int degree, Make make) {
  if (degree < 1) throw ConfigError("quadrature degree must be at least 1");
  static std::mutex mutex;
  static std::map<int, Rule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make(degree)).first;
  return it->second;
}

} // namespace

const TriangleRule& triangle_rule(int degree) {
  return cached<TriangleRule>(degree, make_triangle_rule);
}

const TetRule& tet_rule(int degree) { return cached<TetRule>(degree, make_tet_rule); }

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Map [-1, 1] -> [0, 1].
    nodes(i) = 0.5 * (1.0 - x);
    weights(i) = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

} // namespace nbc
