#pragma once

#include <Eigen/Core>

namespace nsdi {

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Rules are computed once per order and cached; safe to call concurrently.
const GaussLegendreRule& gauss_legendre(int n);

/// Integral of `f` over [a, b] with the given rule.
template <typename Func>
double integrate(const GaussLegendreRule& rule, Func&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return half * sum;
}

}  // namespace nsdi
