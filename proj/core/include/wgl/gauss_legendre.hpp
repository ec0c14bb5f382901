#pragma once

#include <vector>

namespace wgl {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order, nodes by Newton on P_n. Cached per order.
const GaussRule& gauss_legendre(int order);

/// Composite rule on [a, b] with `panels` equal panels.
GaussRule composite_gauss(double a, double b, int panels, int order);

}  // namespace wgl
