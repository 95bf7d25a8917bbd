#pragma once

#include "ngconv/core.hpp"

namespace ngconv {

/// Gauss-Hermite rule for the weight e^{-x^2}: sum_i w_i f(x_i) integrates
/// polynomials of degree <= 2Q - 1 exactly, and sum_i w_i = sqrt(pi).
struct GaussHermite {
  VectorXd nodes;
  VectorXd weights;
};

/// Golub-Welsch from the symmetric Jacobi matrix. Cached per order.
const GaussHermite& gauss_hermite(int order);

}  // namespace ngconv
