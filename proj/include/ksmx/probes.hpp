#pragma once

#include "ksmx/grid.hpp"

namespace ksmx {

// Max-point dichotomy data: both branch ratios of the nonlinear maximum
// principle, with no claim about the unspecified constants.
struct DichotomyReport {
  double max_value = 0.0;       // f(xbar)
  std::size_t max_location = 0; // flat row-major index of xbar
  double fraclap_at_max = 0.0;
  double lp_norm_used = 0.0;
  double branch_ratio_a = 0.0;  // fraclap * ||f||_p^{p a/d} / f(xbar)^{1+p a/d}
  double branch_ratio_b = 0.0;  // f(xbar) / ||f||_p
};

// Locates xbar = argmax f (first index in row-major order on ties),
// evaluates (-Delta)^{alpha/2} f there spectrally. Requires max f > 0 and
// finite p >= 1.
DichotomyReport maxprinciple_probe(const PhysicalField& f, double alpha,
                                   double p);

// Derivative variant: g = d^k f / dx_1^k, xbar = argmax |g|, and
//   I = int [g(xbar)-g(y)]^2 / |xbar-y|^{d+alpha} dy   (min-image quadrature)
// reported as ratio_a = I ||D^{k-1}f||_inf^alpha / |g(xbar)|^{2+alpha},
// ratio_b = |g(xbar)| / ||D^{k-1}f||_inf, with D^0 f = f.
DichotomyReport gradient_maxprinciple_probe(const PhysicalField& f,
                                            double alpha, int k);

// int |f|^{p-2} f (-Delta)^{a/2} f dx - (2/p) int ((-Delta)^{a/4}|f|^{p/2})^2 dx
// for even p >= 2; nonnegative up to roundoff.
double positivity_gap(const PhysicalField& f, double alpha, int p);

}  // namespace ksmx
