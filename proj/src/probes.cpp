#include "ksmx/probes.hpp"

#include <cmath>

#include "ksmx/fft.hpp"
#include "ksmx/fractional.hpp"
#include "ksmx/kern.hpp"
#include "ksmx/spectral_ops.hpp"

namespace ksmx {

namespace {

std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

std::size_t argmax_abs(const std::vector<double>& v) {
  std::size_t best = 0;
  double bm = std::fabs(v[0]);
  for (std::size_t i = 1; i < v.size(); ++i) {
    double m = std::fabs(v[i]);
    if (m > bm) {
      bm = m;
      best = i;
    }
  }
  return best;
}

}  // namespace

DichotomyReport maxprinciple_probe(const PhysicalField& f, double alpha,
                                   double p) {
  if (std::isinf(p) || p < 1.0)
    throw parameter_error("maxprinciple_probe: p must be finite and >= 1");
  DichotomyReport rep;
  rep.max_location = argmax(f.values);
  rep.max_value = f.values[rep.max_location];
  if (!(rep.max_value > 0.0))
    throw precondition_error("maxprinciple_probe: max f must be positive");

  SpectralField s = forward_transform(f);
  PhysicalField lap = inverse_transform(frac_laplacian_spectral(s, alpha));
  rep.fraclap_at_max = lap.values[rep.max_location];
  rep.lp_norm_used = lp_norm(f, p);

  const double e = p * alpha / f.grid.d;
  rep.branch_ratio_a = rep.fraclap_at_max * std::pow(rep.lp_norm_used, e) /
                       std::pow(rep.max_value, 1.0 + e);
  rep.branch_ratio_b = rep.max_value / rep.lp_norm_used;
  return rep;
}

DichotomyReport gradient_maxprinciple_probe(const PhysicalField& f,
                                            double alpha, int k) {
  if (k < 1 || k > 3)
    throw parameter_error("gradient_maxprinciple_probe: k must be 1, 2 or 3");
  const TorusGrid& g = f.grid;
  SpectralField s = forward_transform(f);
  PhysicalField gk = inverse_transform(spectral_derivative(s, 0, k));
  PhysicalField gk1 = k == 1 ? f : inverse_transform(
                                       spectral_derivative(s, 0, k - 1));

  DichotomyReport rep;
  rep.max_location = argmax_abs(gk.values);
  rep.max_value = gk.values[rep.max_location];
  double gmax = std::fabs(rep.max_value);
  if (gmax == 0.0)
    throw degenerate_input_error(
        "gradient_maxprinciple_probe: derivative vanishes identically");

  // Quadrature of the squared-difference singular integral at xbar with
  // min-image distances; integrand is O(|delta|^2) at the excluded point.
  const std::size_t sz = g.size();
  const int n = g.n;
  auto xi = unflatten(g, rep.max_location);
  const double gx = rep.max_value;
  const double expo = -(g.d + alpha);
  double acc = 0.0;
  for_each_mode(g, [&](std::size_t j, const std::array<int, 3>& off) {
    if (j == 0) return;
    double r2 = 0.0;
    int idx[3];
    auto ji = unflatten(g, j);
    for (int a = 0; a < g.d; ++a) {
      double da = static_cast<double>(off[a]) / n;  // min-image displacement
      r2 += da * da;
      idx[a] = xi[a] + ji[a];
      if (idx[a] >= n) idx[a] -= n;
    }
    double diff = gx - gk.values[flat_index(g, idx)];
    acc += diff * diff * std::pow(r2, 0.5 * expo);
  });
  double integral = acc / static_cast<double>(sz);

  double dlow = kern::active().max_abs(gk1.values.data(), gk1.values.size());
  rep.fraclap_at_max = integral;
  rep.lp_norm_used = dlow;
  rep.branch_ratio_a =
      integral * std::pow(dlow, alpha) / std::pow(gmax, 2.0 + alpha);
  rep.branch_ratio_b = gmax / dlow;
  return rep;
}

double positivity_gap(const PhysicalField& f, double alpha, int p) {
  if (p < 2 || p % 2 != 0)
    throw parameter_error("positivity_gap: p must be an even integer >= 2");
  const std::size_t sz = f.grid.size();
  SpectralField s = forward_transform(f);
  PhysicalField lap = inverse_transform(frac_laplacian_spectral(s, alpha));

  // int |f|^{p-2} f (-Delta)^{a/2} f
  std::vector<double> h(sz);
  for (std::size_t i = 0; i < sz; ++i) {
    double v = f.values[i];
    h[i] = p == 2 ? v : std::pow(std::fabs(v), p - 2) * v;
  }
  double term1 = kern::active().dot(h.data(), lap.values.data(), sz) /
                 static_cast<double>(sz);

  // (2/p) int ((-Delta)^{alpha/4} |f|^{p/2})^2 : the operator carries the
  // multiplier (2 pi |k|)^{alpha/2}, i.e. seminorm exponent alpha/2.
  PhysicalField fp2(f.grid);
  for (std::size_t i = 0; i < sz; ++i)
    fp2.values[i] = p == 2 ? std::fabs(f.values[i])
                           : std::pow(std::fabs(f.values[i]), 0.5 * p);
  double semi = sobolev_seminorm(forward_transform(fp2), 0.5 * alpha);
  double term2 = (2.0 / p) * semi * semi;

  return term1 - term2;
}

}  // namespace ksmx
