#include "ksmx/fractional.hpp"

#include <cmath>

#include "ksmx/fft.hpp"
#include "ksmx/kern.hpp"
#include "ksmx/spectral_ops.hpp"

namespace ksmx {

FracLapSpec::FracLapSpec(double a) : alpha(a) {
  if (!(a > 0.0 && a < 2.0))
    throw parameter_error("FracLapSpec: alpha must lie in (0,2)");
}

double calpha_constant(double alpha, int d) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw parameter_error("calpha_constant: alpha must lie in (0,2)");
  if (d < 1) throw parameter_error("calpha_constant: d must be positive");
  // log-Gamma evaluation; Gamma(-alpha/2) is negative on (0,2) and lgamma
  // returns log|Gamma|, which is exactly what the |.| in the constant needs.
  double lg = alpha * std::log(2.0) + std::lgamma(0.5 * (d + alpha)) -
              0.5 * d * std::log(M_PI) - std::lgamma(-0.5 * alpha);
  return std::exp(lg);
}

SpectralField frac_laplacian_spectral(const SpectralField& s, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw parameter_error("frac_laplacian_spectral: alpha must lie in (0,2]");
  SpectralField out = s;
  const double two_pi = 2.0 * M_PI;
  for_each_mode(s.grid, [&](std::size_t f, const std::array<int, 3>& k) {
    long k2 = 0;
    for (int a = 0; a < 3; ++a) k2 += static_cast<long>(k[a]) * k[a];
    if (k2 == 0) {
      out.coeffs[f] = 0.0;
      return;
    }
    out.coeffs[f] *=
        std::pow(two_pi * std::sqrt(static_cast<double>(k2)), alpha);
  });
  return out;
}

namespace {

// |delta - k|^{-(d+alpha)} summed over integer images |k|_inf <= R, for the
// lattice offset with per-axis displacement delta in [-1/2, 1/2).
std::vector<double> image_weight_table(const TorusGrid& g, double alpha,
                                       int R) {
  std::vector<double> w(g.size(), 0.0);
  const double expo = -(g.d + alpha);
  for_each_mode(g, [&](std::size_t f, const std::array<int, 3>& k) {
    // reuse the signed-wavenumber map: offset j -> j/n in [-1/2, 1/2)
    double dx[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < g.d; ++a) dx[a] = static_cast<double>(k[a]) / g.n;
    double acc = 0.0;
    int img[3] = {0, 0, 0};
    auto visit = [&](int i0, int i1, int i2) {
      img[0] = i0;
      img[1] = i1;
      img[2] = i2;
      double r2 = 0.0;
      for (int a = 0; a < g.d; ++a) {
        double c = dx[a] - img[a];
        r2 += c * c;
      }
      if (r2 == 0.0) return;  // excluded PV point
      acc += std::pow(r2, 0.5 * expo);
    };
    if (g.d == 1) {
      for (int i0 = -R; i0 <= R; ++i0) visit(i0, 0, 0);
    } else if (g.d == 2) {
      for (int i0 = -R; i0 <= R; ++i0)
        for (int i1 = -R; i1 <= R; ++i1) visit(i0, i1, 0);
    } else {
      for (int i0 = -R; i0 <= R; ++i0)
        for (int i1 = -R; i1 <= R; ++i1)
          for (int i2 = -R; i2 <= R; ++i2) visit(i0, i1, i2);
    }
    w[f] = acc;
  });
  return w;
}

}  // namespace

DirectFracLap frac_laplacian_direct(const PhysicalField& f,
                                    const FracLapSpec& spec,
                                    int image_radius) {
  if (image_radius < 1)
    throw parameter_error("frac_laplacian_direct: image_radius must be >= 1");
  const TorusGrid& g = f.grid;
  const int d = g.d, n = g.n;
  const std::size_t sz = g.size();
  const double c_ad = calpha_constant(spec.alpha, d);

  std::vector<double> w = image_weight_table(g, spec.alpha, image_radius);

  // Offsets paired with their negations; self-paired offsets (0 or n/2 per
  // axis) enter once with weight 1.
  const auto& neg = fft::negation_table(g);
  std::vector<std::uint32_t> half, self;
  for (std::size_t j = 1; j < sz; ++j) {
    if (neg[j] == j)
      self.push_back(static_cast<std::uint32_t>(j));
    else if (j < neg[j])
      half.push_back(static_cast<std::uint32_t>(j));
  }

  DirectFracLap res;
  res.field = PhysicalField(g);
  const double quad_w = c_ad / static_cast<double>(sz);

  // x + j with per-axis wraparound, flat indices
  auto offset_site = [&](const std::array<int, 3>& xi,
                         const std::array<int, 3>& ji) {
    int idx[3];
    for (int a = 0; a < d; ++a) {
      idx[a] = xi[a] + ji[a];
      if (idx[a] >= n) idx[a] -= n;
    }
    return flat_index(g, idx);
  };

  std::vector<std::array<int, 3>> half_idx(half.size()), nhalf_idx(half.size()),
      self_idx(self.size());
  for (std::size_t t = 0; t < half.size(); ++t) {
    half_idx[t] = unflatten(g, half[t]);
    nhalf_idx[t] = unflatten(g, neg[half[t]]);
  }
  for (std::size_t t = 0; t < self.size(); ++t)
    self_idx[t] = unflatten(g, self[t]);

  for (std::size_t x = 0; x < sz; ++x) {
    auto xi = unflatten(g, x);
    const double fx = f.values[x];
    double acc = 0.0;
    for (std::size_t t = 0; t < half.size(); ++t) {
      double fp = f.values[offset_site(xi, half_idx[t])];
      double fm = f.values[offset_site(xi, nhalf_idx[t])];
      acc += w[half[t]] * (2.0 * fx - fp - fm);
    }
    for (std::size_t t = 0; t < self.size(); ++t) {
      double fp = f.values[offset_site(xi, self_idx[t])];
      acc += w[self[t]] * (fx - fp);
    }
    res.field.values[x] = quad_w * acc;
  }

  // Image-sum truncation bound: the discarded shells contribute at most
  // ~ C_{alpha,d} * 2 max|f| * S_d * R^{-alpha} / alpha.
  double surf = d == 1 ? 2.0 : (d == 2 ? 2.0 * M_PI : 4.0 * M_PI);
  double fmax = kern::active().max_abs(f.values.data(), sz);
  double tail = c_ad * 2.0 * fmax * surf *
                std::pow(static_cast<double>(image_radius), -spec.alpha) /
                spec.alpha;
  double out_scale =
      kern::active().max_abs(res.field.values.data(), sz);
  res.tail_warning = tail > 5e-3 * std::max(out_scale, 1e-14);
  return res;
}

}  // namespace ksmx
