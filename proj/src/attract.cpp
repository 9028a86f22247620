#include "ksmx/attract.hpp"

#include <cmath>

#include "ksmx/fft.hpp"
#include "ksmx/kern.hpp"
#include "ksmx/spectral_ops.hpp"

namespace ksmx {

KernelSpec::KernelSpec(double beta_, int d_) : beta(beta_), d(d_) {
  if (d < 1 || d > 3) throw parameter_error("KernelSpec: d must be 1, 2 or 3");
  if (!(beta >= 2.0 && beta < d + 1.0))
    throw parameter_error("KernelSpec: beta must lie in [2, d+1)");
}

std::vector<SpectralField> attractive_field(const SpectralField& rho,
                                            const KernelSpec& ks) {
  const TorusGrid& g = rho.grid;
  std::vector<SpectralField> B(g.d, SpectralField(g));
  const double two_pi = 2.0 * M_PI;
  const double expo = -(ks.d + 2.0 - ks.beta);
  const int nyq = -g.n / 2;
  for_each_mode(g, [&](std::size_t f, const std::array<int, 3>& k) {
    long k2 = 0;
    for (int a = 0; a < 3; ++a) k2 += static_cast<long>(k[a]) * k[a];
    if (k2 == 0) {
      for (int a = 0; a < g.d; ++a) B[a].coeffs[f] = 0.0;
      return;
    }
    double riesz = std::pow(two_pi * std::sqrt(static_cast<double>(k2)), expo);
    cplx base = cplx(0.0, two_pi * riesz) * rho.coeffs[f];
    // odd multiplier: the self-conjugate Nyquist plane must stay empty
    for (int a = 0; a < g.d; ++a)
      B[a].coeffs[f] =
          k[a] == nyq ? cplx(0.0) : base * static_cast<double>(k[a]);
  });
  return B;
}

SpectralField deltak_convolve(const SpectralField& rho, const KernelSpec& ks) {
  SpectralField out = rho;
  const double two_pi = 2.0 * M_PI;
  const double expo = ks.beta - ks.d;
  for_each_mode(rho.grid, [&](std::size_t f, const std::array<int, 3>& k) {
    long k2 = 0;
    for (int a = 0; a < 3; ++a) k2 += static_cast<long>(k[a]) * k[a];
    if (k2 == 0) {
      out.coeffs[f] = 0.0;
      return;
    }
    out.coeffs[f] *=
        -std::pow(two_pi * std::sqrt(static_cast<double>(k2)), expo);
  });
  return out;
}

SpectralField nonlinear_divergence(const SpectralField& rho,
                                   const KernelSpec& ks) {
  const TorusGrid& g = rho.grid;
  if (g.d != ks.d)
    throw parameter_error("nonlinear_divergence: dimension mismatch");
  const std::size_t sz = g.size();

  std::vector<SpectralField> B = attractive_field(rho, ks);
  std::vector<double> r(sz), b(sz * g.d);
  if (g.d == 1) {
    fft::inverse_pair(g, rho.coeffs.data(), B[0].coeffs.data(), r.data(),
                      b.data());
  } else if (g.d == 2) {
    fft::inverse(g, rho.coeffs.data(), r.data());
    fft::inverse_pair(g, B[0].coeffs.data(), B[1].coeffs.data(), b.data(),
                      b.data() + sz);
  } else {
    fft::inverse_pair(g, rho.coeffs.data(), B[2].coeffs.data(), r.data(),
                      b.data() + 2 * sz);
    fft::inverse_pair(g, B[0].coeffs.data(), B[1].coeffs.data(), b.data(),
                      b.data() + sz);
  }

  const auto& kt = kern::active();
  std::vector<double> flux(sz);
  SpectralField out(g);
  SpectralField comp(g);
  SpectralField comp2(g);
  const double two_pi = 2.0 * M_PI;

  auto accumulate_div = [&](const SpectralField& fj, int axis) {
    for_each_mode(g, [&](std::size_t f, const std::array<int, 3>& k) {
      out.coeffs[f] += cplx(0.0, two_pi * k[axis]) * fj.coeffs[f];
    });
  };

  if (g.d == 1) {
    kt.flux_combine(flux.data(), r.data(), nullptr, b.data(), 0.0, sz);
    fft::forward(g, flux.data(), comp.coeffs.data());
    dealias_inplace(comp);
    accumulate_div(comp, 0);
  } else {
    std::vector<double> flux2(sz);
    kt.flux_combine(flux.data(), r.data(), nullptr, b.data(), 0.0, sz);
    kt.flux_combine(flux2.data(), r.data(), nullptr, b.data() + sz, 0.0, sz);
    fft::forward_pair(g, flux.data(), flux2.data(), comp.coeffs.data(),
                      comp2.coeffs.data());
    dealias_inplace(comp);
    dealias_inplace(comp2);
    accumulate_div(comp, 0);
    accumulate_div(comp2, 1);
    if (g.d == 3) {
      kt.flux_combine(flux.data(), r.data(), nullptr, b.data() + 2 * sz, 0.0,
                      sz);
      fft::forward(g, flux.data(), comp.coeffs.data());
      dealias_inplace(comp);
      accumulate_div(comp, 2);
    }
  }
  out.coeffs[0] = 0.0;  // conservation form: divergence has no mean
  return out;
}

double criticality_index(double alpha, double beta, int d) {
  double denom = alpha + d - beta;
  if (!(denom > 0.0))
    throw parameter_error("criticality_index: alpha + d - beta must be > 0");
  return static_cast<double>(d) / denom;
}

}  // namespace ksmx
