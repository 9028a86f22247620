#pragma once

#include "ksmx/grid.hpp"

namespace ksmx {

// Attractive-kernel parameters: beta in [2, d+1). The kernel is "strong
// singular" when beta > d (Delta K fails to be integrable).
struct KernelSpec {
  double beta;
  int d;
  KernelSpec(double beta_, int d_);
  bool strong_singular() const { return beta > static_cast<double>(d); }
};

// Chemotactic drift B(rho) = grad K * rho with the torus kernel
// Khat(k) = (2 pi |k|)^{-(d+2-beta)}, Khat(0) = 0. Component j carries the
// multiplier 2 pi i k_j (2 pi |k|)^{-(d+2-beta)}, so that
// div B = -(2 pi |k|)^{beta-d} rho_hat (attraction).
std::vector<SpectralField> attractive_field(const SpectralField& rho,
                                            const KernelSpec& ks);

// Delta K * rho: multiplier -(2 pi |k|)^{beta-d}, zero mode annihilated.
SpectralField deltak_convolve(const SpectralField& rho, const KernelSpec& ks);

// div(rho B(rho)) in conservation form: dealiased physical-space flux
// rho * B(rho), spectral divergence. The zero mode of the result is exactly
// zero. Expects rho dealiased.
SpectralField nonlinear_divergence(const SpectralField& rho,
                                   const KernelSpec& ks);

// p_c = d / (alpha + d - beta); requires alpha + d - beta > 0.
double criticality_index(double alpha, double beta, int d);

}  // namespace ksmx
