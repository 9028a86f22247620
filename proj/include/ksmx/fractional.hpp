#pragma once

#include "ksmx/grid.hpp"

namespace ksmx {

// Dissipation order for (-Delta)^{alpha/2}; the kernel representation needs
// alpha strictly inside (0,2).
struct FracLapSpec {
  double alpha;
  explicit FracLapSpec(double a);
};

// 2^alpha Gamma((d+alpha)/2) / (pi^{d/2} |Gamma(-alpha/2)|), the constant in
// front of the principal-value kernel form.
double calpha_constant(double alpha, int d);

// Fourier route: multiply mode k by (2 pi |k|)^alpha. Accepts alpha in (0,2];
// the boundary alpha=2 is plain -Laplacian.
SpectralField frac_laplacian_spectral(const SpectralField& s, double alpha);

struct DirectFracLap {
  PhysicalField field;
  // set when the image-sum truncation bound is not comfortably below the
  // documented agreement tolerance
  bool tail_warning = false;
};

// Singular-integral route: symmetrized lattice quadrature of
// C_{alpha,d} sum_images PV int (f(x)-f(y)) / |x-y+k|^{d+alpha} dy.
// Offsets are paired (+delta, -delta) so the odd part cancels analytically;
// the y = x cell is skipped (its symmetric difference vanishes to second
// order). Summation order is fixed regardless of threading.
DirectFracLap frac_laplacian_direct(const PhysicalField& f,
                                    const FracLapSpec& spec, int image_radius);

}  // namespace ksmx
