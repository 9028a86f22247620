#pragma once

#include <complex>
#include <cstddef>
#include <string>

namespace ksmx::kern {

using cplx = std::complex<double>;

// Data-parallel inner loops of the solver. Every entry has a scalar
// reference implementation and an AVX2 variant; the active table is picked
// once at startup from CPU features and can be forced with
// KSMX_KERNEL=scalar|avx2.
//
// Element-wise kernels (cmul_real, flux_combine, stage_combine,
// step_combine, max_abs, max_norm2) produce bit-identical results in both
// variants: they use only per-element mul/add in the same order. The
// reductions dot / sum_sq reassociate and are equivalence-tested to a
// relative tolerance instead.
struct Dispatch {
  // a[i] *= m[i]  (complex coefficient times real multiplier)
  void (*cmul_real)(cplx* a, const double* m, std::size_t n);
  // f[i] = rho[i] * (amp*u[i] + b[i]); u may be null (pure-b flux),
  // b may be null (pure advective flux).
  void (*flux_combine)(double* f, const double* rho, const double* u,
                       const double* b, double amp, std::size_t n);
  // out[i] = eh[i] * (a[i] + c*k1[i])   (integrating-factor half stage)
  void (*stage_combine)(cplx* out, const double* eh, const cplx* a,
                        const cplx* k1, double c, std::size_t n);
  // out[i] = ef[i]*a[i] + c*eh[i]*k2[i] (integrating-factor full step)
  void (*step_combine)(cplx* out, const double* ef, const cplx* a,
                       const double* eh, const cplx* k2, double c,
                       std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_sq)(const double* a, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  // max over i of sum_c comps[c][i]^2
  double (*max_norm2)(const double* const* comps, int ncomp, std::size_t n);
};

const Dispatch& scalar_table();
const Dispatch& avx2_table();  // only valid to call through if avx2_supported()
bool avx2_supported();

// Active table (CPU feature detection + KSMX_KERNEL override, resolved once).
const Dispatch& active();
std::string active_name();

}  // namespace ksmx::kern
