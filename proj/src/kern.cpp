#include "ksmx/kern.hpp"

#include <immintrin.h>

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace ksmx::kern {

// ---------------------------------------------------------------- scalar --

namespace scalar {

static void cmul_real(cplx* a, const double* m, std::size_t n) {
  double* p = reinterpret_cast<double*>(a);
  for (std::size_t i = 0; i < n; ++i) {
    p[2 * i] *= m[i];
    p[2 * i + 1] *= m[i];
  }
}

static void flux_combine(double* f, const double* rho, const double* u,
                         const double* b, double amp, std::size_t n) {
  if (u && b) {
    for (std::size_t i = 0; i < n; ++i) f[i] = rho[i] * (amp * u[i] + b[i]);
  } else if (u) {
    for (std::size_t i = 0; i < n; ++i) f[i] = rho[i] * (amp * u[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) f[i] = rho[i] * b[i];
  }
}

static void stage_combine(cplx* out, const double* eh, const cplx* a,
                          const cplx* k1, double c, std::size_t n) {
  double* o = reinterpret_cast<double*>(out);
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pk = reinterpret_cast<const double*>(k1);
  for (std::size_t i = 0; i < n; ++i) {
    o[2 * i] = eh[i] * (pa[2 * i] + c * pk[2 * i]);
    o[2 * i + 1] = eh[i] * (pa[2 * i + 1] + c * pk[2 * i + 1]);
  }
}

static void step_combine(cplx* out, const double* ef, const cplx* a,
                         const double* eh, const cplx* k2, double c,
                         std::size_t n) {
  double* o = reinterpret_cast<double*>(out);
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pk = reinterpret_cast<const double*>(k2);
  for (std::size_t i = 0; i < n; ++i) {
    o[2 * i] = ef[i] * pa[2 * i] + c * (eh[i] * pk[2 * i]);
    o[2 * i + 1] = ef[i] * pa[2 * i + 1] + c * (eh[i] * pk[2 * i + 1]);
  }
}

static double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

static double sum_sq(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

static double max_abs(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = std::fabs(a[i]);
    if (v > m) m = v;
  }
  return m;
}

static double max_norm2(const double* const* comps, int ncomp, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int c = 0; c < ncomp; ++c) s += comps[c][i] * comps[c][i];
    if (s > m) m = s;
  }
  return m;
}

}  // namespace scalar

// ------------------------------------------------------------------ avx2 --
// Element-wise variants stick to mul/add (no FMA contraction) so they match
// the scalar reference bit for bit; the reductions use FMA and multiple
// accumulators.

namespace avx2 {

__attribute__((target("avx2"))) static void cmul_real(cplx* a, const double* m,
                                                      std::size_t n) {
  double* p = reinterpret_cast<double*>(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m128d ml = _mm_loadu_pd(m + i);
    __m256d mm = _mm256_insertf128_pd(
        _mm256_castpd128_pd256(_mm_unpacklo_pd(ml, ml)),
        _mm_unpackhi_pd(ml, ml), 1);
    __m256d v = _mm256_loadu_pd(p + 2 * i);
    _mm256_storeu_pd(p + 2 * i, _mm256_mul_pd(v, mm));
  }
  for (; i < n; ++i) {
    p[2 * i] *= m[i];
    p[2 * i + 1] *= m[i];
  }
}

__attribute__((target("avx2"))) static void flux_combine(
    double* f, const double* rho, const double* u, const double* b, double amp,
    std::size_t n) {
  std::size_t i = 0;
  const __m256d va = _mm256_set1_pd(amp);
  if (u && b) {
    for (; i + 4 <= n; i += 4) {
      __m256d t = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(u + i)),
                                _mm256_loadu_pd(b + i));
      _mm256_storeu_pd(f + i, _mm256_mul_pd(_mm256_loadu_pd(rho + i), t));
    }
    for (; i < n; ++i) f[i] = rho[i] * (amp * u[i] + b[i]);
  } else if (u) {
    for (; i + 4 <= n; i += 4) {
      __m256d t = _mm256_mul_pd(va, _mm256_loadu_pd(u + i));
      _mm256_storeu_pd(f + i, _mm256_mul_pd(_mm256_loadu_pd(rho + i), t));
    }
    for (; i < n; ++i) f[i] = rho[i] * (amp * u[i]);
  } else {
    for (; i + 4 <= n; i += 4)
      _mm256_storeu_pd(f + i, _mm256_mul_pd(_mm256_loadu_pd(rho + i),
                                            _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) f[i] = rho[i] * b[i];
  }
}

__attribute__((target("avx2"))) static void stage_combine(cplx* out,
                                                          const double* eh,
                                                          const cplx* a,
                                                          const cplx* k1,
                                                          double c,
                                                          std::size_t n) {
  double* o = reinterpret_cast<double*>(out);
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pk = reinterpret_cast<const double*>(k1);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m128d el = _mm_loadu_pd(eh + i);
    __m256d ee = _mm256_insertf128_pd(
        _mm256_castpd128_pd256(_mm_unpacklo_pd(el, el)),
        _mm_unpackhi_pd(el, el), 1);
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vk = _mm256_loadu_pd(pk + 2 * i);
    __m256d t = _mm256_add_pd(va, _mm256_mul_pd(vc, vk));
    _mm256_storeu_pd(o + 2 * i, _mm256_mul_pd(ee, t));
  }
  for (; i < n; ++i) {
    o[2 * i] = eh[i] * (pa[2 * i] + c * pk[2 * i]);
    o[2 * i + 1] = eh[i] * (pa[2 * i + 1] + c * pk[2 * i + 1]);
  }
}

__attribute__((target("avx2"))) static void step_combine(
    cplx* out, const double* ef, const cplx* a, const double* eh,
    const cplx* k2, double c, std::size_t n) {
  double* o = reinterpret_cast<double*>(out);
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pk = reinterpret_cast<const double*>(k2);
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m128d fl = _mm_loadu_pd(ef + i);
    __m256d ff = _mm256_insertf128_pd(
        _mm256_castpd128_pd256(_mm_unpacklo_pd(fl, fl)),
        _mm_unpackhi_pd(fl, fl), 1);
    __m128d hl = _mm_loadu_pd(eh + i);
    __m256d hh = _mm256_insertf128_pd(
        _mm256_castpd128_pd256(_mm_unpacklo_pd(hl, hl)),
        _mm_unpackhi_pd(hl, hl), 1);
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vk = _mm256_loadu_pd(pk + 2 * i);
    __m256d t = _mm256_add_pd(_mm256_mul_pd(ff, va),
                              _mm256_mul_pd(vc, _mm256_mul_pd(hh, vk)));
    _mm256_storeu_pd(o + 2 * i, t);
  }
  for (; i < n; ++i) {
    o[2 * i] = ef[i] * pa[2 * i] + c * (eh[i] * pk[2 * i]);
    o[2 * i + 1] = ef[i] * pa[2 * i + 1] + c * (eh[i] * pk[2 * i + 1]);
  }
}

__attribute__((target("avx2,fma"))) static double dot(const double* a,
                                                      const double* b,
                                                      std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4),
                         s1);
  }
  __m256d s = _mm256_add_pd(s0, s1);
  alignas(32) double buf[4];
  _mm256_store_pd(buf, s);
  double r = buf[0] + buf[1] + buf[2] + buf[3];
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

__attribute__((target("avx2,fma"))) static double sum_sq(const double* a,
                                                         std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d v0 = _mm256_loadu_pd(a + i), v1 = _mm256_loadu_pd(a + i + 4);
    s0 = _mm256_fmadd_pd(v0, v0, s0);
    s1 = _mm256_fmadd_pd(v1, v1, s1);
  }
  __m256d s = _mm256_add_pd(s0, s1);
  alignas(32) double buf[4];
  _mm256_store_pd(buf, s);
  double r = buf[0] + buf[1] + buf[2] + buf[3];
  for (; i < n; ++i) r += a[i] * a[i];
  return r;
}

__attribute__((target("avx2"))) static double max_abs(const double* a,
                                                      std::size_t n) {
  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d vm = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    vm = _mm256_max_pd(vm, _mm256_andnot_pd(signmask, _mm256_loadu_pd(a + i)));
  alignas(32) double buf[4];
  _mm256_store_pd(buf, vm);
  double m = buf[0];
  for (int j = 1; j < 4; ++j)
    if (buf[j] > m) m = buf[j];
  for (; i < n; ++i) {
    double v = std::fabs(a[i]);
    if (v > m) m = v;
  }
  return m;
}

__attribute__((target("avx2"))) static double max_norm2(
    const double* const* comps, int ncomp, std::size_t n) {
  __m256d vm = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_setzero_pd();
    for (int c = 0; c < ncomp; ++c) {
      __m256d v = _mm256_loadu_pd(comps[c] + i);
      s = _mm256_add_pd(s, _mm256_mul_pd(v, v));
    }
    vm = _mm256_max_pd(vm, s);
  }
  alignas(32) double buf[4];
  _mm256_store_pd(buf, vm);
  double m = buf[0];
  for (int j = 1; j < 4; ++j)
    if (buf[j] > m) m = buf[j];
  for (; i < n; ++i) {
    double s = 0.0;
    for (int c = 0; c < ncomp; ++c) s += comps[c][i] * comps[c][i];
    if (s > m) m = s;
  }
  return m;
}

}  // namespace avx2

// -------------------------------------------------------------- dispatch --

const Dispatch& scalar_table() {
  static const Dispatch t = {scalar::cmul_real, scalar::flux_combine,
                             scalar::stage_combine, scalar::step_combine,
                             scalar::dot, scalar::sum_sq, scalar::max_abs,
                             scalar::max_norm2};
  return t;
}

const Dispatch& avx2_table() {
  static const Dispatch t = {avx2::cmul_real, avx2::flux_combine,
                             avx2::stage_combine, avx2::step_combine,
                             avx2::dot, avx2::sum_sq, avx2::max_abs,
                             avx2::max_norm2};
  return t;
}

bool avx2_supported() { return __builtin_cpu_supports("avx2") != 0; }

namespace {

struct Selected {
  const Dispatch* table;
  const char* name;
};

Selected select() {
  const char* force = std::getenv("KSMX_KERNEL");
  if (force && std::strcmp(force, "scalar") == 0)
    return {&scalar_table(), "scalar"};
  if (force && std::strcmp(force, "avx2") == 0 && avx2_supported())
    return {&avx2_table(), "avx2"};
  if (avx2_supported()) return {&avx2_table(), "avx2"};
  return {&scalar_table(), "scalar"};
}

}  // namespace

const Dispatch& active() {
  static const Selected s = select();
  return *s.table;
}

std::string active_name() {
  static const Selected s = select();
  return s.name;
}

}  // namespace ksmx::kern
