#include "ksmx/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>

#include "ksmx/kern.hpp"

namespace ksmx {
namespace {

struct PlanSet {
  TorusGrid grid;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::vector<double> sign;          // (-1)^{sum of index parities}
  std::vector<std::uint32_t> neg;    // flat index of -k
  double inv_nd = 0.0;

  explicit PlanSet(const TorusGrid& g) : grid(g) {
    const std::size_t sz = g.size();
    in = fftw_alloc_complex(sz);
    out = fftw_alloc_complex(sz);
    int dims[3] = {g.n, g.n, g.n};
    // Planning cost only pays off for grids the stepper actually hammers.
    unsigned flags = sz >= 4096 ? FFTW_MEASURE : FFTW_ESTIMATE;
    fwd = fftw_plan_dft(g.d, dims, in, out, FFTW_FORWARD, flags);
    bwd = fftw_plan_dft(g.d, dims, in, out, FFTW_BACKWARD, flags);
    sign.resize(sz);
    neg.resize(sz);
    for (std::size_t f = 0; f < sz; ++f) {
      auto idx = unflatten(g, f);
      int par = 0;
      int nidx[3] = {0, 0, 0};
      for (int a = 0; a < g.d; ++a) {
        par += idx[a];
        nidx[a] = (g.n - idx[a]) % g.n;
      }
      sign[f] = (par & 1) ? -1.0 : 1.0;
      neg[f] = static_cast<std::uint32_t>(flat_index(g, nidx));
    }
    inv_nd = 1.0 / static_cast<double>(sz);
  }
  ~PlanSet() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(in);
    fftw_free(out);
  }
  PlanSet(const PlanSet&) = delete;
  PlanSet& operator=(const PlanSet&) = delete;
};

std::mutex g_mutex;

// Callers must hold g_mutex: the registry and the per-grid scratch buffers
// are shared state.
PlanSet& plans_for(const TorusGrid& g) {
  static std::map<std::pair<int, int>, std::unique_ptr<PlanSet>> registry;
  auto key = std::make_pair(g.d, g.n);
  auto it = registry.find(key);
  if (it == registry.end())
    it = registry.emplace(key, std::make_unique<PlanSet>(g)).first;
  return *it->second;
}

}  // namespace

namespace fft {

const std::vector<std::uint32_t>& negation_table(const TorusGrid& g) {
  std::lock_guard<std::mutex> lock(g_mutex);
  return plans_for(g).neg;
}

void forward(const TorusGrid& g, const double* phys, cplx* spec) {
  std::lock_guard<std::mutex> lock(g_mutex);
  PlanSet& p = plans_for(g);
  const std::size_t sz = g.size();
  for (std::size_t i = 0; i < sz; ++i) {
    p.in[i][0] = phys[i];
    p.in[i][1] = 0.0;
  }
  fftw_execute(p.fwd);
  for (std::size_t i = 0; i < sz; ++i) {
    double sc = p.sign[i] * p.inv_nd;
    spec[i] = cplx(p.out[i][0] * sc, p.out[i][1] * sc);
  }
}

void inverse(const TorusGrid& g, const cplx* spec, double* phys) {
  std::lock_guard<std::mutex> lock(g_mutex);
  PlanSet& p = plans_for(g);
  const std::size_t sz = g.size();
  for (std::size_t i = 0; i < sz; ++i) {
    p.in[i][0] = spec[i].real() * p.sign[i];
    p.in[i][1] = spec[i].imag() * p.sign[i];
  }
  fftw_execute(p.bwd);
  for (std::size_t i = 0; i < sz; ++i) phys[i] = p.out[i][0];
}

double inverse_residue(const TorusGrid& g, const cplx* spec, double* phys) {
  std::lock_guard<std::mutex> lock(g_mutex);
  PlanSet& p = plans_for(g);
  const std::size_t sz = g.size();
  for (std::size_t i = 0; i < sz; ++i) {
    p.in[i][0] = spec[i].real() * p.sign[i];
    p.in[i][1] = spec[i].imag() * p.sign[i];
  }
  fftw_execute(p.bwd);
  double resid = 0.0;
  for (std::size_t i = 0; i < sz; ++i) {
    phys[i] = p.out[i][0];
    resid = std::max(resid, std::fabs(p.out[i][1]));
  }
  return resid;
}

void inverse_pair(const TorusGrid& g, const cplx* s1, const cplx* s2,
                  double* r1, double* r2) {
  std::lock_guard<std::mutex> lock(g_mutex);
  PlanSet& p = plans_for(g);
  const std::size_t sz = g.size();
  for (std::size_t i = 0; i < sz; ++i) {
    p.in[i][0] = (s1[i].real() - s2[i].imag()) * p.sign[i];
    p.in[i][1] = (s1[i].imag() + s2[i].real()) * p.sign[i];
  }
  fftw_execute(p.bwd);
  for (std::size_t i = 0; i < sz; ++i) {
    r1[i] = p.out[i][0];
    r2[i] = p.out[i][1];
  }
}

void forward_pair(const TorusGrid& g, const double* r1, const double* r2,
                  cplx* s1, cplx* s2) {
  std::lock_guard<std::mutex> lock(g_mutex);
  PlanSet& p = plans_for(g);
  const std::size_t sz = g.size();
  for (std::size_t i = 0; i < sz; ++i) {
    p.in[i][0] = r1[i];
    p.in[i][1] = r2[i];
  }
  fftw_execute(p.fwd);
  for (std::size_t i = 0; i < sz; ++i) {
    std::uint32_t m = p.neg[i];
    cplx gk(p.out[i][0], p.out[i][1]);
    cplx gm(p.out[m][0], -p.out[m][1]);
    double sc = 0.5 * p.sign[i] * p.inv_nd;
    cplx sum = gk + gm;
    cplx dif = gk - gm;
    s1[i] = cplx(sum.real() * sc, sum.imag() * sc);
    s2[i] = cplx(dif.imag() * sc, -dif.real() * sc);
  }
}

}  // namespace fft

SpectralField forward_transform(const PhysicalField& f) {
  for (double v : f.values)
    if (!std::isfinite(v))
      throw data_error("forward_transform: non-finite sample");
  SpectralField s(f.grid);
  fft::forward(f.grid, f.values.data(), s.coeffs.data());
  return s;
}

PhysicalField inverse_transform(const SpectralField& s) {
  PhysicalField f(s.grid);
  double resid = fft::inverse_residue(s.grid, s.coeffs.data(), f.values.data());
  double scale = kern::active().max_abs(f.values.data(), f.values.size());
  if (resid > 1e-12 * std::max(scale, 1e-300))
    throw data_error("inverse_transform: Hermitian symmetry violated");
  return f;
}

}  // namespace ksmx
