#include "ksmx/opmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "ksmx/spectral_ops.hpp"

extern "C" void zgemm_(const char*, const char*, const int*, const int*,
                       const int*, const void*, const void*, const int*,
                       const void*, const int*, const void*, void*,
                       const int*);

namespace ksmx {

namespace linalg {

namespace {

// row-major C = A * B via column-major zgemm with swapped operands
void mat_mul(const std::vector<cplx>& a, const std::vector<cplx>& b,
             std::vector<cplx>& c, int n) {
  const cplx one(1.0, 0.0), zero(0.0, 0.0);
  c.resize(static_cast<std::size_t>(n) * n);
  zgemm_("N", "N", &n, &n, &n, &one, b.data(), &n, a.data(), &n, &zero,
         c.data(), &n);
}

double one_norm(const std::vector<cplx>& a, int n) {
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += std::abs(a[static_cast<std::size_t>(i) * n + j]);
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

std::vector<double> singular_values(const std::vector<cplx>& a, int n) {
  std::vector<cplx> work = a;  // gesdd destroys its input
  std::vector<double> s(n);
  // values-only: row/column order is immaterial (sigma(A) = sigma(A^T))
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, work.data(), n,
                                   s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("zgesdd failed");
  return s;
}

// Higham's scaling-and-squaring with the [13/13] Pade approximant.
std::vector<cplx> matrix_exponential(const std::vector<cplx>& a, int n) {
  static const double b[14] = {64764752532480000.0,
                               32382376266240000.0,
                               7771770303897600.0,
                               1187353796428800.0,
                               129060195264000.0,
                               10559470521600.0,
                               670442572800.0,
                               33522128640.0,
                               1323241920.0,
                               40840800.0,
                               960960.0,
                               16380.0,
                               182.0,
                               1.0};
  const double theta13 = 5.371920351148152;
  const std::size_t nn = static_cast<std::size_t>(n) * n;

  std::vector<cplx> A = a;
  double nrm = one_norm(A, n);
  int s = 0;
  if (nrm > theta13) {
    s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    double sc = std::ldexp(1.0, -s);
    for (cplx& v : A) v *= sc;
  }

  std::vector<cplx> A2, A4, A6, tmp, U, V;
  mat_mul(A, A, A2, n);
  mat_mul(A2, A2, A4, n);
  mat_mul(A2, A4, A6, n);

  // U = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
  std::vector<cplx> W(nn, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < nn; ++i)
    W[i] = b[13] * A6[i] + b[11] * A4[i] + b[9] * A2[i];
  mat_mul(A6, W, tmp, n);
  for (std::size_t i = 0; i < nn; ++i)
    tmp[i] += b[7] * A6[i] + b[5] * A4[i] + b[3] * A2[i];
  for (int i = 0; i < n; ++i)
    tmp[static_cast<std::size_t>(i) * n + i] += b[1];
  mat_mul(A, tmp, U, n);

  // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
  for (std::size_t i = 0; i < nn; ++i)
    W[i] = b[12] * A6[i] + b[10] * A4[i] + b[8] * A2[i];
  mat_mul(A6, W, V, n);
  for (std::size_t i = 0; i < nn; ++i)
    V[i] += b[6] * A6[i] + b[4] * A4[i] + b[2] * A2[i];
  for (int i = 0; i < n; ++i)
    V[static_cast<std::size_t>(i) * n + i] += b[0];

  // solve (V - U) X = (V + U)
  std::vector<cplx> M(nn), X(nn);
  for (std::size_t i = 0; i < nn; ++i) {
    M[i] = V[i] - U[i];
    X[i] = V[i] + U[i];
  }
  std::vector<lapack_int> ipiv(n);
  lapack_int info = LAPACKE_zgesv(LAPACK_ROW_MAJOR, n, n, M.data(), n,
                                  ipiv.data(), X.data(), n);
  if (info != 0) throw std::runtime_error("zgesv failed in expm");

  for (int k = 0; k < s; ++k) {
    mat_mul(X, X, tmp, n);
    X.swap(tmp);
  }
  return X;
}

}  // namespace linalg

int OperatorMatrix::mode_index(const std::array<int, 3>& k) const {
  for (int a = d; a < 3; ++a)
    if (k[a] != 0) return -1;
  const int w = 2 * trunc_N + 1;
  long idx = 0;
  bool zero = true;
  for (int a = 0; a < d; ++a) {
    if (std::abs(k[a]) > trunc_N) return -1;
    if (k[a] != 0) zero = false;
    idx = idx * w + (k[a] + trunc_N);
  }
  if (zero) return -1;
  // positions after removing the k = 0 row from the cube ordering
  long zero_pos = 0;
  for (int a = 0; a < d; ++a) zero_pos = zero_pos * w + trunc_N;
  return static_cast<int>(idx < zero_pos ? idx : idx - 1);
}

namespace {

// Fourier coefficient uhat_comp(q) of the frozen-phase catalog flow.
// Shear flows have the single-harmonic profile sin(2 pi m x_prof).
struct FlowSymbol {
  int comp = -1;      // flowing component, -1 for none
  int prof = 0;       // profile axis
  int m = 1;
  const FlowSpec* custom = nullptr;
  int d = 2;

  cplx coefficient(int component, const std::array<int, 3>& q,
                   const TorusGrid* cgrid) const {
    if (custom) {
      for (int a = 0; a < 3; ++a)
        if (std::abs(q[a]) > cgrid->n / 2 - 1) return 0.0;
      return custom->custom_components[component].at_k(
          {q[0], q[1], cgrid->d > 2 ? q[2] : 0});
    }
    if (component != comp) return 0.0;
    bool match_plus = true, match_minus = true;
    for (int a = 0; a < d; ++a) {
      int want = a == prof ? m : 0;
      if (q[a] != want) match_plus = false;
      if (q[a] != -want) match_minus = false;
    }
    if (match_plus) return cplx(0.0, -0.5);   // sin = (e^{i.} - e^{-i.})/2i
    if (match_minus) return cplx(0.0, 0.5);
    return 0.0;
  }
};

}  // namespace

OperatorMatrix assemble_H(const FlowSpec& flow, double at_time, double A,
                          double alpha, int trunc_N, int d, int dim_cap) {
  if (trunc_N < 1) throw parameter_error("assemble_H: trunc_N must be >= 1");
  if (d < 1 || d > 3) throw parameter_error("assemble_H: d must be 1, 2 or 3");
  const int w = 2 * trunc_N + 1;
  long dim = 1;
  for (int a = 0; a < d; ++a) dim *= w;
  dim -= 1;
  if (dim > dim_cap)
    throw parameter_error("assemble_H: truncation exceeds the dense cap");

  OperatorMatrix H;
  H.trunc_N = trunc_N;
  H.d = d;
  H.dim = static_cast<int>(dim);
  H.alpha = alpha;
  H.A = A;
  H.modes.reserve(dim);
  auto push = [&](int k0, int k1, int k2) {
    if (k0 == 0 && k1 == 0 && k2 == 0) return;
    H.modes.push_back({k0, k1, k2});
  };
  if (d == 1)
    for (int a = -trunc_N; a <= trunc_N; ++a) push(a, 0, 0);
  else if (d == 2)
    for (int a = -trunc_N; a <= trunc_N; ++a)
      for (int b = -trunc_N; b <= trunc_N; ++b) push(a, b, 0);
  else
    for (int a = -trunc_N; a <= trunc_N; ++a)
      for (int b = -trunc_N; b <= trunc_N; ++b)
        for (int c = -trunc_N; c <= trunc_N; ++c) push(a, b, c);

  FlowSymbol sym;
  sym.d = d;
  const TorusGrid* cgrid = nullptr;
  bool advect = A > 0.0 && flow.kind != FlowSpec::Kind::none;
  switch (flow.kind) {
    case FlowSpec::Kind::none:
      advect = false;
      break;
    case FlowSpec::Kind::steady_shear:
      sym.comp = flow.axis - 1;
      sym.prof = flow.axis % d;
      sym.m = flow.m;
      break;
    case FlowSpec::Kind::alternating_shear:
      sym.comp = flow.phase(at_time) == 0 ? 0 : 1;
      sym.prof = 1 - sym.comp;
      sym.m = flow.m;
      break;
    case FlowSpec::Kind::custom:
      sym.custom = &flow;
      cgrid = &flow.custom_components[0].grid;
      break;
  }
  if (advect && sym.comp >= 0 && d < 2)
    throw parameter_error("assemble_H: shear flows need d >= 2");

  H.entries.assign(static_cast<std::size_t>(H.dim) * H.dim, cplx(0.0, 0.0));
  const double two_pi = 2.0 * M_PI;
  for (int i = 0; i < H.dim; ++i) {
    const auto& ki = H.modes[i];
    long k2 = 0;
    for (int a = 0; a < 3; ++a) k2 += static_cast<long>(ki[a]) * ki[a];
    H.entries[static_cast<std::size_t>(i) * H.dim + i] =
        std::pow(two_pi * std::sqrt(static_cast<double>(k2)), alpha);
    if (!advect) continue;
    for (int j = 0; j < H.dim; ++j) {
      const auto& kj = H.modes[j];
      std::array<int, 3> q = {ki[0] - kj[0], ki[1] - kj[1], ki[2] - kj[2]};
      cplx acc = 0.0;
      for (int c = 0; c < d; ++c) {
        cplx uc = sym.coefficient(c, q, cgrid);
        if (uc != cplx(0.0, 0.0))
          acc += uc * static_cast<double>(kj[c]);
      }
      if (acc != cplx(0.0, 0.0))
        H.entries[static_cast<std::size_t>(i) * H.dim + j] +=
            A * cplx(0.0, two_pi) * acc;
    }
  }
  return H;
}

namespace {

double sigma_min_shifted(const OperatorMatrix& H, double lambda) {
  std::vector<cplx> a = H.entries;
  for (int i = 0; i < H.dim; ++i)
    a[static_cast<std::size_t>(i) * H.dim + i] -= cplx(0.0, lambda);
  auto s = linalg::singular_values(a, H.dim);
  return s.back();
}

}  // namespace

PsiEstimate psi_resolvent(const OperatorMatrix& H, double lambda_lo,
                          double lambda_hi, int steps) {
  if (steps < 2 || !(lambda_hi > lambda_lo))
    throw parameter_error("psi_resolvent: empty lambda grid");
  PsiEstimate est;
  est.lambda_lo = lambda_lo;
  est.lambda_hi = lambda_hi;
  est.grid_steps = steps;
  est.trunc_N = H.trunc_N;

  std::vector<double> vals(steps);
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < steps; ++i) {
    double lam =
        lambda_lo + (lambda_hi - lambda_lo) * i / static_cast<double>(steps - 1);
    vals[i] = sigma_min_shifted(H, lam);
    if (vals[i] < best) {
      best = vals[i];
      best_i = i;
    }
  }
  double h = (lambda_hi - lambda_lo) / static_cast<double>(steps - 1);
  double lo = lambda_lo + h * std::max(0, best_i - 1);
  double hi = lambda_lo + h * std::min(steps - 1, best_i + 1);

  // golden-section to 1e-6 absolute in lambda
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), dpt = lo + gr * (hi - lo);
  double fc = sigma_min_shifted(H, c), fd = sigma_min_shifted(H, dpt);
  while (hi - lo > 1e-6) {
    if (fc < fd) {
      hi = dpt;
      dpt = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = sigma_min_shifted(H, c);
    } else {
      lo = c;
      c = dpt;
      fc = fd;
      dpt = lo + gr * (hi - lo);
      fd = sigma_min_shifted(H, dpt);
    }
  }
  double lam_star = 0.5 * (lo + hi);
  double f_star = sigma_min_shifted(H, lam_star);
  if (f_star < best) {
    best = f_star;
    est.argmin_lambda = lam_star;
  } else {
    est.argmin_lambda = lambda_lo + h * best_i;
  }
  est.value = std::min(best, f_star);
  return est;
}

PsiEstimate psi_resolvent(const OperatorMatrix& H) {
  auto s = linalg::singular_values(H.entries, H.dim);
  double norm = s.front();
  return psi_resolvent(H, -2.0 * norm, 2.0 * norm, 257);
}

double semigroup_norm(const OperatorMatrix& H, double t) {
  if (t < 0.0) throw parameter_error("semigroup_norm: t must be >= 0");
  std::vector<cplx> a(static_cast<std::size_t>(H.dim) * H.dim);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = -t * H.entries[i];
  auto e = linalg::matrix_exponential(a, H.dim);
  auto s = linalg::singular_values(e, H.dim);
  return s.front();
}

double decay_rate(const std::vector<DiagnosticsRecord>& records, double t1,
                  double t2) {
  std::vector<double> ts, ys;
  for (const auto& r : records) {
    if (r.t < t1 - 1e-14 || r.t > t2 + 1e-14) continue;
    if (!(r.l2_dist_mean > 0.0))
      throw parameter_error("decay_rate: nonpositive distance in window");
    ts.push_back(r.t);
    ys.push_back(-std::log(r.l2_dist_mean));
  }
  if (ts.size() < 8)
    throw parameter_error("decay_rate: need at least 8 records in window");
  double n = static_cast<double>(ts.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  double denom = n * stt - st * st;
  if (denom <= 0.0) throw parameter_error("decay_rate: degenerate window");
  return (n * sty - st * sy) / denom;
}

PnStabilityReport pn_stability_check(const OperatorMatrix& H,
                                     const SpectralField& f, int N,
                                     const std::vector<double>& times) {
  if (times.empty())
    throw parameter_error("pn_stability_check: no sample times");
  // restrict f to the truncation basis
  std::vector<cplx> v(H.dim, 0.0);
  for (int i = 0; i < H.dim; ++i) {
    const auto& k = H.modes[i];
    v[i] = f.at_k({k[0], k[1], f.grid.d > 2 ? k[2] : 0});
  }
  auto pn_norm = [&](const std::vector<cplx>& w) {
    double acc = 0.0;
    for (int i = 0; i < H.dim; ++i) {
      const auto& k = H.modes[i];
      long k2 = 0;
      for (int a = 0; a < 3; ++a) k2 += static_cast<long>(k[a]) * k[a];
      if (k2 <= static_cast<long>(N) * N) acc += std::norm(w[i]);
    }
    return std::sqrt(acc);
  };
  double base = pn_norm(v);
  if (base <= 0.0)
    throw degenerate_input_error("pn_stability_check: P_N f vanishes");

  PnStabilityReport rep;
  rep.N = N;
  for (double t : times) {
    std::vector<cplx> a(static_cast<std::size_t>(H.dim) * H.dim);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = -t * H.entries[i];
    auto e = linalg::matrix_exponential(a, H.dim);
    std::vector<cplx> w(H.dim, 0.0);
    for (int i = 0; i < H.dim; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < H.dim; ++j)
        acc += e[static_cast<std::size_t>(i) * H.dim + j] * v[j];
      w[i] = acc;
    }
    rep.ratios.push_back(pn_norm(w) / base);
  }
  rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  return rep;
}

ApproxFit approx_lemma_check(const RunOutcome& full, const RunOutcome& linear,
                             int N) {
  const std::size_t m = std::min(full.low_modes.size(), linear.low_modes.size());
  if (m < 3)
    throw parameter_error("approx_lemma_check: not enough records");
  std::vector<double> ts, ds;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = full.low_modes[i];
    const auto& b = linear.low_modes[i];
    if (std::fabs(a.t - b.t) > 1e-10 * std::max(1.0, std::fabs(a.t)))
      throw parameter_error("approx_lemma_check: record times differ");
    if (a.t <= 0.0) continue;
    double dist = lowmode_diff_norm(a, b, N, a.d);
    ts.push_back(a.t);
    ds.push_back(dist);
  }
  if (ts.empty() ||
      *std::max_element(ds.begin(), ds.end()) <= 1e-14)
    throw degenerate_input_error(
        "approx_lemma_check: trajectories are identical");

  // earliest decade with nonzero difference
  std::vector<double> lt, ld;
  double t0 = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ds[i] <= 0.0) continue;
    if (t0 == 0.0) t0 = ts[i];
    if (ts[i] > 10.0 * t0 * (1.0 + 1e-12)) break;
    lt.push_back(std::log(ts[i]));
    ld.push_back(std::log(ds[i]));
  }
  if (lt.size() < 3)
    throw parameter_error("approx_lemma_check: too few early records");
  double n = static_cast<double>(lt.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    st += lt[i];
    sy += ld[i];
    stt += lt[i] * lt[i];
    sty += lt[i] * ld[i];
  }
  ApproxFit fit;
  fit.n_points = static_cast<int>(lt.size());
  double denom = n * stt - st * st;
  fit.exponent = (n * sty - st * sy) / denom;
  fit.prefactor = std::exp((sy - fit.exponent * st) / n);
  return fit;
}

}  // namespace ksmx
