#include "ksmx/spectral_ops.hpp"

#include <cmath>

#include "ksmx/fft.hpp"
#include "ksmx/kern.hpp"

namespace ksmx {

SpectralField project_low(const SpectralField& s, int N) {
  if (N < 0) throw parameter_error("project_low: N must be >= 0");
  SpectralField out = s;
  const long nn = static_cast<long>(N) * N;
  for_each_mode(s.grid, [&](std::size_t f, const std::array<int, 3>& k) {
    long k2 = 0;
    for (int a = 0; a < 3; ++a) k2 += static_cast<long>(k[a]) * k[a];
    if (k2 > nn) out.coeffs[f] = 0.0;
  });
  return out;
}

void dealias_inplace(SpectralField& s) {
  const int n = s.grid.n;
  for_each_mode(s.grid, [&](std::size_t f, const std::array<int, 3>& k) {
    for (int a = 0; a < s.grid.d; ++a) {
      if (3 * std::abs(k[a]) >= n) {
        s.coeffs[f] = 0.0;
        break;
      }
    }
  });
}

SpectralField dealias(const SpectralField& s) {
  SpectralField out = s;
  dealias_inplace(out);
  return out;
}

double lp_norm(const PhysicalField& f, double p) {
  const std::size_t sz = f.values.size();
  const auto& k = kern::active();
  if (std::isinf(p)) return k.max_abs(f.values.data(), sz);
  if (p < 1.0) throw parameter_error("lp_norm: p must be >= 1 or infinity");
  if (p == 2.0)
    return std::sqrt(k.sum_sq(f.values.data(), sz) / static_cast<double>(sz));
  double acc = 0.0;
  if (p == 1.0) {
    for (double v : f.values) acc += std::fabs(v);
  } else {
    for (double v : f.values) acc += std::pow(std::fabs(v), p);
  }
  return std::pow(acc / static_cast<double>(sz), 1.0 / p);
}

double sobolev_seminorm(const SpectralField& s, double sexp) {
  double acc = 0.0;
  const double two_pi = 2.0 * M_PI;
  for_each_mode(s.grid, [&](std::size_t f, const std::array<int, 3>& k) {
    long k2 = 0;
    for (int a = 0; a < 3; ++a) k2 += static_cast<long>(k[a]) * k[a];
    if (k2 == 0) return;
    double w = std::pow(two_pi * std::sqrt(static_cast<double>(k2)),
                        2.0 * sexp);
    acc += w * std::norm(s.coeffs[f]);
  });
  return std::sqrt(acc);
}

double spectral_energy(const SpectralField& s) {
  const double* p = reinterpret_cast<const double*>(s.coeffs.data());
  return kern::active().sum_sq(p, 2 * s.coeffs.size());
}

double tail_energy_fraction(const SpectralField& s) {
  const int n = s.grid.n;
  double tail = 0.0, total = 0.0;
  for_each_mode(s.grid, [&](std::size_t f, const std::array<int, 3>& k) {
    double e = std::norm(s.coeffs[f]);
    total += e;
    for (int a = 0; a < s.grid.d; ++a) {
      if (3 * std::abs(k[a]) >= n) {
        tail += e;
        break;
      }
    }
  });
  return total > 0.0 ? tail / total : 0.0;
}

double mean_value(const SpectralField& s) { return s.coeffs[0].real(); }

SpectralField spectral_derivative(const SpectralField& s, int axis, int order) {
  if (axis < 0 || axis >= s.grid.d)
    throw parameter_error("spectral_derivative: axis out of range");
  if (order < 0) throw parameter_error("spectral_derivative: negative order");
  SpectralField out = s;
  const double two_pi = 2.0 * M_PI;
  const int nyq = -s.grid.n / 2;
  for_each_mode(s.grid, [&](std::size_t f, const std::array<int, 3>& k) {
    // the self-conjugate Nyquist mode has no odd-derivative partner; keeping
    // it would break Hermitian symmetry
    if (order % 2 == 1 && k[axis] == nyq) {
      out.coeffs[f] = 0.0;
      return;
    }
    cplx ik(0.0, two_pi * k[axis]);
    cplx m = 1.0;
    for (int j = 0; j < order; ++j) m *= ik;
    out.coeffs[f] *= m;
  });
  return out;
}

std::vector<double> multiplier_table(const TorusGrid& g,
                                     double (*fn)(double k2, double param),
                                     double param) {
  std::vector<double> t(g.size());
  for_each_mode(g, [&](std::size_t f, const std::array<int, 3>& k) {
    double k2 = 0.0;
    for (int a = 0; a < 3; ++a) k2 += static_cast<double>(k[a]) * k[a];
    t[f] = fn(k2, param);
  });
  return t;
}

bool hermitian_symmetric(const SpectralField& s, double rel_tol) {
  const auto& neg = fft::negation_table(s.grid);
  double scale = 0.0;
  for (const cplx& c : s.coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return true;
  for (std::size_t f = 0; f < s.coeffs.size(); ++f) {
    if (std::abs(s.coeffs[f] - std::conj(s.coeffs[neg[f]])) > rel_tol * scale)
      return false;
  }
  return true;
}

}  // namespace ksmx
