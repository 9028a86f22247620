#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "ksmx/errors.hpp"

namespace ksmx {

using cplx = std::complex<double>;

// Periodic box [-1/2, 1/2)^d sampled on a uniform n^d lattice,
// x_j = -1/2 + j/n along each axis. n is a power of two, n >= 8.
struct TorusGrid {
  int d = 1;
  int n = 8;

  TorusGrid() = default;
  TorusGrid(int d_, int n_);

  std::size_t size() const;
  double dx() const { return 1.0 / n; }
  double coord(int j) const { return -0.5 + static_cast<double>(j) / n; }

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;
};

// FFTW frequency-index <-> signed wavenumber on {-n/2, ..., n/2-1}.
inline int wavenumber(int idx, int n) { return idx <= n / 2 - 1 ? idx : idx - n; }
inline int index_of(int k, int n) { return k >= 0 ? k : k + n; }

// Real samples, row-major over axes (axis 0 slowest).
struct PhysicalField {
  TorusGrid grid;
  std::vector<double> values;

  PhysicalField() = default;
  explicit PhysicalField(const TorusGrid& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}

  double& at(std::initializer_list<int> idx);
  double at(std::initializer_list<int> idx) const;
};

// Complex Fourier coefficients on the truncated lattice {-n/2,...,n/2-1}^d,
// stored in FFTW frequency order, row-major over axes. A field of a real
// signal satisfies coeffs(-k) = conj(coeffs(k)).
struct SpectralField {
  TorusGrid grid;
  std::vector<cplx> coeffs;

  SpectralField() = default;
  explicit SpectralField(const TorusGrid& g) : grid(g), coeffs(g.size()) {}

  cplx& at_k(std::initializer_list<int> k);
  cplx at_k(std::initializer_list<int> k) const;
};

// True when |s(0)| <= 1e-12 * max_k |s(k)| (membership in the mean-zero
// subspace up to roundoff).
bool is_mean_zero(const SpectralField& s);

std::size_t flat_index(const TorusGrid& g, const int* idx);

// Visit every lattice mode: fn(flat, k) with k[0..2] signed wavenumbers
// (unused axes stay 0). Row-major order, axis 0 slowest.
template <class F>
void for_each_mode(const TorusGrid& g, F&& fn) {
  const int n = g.n;
  std::size_t flat = 0;
  std::array<int, 3> k = {0, 0, 0};
  switch (g.d) {
    case 1:
      for (int i0 = 0; i0 < n; ++i0) {
        k[0] = wavenumber(i0, n);
        fn(flat++, k);
      }
      break;
    case 2:
      for (int i0 = 0; i0 < n; ++i0) {
        k[0] = wavenumber(i0, n);
        for (int i1 = 0; i1 < n; ++i1) {
          k[1] = wavenumber(i1, n);
          fn(flat++, k);
        }
      }
      break;
    default:
      for (int i0 = 0; i0 < n; ++i0) {
        k[0] = wavenumber(i0, n);
        for (int i1 = 0; i1 < n; ++i1) {
          k[1] = wavenumber(i1, n);
          for (int i2 = 0; i2 < n; ++i2) {
            k[2] = wavenumber(i2, n);
            fn(flat++, k);
          }
        }
      }
      break;
  }
}

// Visit every grid site: fn(flat, x) with x[0..2] physical coordinates.
template <class F>
void for_each_site(const TorusGrid& g, F&& fn) {
  const int n = g.n;
  std::size_t flat = 0;
  std::array<double, 3> x = {0.0, 0.0, 0.0};
  switch (g.d) {
    case 1:
      for (int i0 = 0; i0 < n; ++i0) {
        x[0] = g.coord(i0);
        fn(flat++, x);
      }
      break;
    case 2:
      for (int i0 = 0; i0 < n; ++i0) {
        x[0] = g.coord(i0);
        for (int i1 = 0; i1 < n; ++i1) {
          x[1] = g.coord(i1);
          fn(flat++, x);
        }
      }
      break;
    default:
      for (int i0 = 0; i0 < n; ++i0) {
        x[0] = g.coord(i0);
        for (int i1 = 0; i1 < n; ++i1) {
          x[1] = g.coord(i1);
          for (int i2 = 0; i2 < n; ++i2) {
            x[2] = g.coord(i2);
            fn(flat++, x);
          }
        }
      }
      break;
  }
}

// Per-axis indices of a flat row-major position.
std::array<int, 3> unflatten(const TorusGrid& g, std::size_t flat);

}  // namespace ksmx
