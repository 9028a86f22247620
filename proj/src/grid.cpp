#include "ksmx/grid.hpp"

#include <cmath>

namespace ksmx {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}  // namespace

TorusGrid::TorusGrid(int d_, int n_) : d(d_), n(n_) {
  if (d < 1 || d > 3)
    throw parameter_error("TorusGrid: dimension must be 1, 2 or 3");
  if (n < 8 || !power_of_two(n))
    throw parameter_error("TorusGrid: n must be a power of two >= 8");
}

std::size_t TorusGrid::size() const {
  std::size_t s = 1;
  for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

std::size_t flat_index(const TorusGrid& g, const int* idx) {
  std::size_t f = 0;
  for (int a = 0; a < g.d; ++a)
    f = f * static_cast<std::size_t>(g.n) + static_cast<std::size_t>(idx[a]);
  return f;
}

std::array<int, 3> unflatten(const TorusGrid& g, std::size_t flat) {
  std::array<int, 3> idx = {0, 0, 0};
  for (int a = g.d - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % g.n);
    flat /= g.n;
  }
  return idx;
}

double& PhysicalField::at(std::initializer_list<int> idx) {
  return values[flat_index(grid, idx.begin())];
}

double PhysicalField::at(std::initializer_list<int> idx) const {
  return values[flat_index(grid, idx.begin())];
}

cplx& SpectralField::at_k(std::initializer_list<int> k) {
  int idx[3] = {0, 0, 0};
  int a = 0;
  for (int kv : k) idx[a++] = index_of(kv, grid.n);
  return coeffs[flat_index(grid, idx)];
}

cplx SpectralField::at_k(std::initializer_list<int> k) const {
  return const_cast<SpectralField*>(this)->at_k(k);
}

bool is_mean_zero(const SpectralField& s) {
  double mx = 0.0;
  for (const cplx& c : s.coeffs) mx = std::max(mx, std::abs(c));
  return std::abs(s.coeffs[0]) <= 1e-12 * mx;
}

}  // namespace ksmx
