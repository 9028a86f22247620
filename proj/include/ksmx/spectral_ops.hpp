#pragma once

#include "ksmx/grid.hpp"

namespace ksmx {

// Orthogonal projection onto modes with Euclidean |k| <= N.
SpectralField project_low(const SpectralField& s, int N);

// 2/3-rule truncation: zero every coefficient with any |k_i| >= n/3.
SpectralField dealias(const SpectralField& s);
void dealias_inplace(SpectralField& s);

// (sum |f|^p / n^d)^{1/p}; p = infinity returns max |f|. Requires p >= 1.
double lp_norm(const PhysicalField& f, double p);

// Homogeneous Sobolev seminorm (sum_{k != 0} (2 pi |k|)^{2s} |shat(k)|^2)^{1/2}.
double sobolev_seminorm(const SpectralField& s, double sexp);

// sum_k |shat(k)|^2 (discrete Parseval energy, equals lp_norm(f,2)^2).
double spectral_energy(const SpectralField& s);

// Energy fraction carried by modes with any |k_i| >= n/3.
double tail_energy_fraction(const SpectralField& s);

double mean_value(const SpectralField& s);

// Spectral partial derivative along `axis` applied `order` times.
SpectralField spectral_derivative(const SpectralField& s, int axis, int order);

// In-place multiply by a per-mode real multiplier m(|k|^2 scaled): callers
// build the table once via multiplier_table.
std::vector<double> multiplier_table(const TorusGrid& g,
                                     double (*fn)(double k2, double param),
                                     double param);

bool hermitian_symmetric(const SpectralField& s, double rel_tol = 1e-10);

}  // namespace ksmx
