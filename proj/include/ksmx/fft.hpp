#pragma once

#include "ksmx/grid.hpp"

namespace ksmx {

// Coefficient convention: f(x) = sum_k fhat(k) e^{2 pi i k.x} with
// fhat(0) equal to the spatial mean. Grid sites sit at x_j = -1/2 + j/n,
// which relative to a plain DFT contributes the phase (-1)^{k_1+...+k_d};
// the transforms below fold that sign in so coefficients refer to the
// centered box.

// Checked public transforms (value in, value out).
SpectralField forward_transform(const PhysicalField& f);
PhysicalField inverse_transform(const SpectralField& s);

namespace fft {

// Unchecked kernels over caller arrays of length grid.size().
void forward(const TorusGrid& g, const double* phys, cplx* spec);
void inverse(const TorusGrid& g, const cplx* spec, double* phys);
// As `inverse`, returning the largest discarded imaginary part.
double inverse_residue(const TorusGrid& g, const cplx* spec, double* phys);

// Two real-valued fields per complex transform (Hermitian split).
void inverse_pair(const TorusGrid& g, const cplx* s1, const cplx* s2,
                  double* r1, double* r2);
void forward_pair(const TorusGrid& g, const double* r1, const double* r2,
                  cplx* s1, cplx* s2);

// Index permutation k -> -k (mod n) for the grid, shared with callers that
// need Hermitian mirroring.
const std::vector<std::uint32_t>& negation_table(const TorusGrid& g);

}  // namespace fft

}  // namespace ksmx
