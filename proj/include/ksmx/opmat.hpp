#pragma once

#include <array>
#include <vector>

#include "ksmx/evolve.hpp"
#include "ksmx/flows.hpp"

namespace ksmx {

// Dense truncation of H_A^alpha = (-Delta)^{alpha/2} + A u.grad restricted to
// the mean-zero modes 0 < |k|_inf <= trunc_N. The dissipation block is a
// real nonnegative diagonal; the advection block is skew-Hermitian for
// divergence-free u, so Re<Hf,f> >= 0 (m-accretivity) descends to the
// compression.
struct OperatorMatrix {
  int trunc_N = 0;
  int d = 2;
  int dim = 0;
  double alpha = 1.5;
  double A = 0.0;
  std::vector<cplx> entries;                // row-major dim x dim
  std::vector<std::array<int, 3>> modes;    // basis order (row-major cube)

  int mode_index(const std::array<int, 3>& k) const;  // -1 if absent
};

OperatorMatrix assemble_H(const FlowSpec& flow, double at_time, double A,
                          double alpha, int trunc_N, int d,
                          int dim_cap = 4096);

struct PsiEstimate {
  double value = 0.0;
  double argmin_lambda = 0.0;
  double lambda_lo = 0.0, lambda_hi = 0.0;
  int grid_steps = 0;
  int trunc_N = 0;
};

// Psi(H) = inf over real lambda of sigma_min(H - i lambda I): grid scan plus
// golden-section refinement (1e-6 absolute in lambda) on the best bracket.
PsiEstimate psi_resolvent(const OperatorMatrix& H, double lambda_lo,
                          double lambda_hi, int steps);
// Default search window |lambda| <= 2 ||H||_2 with 257 grid points.
PsiEstimate psi_resolvent(const OperatorMatrix& H);

// ||e^{-tH}||_{2->2}: scaling-and-squaring Pade exponential, then the
// largest singular value.
double semigroup_norm(const OperatorMatrix& H, double t);

// Least-squares slope of -log ||rho - rhobar||_2 over records with
// t in [t1, t2]. Requires >= 8 records in the window, all with positive
// distance to the mean.
double decay_rate(const std::vector<DiagnosticsRecord>& records, double t1,
                  double t2);

struct PnStabilityReport {
  double max_ratio = 0.0;
  int N = 0;
  std::vector<double> ratios;  // one per sampled time
};

// max over sampled t of ||P_N e^{-tH} f||_2 / ||P_N f||_2 with f restricted
// to the truncation.
PnStabilityReport pn_stability_check(const OperatorMatrix& H,
                                     const SpectralField& f, int N,
                                     const std::vector<double>& times);

struct ApproxFit {
  double exponent = 0.0;   // fitted q in ||P_N(rho-eta)(t)|| ~ c t^q
  double prefactor = 0.0;  // fitted c
  int n_points = 0;
};

// Log-log fit over the earliest decade of records with nonzero difference.
// Both runs must share initial data and record times.
ApproxFit approx_lemma_check(const RunOutcome& full, const RunOutcome& linear,
                             int N);

namespace linalg {
// Internal dense helpers (exposed for tests).
std::vector<double> singular_values(const std::vector<cplx>& a, int n);
std::vector<cplx> matrix_exponential(const std::vector<cplx>& a, int n);
}  // namespace linalg

}  // namespace ksmx
