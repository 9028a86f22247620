#pragma once

#include "ksmx/diag_record.hpp"
#include "ksmx/evolve.hpp"

namespace ksmx {

// Initial-data constants: B0 = ||rho0||_2, D0 = ||rho0 - rhobar||_p,
// C_inf = ||rho0||_inf, and the derived B1.
struct ConstantsLedger {
  double B0 = 0.0;
  double D0 = 0.0;
  double C_inf = 0.0;
  double rho_bar = 0.0;
  double p = 2.0;
  double B1 = 0.0;
};

// All monitored quantities from one state snapshot. max location ties break
// to the first row-major index. A constant field records dirichlet_quotient
// as 0 with the degenerate flag rather than failing (bulk pipelines must not
// abort). tail_override, when nonnegative, carries the stepper's pre-dealias
// shell measurement; otherwise the state's own tail fraction is stored.
DiagnosticsRecord record(const SimState& s, const ModelParams& p,
                         double p_diag, double tail_override = -1.0);

// || Lambda^{alpha/2} rho ||_2^2 / || rho - rhobar ||_2^2; throws on constant
// input.
double dirichlet_quotient(const SpectralField& rho, double alpha);

// Finite-horizon infimum of the Dirichlet quotient over valid records.
double phi_estimate(const std::vector<DiagnosticsRecord>& records);

// Fills maxpoint_residual across a record series: first-order difference of
// the tracked max against the spectral terms at the same instant, normalized
// by the largest term. Records whose argmax jumps more than n/4 cells get
// the discontinuity flag and a NaN residual; so does the final record.
void fill_maxpoint_residuals(std::vector<DiagnosticsRecord>& records,
                             int n_grid);

double b1_constant(double B0, double D0, double C_inf, double rho_bar,
                   double p);

ConstantsLedger constants_ledger(const PhysicalField& rho0, double p);

}  // namespace ksmx
