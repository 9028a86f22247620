#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ksmx/grid.hpp"

namespace ksmx {

// One time sample of every monitored quantity. Scalar fields stream to CSV;
// the trailing members are in-memory helpers for post-passes and never
// serialize.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;            // rhohat(0): L^1 for nonnegative data
  double l2_dist_mean = 0.0;    // ||rho - rhobar||_2
  double lp_norm = 0.0;         // configured p
  double linf = 0.0;
  std::array<int, 3> max_index = {0, 0, 0};
  double dirichlet_quotient = 0.0;
  double maxpoint_residual = 0.0;  // NaN until the post-pass fills it
  double tail_ratio = 0.0;

  // post-pass inputs (not serialized)
  double max_value = 0.0;  // rho at the tracked max (signed)
  double fraclap_at_max = 0.0;
  double deltak_at_max = 0.0;
  std::size_t max_flat = 0;
  bool quotient_degenerate = false;
  bool residual_discontinuous = false;
};

// Compact low-frequency snapshot kept alongside each record; enough to
// evaluate P_N norms for the approximation-lemma fit without full fields.
struct LowModeSnapshot {
  double t = 0.0;
  int cap = 0;                  // modes with |k|_inf <= cap, row-major order
  int d = 2;
  std::vector<cplx> modes;      // (2 cap + 1)^d coefficients
};

}  // namespace ksmx
