#pragma once

#include <optional>

#include "ksmx/diag_record.hpp"
#include "ksmx/flows.hpp"
#include "ksmx/grid.hpp"

namespace ksmx {

// Coefficients of the full model
//   d rho/dt + A u.grad rho + (-Delta)^{alpha/2} rho + div(rho B(rho)) = 0.
// nonlinear_enabled = false drops the B term (linear advection-dissipation
// problem); beta is ignored in that case. alpha may be 2 (classical
// dissipation boundary case).
struct ModelParams {
  double alpha = 1.5;
  double beta = 2.0;
  double A = 0.0;
  FlowSpec flow;
  bool nonlinear_enabled = true;

  void validate(int d) const;
};

struct SimState {
  double t = 0.0;
  long step_count = 0;
  SpectralField rho;  // dealiased, Hermitian-symmetric
};

struct StepPolicy {
  double dt_max = 1e-2;
  double cfl_constant = 0.4;
  double t_end = 1.0;
  double blowup_linf_factor = 1e3;
  double blowup_tail_ratio = 1e-2;
  long record_every = 100;  // steps; ignored when record_dt > 0
  double record_dt = 0.0;   // uniform record time grid (0 = step-based)
  double diag_p = 2.0;      // L^p monitored in diagnostics
  int lowmode_cap = 12;     // |k|_inf cap of per-record snapshots

  void validate() const;
};

enum class RunStatus { completed, blowup_detected, resolution_lost };

const char* to_string(RunStatus s);

struct RunOutcome {
  RunStatus status = RunStatus::completed;
  SimState final_state;
  std::vector<DiagnosticsRecord> records;
  std::vector<LowModeSnapshot> low_modes;
  std::optional<double> blowup_time_estimate;
};

// ---- initial data --------------------------------------------------------

struct InitialSpec {
  enum class Kind { gaussian_bump, random_smooth, single_mode, constant };
  Kind kind = Kind::constant;
  double mass = 1.0;       // gaussian_bump
  double sigma = 0.1;      // gaussian_bump
  std::uint64_t seed = 1;  // random_smooth
  int band = 4;            // random_smooth
  double amplitude = 1.0;  // random_smooth / single_mode
  std::array<int, 3> mode = {1, 0, 0};  // single_mode
  double constant = 1.0;
};

PhysicalField initial_data(const InitialSpec& spec, const TorusGrid& grid);

// ---- stepping ------------------------------------------------------------

// dt = min(dt_max, cfl * dx / (A ||u||_inf + ||B(rho)||_inf + eps)).
double cfl_dt(const SimState& s, const ModelParams& p, const StepPolicy& pol);

// One integrating-factor midpoint step at the CFL dt. Dissipation applied
// exactly through e^{-(2 pi |k|)^alpha dt}; transport and flux evaluated
// pseudo-spectrally with 2/3 dealiasing; the zero mode is invariant.
SimState step(const SimState& s, const ModelParams& p, const StepPolicy& pol);

// Detector only; RunStatus::completed means "no fire".
RunStatus blowup_detect(const SimState& s, const StepPolicy& pol,
                        double initial_linf);

// Integrate to t_end or first detector fire. Requires rho0 >= 0 up to
// -1e-10 * max(1, ||rho0||_inf) pointwise.
RunOutcome run(const PhysicalField& rho0, const ModelParams& p,
               const StepPolicy& pol);

// Same machinery with the nonlinearity forced off and no sign requirement:
// the discrete trajectory of eta(t) = e^{-t H_A^alpha} rho0.
RunOutcome linear_run(const PhysicalField& rho0, ModelParams p,
                      const StepPolicy& pol);

// Low-mode snapshot helper shared with analysis code.
LowModeSnapshot snapshot_low_modes(const SpectralField& s, double t, int cap);
// || P_N (a - b) ||_2 from two snapshots with a common cap.
double lowmode_diff_norm(const LowModeSnapshot& a, const LowModeSnapshot& b,
                         int N, int d);

}  // namespace ksmx
