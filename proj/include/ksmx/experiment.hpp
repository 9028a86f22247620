#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ksmx/config.hpp"
#include "ksmx/diagnostics.hpp"
#include "ksmx/opmat.hpp"

namespace ksmx {

struct ExperimentArtifacts {
  RunOutcome outcome;
  std::optional<ConstantsLedger> ledger;  // absent for signed initial data
  std::optional<double> phi;
  std::optional<double> decay;  // auto-window fit, absent when unfittable
};

// Execute one configured run (linear = drop the nonlinearity) and, when
// out_dir is nonempty, write records.csv, summary.json and snapshots/.
ExperimentArtifacts run_experiment(const ExperimentConfig& cfg, bool linear,
                                   const std::string& out_dir);

// Auto-window decay fit: slope of -log ||rho - rhobar|| between the first
// record that lost half the initial distance and the last one still above
// the noise floor. Needs >= 8 records in between.
std::optional<double> fit_decay_rate(
    const std::vector<DiagnosticsRecord>& records);

struct SweepEntry {
  double A = 0.0;
  RunStatus status = RunStatus::completed;
  std::optional<double> blowup_time;
  std::optional<double> phi;
  std::optional<double> decay;
  double final_linf = 0.0;
  std::string error;  // per-entry failure, sweep continues
};

struct SweepResult {
  std::vector<double> A_values;
  std::vector<SweepEntry> entries;
  std::string family_hash;
  std::optional<std::pair<double, double>> A0_bracket;
};

SweepResult sweep_A(const ExperimentConfig& base, const std::vector<double>& As,
                    bool linear, const std::string& out_dir);

struct BisectResult {
  double lo = 0.0, hi = 0.0;
  int iterations = 0;
  bool monotone_suspect = false;  // an endpoint disagreed at re-verification
  std::vector<std::pair<double, bool>> trace;  // (A, blew_up)
};

// Bisection on log A between a blowing-up A_lo and a surviving A_hi.
// Endpoint outcomes are verified by running them before refinement.
BisectResult bisect_A0(const ExperimentConfig& base, double A_lo, double A_hi,
                       int iterations);
// Same control flow against an arbitrary outcome oracle (for tests).
BisectResult bisect_A0_with(const std::function<bool(double)>& blows_up,
                            double A_lo, double A_hi, int iterations);

struct PsiRow {
  double A = 0.0;
  double alpha = 0.0;
  int trunc_N = 0;
  double psi = 0.0;
  double argmin_lambda = 0.0;
  double wall_seconds = 0.0;
};

std::vector<PsiRow> psi_sweep(const FlowSpec& flow, double at_time,
                              const std::vector<double>& As, double alpha,
                              int trunc_N);

void write_records_csv(const std::string& path,
                       const std::vector<DiagnosticsRecord>& records);
void write_psi_csv(const std::string& path, const std::vector<PsiRow>& rows);

}  // namespace ksmx
