#pragma once

#include <cstdint>
#include <string>

#include "ksmx/evolve.hpp"

namespace ksmx {

// Flat dotted-key = value experiment configuration (one pair per line,
// # comments). Unknown keys are rejected; values are validated against the
// module preconditions when converted via the make_* helpers.
struct ExperimentConfig {
  int dim = 2;
  int n = 64;
  double alpha = 1.5;
  double beta = 2.0;
  double amplitude_A = 0.0;
  std::string flow_kind = "none";
  int flow_m = 1;
  double flow_tau_f = 0.1;
  int flow_axis = 1;
  bool nonlinear = true;
  double dt_max = 1e-2;
  double cfl = 0.4;
  double t_end = 1.0;
  long record_every = 100;
  double record_dt = 0.0;
  double blowup_linf_factor = 1e3;
  double blowup_tail_ratio = 1e-2;
  std::string init_kind = "constant";
  double init_mass = 1.0;
  double init_sigma = 0.1;
  std::uint64_t init_seed = 0;  // 0: inherit the global seed
  int init_band = 4;
  double init_amplitude = 1.0;
  int init_k0 = 1, init_k1 = 0, init_k2 = 0;
  double init_constant = 1.0;
  std::uint64_t seed = 1;
  double p_diag = 2.0;
  std::string output_dir = "out";
  int lowmode_cap = 12;

  void set_key(const std::string& key, const std::string& value);
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);

// Hash of the serialized config with the sweep axis (amplitude_A) blanked;
// identifies a sweep family.
std::string config_family_hash(const ExperimentConfig& cfg);

TorusGrid make_grid(const ExperimentConfig& cfg);
ModelParams make_params(const ExperimentConfig& cfg);
StepPolicy make_policy(const ExperimentConfig& cfg);
InitialSpec make_initial(const ExperimentConfig& cfg);

}  // namespace ksmx
