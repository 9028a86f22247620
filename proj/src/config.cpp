#include "ksmx/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ksmx {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config: bad number for " + key + ": '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config: bad integer for " + key + ": '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw config_error("config: bad integer for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw config_error("config: bad boolean for " + key + ": '" + v + "'");
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void ExperimentConfig::set_key(const std::string& key,
                               const std::string& value) {
  if (key == "dim") dim = static_cast<int>(to_long(key, value));
  else if (key == "n") n = static_cast<int>(to_long(key, value));
  else if (key == "alpha") alpha = to_double(key, value);
  else if (key == "beta") beta = to_double(key, value);
  else if (key == "amplitude_A") amplitude_A = to_double(key, value);
  else if (key == "flow.kind") flow_kind = value;
  else if (key == "flow.m") flow_m = static_cast<int>(to_long(key, value));
  else if (key == "flow.tau_f") flow_tau_f = to_double(key, value);
  else if (key == "flow.axis") flow_axis = static_cast<int>(to_long(key, value));
  else if (key == "nonlinear") nonlinear = to_bool(key, value);
  else if (key == "dt_max") dt_max = to_double(key, value);
  else if (key == "cfl") cfl = to_double(key, value);
  else if (key == "t_end") t_end = to_double(key, value);
  else if (key == "record_every") record_every = to_long(key, value);
  else if (key == "record_dt") record_dt = to_double(key, value);
  else if (key == "blowup.linf_factor") blowup_linf_factor = to_double(key, value);
  else if (key == "blowup.tail_ratio") blowup_tail_ratio = to_double(key, value);
  else if (key == "init.kind") init_kind = value;
  else if (key == "init.mass") init_mass = to_double(key, value);
  else if (key == "init.sigma") init_sigma = to_double(key, value);
  else if (key == "init.seed") init_seed = to_u64(key, value);
  else if (key == "init.band") init_band = static_cast<int>(to_long(key, value));
  else if (key == "init.amplitude") init_amplitude = to_double(key, value);
  else if (key == "init.k0") init_k0 = static_cast<int>(to_long(key, value));
  else if (key == "init.k1") init_k1 = static_cast<int>(to_long(key, value));
  else if (key == "init.k2") init_k2 = static_cast<int>(to_long(key, value));
  else if (key == "init.constant") init_constant = to_double(key, value);
  else if (key == "seed") seed = to_u64(key, value);
  else if (key == "p_diag") p_diag = to_double(key, value);
  else if (key == "output.dir") output_dir = value;
  else if (key == "lowmode_cap") lowmode_cap = static_cast<int>(to_long(key, value));
  else throw config_error("config: unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config: line " + std::to_string(lineno) +
                         " is not key = value");
    cfg.set_key(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "dim = " << c.dim << "\n";
  o << "n = " << c.n << "\n";
  o << "alpha = " << fmt_double(c.alpha) << "\n";
  o << "beta = " << fmt_double(c.beta) << "\n";
  o << "amplitude_A = " << fmt_double(c.amplitude_A) << "\n";
  o << "flow.kind = " << c.flow_kind << "\n";
  o << "flow.m = " << c.flow_m << "\n";
  o << "flow.tau_f = " << fmt_double(c.flow_tau_f) << "\n";
  o << "flow.axis = " << c.flow_axis << "\n";
  o << "nonlinear = " << (c.nonlinear ? "true" : "false") << "\n";
  o << "dt_max = " << fmt_double(c.dt_max) << "\n";
  o << "cfl = " << fmt_double(c.cfl) << "\n";
  o << "t_end = " << fmt_double(c.t_end) << "\n";
  o << "record_every = " << c.record_every << "\n";
  o << "record_dt = " << fmt_double(c.record_dt) << "\n";
  o << "blowup.linf_factor = " << fmt_double(c.blowup_linf_factor) << "\n";
  o << "blowup.tail_ratio = " << fmt_double(c.blowup_tail_ratio) << "\n";
  o << "init.kind = " << c.init_kind << "\n";
  o << "init.mass = " << fmt_double(c.init_mass) << "\n";
  o << "init.sigma = " << fmt_double(c.init_sigma) << "\n";
  o << "init.seed = " << c.init_seed << "\n";
  o << "init.band = " << c.init_band << "\n";
  o << "init.amplitude = " << fmt_double(c.init_amplitude) << "\n";
  o << "init.k0 = " << c.init_k0 << "\n";
  o << "init.k1 = " << c.init_k1 << "\n";
  o << "init.k2 = " << c.init_k2 << "\n";
  o << "init.constant = " << fmt_double(c.init_constant) << "\n";
  o << "seed = " << c.seed << "\n";
  o << "p_diag = " << fmt_double(c.p_diag) << "\n";
  o << "output.dir = " << c.output_dir << "\n";
  o << "lowmode_cap = " << c.lowmode_cap << "\n";
  return o.str();
}

std::string config_family_hash(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.amplitude_A = 0.0;
  c.output_dir = "";
  std::string s = serialize_config(c);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

TorusGrid make_grid(const ExperimentConfig& cfg) {
  return TorusGrid(cfg.dim, cfg.n);
}

ModelParams make_params(const ExperimentConfig& cfg) {
  ModelParams p;
  p.alpha = cfg.alpha;
  p.beta = cfg.beta;
  p.A = cfg.amplitude_A;
  p.nonlinear_enabled = cfg.nonlinear;
  if (cfg.flow_kind == "none")
    p.flow = FlowSpec::none();
  else if (cfg.flow_kind == "steady_shear")
    p.flow = FlowSpec::steady(cfg.flow_axis, cfg.flow_m);
  else if (cfg.flow_kind == "alternating_shear")
    p.flow = FlowSpec::alternating(cfg.flow_tau_f, cfg.flow_m);
  else
    throw config_error("config: unknown flow.kind '" + cfg.flow_kind + "'");
  p.validate(cfg.dim);
  return p;
}

StepPolicy make_policy(const ExperimentConfig& cfg) {
  StepPolicy pol;
  pol.dt_max = cfg.dt_max;
  pol.cfl_constant = cfg.cfl;
  pol.t_end = cfg.t_end;
  pol.blowup_linf_factor = cfg.blowup_linf_factor;
  pol.blowup_tail_ratio = cfg.blowup_tail_ratio;
  pol.record_every = cfg.record_every;
  pol.record_dt = cfg.record_dt;
  pol.diag_p = cfg.p_diag;
  pol.lowmode_cap = cfg.lowmode_cap;
  pol.validate();
  return pol;
}

InitialSpec make_initial(const ExperimentConfig& cfg) {
  InitialSpec s;
  if (cfg.init_kind == "gaussian_bump") {
    s.kind = InitialSpec::Kind::gaussian_bump;
    s.mass = cfg.init_mass;
    s.sigma = cfg.init_sigma;
  } else if (cfg.init_kind == "random_smooth") {
    s.kind = InitialSpec::Kind::random_smooth;
    s.seed = cfg.init_seed != 0 ? cfg.init_seed : cfg.seed;
    s.band = cfg.init_band;
    s.amplitude = cfg.init_amplitude;
  } else if (cfg.init_kind == "single_mode") {
    s.kind = InitialSpec::Kind::single_mode;
    s.mode = {cfg.init_k0, cfg.init_k1, cfg.init_k2};
    s.amplitude = cfg.init_amplitude;
  } else if (cfg.init_kind == "constant") {
    s.kind = InitialSpec::Kind::constant;
    s.constant = cfg.init_constant;
  } else {
    throw config_error("config: unknown init.kind '" + cfg.init_kind + "'");
  }
  return s;
}

}  // namespace ksmx
