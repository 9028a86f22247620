#include "ksmx/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ksmx/fft.hpp"
#include "ksmx/kern.hpp"
#include "ksmx/snapshot.hpp"

namespace ksmx {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::json summary_json(const ExperimentConfig& cfg,
                            const ExperimentArtifacts& art) {
  nlohmann::json j;
  j["status"] = to_string(art.outcome.status);
  if (art.outcome.blowup_time_estimate)
    j["blowup_time_estimate"] = *art.outcome.blowup_time_estimate;
  else
    j["blowup_time_estimate"] = nullptr;
  j["phi_estimate"] = art.phi ? nlohmann::json(*art.phi) : nlohmann::json();
  j["decay_rate"] = art.decay ? nlohmann::json(*art.decay) : nlohmann::json();
  if (art.ledger) {
    j["constants"] = {{"B0", art.ledger->B0},     {"D0", art.ledger->D0},
                      {"C_inf", art.ledger->C_inf}, {"rho_bar", art.ledger->rho_bar},
                      {"p", art.ledger->p},       {"B1", art.ledger->B1}};
  }
  j["final_time"] = art.outcome.final_state.t;
  j["steps"] = art.outcome.final_state.step_count;
  if (!art.outcome.records.empty())
    j["final_linf"] = art.outcome.records.back().linf;
  j["config_family"] = config_family_hash(cfg);
  j["kernel_variant"] = kern::active_name();
  return j;
}

}  // namespace

std::optional<double> fit_decay_rate(
    const std::vector<DiagnosticsRecord>& records) {
  if (records.size() < 10) return std::nullopt;
  double d0 = records.front().l2_dist_mean;
  if (!(d0 > 0.0)) return std::nullopt;
  double floor = std::max(1e-9 * d0, 1e-13);
  double t1 = -1.0, t2 = -1.0;
  for (const auto& r : records) {
    if (t1 < 0.0 && r.l2_dist_mean <= 0.5 * d0) t1 = r.t;
    if (r.l2_dist_mean >= floor) t2 = r.t;
  }
  if (t1 < 0.0 || t2 <= t1) return std::nullopt;
  long count = 0;
  for (const auto& r : records)
    if (r.t >= t1 && r.t <= t2 && r.l2_dist_mean > 0.0) ++count;
  if (count < 8) return std::nullopt;
  try {
    return decay_rate(records, t1, t2);
  } catch (const parameter_error&) {
    return std::nullopt;
  }
}

ExperimentArtifacts run_experiment(const ExperimentConfig& cfg, bool linear,
                                   const std::string& out_dir) {
  TorusGrid grid = make_grid(cfg);
  ModelParams params = make_params(cfg);
  StepPolicy policy = make_policy(cfg);
  PhysicalField rho0 = initial_data(make_initial(cfg), grid);

  ExperimentArtifacts art;
  double mn = rho0.values[0];
  for (double v : rho0.values) mn = std::min(mn, v);
  if (mn >= -1e-10) art.ledger = constants_ledger(rho0, cfg.p_diag);

  art.outcome = linear ? linear_run(rho0, params, policy)
                       : run(rho0, params, policy);
  bool any_quotient = false;
  for (const auto& r : art.outcome.records)
    if (!r.quotient_degenerate) any_quotient = true;
  if (any_quotient) art.phi = phi_estimate(art.outcome.records);
  art.decay = fit_decay_rate(art.outcome.records);

  if (!out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/snapshots");
    write_records_csv(out_dir + "/records.csv", art.outcome.records);

    write_snapshot(out_dir + "/snapshots/initial.ksmx", rho0, 0.0);
    PhysicalField fin(grid);
    fft::inverse(grid, art.outcome.final_state.rho.coeffs.data(),
                 fin.values.data());
    write_snapshot(out_dir + "/snapshots/final.ksmx", fin,
                   art.outcome.final_state.t);

    nlohmann::json meta;
    meta["config"] = serialize_config(cfg);
    meta["t"] = art.outcome.final_state.t;
    meta["step_count"] = art.outcome.final_state.step_count;
    meta["seed"] = cfg.seed;
    std::ofstream(out_dir + "/snapshots/final.json") << meta.dump(2) << "\n";

    std::ofstream(out_dir + "/summary.json")
        << summary_json(cfg, art).dump(2) << "\n";
  }
  return art;
}

SweepResult sweep_A(const ExperimentConfig& base, const std::vector<double>& As,
                    bool linear, const std::string& out_dir) {
  if (As.size() < 1) throw parameter_error("sweep_A: empty A list");
  SweepResult res;
  res.A_values = As;
  res.family_hash = config_family_hash(base);
  for (double A : As) {
    SweepEntry e;
    e.A = A;
    try {
      ExperimentConfig cfg = base;
      cfg.amplitude_A = A;
      std::string dir;
      if (!out_dir.empty()) {
        char leaf[64];
        std::snprintf(leaf, sizeof leaf, "/A_%.17g", A);
        dir = out_dir + leaf;
      }
      auto art = run_experiment(cfg, linear, dir);
      e.status = art.outcome.status;
      if (art.outcome.blowup_time_estimate)
        e.blowup_time = *art.outcome.blowup_time_estimate;
      e.phi = art.phi;
      e.decay = art.decay;
      if (!art.outcome.records.empty())
        e.final_linf = art.outcome.records.back().linf;
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    res.entries.push_back(std::move(e));
  }
  // bracket from outcomes when the sweep straddles blowup and survival
  std::optional<double> last_blow;
  for (const auto& e : res.entries) {
    if (!e.error.empty()) continue;
    if (e.status == RunStatus::blowup_detected) last_blow = e.A;
    else if (last_blow) {
      res.A0_bracket = std::make_pair(*last_blow, e.A);
      break;
    }
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/sweep.csv");
    out << "A,status,blowup_time,phi,decay_rate,final_linf,error\n";
    for (const auto& e : res.entries) {
      out << fmt(e.A) << "," << to_string(e.status) << ","
          << (e.blowup_time ? fmt(*e.blowup_time) : "") << ","
          << (e.phi ? fmt(*e.phi) : "") << ","
          << (e.decay ? fmt(*e.decay) : "") << "," << fmt(e.final_linf) << ","
          << e.error << "\n";
    }
  }
  return res;
}

BisectResult bisect_A0_with(const std::function<bool(double)>& blows_up,
                            double A_lo, double A_hi, int iterations) {
  if (!(A_lo > 0.0) || !(A_hi > A_lo))
    throw parameter_error("bisect_A0: need 0 < A_lo < A_hi");
  BisectResult res;
  res.lo = A_lo;
  res.hi = A_hi;
  bool lo_blows = blows_up(A_lo);
  bool hi_blows = blows_up(A_hi);
  res.trace.emplace_back(A_lo, lo_blows);
  res.trace.emplace_back(A_hi, hi_blows);
  if (!lo_blows || hi_blows) {
    res.monotone_suspect = true;
    throw precondition_error(
        "bisect_A0: endpoint outcomes disagree with the claimed bracket");
  }
  for (int i = 0; i < iterations; ++i) {
    double mid = std::sqrt(res.lo * res.hi);  // bisection on log A
    bool mb = blows_up(mid);
    res.trace.emplace_back(mid, mb);
    (mb ? res.lo : res.hi) = mid;
    ++res.iterations;
  }
  return res;
}

BisectResult bisect_A0(const ExperimentConfig& base, double A_lo, double A_hi,
                       int iterations) {
  auto blows_up = [&](double A) {
    ExperimentConfig cfg = base;
    cfg.amplitude_A = A;
    auto art = run_experiment(cfg, false, "");
    return art.outcome.status == RunStatus::blowup_detected;
  };
  return bisect_A0_with(blows_up, A_lo, A_hi, iterations);
}

std::vector<PsiRow> psi_sweep(const FlowSpec& flow, double at_time,
                              const std::vector<double>& As, double alpha,
                              int trunc_N) {
  std::vector<PsiRow> rows;
  for (double A : As) {
    auto t0 = std::chrono::steady_clock::now();
    OperatorMatrix H = assemble_H(flow, at_time, A, alpha, trunc_N,
                                  flow.kind == FlowSpec::Kind::custom
                                      ? flow.custom_components[0].grid.d
                                      : 2);
    PsiEstimate est = psi_resolvent(H);
    auto t1 = std::chrono::steady_clock::now();
    PsiRow r;
    r.A = A;
    r.alpha = alpha;
    r.trunc_N = trunc_N;
    r.psi = est.value;
    r.argmin_lambda = est.argmin_lambda;
    r.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    rows.push_back(r);
  }
  return rows;
}

void write_records_csv(const std::string& path,
                       const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw data_error("write_records_csv: cannot open " + path);
  out << "t,mass,l2_dist_mean,lp_norm,linf,max_i,max_j,max_k,"
         "dirichlet_quotient,maxpoint_residual,tail_ratio\n";
  for (const auto& r : records) {
    out << fmt(r.t) << "," << fmt(r.mass) << "," << fmt(r.l2_dist_mean) << ","
        << fmt(r.lp_norm) << "," << fmt(r.linf) << "," << r.max_index[0] << ","
        << r.max_index[1] << "," << r.max_index[2] << ","
        << fmt(r.dirichlet_quotient) << "," << fmt(r.maxpoint_residual) << ","
        << fmt(r.tail_ratio) << "\n";
  }
}

void write_psi_csv(const std::string& path, const std::vector<PsiRow>& rows) {
  std::ofstream out(path);
  if (!out) throw data_error("write_psi_csv: cannot open " + path);
  out << "A,alpha,trunc_N,psi,argmin_lambda,wall_seconds\n";
  for (const auto& r : rows) {
    out << fmt(r.A) << "," << fmt(r.alpha) << "," << r.trunc_N << ","
        << fmt(r.psi) << "," << fmt(r.argmin_lambda) << ","
        << fmt(r.wall_seconds) << "\n";
  }
}

}  // namespace ksmx
