// ksmx command line: pseudo-spectral runs, amplitude sweeps, threshold
// bisection, resolvent analysis and max-principle probes for the fractional
// Keller-Segel model with advection.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "ksmx/attract.hpp"
#include "ksmx/experiment.hpp"
#include "ksmx/probes.hpp"
#include "ksmx/snapshot.hpp"
#include "ksmx/spectral_ops.hpp"

using namespace ksmx;

namespace {

int status_exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return 0;
    case RunStatus::blowup_detected: return 2;
    default: return 3;
  }
}

ExperimentConfig load_with_overrides(const std::string& path,
                                     const std::vector<std::string>& sets) {
  ExperimentConfig cfg = load_config(path);
  for (const std::string& kv : sets) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw config_error("--set expects key=value, got '" + kv + "'");
    cfg.set_key(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional Keller-Segel simulator and operator toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_override, a_list_csv, snap_path;
  std::vector<std::string> sets;
  double bis_lo = 1.0, bis_hi = 1e4;
  int bis_iters = 10, probe_k = 0, trunc_N = 8;
  double probe_p = 2.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config file")
        ->required();
    sub->add_option("--set", sets, "override key=value (repeatable)");
    sub->add_option("--output", out_override, "override output.dir");
  };

  CLI::App* c_run = app.add_subcommand("run", "integrate the full model");
  add_common(c_run);
  CLI::App* c_lin =
      app.add_subcommand("linear-run", "integrate with the nonlinearity off");
  add_common(c_lin);
  CLI::App* c_sweep = app.add_subcommand("sweep", "repeat a run over A values");
  add_common(c_sweep);
  c_sweep->add_option("--A", a_list_csv, "comma-separated A values")
      ->required();
  c_sweep->add_flag("--linear", "sweep the linear problem");
  CLI::App* c_bis =
      app.add_subcommand("bisect-a0", "bracket the suppression amplitude");
  add_common(c_bis);
  c_bis->add_option("--lo", bis_lo, "A that blows up")->required();
  c_bis->add_option("--hi", bis_hi, "A that survives")->required();
  c_bis->add_option("--iterations", bis_iters, "bisection steps");
  CLI::App* c_psi =
      app.add_subcommand("psi", "resolvent quantity over an A list");
  add_common(c_psi);
  c_psi->add_option("--A", a_list_csv, "comma-separated A values")->required();
  c_psi->add_option("--trunc-N", trunc_N, "operator truncation");
  CLI::App* c_probe = app.add_subcommand(
      "probe-maxprinciple", "max-point dichotomy report for the initial data");
  add_common(c_probe);
  c_probe->add_option("--p", probe_p, "Lebesgue index for the probe");
  c_probe->add_option("--k", probe_k,
                      "derivative order (0 = plain max principle)");
  CLI::App* c_info =
      app.add_subcommand("snapshot-info", "print a snapshot header");
  c_info->add_option("file", snap_path, "snapshot path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_info->parsed()) {
      Snapshot s = read_snapshot(snap_path);
      double mn = s.field.values[0], mx = mn, mean = 0.0;
      for (double v : s.field.values) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        mean += v;
      }
      mean /= static_cast<double>(s.field.values.size());
      std::printf("d=%d n=%d time=%.17g min=%.17g max=%.17g mean=%.17g\n",
                  s.field.grid.d, s.field.grid.n, s.time, mn, mx, mean);
      return 0;
    }

    ExperimentConfig cfg = load_with_overrides(config_path, sets);
    if (!out_override.empty()) cfg.output_dir = out_override;

    if (c_run->parsed() || c_lin->parsed()) {
      auto art = run_experiment(cfg, c_lin->parsed(), cfg.output_dir);
      std::printf("status=%s t=%.6g steps=%ld\n",
                  to_string(art.outcome.status), art.outcome.final_state.t,
                  art.outcome.final_state.step_count);
      return status_exit_code(art.outcome.status);
    }
    if (c_sweep->parsed()) {
      auto res = sweep_A(cfg, parse_list(a_list_csv),
                         c_sweep->count("--linear") > 0, cfg.output_dir);
      for (const auto& e : res.entries)
        std::printf("A=%g status=%s%s%s\n", e.A, to_string(e.status),
                    e.phi ? " phi set" : "",
                    e.error.empty() ? "" : (" error: " + e.error).c_str());
      if (res.A0_bracket)
        std::printf("A0 bracket: (%g, %g)\n", res.A0_bracket->first,
                    res.A0_bracket->second);
      return 0;
    }
    if (c_bis->parsed()) {
      auto res = bisect_A0(cfg, bis_lo, bis_hi, bis_iters);
      std::printf("A0 in (%.17g, %.17g) after %d iterations%s\n", res.lo,
                  res.hi, res.iterations,
                  res.monotone_suspect ? " [monotonicity suspect]" : "");
      return 0;
    }
    if (c_psi->parsed()) {
      ModelParams p = make_params(cfg);
      auto rows =
          psi_sweep(p.flow, 0.0, parse_list(a_list_csv), cfg.alpha, trunc_N);
      std::filesystem::create_directories(cfg.output_dir);
      write_psi_csv(cfg.output_dir + "/psi.csv", rows);
      for (const auto& r : rows)
        std::printf("A=%g psi=%.10g argmin_lambda=%.6g (%.2fs)\n", r.A, r.psi,
                    r.argmin_lambda, r.wall_seconds);
      return 0;
    }
    if (c_probe->parsed()) {
      PhysicalField f = initial_data(make_initial(cfg), make_grid(cfg));
      DichotomyReport rep =
          probe_k == 0 ? maxprinciple_probe(f, cfg.alpha, probe_p)
                       : gradient_maxprinciple_probe(f, cfg.alpha, probe_k);
      nlohmann::json j = {{"max_value", rep.max_value},
                          {"max_location", rep.max_location},
                          {"fraclap_at_max", rep.fraclap_at_max},
                          {"lp_norm_used", rep.lp_norm_used},
                          {"branch_ratio_a", rep.branch_ratio_a},
                          {"branch_ratio_b", rep.branch_ratio_b}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const parameter_error& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
