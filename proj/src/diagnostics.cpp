#include "ksmx/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "ksmx/attract.hpp"
#include "ksmx/fft.hpp"
#include "ksmx/fractional.hpp"
#include "ksmx/kern.hpp"
#include "ksmx/spectral_ops.hpp"

namespace ksmx {

double dirichlet_quotient(const SpectralField& rho, double alpha) {
  double num = sobolev_seminorm(rho, 0.5 * alpha);
  double den = sobolev_seminorm(rho, 0.0);
  double scale = std::sqrt(spectral_energy(rho));
  if (den <= 1e-14 * std::max(scale, 1e-300))
    throw degenerate_input_error("dirichlet_quotient: constant field");
  return (num * num) / (den * den);
}

DiagnosticsRecord record(const SimState& s, const ModelParams& p,
                         double p_diag, double tail_override) {
  const TorusGrid& g = s.rho.grid;
  const std::size_t sz = g.size();
  for (const cplx& c : s.rho.coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw data_error("record: non-finite state");

  DiagnosticsRecord r;
  r.t = s.t;
  r.mass = mean_value(s.rho);
  r.l2_dist_mean = sobolev_seminorm(s.rho, 0.0);

  PhysicalField phys(g);
  fft::inverse(g, s.rho.coeffs.data(), phys.values.data());
  r.lp_norm = lp_norm(phys, p_diag);
  r.linf = kern::active().max_abs(phys.values.data(), sz);

  std::size_t best = 0;
  for (std::size_t i = 1; i < sz; ++i)
    if (phys.values[i] > phys.values[best]) best = i;
  r.max_flat = best;
  r.max_value = phys.values[best];
  auto idx = unflatten(g, best);
  r.max_index = idx;

  double scale = std::sqrt(spectral_energy(s.rho));
  if (r.l2_dist_mean <= 1e-14 * std::max(scale, 1e-300)) {
    r.dirichlet_quotient = 0.0;
    r.quotient_degenerate = true;
  } else {
    r.dirichlet_quotient = dirichlet_quotient(s.rho, p.alpha);
  }

  // spectral evaluations feeding the max-point identity post-pass
  SpectralField lap = frac_laplacian_spectral(s.rho, p.alpha);
  std::vector<double> lap_phys(sz);
  if (p.nonlinear_enabled) {
    SpectralField dk = deltak_convolve(s.rho, KernelSpec(p.beta, g.d));
    std::vector<double> dk_phys(sz);
    fft::inverse_pair(g, lap.coeffs.data(), dk.coeffs.data(), lap_phys.data(),
                      dk_phys.data());
    r.deltak_at_max = dk_phys[best];
  } else {
    fft::inverse(g, lap.coeffs.data(), lap_phys.data());
  }
  r.fraclap_at_max = lap_phys[best];

  r.tail_ratio =
      tail_override >= 0.0 ? tail_override : tail_energy_fraction(s.rho);
  r.maxpoint_residual = std::numeric_limits<double>::quiet_NaN();
  return r;
}

double phi_estimate(const std::vector<DiagnosticsRecord>& records) {
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& r : records) {
    if (r.quotient_degenerate) continue;
    best = std::min(best, r.dirichlet_quotient);
    any = true;
  }
  if (!any)
    throw degenerate_input_error("phi_estimate: no valid quotient records");
  return best;
}

void fill_maxpoint_residuals(std::vector<DiagnosticsRecord>& records,
                             int n_grid) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (records.empty()) return;
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    DiagnosticsRecord& r = records[i];
    const DiagnosticsRecord& nx = records[i + 1];
    double dt = nx.t - r.t;
    if (!(dt > 0.0)) {
      r.maxpoint_residual = nan;
      r.residual_discontinuous = true;
      continue;
    }
    int jump = 0;
    for (int a = 0; a < 3; ++a) {
      int dj = std::abs(nx.max_index[a] - r.max_index[a]);
      jump = std::max(jump, std::min(dj, n_grid - dj));
    }
    if (jump > n_grid / 4) {
      r.maxpoint_residual = nan;
      r.residual_discontinuous = true;
      continue;
    }
    double t1 = (nx.max_value - r.max_value) / dt;
    double t2 = r.fraclap_at_max;
    double t3 = r.max_value * r.deltak_at_max;
    double scale =
        std::max({std::fabs(t1), std::fabs(t2), std::fabs(t3), 1e-300});
    r.maxpoint_residual = std::fabs(t1 + t2 + t3) / scale;
  }
  records.back().maxpoint_residual = nan;
  records.back().residual_discontinuous = true;
}

double b1_constant(double B0, double D0, double C_inf, double rho_bar,
                   double p) {
  double first = std::sqrt(std::max(0.0, B0 * B0 - rho_bar * rho_bar));
  double second = std::pow(
      D0 / std::pow(2.0 * C_inf + rho_bar, 1.0 - 2.0 / p), 0.5 * p);
  return std::min(first, second);
}

ConstantsLedger constants_ledger(const PhysicalField& rho0, double p) {
  double scale = std::max(
      1.0, kern::active().max_abs(rho0.values.data(), rho0.values.size()));
  for (double v : rho0.values)
    if (v < -1e-10 * scale)
      throw precondition_error("constants_ledger: negative initial data");
  ConstantsLedger c;
  c.p = p;
  c.B0 = lp_norm(rho0, 2.0);
  double mean = 0.0;
  for (double v : rho0.values) mean += v;
  c.rho_bar = mean / static_cast<double>(rho0.values.size());
  PhysicalField centered = rho0;
  for (double& v : centered.values) v -= c.rho_bar;
  c.D0 = lp_norm(centered, p);
  c.C_inf = lp_norm(rho0, std::numeric_limits<double>::infinity());
  c.B1 = b1_constant(c.B0, c.D0, c.C_inf, c.rho_bar, p);
  return c;
}

}  // namespace ksmx
