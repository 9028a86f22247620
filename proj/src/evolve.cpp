#include "ksmx/evolve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "ksmx/attract.hpp"
#include "ksmx/diagnostics.hpp"
#include "ksmx/fft.hpp"
#include "ksmx/kern.hpp"
#include "ksmx/spectral_ops.hpp"

namespace ksmx {

void ModelParams::validate(int d) const {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw parameter_error("ModelParams: alpha must lie in (0,2]");
  if (!(A >= 0.0)) throw parameter_error("ModelParams: A must be >= 0");
  if (nonlinear_enabled) KernelSpec check(beta, d);  // throws on bad beta
}

void StepPolicy::validate() const {
  if (!(dt_max > 0.0) || !(cfl_constant > 0.0) || !(t_end > 0.0) ||
      !(blowup_linf_factor > 0.0) || !(blowup_tail_ratio > 0.0) ||
      record_every < 1 || record_dt < 0.0 || !(diag_p >= 1.0) ||
      lowmode_cap < 1)
    throw parameter_error("StepPolicy: invalid field");
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup_detected: return "blowup_detected";
    default: return "resolution_lost";
  }
}

// ------------------------------------------------------------ initial data

PhysicalField initial_data(const InitialSpec& spec, const TorusGrid& grid) {
  PhysicalField f(grid);
  switch (spec.kind) {
    case InitialSpec::Kind::constant: {
      std::fill(f.values.begin(), f.values.end(), spec.constant);
      break;
    }
    case InitialSpec::Kind::gaussian_bump: {
      if (!(spec.mass > 0.0) || !(spec.sigma > 0.0))
        throw parameter_error("initial_data: mass and sigma must be positive");
      if (spec.sigma < 2.0 * grid.dx())
        throw parameter_error("initial_data: sigma under-resolved (< 2 dx)");
      // separable periodized gaussian, then rescaled so the discrete mass
      // (mean, |T^d| = 1) is exactly `mass`
      const double is2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
      std::vector<double> prof(grid.n);
      for (int j = 0; j < grid.n; ++j) {
        double x = grid.coord(j), acc = 0.0;
        for (int im = -3; im <= 3; ++im) acc += std::exp(-(x + im) * (x + im) * is2);
        prof[j] = acc;
      }
      for_each_site(grid, [&](std::size_t i, const std::array<double, 3>&) {
        auto idx = unflatten(grid, i);
        double v = 1.0;
        for (int a = 0; a < grid.d; ++a) v *= prof[idx[a]];
        f.values[i] = v;
      });
      double mean = 0.0;
      for (double v : f.values) mean += v;
      mean /= static_cast<double>(grid.size());
      for (double& v : f.values) v *= spec.mass / mean;
      break;
    }
    case InitialSpec::Kind::single_mode: {
      const double two_pi = 2.0 * M_PI;
      for_each_site(grid, [&](std::size_t i, const std::array<double, 3>& x) {
        double ph = 0.0;
        for (int a = 0; a < grid.d; ++a) ph += spec.mode[a] * x[a];
        f.values[i] = spec.amplitude * std::cos(two_pi * ph);
      });
      break;
    }
    case InitialSpec::Kind::random_smooth: {
      if (spec.band < 1 || spec.band > grid.n / 2 - 1)
        throw parameter_error("initial_data: band out of range");
      if (!(spec.amplitude > 0.0))
        throw parameter_error("initial_data: amplitude must be positive");
      std::mt19937_64 eng(spec.seed);
      auto unit = [&]() {  // deterministic uniform in [-1, 1)
        return 2.0 * (static_cast<double>(eng() >> 11) * 0x1p-53) - 1.0;
      };
      SpectralField s(grid);
      const auto& neg = fft::negation_table(grid);
      for_each_mode(grid, [&](std::size_t fl, const std::array<int, 3>& k) {
        if (fl == 0 || fl >= neg[fl]) return;
        for (int a = 0; a < grid.d; ++a)
          if (std::abs(k[a]) > spec.band) return;
        cplx c(unit(), unit());
        s.coeffs[fl] = c;
        s.coeffs[neg[fl]] = std::conj(c);
      });
      fft::inverse(grid, s.coeffs.data(), f.values.data());
      double linf = kern::active().max_abs(f.values.data(), f.values.size());
      if (linf == 0.0) linf = 1.0;
      double scale = spec.amplitude / linf;
      double mn = f.values[0] * scale;
      for (double& v : f.values) {
        v *= scale;
        mn = std::min(mn, v);
      }
      double shift = std::max(0.0, 0.1 * spec.amplitude - mn);
      for (double& v : f.values) v += shift;
      break;
    }
  }
  return f;
}

// ---------------------------------------------------------------- stepper

namespace {

struct ExpPair {
  std::vector<double> full, half;
};

enum class Path { pure_decay, shear_stencil, linear_custom, nonlinear };

class Stepper {
 public:
  Stepper(const TorusGrid& g, const ModelParams& p, const StepPolicy& pol)
      : g_(g), p_(p), pol_(pol), sz_(g.size()) {
    p_.validate(g.d);
    pol_.validate();
    const bool shear = p_.flow.kind == FlowSpec::Kind::steady_shear ||
                       p_.flow.kind == FlowSpec::Kind::alternating_shear;
    const bool advecting = p_.A > 0.0 && p_.flow.kind != FlowSpec::Kind::none;
    if (!p_.nonlinear_enabled)
      path_ = !advecting ? Path::pure_decay
                         : (shear ? Path::shear_stencil : Path::linear_custom);
    else
      path_ = Path::nonlinear;

    lam_.resize(sz_);
    keep_.resize(sz_);
    const double two_pi = 2.0 * M_PI;
    for (int a = 0; a < g_.d; ++a) kfac_[a].resize(sz_);
    for (int a = 0; a < g_.d; ++a) bmul_[a].resize(sz_);
    const double bexp = -(g_.d + 2.0 - p_.beta);
    for_each_mode(g_, [&](std::size_t f, const std::array<int, 3>& k) {
      long k2 = 0;
      for (int a = 0; a < 3; ++a) k2 += static_cast<long>(k[a]) * k[a];
      double kk = std::sqrt(static_cast<double>(k2));
      lam_[f] = k2 == 0 ? 0.0 : std::pow(two_pi * kk, p_.alpha);
      bool keep = true;
      for (int a = 0; a < g_.d; ++a)
        if (3 * std::abs(k[a]) >= g_.n) keep = false;
      keep_[f] = keep ? 1.0 : 0.0;
      if (!keep) shell_.push_back(static_cast<std::uint32_t>(f));
      for (int a = 0; a < g_.d; ++a) kfac_[a][f] = two_pi * k[a];
      double riesz = k2 == 0 ? 0.0 : std::pow(two_pi * kk, bexp);
      for (int a = 0; a < g_.d; ++a)
        bmul_[a][f] = two_pi * k[a] * riesz;  // Bhat_a = i * bmul_a * rhohat
    });

    if (advecting) {
      u_linf_ = velocity_linf(p_.flow, 0.0, g_);
      stab_unit_ = advection_stability_dt() / 0.4;
    }
    if (path_ == Path::nonlinear || path_ == Path::linear_custom) {
      r_.resize(sz_);
      flux_.resize(g_.d * sz_);
      b_.resize(g_.d * sz_);
      fs_.assign(g_.d, std::vector<cplx>(sz_));
    }
    k1_.resize(sz_);
    k2buf_.resize(sz_);
    half_.resize(sz_);
  }

  Path path() const { return path_; }
  const TorusGrid& grid() const { return g_; }

  // u sampled per phase, null pointers for identically-zero components
  const std::vector<const double*>& phase_velocity(int ph) {
    if (uphys_.empty()) {
      int phases =
          p_.flow.kind == FlowSpec::Kind::alternating_shear ? 2 : 1;
      uphys_.resize(phases);
      uptr_.resize(phases);
      for (int q = 0; q < phases; ++q) {
        double t = q == 0 ? 0.0 : p_.flow.tau_f;
        auto u = sample_velocity(p_.flow, t, g_);
        uphys_[q].resize(g_.d);
        uptr_[q].assign(g_.d, nullptr);
        for (int a = 0; a < g_.d; ++a) {
          double mx = kern::active().max_abs(u[a].values.data(), sz_);
          if (mx > 0.0) {
            uphys_[q][a] = std::move(u[a].values);
            uptr_[q][a] = uphys_[q][a].data();
          }
        }
      }
    }
    return uptr_[ph];
  }

  // The pinned CFL quantity: min(dt_max, cfl dx / (A||u|| + ||B|| + eps)).
  double cfl_formula_dt(const SpectralField& rho) {
    double bmax = 0.0;
    if (p_.nonlinear_enabled) {
      auto B = attractive_field(rho, KernelSpec(p_.beta, g_.d));
      std::vector<std::vector<double>> bp(g_.d, std::vector<double>(sz_));
      const double* comps[3] = {nullptr, nullptr, nullptr};
      for (int a = 0; a < g_.d; ++a) {
        fft::inverse(g_, B[a].coeffs.data(), bp[a].data());
        comps[a] = bp[a].data();
      }
      bmax = std::sqrt(kern::active().max_norm2(comps, g_.d, sz_));
    }
    double ul = p_.flow.kind == FlowSpec::Kind::none
                    ? 0.0
                    : velocity_linf(p_.flow, 0.0, g_);
    double denom = p_.A * ul + bmax + 1e-12;
    return std::min(pol_.dt_max, pol_.cfl_constant * g_.dx() / denom);
  }

  struct StepMon {
    double dt = 0.0;
    double linf = -1.0;   // ||rho(t_n)||_inf when the path samples it
    double bmax = 0.0;
    double tail = -1.0;   // pre-dealias shell fraction when measured
    bool finite = true;
  };

  // One fused step: stage-1 evaluation also yields the CFL data; dt is the
  // quantized CFL/stability dt clipped to max_dt_event (records, flow
  // switches, t_end).
  StepMon advance(SimState& s, double max_dt_event) {
    StepMon mon;
    std::vector<cplx>& rho = s.rho.coeffs;
    switch (path_) {
      case Path::pure_decay: {
        mon.dt = std::min(quantize(pol_.dt_max), max_dt_event);
        const ExpPair& e = exps(mon.dt);
        kern::active().cmul_real(rho.data(), e.full.data(), sz_);
        break;
      }
      case Path::shear_stencil: {
        int ph = p_.flow.phase(s.t);
        stencil_rhs(rho, ph, k1_);
        double dt_adv = pol_.cfl_constant *
                        std::min(g_.dx() / (p_.A * u_linf_ + 1e-12),
                                 stab_unit_);
        mon.dt = std::min(quantize(std::min(pol_.dt_max, dt_adv)),
                          max_dt_event);
        const ExpPair& e = exps(mon.dt);
        const auto& kt = kern::active();
        kt.stage_combine(half_.data(), e.half.data(), rho.data(), k1_.data(),
                         0.5 * mon.dt, sz_);
        stencil_rhs(half_, p_.flow.phase(s.t + 0.5 * mon.dt), k2buf_);
        kt.step_combine(rho.data(), e.full.data(), rho.data(), e.half.data(),
                        k2buf_.data(), mon.dt, sz_);
        finish_monitors(rho, mon);
        break;
      }
      case Path::linear_custom:
      case Path::nonlinear: {
        int ph = p_.flow.phase(s.t);
        eval_rhs(rho, ph, k1_, &mon.linf, &mon.bmax);
        double denom = p_.A * u_linf_ + mon.bmax + 1e-12;
        double dt_adv = pol_.cfl_constant *
                        std::min(g_.dx() / denom,
                                 p_.A > 0.0 && u_linf_ > 0.0
                                     ? stab_unit_
                                     : std::numeric_limits<double>::infinity());
        mon.dt =
            std::min(quantize(std::min(pol_.dt_max, dt_adv)), max_dt_event);
        const ExpPair& e = exps(mon.dt);
        const auto& kt = kern::active();
        kt.cmul_real(k1_.data(), keep_.data(), sz_);  // dealias the stage
        kt.stage_combine(half_.data(), e.half.data(), rho.data(), k1_.data(),
                         0.5 * mon.dt, sz_);
        eval_rhs(half_, p_.flow.phase(s.t + 0.5 * mon.dt), k2buf_, nullptr,
                 nullptr);
        kt.step_combine(rho.data(), e.full.data(), rho.data(), e.half.data(),
                        k2buf_.data(), mon.dt, sz_);
        finish_monitors(rho, mon);
        kt.cmul_real(rho.data(), keep_.data(), sz_);  // final dealias
        break;
      }
    }
    s.t += mon.dt;
    s.step_count += 1;
    return mon;
  }

  // shell fraction + finiteness of the pre-dealias update
  void finish_monitors(const std::vector<cplx>& pre, StepMon& mon) {
    const double* pd = reinterpret_cast<const double*>(pre.data());
    double total = kern::active().sum_sq(pd, 2 * sz_);
    if (!std::isfinite(total)) {
      mon.finite = false;
      return;
    }
    double tail = 0.0;
    for (std::uint32_t f : shell_) tail += std::norm(pre[f]);
    mon.tail = total > 0.0 ? tail / total : 0.0;
  }

  // full-lattice -div flux for the spectral paths; optional monitors from
  // the stage-1 physical fields
  void eval_rhs(const std::vector<cplx>& rho, int ph, std::vector<cplx>& out,
                double* linf, double* bmax) {
    const auto& kt = kern::active();
    const bool with_b = p_.nonlinear_enabled;
    const bool with_u = p_.A > 0.0 && p_.flow.kind != FlowSpec::Kind::none;
    if (with_b) compute_b(rho);
    // physical density (and B components) via packed inverse transforms
    if (g_.d == 1) {
      if (with_b)
        fft::inverse_pair(g_, rho.data(), bs_[0].data(), r_.data(), b_.data());
      else
        fft::inverse(g_, rho.data(), r_.data());
    } else if (g_.d == 2) {
      fft::inverse(g_, rho.data(), r_.data());
      if (with_b)
        fft::inverse_pair(g_, bs_[0].data(), bs_[1].data(), b_.data(),
                          b_.data() + sz_);
    } else {
      if (with_b) {
        fft::inverse_pair(g_, rho.data(), bs_[2].data(), r_.data(),
                          b_.data() + 2 * sz_);
        fft::inverse_pair(g_, bs_[0].data(), bs_[1].data(), b_.data(),
                          b_.data() + sz_);
      } else {
        fft::inverse(g_, rho.data(), r_.data());
      }
    }
    if (linf) *linf = kt.max_abs(r_.data(), sz_);
    if (bmax) *bmax = with_b ? b_linf() : 0.0;

    const auto& u = with_u ? phase_velocity(ph) : null_u();
    for (int a = 0; a < g_.d; ++a) {
      const double* ua = with_u ? u[a] : nullptr;
      const double* ba = with_b ? b_.data() + a * sz_ : nullptr;
      if (!ua && !ba) {
        std::fill(flux_.begin() + a * sz_, flux_.begin() + (a + 1) * sz_, 0.0);
        continue;
      }
      kt.flux_combine(flux_.data() + a * sz_, r_.data(), ua, ba, p_.A, sz_);
    }
    // forward transforms of the flux, packed in pairs
    if (g_.d == 1) {
      fft::forward(g_, flux_.data(), fs_[0].data());
    } else {
      fft::forward_pair(g_, flux_.data(), flux_.data() + sz_, fs_[0].data(),
                        fs_[1].data());
      if (g_.d == 3) fft::forward(g_, flux_.data() + 2 * sz_, fs_[2].data());
    }
    // out = -sum_a i (2 pi k_a) Fhat_a  (exact zero at k = 0)
    for (std::size_t f = 0; f < sz_; ++f) {
      cplx acc = 0.0;
      for (int a = 0; a < g_.d; ++a) acc += kfac_[a][f] * fs_[a][f];
      out[f] = cplx(acc.imag(), -acc.real());  // times -i
    }
  }

  // single-harmonic shear advection as a k-lattice stencil (linear runs):
  // out(k) = -A pi k_c (rho(k - m e_pr) - rho(k + m e_pr))
  void stencil_rhs(const std::vector<cplx>& rho, int ph,
                   std::vector<cplx>& out) {
    int comp, prof;
    if (p_.flow.kind == FlowSpec::Kind::steady_shear) {
      comp = p_.flow.axis - 1;
      prof = p_.flow.axis % g_.d;
    } else {
      comp = ph == 0 ? 0 : 1;
      prof = 1 - comp;
    }
    const int m = p_.flow.m, n = g_.n;
    long stride = 1;
    for (int a = g_.d - 1; a > prof; --a) stride *= n;
    const double fac = -p_.A * M_PI;
    for_each_mode(g_, [&](std::size_t f, const std::array<int, 3>& k) {
      if (k[comp] == 0) {
        out[f] = 0.0;
        return;
      }
      cplx lo = 0.0, hi = 0.0;
      const long base = static_cast<long>(f);
      int q = k[prof] - m;
      if (q >= -n / 2)
        lo = rho[base +
                 static_cast<long>(index_of(q, n) - index_of(k[prof], n)) *
                     stride];
      q = k[prof] + m;
      if (q <= n / 2 - 1)
        hi = rho[base +
                 static_cast<long>(index_of(q, n) - index_of(k[prof], n)) *
                     stride];
      out[f] = fac * static_cast<double>(k[comp]) * (lo - hi);
    });
  }

  const ExpPair& exps(double dt) {
    std::uint64_t key = std::bit_cast<std::uint64_t>(dt);
    auto it = expcache_.find(key);
    if (it == expcache_.end()) {
      if (expcache_.size() > 48) expcache_.clear();
      ExpPair e;
      e.half.resize(sz_);
      e.full.resize(sz_);
      for (std::size_t f = 0; f < sz_; ++f) {
        double h = std::exp(-0.5 * lam_[f] * dt);
        e.half[f] = h;
        e.full[f] = h * h;
      }
      it = expcache_.emplace(key, std::move(e)).first;
    }
    return it->second;
  }

  double quantize(double dt_raw) const {
    if (dt_raw >= pol_.dt_max) return pol_.dt_max;
    const double lr = 0.25 * std::log(2.0);  // ladder ratio 2^{1/4}
    double j = std::ceil(std::log(pol_.dt_max / dt_raw) / lr - 1e-12);
    return pol_.dt_max * std::exp(-j * lr);
  }

 private:
  void compute_b(const std::vector<cplx>& rho) {
    if (bs_.empty()) bs_.assign(g_.d, std::vector<cplx>(sz_));
    for (int a = 0; a < g_.d; ++a) {
      const double* m = bmul_[a].data();
      for (std::size_t f = 0; f < sz_; ++f) {
        cplx c = rho[f];
        bs_[a][f] = cplx(-c.imag() * m[f], c.real() * m[f]);
      }
    }
  }

  double b_linf() const {
    const double* comps[3];
    for (int a = 0; a < g_.d; ++a) comps[a] = b_.data() + a * sz_;
    return std::sqrt(kern::active().max_norm2(comps, g_.d, sz_));
  }

  const std::vector<const double*>& null_u() {
    static const std::vector<const double*> nu(3, nullptr);
    return nu;
  }

  // Largest dt for which the weak RK2 growth on the advective spectrum is
  // beaten by the exact dissipation factor, mode by mode along the worst
  // (k, 0, 0)-type column; 0.9 safety. The pinned CFL formula stays as the
  // transport-accuracy bound; this guards the scheme's imaginary-axis edge.
  double advection_stability_dt() const {
    const int kmax = !p_.nonlinear_enabled && (path_ == Path::shear_stencil)
                         ? g_.n / 2
                         : (g_.n - 1) / 3;
    const double two_pi = 2.0 * M_PI;
    double dt_star = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= kmax; ++k) {
      double lam = std::pow(two_pi * k, p_.alpha);
      double adv = two_pi * k * p_.A * u_linf_;
      auto margin = [&](double dt) {
        double y = adv * dt;
        return lam * dt - 0.5 * std::log1p(0.25 * y * y * y * y);
      };
      if (margin(pol_.dt_max) >= 0.0) continue;
      double lo = 0.0, hi = pol_.dt_max;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (margin(mid) >= 0.0 ? lo : hi) = mid;
      }
      dt_star = std::min(dt_star, lo);
    }
    return 0.9 * dt_star;
  }

  TorusGrid g_;
  ModelParams p_;
  StepPolicy pol_;
  std::size_t sz_;
  Path path_ = Path::nonlinear;

  std::vector<double> lam_, keep_;
  std::vector<std::uint32_t> shell_;
  std::array<std::vector<double>, 3> kfac_, bmul_;
  std::vector<std::vector<cplx>> bs_, fs_;
  std::vector<cplx> k1_, k2buf_, half_;
  std::vector<double> r_, b_, flux_;
  std::vector<std::vector<std::vector<double>>> uphys_;
  std::vector<std::vector<const double*>> uptr_;
  double u_linf_ = 0.0;
  double stab_unit_ = std::numeric_limits<double>::infinity();
  std::map<std::uint64_t, ExpPair> expcache_;
};

SimState make_state(const PhysicalField& rho0) {
  SimState s;
  s.rho = forward_transform(rho0);
  dealias_inplace(s.rho);
  return s;
}

RunOutcome run_impl(const PhysicalField& rho0, const ModelParams& p,
                    const StepPolicy& pol) {
  const TorusGrid& g = rho0.grid;
  Stepper st(g, p, pol);
  RunOutcome out;
  SimState s = make_state(rho0);

  const double init_linf =
      std::max(kern::active().max_abs(rho0.values.data(), rho0.values.size()),
               0.0);
  const double linf_threshold = pol.blowup_linf_factor * std::max(init_linf, 1.0);

  auto do_record = [&](double tail_override) {
    out.records.push_back(record(s, p, pol.diag_p, tail_override));
    out.low_modes.push_back(
        snapshot_low_modes(s.rho, s.t, pol.lowmode_cap));
  };
  do_record(-1.0);

  long next_rec_idx = 1;
  const double inf = std::numeric_limits<double>::infinity();
  RunStatus status = RunStatus::completed;
  std::optional<double> fire_time;

  while (s.t < pol.t_end - 1e-13) {
    double next_rec = pol.record_dt > 0.0 ? next_rec_idx * pol.record_dt : inf;
    double next_sw = p.flow.next_switch(s.t);
    double event = std::min({pol.t_end, next_rec, next_sw});
    auto mon = st.advance(s, event - s.t);
    if (mon.dt < 1e-14) {
      status = RunStatus::resolution_lost;
      fire_time = s.t;
      break;
    }
    bool hit_event = event - s.t <= 1e-13 * std::max(1.0, event);
    if (hit_event) s.t = event;  // keep record times exact

    // detectors (per step on the monitored paths)
    if (!mon.finite) {
      status = RunStatus::resolution_lost;
      fire_time = s.t;
      break;
    }
    if (mon.linf >= 0.0 && mon.linf > linf_threshold) {
      status = RunStatus::blowup_detected;
      fire_time = s.t - mon.dt;  // threshold held by the pre-step state
      break;
    }
    if (mon.tail >= 0.0 && mon.tail > pol.blowup_tail_ratio) {
      status = RunStatus::resolution_lost;
      fire_time = s.t;
      break;
    }

    bool want_record = pol.record_dt > 0.0
                           ? s.t >= next_rec - 1e-13
                           : s.step_count % pol.record_every == 0;
    if (want_record || s.t >= pol.t_end - 1e-13) {
      if (mon.linf < 0.0) {  // linear fast paths: finiteness check here
        bool ok = true;
        for (const cplx& c : s.rho.coeffs)
          if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
            ok = false;
            break;
          }
        if (!ok) {
          status = RunStatus::resolution_lost;
          fire_time = s.t;
          break;
        }
      }
      do_record(mon.tail);
      if (pol.record_dt > 0.0 && s.t >= next_rec - 1e-13) ++next_rec_idx;
      const DiagnosticsRecord& r = out.records.back();
      if (mon.linf < 0.0) {  // linear fast paths: detector at record cadence
        if (r.linf > linf_threshold) {
          status = RunStatus::blowup_detected;
          fire_time = s.t;
          break;
        }
        if (r.tail_ratio > pol.blowup_tail_ratio) {
          status = RunStatus::resolution_lost;
          fire_time = s.t;
          break;
        }
      }
    }
  }

  if (status == RunStatus::completed &&
      (out.records.empty() || out.records.back().t < s.t - 1e-13))
    do_record(-1.0);
  fill_maxpoint_residuals(out.records, g.n);
  out.status = status;
  out.final_state = std::move(s);
  if (status == RunStatus::blowup_detected) out.blowup_time_estimate = fire_time;
  return out;
}

}  // namespace

// ------------------------------------------------------------- public ops

double cfl_dt(const SimState& s, const ModelParams& p, const StepPolicy& pol) {
  Stepper st(s.rho.grid, p, pol);
  return st.cfl_formula_dt(s.rho);
}

SimState step(const SimState& s, const ModelParams& p, const StepPolicy& pol) {
  Stepper st(s.rho.grid, p, pol);
  SimState next = s;
  st.advance(next, std::numeric_limits<double>::infinity());
  return next;
}

RunStatus blowup_detect(const SimState& s, const StepPolicy& pol,
                        double initial_linf) {
  for (const cplx& c : s.rho.coeffs)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      return RunStatus::resolution_lost;
  PhysicalField f(s.rho.grid);
  fft::inverse(s.rho.grid, s.rho.coeffs.data(), f.values.data());
  double linf = kern::active().max_abs(f.values.data(), f.values.size());
  if (linf > pol.blowup_linf_factor * std::max(initial_linf, 1.0))
    return RunStatus::blowup_detected;
  if (tail_energy_fraction(s.rho) > pol.blowup_tail_ratio)
    return RunStatus::resolution_lost;
  return RunStatus::completed;
}

RunOutcome run(const PhysicalField& rho0, const ModelParams& p,
               const StepPolicy& pol) {
  double scale = std::max(1.0, kern::active().max_abs(rho0.values.data(),
                                                      rho0.values.size()));
  for (double v : rho0.values)
    if (v < -1e-10 * scale)
      throw precondition_error("run: initial data must be nonnegative");
  return run_impl(rho0, p, pol);
}

RunOutcome linear_run(const PhysicalField& rho0, ModelParams p,
                      const StepPolicy& pol) {
  p.nonlinear_enabled = false;
  return run_impl(rho0, p, pol);
}

LowModeSnapshot snapshot_low_modes(const SpectralField& s, double t, int cap) {
  const TorusGrid& g = s.grid;
  LowModeSnapshot snap;
  snap.t = t;
  snap.d = g.d;
  snap.cap = std::min(cap, g.n / 2 - 1);
  const int c = snap.cap, w = 2 * c + 1;
  std::size_t count = 1;
  for (int a = 0; a < g.d; ++a) count *= static_cast<std::size_t>(w);
  snap.modes.resize(count);
  std::size_t i = 0;
  auto fetch = [&](int k0, int k1, int k2) {
    int idx[3] = {index_of(k0, g.n), index_of(k1, g.n), index_of(k2, g.n)};
    snap.modes[i++] = s.coeffs[flat_index(g, idx)];
  };
  if (g.d == 1)
    for (int a = -c; a <= c; ++a) fetch(a, 0, 0);
  else if (g.d == 2)
    for (int a = -c; a <= c; ++a)
      for (int b = -c; b <= c; ++b) fetch(a, b, 0);
  else
    for (int a = -c; a <= c; ++a)
      for (int b = -c; b <= c; ++b)
        for (int e = -c; e <= c; ++e) fetch(a, b, e);
  return snap;
}

double lowmode_diff_norm(const LowModeSnapshot& a, const LowModeSnapshot& b,
                         int N, int d) {
  if (a.cap != b.cap || a.modes.size() != b.modes.size())
    throw parameter_error("lowmode_diff_norm: incompatible snapshots");
  if (N > a.cap) throw parameter_error("lowmode_diff_norm: N exceeds cap");
  const int c = a.cap;
  double acc = 0.0;
  std::size_t i = 0;
  auto visit = [&](int k0, int k1, int k2) {
    long k2sum = static_cast<long>(k0) * k0 + static_cast<long>(k1) * k1 +
                 static_cast<long>(k2) * k2;
    if (k2sum <= static_cast<long>(N) * N)
      acc += std::norm(a.modes[i] - b.modes[i]);
    ++i;
  };
  if (d == 1)
    for (int x = -c; x <= c; ++x) visit(x, 0, 0);
  else if (d == 2)
    for (int x = -c; x <= c; ++x)
      for (int y = -c; y <= c; ++y) visit(x, y, 0);
  else
    for (int x = -c; x <= c; ++x)
      for (int y = -c; y <= c; ++y)
        for (int z = -c; z <= c; ++z) visit(x, y, z);
  return std::sqrt(acc);
}

}  // namespace ksmx
