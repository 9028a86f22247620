#include "ksmx/flows.hpp"

#include <cmath>
#include <limits>

#include "ksmx/fft.hpp"
#include "ksmx/kern.hpp"
#include "ksmx/spectral_ops.hpp"

namespace ksmx {

FlowSpec FlowSpec::none() { return FlowSpec{}; }

FlowSpec FlowSpec::steady(int axis, int m) {
  if (axis < 1 || m < 1)
    throw parameter_error("FlowSpec: axis and m must be positive");
  FlowSpec f;
  f.kind = Kind::steady_shear;
  f.axis = axis;
  f.m = m;
  return f;
}

FlowSpec FlowSpec::alternating(double tau_f, int m) {
  if (!(tau_f > 0.0) || m < 1)
    throw parameter_error("FlowSpec: tau_f and m must be positive");
  FlowSpec f;
  f.kind = Kind::alternating_shear;
  f.tau_f = tau_f;
  f.m = m;
  return f;
}

FlowSpec FlowSpec::custom(std::vector<SpectralField> components) {
  if (components.empty())
    throw parameter_error("FlowSpec: custom flow needs components");
  const TorusGrid& g = components[0].grid;
  if (static_cast<int>(components.size()) != g.d)
    throw parameter_error("FlowSpec: need one component per dimension");
  // spectral divergence against field magnitude
  double div2 = 0.0, mag2 = 0.0;
  const double two_pi = 2.0 * M_PI;
  for_each_mode(g, [&](std::size_t f, const std::array<int, 3>& k) {
    cplx dv = 0.0;
    for (int a = 0; a < g.d; ++a) {
      dv += cplx(0.0, two_pi * k[a]) * components[a].coeffs[f];
      mag2 += std::norm(components[a].coeffs[f]);
    }
    div2 += std::norm(dv);
  });
  if (std::sqrt(div2) > 1e-10 * (two_pi * std::sqrt(mag2)) + 1e-300)
    throw precondition_error("FlowSpec: custom flow is not divergence-free");
  FlowSpec f;
  f.kind = Kind::custom;
  f.custom_components = std::move(components);
  return f;
}

int FlowSpec::phase(double t) const {
  if (kind != Kind::alternating_shear) return 0;
  double cycle = std::fmod(t, 2.0 * tau_f);
  if (cycle < 0.0) cycle += 2.0 * tau_f;
  return cycle < tau_f ? 0 : 1;
}

double FlowSpec::next_switch(double t) const {
  if (kind != Kind::alternating_shear)
    return std::numeric_limits<double>::infinity();
  double j = std::floor(t / tau_f + 1e-12);
  return (j + 1.0) * tau_f;
}

std::vector<PhysicalField> sample_velocity(const FlowSpec& flow, double t,
                                           const TorusGrid& grid) {
  std::vector<PhysicalField> u(grid.d, PhysicalField(grid));
  switch (flow.kind) {
    case FlowSpec::Kind::none:
      break;
    case FlowSpec::Kind::steady_shear:
    case FlowSpec::Kind::alternating_shear: {
      if (grid.d < 2)
        throw parameter_error("sample_velocity: shear flows need d >= 2");
      int comp, prof;
      if (flow.kind == FlowSpec::Kind::steady_shear) {
        if (flow.axis < 1 || flow.axis > grid.d)
          throw parameter_error("sample_velocity: axis out of range");
        comp = flow.axis - 1;
        prof = flow.axis % grid.d;  // profile varies along the next axis
      } else {
        // phase 0: (sin(2 pi m x2), 0, ...); phase 1 swaps the first two axes
        comp = flow.phase(t) == 0 ? 0 : 1;
        prof = 1 - comp;
      }
      const double w = 2.0 * M_PI * flow.m;
      for_each_site(grid, [&](std::size_t f, const std::array<double, 3>& x) {
        u[comp].values[f] = std::sin(w * x[prof]);
      });
      break;
    }
    case FlowSpec::Kind::custom: {
      if (flow.custom_components[0].grid != grid)
        throw parameter_error("sample_velocity: custom flow grid mismatch");
      for (int a = 0; a < grid.d; ++a)
        u[a] = inverse_transform(flow.custom_components[a]);
      break;
    }
  }
  return u;
}

double velocity_linf(const FlowSpec& flow, double t, const TorusGrid& grid) {
  if (flow.kind == FlowSpec::Kind::none) return 0.0;
  if (flow.kind == FlowSpec::Kind::steady_shear ||
      flow.kind == FlowSpec::Kind::alternating_shear)
    return 1.0;  // unit-amplitude sin profile
  auto u = sample_velocity(flow, t, grid);
  std::vector<const double*> comps;
  for (const auto& c : u) comps.push_back(c.values.data());
  return std::sqrt(kern::active().max_norm2(comps.data(), grid.d,
                                            grid.size()));
}

SpectralField advection_term(const std::vector<PhysicalField>& u,
                             const SpectralField& rho) {
  const TorusGrid& g = rho.grid;
  if (static_cast<int>(u.size()) != g.d || u[0].grid != g)
    throw parameter_error("advection_term: grid mismatch");
  const std::size_t sz = g.size();
  SpectralField rr = dealias(rho);
  std::vector<double> acc(sz, 0.0), dphys(sz);
  for (int a = 0; a < g.d; ++a) {
    SpectralField da = spectral_derivative(rr, a, 1);
    fft::inverse(g, da.coeffs.data(), dphys.data());
    for (std::size_t i = 0; i < sz; ++i) acc[i] += u[a].values[i] * dphys[i];
  }
  SpectralField out(g);
  fft::forward(g, acc.data(), out.coeffs.data());
  dealias_inplace(out);
  return out;
}

}  // namespace ksmx
