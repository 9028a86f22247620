#pragma once

#include "ksmx/grid.hpp"

namespace ksmx {

// Catalog of divergence-free advecting fields. Amplitude is NOT stored here;
// the model's A scales the sampled unit-amplitude profile.
//
// steady_shear(axis=a, m): component a-1 (1-based axis) equals
// sin(2 pi m x_{a mod d}); a single-harmonic shear.
// alternating_shear(tau_f, m): steady_shear(axis=1) for t mod 2 tau_f in
// [0, tau_f), the axis-rotated version otherwise. Time-periodic proxy for a
// relaxation-enhancing flow; a genuinely weakly mixing steady flow on the
// flat torus is not elementary and the trends tested here only need the
// proxy.
struct FlowSpec {
  enum class Kind { none, steady_shear, alternating_shear, custom };
  Kind kind = Kind::none;
  int axis = 1;
  int m = 1;
  double tau_f = 0.1;
  std::vector<SpectralField> custom_components;

  static FlowSpec none();
  static FlowSpec steady(int axis, int m);
  static FlowSpec alternating(double tau_f, int m);
  // Validates spectral divergence <= 1e-10 relative to the field norm.
  static FlowSpec custom(std::vector<SpectralField> components);

  // Phase index at time t: 0 for steady/custom/none, 0/1 for alternating.
  int phase(double t) const;
  // Time of the next phase switch after t (infinity when steady).
  double next_switch(double t) const;
};

std::vector<PhysicalField> sample_velocity(const FlowSpec& flow, double t,
                                           const TorusGrid& grid);

// max_x |u(x)|_2 of the sampled unit-amplitude field.
double velocity_linf(const FlowSpec& flow, double t, const TorusGrid& grid);

// Dealiased pseudo-spectral u . grad rho; zero mode vanishes to roundoff for
// divergence-free u.
SpectralField advection_term(const std::vector<PhysicalField>& u,
                             const SpectralField& rho);

}  // namespace ksmx
