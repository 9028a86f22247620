#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ksmx/fft.hpp"
#include "ksmx/grid.hpp"
#include "ksmx/spectral_ops.hpp"

using namespace ksmx;

namespace {

PhysicalField random_field(const TorusGrid& g, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  PhysicalField f(g);
  for (double& v : f.values)
    v = 2.0 * (static_cast<double>(eng() >> 11) * 0x1p-53) - 1.0;
  return f;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(TorusGrid(4, 16), parameter_error);
  CHECK_THROWS_AS(TorusGrid(2, 24), parameter_error);
  CHECK_THROWS_AS(TorusGrid(2, 4), parameter_error);
  TorusGrid g(2, 16);
  CHECK(g.size() == 256);
  CHECK(g.coord(0) == doctest::Approx(-0.5));
  CHECK(g.coord(8) == doctest::Approx(0.0));
}

TEST_CASE("forward transform of simple fields") {
  TorusGrid g(1, 64);

  PhysicalField c(g, 3.5);
  SpectralField sc = forward_transform(c);
  CHECK(sc.at_k({0}).real() == doctest::Approx(3.5).epsilon(1e-14));
  double rest = 0.0;
  for (std::size_t i = 1; i < sc.coeffs.size(); ++i)
    rest = std::max(rest, std::abs(sc.coeffs[i]));
  CHECK(rest <= 1e-13);

  PhysicalField cosf(g);
  for_each_site(g, [&](std::size_t i, const std::array<double, 3>& x) {
    cosf.values[i] = std::cos(2.0 * M_PI * x[0]);
  });
  SpectralField sf = forward_transform(cosf);
  CHECK(sf.at_k({1}).real() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(sf.at_k({-1}).real() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(std::abs(sf.at_k({1}).imag()) <= 1e-14);
  CHECK(std::abs(sf.at_k({2})) <= 1e-14);
}

TEST_CASE("non-finite input rejected") {
  TorusGrid g(1, 8);
  PhysicalField f(g, 1.0);
  f.values[3] = std::nan("");
  CHECK_THROWS_AS(forward_transform(f), data_error);
}

TEST_CASE("round-trip oracle on seeded random fields") {
  for (auto [d, n] : {std::pair{1, 256}, {2, 64}, {3, 16}}) {
    TorusGrid g(d, n);
    PhysicalField f = random_field(g, 42 + d);
    PhysicalField back = inverse_transform(forward_transform(f));
    double err = 0.0, scale = max_abs(f.values);
    for (std::size_t i = 0; i < f.values.size(); ++i)
      err = std::max(err, std::fabs(f.values[i] - back.values[i]));
    CHECK(err <= 1e-12 * scale);
  }
}

TEST_CASE("spectral round-trip through physical space") {
  TorusGrid g(2, 32);
  SpectralField s = forward_transform(random_field(g, 7));
  SpectralField s2 = forward_transform(inverse_transform(s));
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i) {
    err = std::max(err, std::abs(s.coeffs[i] - s2.coeffs[i]));
    scale = std::max(scale, std::abs(s.coeffs[i]));
  }
  CHECK(err <= 1e-12 * scale);
}

TEST_CASE("inverse transform rejects broken symmetry") {
  TorusGrid g(1, 16);
  SpectralField s(g);
  s.at_k({1}) = cplx(0.0, 1.0);  // missing conjugate partner
  CHECK_THROWS_AS(inverse_transform(s), data_error);
}

TEST_CASE("inverse of simple spectra") {
  TorusGrid g(1, 32);
  SpectralField s(g);
  s.at_k({0}) = 1.0;
  PhysicalField f = inverse_transform(s);
  for (double v : f.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  SpectralField c(g);
  c.at_k({1}) = 0.5;
  c.at_k({-1}) = 0.5;
  PhysicalField fc = inverse_transform(c);
  for_each_site(g, [&](std::size_t i, const std::array<double, 3>& x) {
    CHECK(fc.values[i] ==
          doctest::Approx(std::cos(2.0 * M_PI * x[0])).epsilon(1e-12));
  });
}

TEST_CASE("project_low: idempotence, mode cut, Parseval split") {
  TorusGrid g(2, 32);
  SpectralField s = forward_transform(random_field(g, 99));

  SpectralField p1 = project_low(s, 4);
  SpectralField p2 = project_low(p1, 4);
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    CHECK(p1.coeffs[i] == p2.coeffs[i]);

  SpectralField single(g);
  single.at_k({3, 4}) = 1.0;  // |k| = 5
  single.at_k({-3, -4}) = 1.0;
  SpectralField cut = project_low(single, 4);
  for (const cplx& c : cut.coeffs) CHECK(std::abs(c) == 0.0);

  double total = spectral_energy(s);
  double low = spectral_energy(project_low(s, 4));
  SpectralField hi = s;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    hi.coeffs[i] -= project_low(s, 4).coeffs[i];
  double high = spectral_energy(hi);
  CHECK(low + high == doctest::Approx(total).epsilon(1e-12));
  CHECK(low <= total * (1.0 + 1e-15));
}

TEST_CASE("lp_norm basics and analytic |cos| integral") {
  TorusGrid g(1, 256);
  PhysicalField c(g, -2.5);
  CHECK(lp_norm(c, 1.0) == doctest::Approx(2.5));
  CHECK(lp_norm(c, 3.0) == doctest::Approx(2.5));
  CHECK(lp_norm(c, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(2.5));
  CHECK_THROWS_AS(lp_norm(c, 0.5), parameter_error);

  PhysicalField cosf(g);
  for_each_site(g, [&](std::size_t i, const std::array<double, 3>& x) {
    cosf.values[i] = std::cos(2.0 * M_PI * x[0]);
  });
  CHECK(lp_norm(cosf, 2.0) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  // independent oracle: int |cos(2 pi x)| dx = 2/pi
  CHECK(std::fabs(lp_norm(cosf, 1.0) - 2.0 / M_PI) <= 1e-3);
}

TEST_CASE("sobolev seminorm") {
  TorusGrid g(1, 64);
  PhysicalField c(g, 4.0);
  CHECK(sobolev_seminorm(forward_transform(c), 1.3) == doctest::Approx(0.0));

  double a = 0.7, s = 1.1;
  PhysicalField cosf(g);
  for_each_site(g, [&](std::size_t i, const std::array<double, 3>& x) {
    cosf.values[i] = a * std::cos(2.0 * M_PI * x[0]);
  });
  // single Hermitian pair: two modes of amplitude a/2
  double expect = std::pow(2.0 * M_PI, s) * a / std::sqrt(2.0);
  CHECK(sobolev_seminorm(forward_transform(cosf), s) ==
        doctest::Approx(expect).epsilon(1e-12));

  // Parseval: s = 0 equals the L2 norm of the mean-free part
  TorusGrid g2(2, 32);
  SpectralField r = forward_transform(random_field(g2, 5));
  SpectralField r0 = r;
  r0.coeffs[0] = 0.0;
  PhysicalField back = inverse_transform(r0);
  CHECK(sobolev_seminorm(r, 0.0) ==
        doctest::Approx(lp_norm(back, 2.0)).epsilon(1e-10));
}

TEST_CASE("dealias rule") {
  TorusGrid g(1, 32);
  SpectralField s(g);
  s.at_k({5}) = 1.0;
  s.at_k({-5}) = 1.0;
  SpectralField d1 = dealias(s);
  CHECK(std::abs(d1.at_k({5})) == 1.0);  // 5 < 32/3

  SpectralField hi(g);
  hi.at_k({15}) = 1.0;  // n/2 - 1, above the cut
  hi.at_k({-15}) = 1.0;
  CHECK(spectral_energy(dealias(hi)) == 0.0);

  TorusGrid g2(2, 32);
  SpectralField r = forward_transform(random_field(g2, 12));
  SpectralField d2 = dealias(r);
  SpectralField d3 = dealias(d2);
  for (std::size_t i = 0; i < r.coeffs.size(); ++i)
    CHECK(d2.coeffs[i] == d3.coeffs[i]);
}

TEST_CASE("hermitian symmetry preserved by module ops") {
  TorusGrid g(2, 16);
  SpectralField s = forward_transform(random_field(g, 77));
  CHECK(hermitian_symmetric(s));
  CHECK(hermitian_symmetric(project_low(s, 3)));
  CHECK(hermitian_symmetric(dealias(s)));
  CHECK(hermitian_symmetric(spectral_derivative(s, 0, 1)));
  CHECK(is_mean_zero(spectral_derivative(s, 1, 1)));
}
