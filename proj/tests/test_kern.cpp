// Scalar-vs-AVX2 kernel equivalence. Element-wise kernels must agree bit for
// bit (same operation order, no FMA contraction); reductions reassociate and
// get a tolerance.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ksmx/kern.hpp"

using namespace ksmx;
using kern::cplx;

namespace {

std::vector<double> random_reals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = 2.0 * (static_cast<double>(eng() >> 11) * 0x1p-53) - 1.0;
  return v;
}

std::vector<cplx> random_cplx(std::size_t n, std::uint64_t seed) {
  auto re = random_reals(n, seed), im = random_reals(n, seed + 1);
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = cplx(re[i], im[i]);
  return v;
}

const std::size_t kSizes[] = {1, 7, 64, 1023, 4096};

}  // namespace

TEST_CASE("element-wise kernels agree bit for bit") {
  if (!kern::avx2_supported()) return;
  const auto& s = kern::scalar_table();
  const auto& v = kern::avx2_table();

  for (std::size_t n : kSizes) {
    auto m = random_reals(n, 11);
    auto a1 = random_cplx(n, 22), a2 = a1;
    s.cmul_real(a1.data(), m.data(), n);
    v.cmul_real(a2.data(), m.data(), n);
    CHECK(std::memcmp(a1.data(), a2.data(), n * sizeof(cplx)) == 0);

    auto rho = random_reals(n, 33), u = random_reals(n, 44),
         b = random_reals(n, 55);
    std::vector<double> f1(n), f2(n);
    s.flux_combine(f1.data(), rho.data(), u.data(), b.data(), 3.25, n);
    v.flux_combine(f2.data(), rho.data(), u.data(), b.data(), 3.25, n);
    CHECK(std::memcmp(f1.data(), f2.data(), n * sizeof(double)) == 0);
    s.flux_combine(f1.data(), rho.data(), nullptr, b.data(), 3.25, n);
    v.flux_combine(f2.data(), rho.data(), nullptr, b.data(), 3.25, n);
    CHECK(std::memcmp(f1.data(), f2.data(), n * sizeof(double)) == 0);
    s.flux_combine(f1.data(), rho.data(), u.data(), nullptr, 3.25, n);
    v.flux_combine(f2.data(), rho.data(), u.data(), nullptr, 3.25, n);
    CHECK(std::memcmp(f1.data(), f2.data(), n * sizeof(double)) == 0);

    auto eh = random_reals(n, 66), ef = random_reals(n, 77);
    auto base = random_cplx(n, 88), k1 = random_cplx(n, 99);
    std::vector<cplx> o1(n), o2(n);
    s.stage_combine(o1.data(), eh.data(), base.data(), k1.data(), 0.37, n);
    v.stage_combine(o2.data(), eh.data(), base.data(), k1.data(), 0.37, n);
    CHECK(std::memcmp(o1.data(), o2.data(), n * sizeof(cplx)) == 0);

    s.step_combine(o1.data(), ef.data(), base.data(), eh.data(), k1.data(),
                   0.021, n);
    v.step_combine(o2.data(), ef.data(), base.data(), eh.data(), k1.data(),
                   0.021, n);
    CHECK(std::memcmp(o1.data(), o2.data(), n * sizeof(cplx)) == 0);
  }
}

TEST_CASE("reductions agree to relative tolerance") {
  if (!kern::avx2_supported()) return;
  const auto& s = kern::scalar_table();
  const auto& v = kern::avx2_table();
  for (std::size_t n : kSizes) {
    auto a = random_reals(n, 123), b = random_reals(n, 321);
    double d1 = s.dot(a.data(), b.data(), n), d2 = v.dot(a.data(), b.data(), n);
    CHECK(std::fabs(d1 - d2) <=
          1e-13 * std::max({std::fabs(d1), std::fabs(d2), 1.0}));
    double q1 = s.sum_sq(a.data(), n), q2 = v.sum_sq(a.data(), n);
    CHECK(std::fabs(q1 - q2) <= 1e-13 * std::max(q1, 1.0));
  }
}

TEST_CASE("max kernels are exact") {
  if (!kern::avx2_supported()) return;
  const auto& s = kern::scalar_table();
  const auto& v = kern::avx2_table();
  for (std::size_t n : kSizes) {
    auto a = random_reals(n, 7), b = random_reals(n, 8);
    CHECK(s.max_abs(a.data(), n) == v.max_abs(a.data(), n));
    const double* comps[2] = {a.data(), b.data()};
    CHECK(s.max_norm2(comps, 2, n) == v.max_norm2(comps, 2, n));
  }
}

TEST_CASE("scalar reference sanity") {
  const auto& s = kern::scalar_table();
  std::vector<double> a = {1.0, -2.0, 3.0};
  std::vector<double> b = {2.0, 0.5, -1.0};
  CHECK(s.dot(a.data(), b.data(), 3) == doctest::Approx(2.0 - 1.0 - 3.0));
  CHECK(s.sum_sq(a.data(), 3) == doctest::Approx(14.0));
  CHECK(s.max_abs(a.data(), 3) == 3.0);
  const double* comps[2] = {a.data(), b.data()};
  CHECK(s.max_norm2(comps, 2, 3) == doctest::Approx(10.0));
}

TEST_CASE("dispatch reports a valid variant") {
  auto name = kern::active_name();
  CHECK((name == "scalar" || name == "avx2"));
}
