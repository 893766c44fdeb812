// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "isacsim/rng.hpp"

using isacsim::Rng;

TEST_CASE("same seed reproduces the same sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("forked streams are independent of sibling consumption") {
  Rng root(7);
  std::vector<std::uint64_t> direct;
  {
    Rng s = root.fork(5);
    for (int i = 0; i < 64; ++i) direct.push_back(s.next_u64());
  }
  // Consume heavily from a sibling stream first; fork(5) must not change.
  {
    Rng other = root.fork(6);
    for (int i = 0; i < 10000; ++i) other.next_u64();
    Rng s = root.fork(5);
    for (int i = 0; i < 64; ++i) CHECK(s.next_u64() == direct[i]);
  }
}

TEST_CASE("distinct forks produce distinct streams") {
  Rng root(7);
  Rng a = root.fork(1);
  Rng b = root.fork(2);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("uniform lies in (0, 1]") {
  Rng r(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("normal moments") {
  Rng r(11);
  const long n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("complex normal variance splits evenly") {
  Rng r(13);
  const long n = 200000;
  double pow_sum = 0.0, re_sum = 0.0, im_sum = 0.0;
  for (long i = 0; i < n; ++i) {
    const auto z = r.cnormal(2.5);
    pow_sum += std::norm(z);
    re_sum += z.real() * z.real();
    im_sum += z.imag() * z.imag();
  }
  CHECK(pow_sum / n == doctest::Approx(2.5).epsilon(0.02));
  CHECK(re_sum / n == doctest::Approx(1.25).epsilon(0.03));
  CHECK(im_sum / n == doctest::Approx(1.25).epsilon(0.03));
}

TEST_CASE("unit symbols have unit modulus and zero mean") {
  Rng r(17);
  const long n = 100000;
  std::complex<double> mean = 0.0;
  for (long i = 0; i < n; ++i) {
    const auto s = r.unit_symbol();
    CHECK(std::abs(std::abs(s) - 1.0) < 1e-12);
    mean += s;
  }
  CHECK(std::abs(mean) / static_cast<double>(n) < 0.01);
}
