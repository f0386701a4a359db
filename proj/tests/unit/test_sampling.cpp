#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "slicelab/rng.hpp"
#include "slicelab/sampling.hpp"
#include "slicelab/specfun.hpp"
#include "slicelab/stats.hpp"

using namespace slicelab;

namespace {

struct Moment {
  double mean = 0.0;
  double se = 0.0;
};

template <class F>
Moment moment(int count, F draw) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < count; ++i) {
    const double x = draw();
    s += x;
    s2 += x * x;
  }
  const double mean = s / count;
  return {mean, std::sqrt((s2 / count - mean * mean) / count)};
}

}  // namespace

TEST_SUITE("sampling") {
  TEST_CASE("Philox known answers") {
    const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);
    const auto digits = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(digits[0] == 0xd16cfe09u);
    CHECK(digits[1] == 0x94fdccebu);
    CHECK(digits[2] == 0x5001e420u);
    CHECK(digits[3] == 0x24126ea1u);
  }

  TEST_CASE("streams are deterministic") {
    RngStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
    RngStream c(42, 7), d(42, 7);
    const auto table = shared_w_table(0.5);
    CHECK(sample_w(*table, c) == sample_w(*table, d));
    CHECK(sample_positive_stable(0.3, c) == sample_positive_stable(0.3, d));
    CHECK(RngStream(1, 2).split(3).next_u64() == RngStream(1, 2).split(3).next_u64());
    CHECK(RngStream(1, 2).split(3).next_u64() != RngStream(1, 2).split(4).next_u64());
  }

  TEST_CASE("neighbouring streams are uncorrelated") {
    constexpr int N = 1'000'000;
    RngStream a(5, 0), b(5, 1);
    double prev = b.uniform01() - 0.5;
    double cross = 0.0, same = 0.0;
    for (int i = 0; i < N; ++i) {
      const double x = a.uniform01() - 0.5;
      const double y = b.uniform01() - 0.5;
      cross += x * prev;
      same += x * y;
      prev = y;
    }
    // correlations of centred uniforms, variance 1/12
    CHECK(std::abs(12.0 * cross / N) < 4.0 / std::sqrt(N));
    CHECK(std::abs(12.0 * same / N) < 4.0 / std::sqrt(N));
  }

  TEST_CASE("uniform01 stays inside (0, 1)") {
    RngStream rng(3, 3);
    for (int i = 0; i < 100000; ++i) {
      const double u = rng.uniform01();
      CHECK((u > 0.0 && u < 1.0));
    }
  }

  TEST_CASE("positive stable Laplace transform") {
    constexpr int N = 1'000'000;
    for (double alpha : {0.25, 0.5, 0.75}) {
      RngStream rng(21, static_cast<std::uint64_t>(alpha * 100));
      std::vector<double> y(N);
      for (auto& v : y) v = sample_positive_stable(alpha, rng);
      double worst = 0.0;
      for (double t : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        double s = 0.0;
        for (double v : y) s += std::exp(-t * v);
        worst = std::max(worst, std::abs(s / N - std::exp(-std::pow(t, alpha))));
      }
      CHECK(worst < 5.0 / std::sqrt(N));
    }
  }

  TEST_CASE("stable moments") {
    RngStream rng(22, 0);
    const auto e = moment(1'000'000, [&] { return std::exp(-sample_positive_stable(0.5, rng)); });
    CHECK(std::abs(e.mean - std::exp(-1.0)) < 4.0 * e.se);
    const auto m = moment(1'000'000, [&] { return std::pow(sample_positive_stable(0.75, rng), -0.5); });
    CHECK(std::abs(m.mean - stable_moment(0.75, -0.5)) < 4.0 * m.se);
  }

  TEST_CASE("W table: CDF is monotone and matches closed-form moments") {
    const auto table = shared_w_table(0.5);
    const auto& f = table->knot_cdf();
    CHECK(std::is_sorted(f.begin(), f.end()));
    CHECK(std::adjacent_find(f.begin(), f.end()) == f.end());
    for (double u : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999, 1 - 1e-7}) CHECK(table->cdf(table->quantile(u)) == doctest::Approx(u).epsilon(1e-7));
    CHECK(table->cdf(1.0) + table->survival(1.0) == doctest::Approx(1.0).epsilon(1e-12));

    RngStream rng(23, 0);
    const auto m1 = moment(1'000'000, [&] { return 1.0 / sample_w(*table, rng); });
    CHECK(std::abs(m1.mean - 4.0) < 4.0 * m1.se);
    const auto m2 = moment(1'000'000, [&] { return std::pow(sample_w(*table, rng), -2.0); });
    CHECK(std::abs(m2.mean - w_moment(0.5, -2.0)) < 4.0 * m2.se);
  }

  TEST_CASE("W tail exponent") {
    constexpr int N = 10'000'000;
    for (double alpha : {0.25, 0.5, 0.75}) {
      const auto table = shared_w_table(alpha);
      RngStream rng(24, static_cast<std::uint64_t>(alpha * 100));
      std::vector<double> w(N);
      for (auto& v : w) v = sample_w(*table, rng);
      std::sort(w.begin(), w.end(), std::greater<>());
      // empirical survival over the top 1%
      std::vector<double> xs, ys;
      for (int k = 1; k <= N / 100; k += 97) {
        xs.push_back(w[k - 1]);
        ys.push_back(static_cast<double>(k) / N);
      }
      CHECK(std::abs(loglog_slope(xs, ys) + (0.5 + alpha)) < 0.15);
    }
  }

  TEST_CASE("generalized Gaussian draws") {
    RngStream rng(25, 0);
    const auto v = moment(1'000'000, [&] {
      const double y = sample_pgauss(PNorm::finite_value(2.0), rng);
      return y * y;
    });
    CHECK(std::abs(v.mean - 1.0 / (2.0 * std::numbers::pi)) < 4.0 * v.se);
    for (double pv : {0.5, 1.0, 1.5, 4.0}) {
      const auto p = PNorm::finite_value(pv);
      const auto m4 = moment(1'000'000, [&] { return std::pow(sample_pgauss(p, rng), 4.0); });
      CHECK(std::abs(m4.mean - pgauss_abs_moment(p, 4.0)) < 4.0 * m4.se);
    }
  }

  TEST_CASE("Haar bases are orthonormal") {
    RngStream rng(26, 0);
    for (auto [n, d] : {std::pair{2, 1}, {5, 2}, {50, 3}, {10000, 2}}) {
      std::vector<double> raw;
      const auto b = sample_haar_basis(n, d, rng, raw);
      CHECK(b.orthonormality_defect() < 1e-12);
      CHECK(raw.size() == static_cast<std::size_t>(n * d));
    }
  }

  TEST_CASE("Haar directions: first coordinate squared has mean 1/n") {
    RngStream rng(27, 0);
    const int n = 7;
    const auto m = moment(200000, [&] {
      const auto b = sample_haar_basis(n, 1, rng);
      return b.at(0, 0) * b.at(0, 0);
    });
    CHECK(std::abs(m.mean - 1.0 / n) < 4.0 * m.se);
  }
}
