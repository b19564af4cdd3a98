#include "enacode/error.hpp"
#include "enacode/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace enacode;
using stats::Alternative;
using stats::Method;

namespace {

std::vector<double> draw(std::mt19937_64& gen, std::size_t n, double shift) {
  std::normal_distribution<double> d(shift, 1.0);
  std::vector<double> v(n);
  for (auto& x : v)
    x = d(gen);
  return v;
}

} // namespace

TEST_CASE("fully separated samples") {
  const auto r = stats::mann_whitney({1, 2, 3}, {4, 5, 6});
  CHECK(r.U == 0.0);
  CHECK(r.p == doctest::Approx(0.1));
  CHECK(r.r == 1.0);
  CHECK(r.method == Method::exact);
  CHECK(r.n_a == 3);
  CHECK(r.median_a == 2.0);
  CHECK(r.median_b == 5.0);
}

TEST_CASE("identical multisets") {
  const auto r = stats::mann_whitney({1, 2}, {1, 2});
  CHECK(r.U == 2.0);
  CHECK(r.r == 0.0);
  CHECK(r.method == Method::normal_approx); // ties
}

TEST_CASE("degenerate samples") {
  const auto r = stats::mann_whitney({0.5, 0.5}, {0.5, 0.5, 0.5});
  CHECK(r.degenerate);
  CHECK(r.p == 1.0);
  CHECK(r.r == 0.0);
  CHECK_THROWS_AS(stats::mann_whitney({}, {1.0}), Error);
}

TEST_CASE("midranks and medians") {
  CHECK(stats::midranks({10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
  CHECK(stats::median({3, 1, 2}) == 2.0);
  CHECK(stats::median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("U distribution sums to the binomial coefficient") {
  const auto d = stats::u_distribution(3, 3);
  CHECK(d.size() == 10);
  CHECK(std::accumulate(d.begin(), d.end(), 0.0) == 20.0);
  CHECK(d.front() == 1.0);
  CHECK(d.back() == 1.0);
  const auto big = stats::u_distribution(10, 10);
  CHECK(std::accumulate(big.begin(), big.end(), 0.0) == 184756.0);
  for (std::size_t u = 0; u < big.size(); ++u)
    CHECK(big[u] == big[big.size() - 1 - u]);
}

TEST_CASE("antisymmetry, complement and translation") {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = draw(gen, 3 + gen() % 20, 0.3);
    const auto b = draw(gen, 3 + gen() % 20, 0.0);
    const auto ab = stats::mann_whitney(a, b);
    const auto ba = stats::mann_whitney(b, a);
    const double nn = static_cast<double>(a.size() * b.size());
    CHECK(ab.U + ba.U == nn);
    CHECK(ab.r == doctest::Approx(-ba.r));
    CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
    CHECK(ab.U >= 0.0);
    CHECK(ab.U <= nn);
    CHECK(ab.p > 0.0);
    CHECK(ab.p <= 1.0);
    CHECK(ab.r == doctest::Approx(1.0 - 2.0 * ab.U / nn));

    auto a2 = a, b2 = b;
    for (auto& x : a2)
      x += 3.25;
    for (auto& x : b2)
      x += 3.25;
    const auto shifted = stats::mann_whitney(a2, b2);
    CHECK(shifted.U == ab.U);
    CHECK(shifted.p == ab.p);
  }
}

TEST_CASE("ties keep U_A + U_B exact") {
  const std::vector<double> a = {1, 2, 2, 3, 3, 3}, b = {2, 3, 4, 4};
  const auto ab = stats::mann_whitney(a, b);
  const auto ba = stats::mann_whitney(b, a);
  CHECK(ab.U + ba.U == 24.0);
  CHECK(ab.method == Method::normal_approx);
}

TEST_CASE("exact and normal approximation agree at 10 vs 10") {
  std::mt19937_64 gen(12345);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = draw(gen, 10, trial % 3 == 0 ? 1.0 : 0.0);
    const auto b = draw(gen, 10, 0.0);
    const auto exact = stats::mann_whitney(a, b);
    REQUIRE(exact.method == Method::exact);
    const auto approx = stats::mann_whitney_normal(a, b);
    worst = std::max(worst, std::abs(exact.p - approx.p));
  }
  CHECK(worst < 0.01);
}

TEST_CASE("one-sided alternatives") {
  const auto greater = stats::mann_whitney({4, 5, 6}, {1, 2, 3}, Alternative::greater);
  CHECK(greater.U == 9.0);
  CHECK(greater.p == doctest::Approx(0.05));
  const auto less = stats::mann_whitney({4, 5, 6}, {1, 2, 3}, Alternative::less);
  CHECK(less.p == doctest::Approx(1.0));
  CHECK(stats::parse_alternative("two-sided") == Alternative::two_sided);
  CHECK_THROWS_AS(stats::parse_alternative("both"), ConfigError);
}

TEST_CASE("report line format") {
  stats::MannWhitneyResult r;
  r.axis = "MR1";
  r.label_a = "Human";
  r.label_b = "A+HK";
  r.median_a = -0.13;
  r.median_b = 0.13;
  r.n_a = 25;
  r.n_b = 25;
  r.U = 206;
  r.p = 0.04;
  r.r = 0.34;
  CHECK(stats::format_line(r) == "MR1: Human (Mdn=-0.13, N=25) vs A+HK (Mdn=0.13, N=25, U=206.00, p=0.04, r=0.34)");
  r.median_b = -0.001;
  CHECK(stats::format_line(r).find("Mdn=0.00, N=25, U") != std::string::npos);

  const auto csv = stats::to_csv({r});
  CHECK(csv.rfind("axis,group_a,group_b,median_a,median_b,n_a,n_b,U,p,r,method,alternative,degenerate\n", 0) == 0);
  const nlohmann::json j = r;
  CHECK(j["line"] == stats::format_line(r));
}
