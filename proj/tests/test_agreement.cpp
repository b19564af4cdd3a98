#include "enacode/agreement.hpp"
#include "enacode/error.hpp"

#include <doctest.h>

#include <random>

using namespace enacode;
using agreement::Band;
using agreement::ConfusionCounts;

namespace {

CodedTable coding(const std::vector<int>& flags, Source source = Source::human) {
  CodedTable t;
  t.codes = {"x"};
  EntryId id = 1;
  for (int f : flags) {
    CodedRow r;
    r.entry_id = id++;
    r.flags = {static_cast<std::uint8_t>(f)};
    r.source = source;
    t.rows.push_back(r);
  }
  return t;
}

} // namespace

TEST_CASE("confusion counts") {
  const std::vector<int> ten = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
  CHECK(agreement::confusion(coding(ten), coding(ten), "x") == ConfusionCounts{4, 0, 0, 6});

  std::vector<int> flipped;
  for (int f : ten)
    flipped.push_back(1 - f);
  const auto cc = agreement::confusion(coding(ten), coding(flipped), "x");
  CHECK(cc.a == 0);
  CHECK(cc.d == 0);
  CHECK(cc.n() == 10);

  SUBCASE("rows are aligned by id, not position") {
    auto r2 = coding({1, 0, 0});
    std::reverse(r2.rows.begin(), r2.rows.end());
    CHECK(agreement::confusion(coding({1, 0, 0}), r2, "x") == ConfusionCounts{1, 0, 0, 2});
  }
  SUBCASE("id mismatch lists the difference") {
    auto r2 = coding({1, 0, 0});
    r2.rows[2].entry_id = 9;
    try {
      agreement::confusion(coding({1, 0, 0}), r2, "x");
      FAIL("expected MergeError");
    } catch (const MergeError& e) {
      const std::string what = e.what();
      CHECK(what.find('3') != std::string::npos);
      CHECK(what.find('9') != std::string::npos);
    }
  }
}

TEST_CASE("kappa values") {
  CHECK(agreement::kappa({4, 1, 1, 4}) == doctest::Approx(0.6));
  CHECK(agreement::kappa({5, 0, 0, 5}) == 1.0);
  CHECK(agreement::kappa({0, 5, 5, 0}) == doctest::Approx(-1.0));
  CHECK(agreement::kappa({0, 0, 0, 7}) == 1.0); // both raters never use the code
  CHECK(agreement::kappa({0, 3, 0, 0}) == 0.0);
  CHECK_THROWS_AS(agreement::kappa({0, 0, 0, 0}), Error);
}

TEST_CASE("kappa is symmetric in the raters") {
  for (long a = 0; a < 5; ++a)
    for (long b = 0; b < 5; ++b)
      for (long c = 0; c < 5; ++c)
        for (long d = 0; d < 5; ++d) {
          if (a + b + c + d == 0)
            continue;
          CHECK(agreement::kappa({a, b, c, d}) == doctest::Approx(agreement::kappa({a, c, b, d})));
          const double k = agreement::kappa({a, b, c, d});
          CHECK(k >= -1.0);
          CHECK(k <= 1.0);
        }
}

TEST_CASE("independent random codings give kappa near zero") {
  std::mt19937_64 gen(7);
  std::bernoulli_distribution p1(0.3), p2(0.45);
  std::vector<int> r1, r2;
  for (int i = 0; i < 10000; ++i) {
    r1.push_back(p1(gen));
    r2.push_back(p2(gen));
  }
  const double k = agreement::kappa(agreement::confusion(coding(r1), coding(r2), "x"));
  CHECK(std::abs(k) < 0.05);
}

TEST_CASE("bands") {
  // levels reported alongside kappa values in the source study
  CHECK(agreement::band(0.23) == Band::minimal);
  CHECK(agreement::band(0.36) == Band::minimal);
  CHECK(agreement::band(0.52) == Band::weak);
  CHECK(agreement::band(0.77) == Band::moderate);
  CHECK(agreement::band(0.70) == Band::moderate);
  CHECK(agreement::band(0.79) == Band::moderate);
  CHECK(agreement::band(0.81) == Band::strong);
  CHECK(agreement::band(1.0) == Band::almost_perfect);
  CHECK(agreement::band(0.90) == Band::almost_perfect);
  CHECK(agreement::band(0.60) == Band::moderate);
  CHECK(agreement::band(0.59) == Band::weak);
  CHECK(agreement::band(0.40) == Band::weak);
  CHECK(agreement::band(0.20) == Band::minimal);
  CHECK(agreement::band(0.19) == Band::none);
  CHECK(agreement::band(-0.4) == Band::none);
  CHECK(agreement::to_string(Band::almost_perfect) == "almost-perfect");

  agreement::BandThresholds custom;
  custom.strong = 0.75;
  CHECK(agreement::band(0.77, custom) == Band::strong);
}

TEST_CASE("per-code report") {
  auto r1 = coding({1, 1, 0, 0});
  auto r2 = coding({1, 0, 0, 0});
  r1.codes = r2.codes = {"x", "y"};
  for (auto* t : {&r1, &r2})
    for (auto& row : t->rows)
      row.flags.push_back(row.flags[0]);
  const auto rep = agreement::compare(r1, r2);
  REQUIRE(rep.per_code.size() == 2);
  CHECK(rep.per_code[0].code == "x");
  CHECK(rep.per_code[0].counts == ConfusionCounts{1, 1, 0, 2});
  CHECK(rep.per_code[0].kappa == doctest::Approx(0.5));
  CHECK(rep.per_code[0].band == Band::weak);
  CHECK(agreement::to_csv(rep) ==
        "code,a,b,c,d,kappa,band\nx,1,1,0,2,0.5000,weak\ny,1,1,0,2,0.5000,weak\n");

  r2.codes = {"x", "z"};
  CHECK_THROWS_AS(agreement::compare(r1, r2), SchemaError);
}
