#include "enacode/ena.hpp"
#include "enacode/error.hpp"

#include "oracle_linalg.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace enacode;
using ena::Accumulation;
using ena::PairOrder;

namespace {

const std::vector<std::string> kCodes = {"effort", "beyondLS", "illusions", "retrieval-interleave"};

struct Row {
  EntryId id;
  std::string user;
  std::vector<int> flags; // kCodes order
  Source source = Source::algorithm;
};

CodedTable table(const std::vector<Row>& rows) {
  CodedTable t;
  t.codes = kCodes;
  for (const auto& r : rows) {
    CodedRow c;
    c.entry_id = r.id;
    c.user_id = r.user;
    for (int f : r.flags)
      c.flags.push_back(static_cast<std::uint8_t>(f));
    c.source = r.source;
    t.rows.push_back(c);
  }
  return t;
}

double weight(const PairOrder& order, const ena::AdjacencyVector& v, const std::string& a, const std::string& b) {
  const int i = order.code_index(a), j = order.code_index(b);
  for (std::size_t p = 0; p < order.size(); ++p)
    if (order.pairs[p] == std::make_pair(std::min(i, j), std::max(i, j)))
      return v.weights[p];
  FAIL("no such pair");
  return 0.0;
}

std::vector<double> random_unit(std::mt19937_64& gen, std::size_t dim, double shift = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(dim);
  double n = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    v[i] = u(gen) + (i == 0 ? shift : 0.0);
    n += v[i] * v[i];
  }
  for (auto& x : v)
    x /= std::sqrt(n);
  return v;
}

} // namespace

TEST_CASE("pair order") {
  const PairOrder order(kCodes);
  CHECK(order.codes == std::vector<std::string>{"beyondLS", "effort", "illusions", "retrieval-interleave"});
  CHECK(order.size() == 6);
  CHECK(order.label(0) == "beyondLS and effort");
  CHECK(order.label(5) == "illusions and retrieval-interleave");
  CHECK(order.code_index("effort") == 1);
  CHECK(order.code_index("nope") == -1);
}

TEST_CASE("binary accumulation") {
  const PairOrder order(kCodes);
  const auto by_user = ena::unit_resolver(UnitKey::user);

  SUBCASE("one post with two codes") {
    const auto v = ena::accumulate(table({{1, "s1", {1, 0, 1, 0}}}), order, by_user);
    REQUIRE(v.size() == 1);
    CHECK(weight(order, v[0], "effort", "illusions") == 1.0);
    CHECK(std::accumulate(v[0].weights.begin(), v[0].weights.end(), 0.0) == 1.0);
  }
  SUBCASE("codes from different posts connect") {
    const auto v = ena::accumulate(table({{1, "s1", {1, 0, 0, 0}}, {2, "s1", {0, 0, 1, 0}}}), order, by_user);
    CHECK(weight(order, v[0], "effort", "illusions") == 1.0);
  }
  SUBCASE("matches brute force over flag sets") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Row> rows;
      std::vector<int> any(4, 0);
      const int posts = 1 + static_cast<int>(gen() % 5);
      for (int p = 0; p < posts; ++p) {
        std::vector<int> f(4);
        for (auto& x : f)
          x = static_cast<int>(gen() % 3 == 0);
        for (int c = 0; c < 4; ++c)
          any[c] |= f[c];
        rows.push_back({p + 1, "s1", f});
      }
      const auto v = ena::accumulate(table(rows), order, by_user);
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
          CHECK(weight(order, v[0], kCodes[a], kCodes[b]) == (any[a] && any[b] ? 1.0 : 0.0));
    }
  }
  SUBCASE("all four codes somewhere give all six pairs") {
    const auto v = ena::accumulate(
        table({{1, "s1", {1, 0, 0, 0}}, {2, "s1", {0, 1, 0, 0}}, {3, "s1", {0, 0, 1, 1}}}), order, by_user);
    for (double w : v[0].weights)
      CHECK(w == 1.0);
  }
}

TEST_CASE("count accumulation") {
  const PairOrder order(kCodes);
  const auto v = ena::accumulate(
      table({{1, "s1", {1, 0, 0, 0}}, {2, "s1", {0, 0, 1, 0}}, {3, "s1", {1, 0, 1, 0}}}), order,
      ena::unit_resolver(UnitKey::user), Accumulation::count);
  // row 2 connects illusions to the earlier effort; row 3 connects once more
  CHECK(weight(order, v[0], "effort", "illusions") == 2.0);
  CHECK(weight(order, v[0], "effort", "beyondLS") == 0.0);
}

TEST_CASE("units are grouped by source then id, rows in entry order") {
  const PairOrder order(kCodes);
  std::vector<Row> rows = {{3, "s2", {1, 1, 0, 0}, Source::human}, {1, "s1", {1, 0, 0, 0}},
                           {2, "s1", {0, 0, 1, 0}}, {1, "s1", {0, 0, 0, 1}, Source::human},
                           {4, "s2", {0, 1, 0, 1}}};
  const auto v = ena::accumulate(table(rows), order, ena::unit_resolver(UnitKey::user), Accumulation::count);
  REQUIRE(v.size() == 4);
  CHECK(v[0].source == Source::algorithm);
  CHECK(v[0].unit_id == "s1");
  CHECK(v[1].unit_id == "s2");
  CHECK(v[2].source == Source::human);

  std::mt19937_64 gen(1);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(rows.begin(), rows.end(), gen);
    const auto w = ena::accumulate(table(rows), order, ena::unit_resolver(UnitKey::user), Accumulation::count);
    for (std::size_t u = 0; u < v.size(); ++u)
      CHECK(w[u].weights == v[u].weights);
  }
}

TEST_CASE("user+semester units") {
  Corpus corpus;
  corpus.unit_key = UnitKey::user_semester;
  corpus.posts = {{1, "s1", "2021-01-01", "a", "F21"}, {2, "s1", "2022-01-01", "b", "S22"}};
  const auto v = ena::accumulate(table({{1, "s1", {1, 1, 0, 0}}, {2, "s1", {0, 0, 1, 1}}}), PairOrder(kCodes),
                                 ena::unit_resolver(UnitKey::user_semester, &corpus));
  REQUIRE(v.size() == 2);
  CHECK(v[0].unit_id == "s1|F21");
  CHECK(v[1].unit_id == "s1|S22");
  CHECK_THROWS_AS(ena::unit_resolver(UnitKey::user_semester), ConfigError);
}

TEST_CASE("spherical normalization") {
  const auto n = ena::normalize_spherical({{"a", Source::algorithm, {2, 0, 0, 0, 0, 0}},
                                           {"b", Source::algorithm, {1, 1, 0, 0, 0, 0}},
                                           {"c", Source::algorithm, {0, 0, 0, 0, 0, 0}}});
  CHECK(n.vectors[0].weights == std::vector<double>{1, 0, 0, 0, 0, 0});
  CHECK(n.vectors[1].weights[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(n.vectors[1].weights[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(n.vectors[2].weights == std::vector<double>(6, 0.0));
  CHECK(n.zero == std::vector<bool>{false, false, true});
}

TEST_CASE("means rotation puts all group separation on MR1") {
  std::mt19937_64 gen(5);
  std::vector<std::vector<double>> rows;
  std::vector<bool> in_a;
  const std::vector<double> m = {0.3, -0.1, 0.2, 0.0, 0.1, -0.2};
  for (int i = 0; i < 10; ++i) {
    const auto e = random_unit(gen, 6);
    std::vector<double> plus(6), minus(6);
    for (int j = 0; j < 6; ++j) {
      plus[j] = e[j] + m[j];
      minus[j] = e[j] - m[j];
    }
    rows.push_back(plus);
    in_a.push_back(true);
    rows.push_back(minus);
    in_a.push_back(false);
  }
  const auto proj = ena::project_means_rotation(rows, in_a);
  double norm = 0.0;
  for (double x : m)
    norm += x * x;
  for (int j = 0; j < 6; ++j)
    CHECK(proj.axes[0][j] == doctest::Approx(m[j] / std::sqrt(norm)));
  for (std::size_t k = 1; k < proj.axes.size(); ++k) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      (in_a[i] ? ma : mb) += proj.points[i][k];
    CHECK(std::abs(ma - mb) / 10.0 < 1e-9);
  }
}

TEST_CASE("identical groups are degenerate") {
  const std::vector<double> v = {0.5, 0.5, 0.5, 0.5, 0, 0};
  CHECK_THROWS_AS(ena::project_means_rotation({v, v, v, v}, {true, true, false, false}), DegenerateError);
  CHECK_THROWS_AS(ena::project_means_rotation({v, v}, {true, true}), DegenerateError);
}

TEST_CASE("random 25+25 fixture against a dense eigen oracle") {
  std::mt19937_64 gen(11);
  std::vector<std::vector<double>> rows;
  std::vector<bool> in_a;
  for (int i = 0; i < 50; ++i) {
    rows.push_back(random_unit(gen, 6, i < 25 ? 0.4 : 0.0));
    in_a.push_back(i < 25);
  }
  const auto proj = ena::project_means_rotation(rows, in_a);
  REQUIRE(proj.axes.size() == 6);

  for (std::size_t a = 0; a < proj.axes.size(); ++a)
    for (std::size_t b = 0; b < proj.axes.size(); ++b)
      CHECK(std::abs(oracle::dot(proj.axes[a], proj.axes[b]) - (a == b ? 1.0 : 0.0)) < 1e-9);
  for (std::size_t k = 2; k < proj.variance_explained.size(); ++k)
    CHECK(proj.variance_explained[k - 1] >= proj.variance_explained[k]);

  // oracle: center, MR1 from group means, residual, eigen of R^T R
  oracle::Vec center(6, 0.0), ma(6, 0.0), mb(6, 0.0);
  for (const auto& r : rows)
    for (int j = 0; j < 6; ++j)
      center[j] += r[j] / 50.0;
  oracle::Mat xc;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    oracle::Vec c(6);
    for (int j = 0; j < 6; ++j) {
      c[j] = rows[i][j] - center[j];
      (in_a[i] ? ma : mb)[j] += c[j] / 25.0;
    }
    xc.push_back(c);
  }
  oracle::Vec mr1(6);
  double dn = 0.0;
  for (int j = 0; j < 6; ++j)
    dn += (ma[j] - mb[j]) * (ma[j] - mb[j]);
  for (int j = 0; j < 6; ++j)
    mr1[j] = (ma[j] - mb[j]) / std::sqrt(dn);
  for (int j = 0; j < 6; ++j)
    CHECK(proj.axes[0][j] == doctest::Approx(mr1[j]).epsilon(1e-10));

  oracle::Mat residual = xc;
  for (auto& r : residual) {
    const double s = oracle::dot(r, mr1);
    for (int j = 0; j < 6; ++j)
      r[j] -= s * mr1[j];
  }
  const auto eig = oracle::jacobi_eigen(oracle::multiply(oracle::transpose(residual), residual));
  double total = 0.0;
  for (const auto& r : xc)
    total += oracle::dot(r, r);
  for (std::size_t k = 1; k < proj.axes.size(); ++k) {
    INFO("axis " << k);
    CHECK(std::abs(std::abs(oracle::dot(proj.axes[k], eig.vectors[k - 1])) - 1.0) < 1e-8);
    // variance on an SVD axis is its squared singular value over the total
    CHECK(proj.variance_explained[k] == doctest::Approx(eig.values[k - 1] / total).epsilon(1e-8));
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < proj.axes.size(); ++k)
      CHECK(proj.points[i][k] == doctest::Approx(oracle::dot(xc[i], proj.axes[k])).epsilon(1e-10));
}

TEST_CASE("axis signs are deterministic") {
  std::mt19937_64 gen(2);
  std::vector<std::vector<double>> rows;
  std::vector<bool> in_a;
  for (int i = 0; i < 20; ++i) {
    rows.push_back(random_unit(gen, 6, i < 10 ? 0.3 : 0.0));
    in_a.push_back(i < 10);
  }
  const auto proj = ena::project_means_rotation(rows, in_a);
  for (std::size_t k = 1; k < proj.axes.size(); ++k) {
    const auto& ax = proj.axes[k];
    const auto it = std::max_element(ax.begin(), ax.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
    CHECK(*it > 0);
  }
}

namespace {

ena::EnaSpace four_code_space(std::uint64_t seed, int units_per_group) {
  std::mt19937_64 gen(seed);
  std::vector<Row> rows;
  EntryId id = 1;
  for (int g = 0; g < 2; ++g)
    for (int u = 0; u < units_per_group; ++u)
      for (int p = 0; p < 3; ++p) {
        std::vector<int> f(4);
        for (int c = 0; c < 4; ++c)
          f[c] = static_cast<int>(gen() % (g == 0 && c == 0 ? 2 : 3) == 0);
        rows.push_back({id++, "s" + std::to_string(u), f, g == 0 ? Source::algorithm : Source::human});
      }
  const PairOrder order(kCodes);
  const auto raw = ena::accumulate(table(rows), order, ena::unit_resolver(UnitKey::user), Accumulation::count);
  return ena::build_space(raw, order, Accumulation::count);
}

} // namespace

TEST_CASE("node registration matches the normal equations") {
  const auto space = four_code_space(17, 15);
  REQUIRE_FALSE(space.registration.rank_deficient);
  const auto& order = space.pair_order;
  oracle::Mat a;
  std::vector<std::size_t> units;
  for (std::size_t u = 0; u < space.normalized.size(); ++u) {
    if (!space.included[u])
      continue;
    units.push_back(u);
    const auto& w = space.normalized[u].weights;
    double sum = 0.0;
    for (double x : w)
      sum += x;
    oracle::Vec row(4, 0.0);
    for (std::size_t p = 0; p < w.size(); ++p) {
      row[order.pairs[p].first] += 0.5 * w[p] / sum;
      row[order.pairs[p].second] += 0.5 * w[p] / sum;
    }
    a.push_back(row);
  }
  for (std::size_t axis = 0; axis < 2; ++axis) {
    oracle::Vec b;
    for (auto u : units)
      b.push_back(space.points[u][axis]);
    const auto x = oracle::least_squares(a, b);
    double rss = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) {
      const double e = oracle::dot(a[r], x) - b[r];
      rss += e * e;
    }
    CHECK(std::abs(space.registration.residual[axis] - rss) < 1e-8);
    for (int c = 0; c < 4; ++c) {
      const auto& n = space.registration.nodes[c];
      CHECK(std::abs((axis == 0 ? n.x : n.y) - x[c]) < 1e-8);
    }
  }
  CHECK(space.registration.goodness.size() == 2);
  CHECK(space.registration.goodness[0].has_value());
}

TEST_CASE("registration with a single pair collapses onto the midpoint") {
  ena::EnaSpace space;
  space.pair_order = PairOrder({"x", "y"});
  space.axes = {{1.0}, {1.0}};
  for (int u = 0; u < 4; ++u) {
    space.normalized.push_back({"u" + std::to_string(u), Source::algorithm, {1.0}});
    space.included.push_back(true);
    space.points.push_back({0.1 * u - 0.15, 0.05 * u});
  }
  const auto reg = ena::register_nodes(space);
  CHECK(reg.rank_deficient);
  CHECK(reg.nodes[0].x == doctest::Approx(reg.nodes[1].x)); // minimum norm splits evenly
  REQUIRE(reg.goodness.size() == 2);
  CHECK_FALSE(reg.goodness[0].has_value());
  CHECK_FALSE(reg.goodness[1].has_value());
}

TEST_CASE("networks") {
  const auto space = four_code_space(23, 8);
  const auto alg = ena::group_network(space, Source::algorithm);
  const auto hum = ena::group_network(space, Source::human);
  CHECK(alg.edges.size() == 6);
  for (const auto& e : alg.edges) {
    CHECK(e.weight >= 0.0);
    CHECK(e.weight <= 1.0);
  }
  const auto d1 = ena::difference_network(alg, hum);
  const auto d2 = ena::difference_network(hum, alg);
  CHECK(d1.kind == ena::NetworkKind::difference);
  CHECK(d1.label == "algorithm - human");
  for (std::size_t p = 0; p < 6; ++p) {
    CHECK(d1.edges[p].weight == -d2.edges[p].weight);
    CHECK(d1.edges[p].weight == alg.edges[p].weight - hum.edges[p].weight);
  }
  for (const auto& e : ena::difference_network(alg, alg).edges)
    CHECK(e.weight == 0.0);

  const auto rows = ena::strengths(alg, hum);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i - 1].primary >= rows[i].primary);

  const auto unit = ena::unit_network(space, 0);
  CHECK(unit.kind == ena::NetworkKind::unit);
  for (std::size_t p = 0; p < 6; ++p)
    CHECK(unit.edges[p].weight == space.normalized[0].weights[p]);
}

TEST_CASE("a group of one unit is that unit's network") {
  ena::EnaSpace space;
  space.pair_order = PairOrder(kCodes);
  space.normalized = {{"a", Source::algorithm, {0.6, 0.8, 0, 0, 0, 0}}, {"b", Source::human, {0, 0, 1, 0, 0, 0}},
                      {"c", Source::human, {0, 0, 0, 0, 0, 0}}};
  space.included = {true, true, false};
  space.registration.nodes.resize(4);
  const auto g = ena::group_network(space, Source::algorithm);
  CHECK(g.edges[0].weight == 0.6);
  CHECK(g.edges[1].weight == 0.8);
  const auto h = ena::group_network(space, Source::human); // excluded unit does not dilute
  CHECK(h.edges[2].weight == 1.0);
}

TEST_CASE("zero-vector units are excluded with a warning") {
  const PairOrder order(kCodes);
  std::vector<ena::AdjacencyVector> raw = {{"a1", Source::algorithm, {1, 1, 0, 0, 0, 0}},
                                           {"a2", Source::algorithm, {1, 0, 1, 0, 0, 1}},
                                           {"h1", Source::human, {0, 0, 0, 0, 1, 1}},
                                           {"h2", Source::human, {0, 1, 0, 1, 0, 0}},
                                           {"h3", Source::human, {0, 0, 0, 0, 0, 0}}};
  const auto space = ena::build_space(raw, order, Accumulation::binary);
  CHECK(space.included == std::vector<bool>{true, true, true, true, false});
  CHECK(space.points[4].empty());
  REQUIRE(space.warnings.size() >= 1);
  CHECK(space.warnings[0].find("h3") != std::string::npos);
  CHECK(space.axis_labels[0] == "MR1");
  CHECK(space.axis_labels[1] == "SVD2");

  const nlohmann::json j = space;
  for (const char* key : {"accumulation", "pair_order", "units", "mean_center", "axes", "node_positions",
                          "goodness", "rank_deficient", "warnings"})
    CHECK(j.contains(key));
  CHECK(j["units"][4]["point"].is_null());
}
