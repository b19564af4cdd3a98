#include "enacode/stats.hpp"

#include "enacode/csv.hpp"
#include "enacode/error.hpp"
#include "enacode/numfmt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <sstream>

namespace enacode::stats {

std::string to_string(Method m) { return m == Method::exact ? "exact" : "normal_approx"; }

std::string to_string(Alternative a) {
  switch (a) {
  case Alternative::greater:
    return "greater";
  case Alternative::less:
    return "less";
  case Alternative::two_sided:
    break;
  }
  return "two_sided";
}

Alternative parse_alternative(const std::string& text) {
  if (text == "two_sided" || text == "two-sided")
    return Alternative::two_sided;
  if (text == "greater")
    return Alternative::greater;
  if (text == "less")
    return Alternative::less;
  throw ConfigError("alternative must be two_sided, greater or less, got '" + text + "'");
}

double median(std::vector<double> v) {
  if (v.empty())
    throw Error("median of an empty sample");
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::vector<double> midranks(const std::vector<double>& pooled) {
  std::vector<std::size_t> idx(pooled.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return pooled[x] < pooled[y]; });
  std::vector<double> ranks(pooled.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && pooled[idx[j + 1]] == pooled[idx[i]])
      ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k)
      ranks[idx[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::vector<double> u_distribution(std::size_t n_a, std::size_t n_b) {
  // f[i][j][u]: arrangements of i A's and j B's with u (A,B) pairs where A is
  // larger; the largest element is either an A (adds j) or a B.
  const std::size_t max_u = n_a * n_b;
  std::vector<std::vector<std::vector<double>>> f(
      n_a + 1, std::vector<std::vector<double>>(n_b + 1, std::vector<double>(max_u + 1, 0.0)));
  for (std::size_t i = 0; i <= n_a; ++i)
    for (std::size_t j = 0; j <= n_b; ++j) {
      if (i == 0 || j == 0) {
        f[i][j][0] = 1.0;
        continue;
      }
      for (std::size_t u = 0; u <= i * j; ++u) {
        double c = f[i][j - 1][u];
        if (u >= j)
          c += f[i - 1][j][u - j];
        f[i][j][u] = c;
      }
    }
  return f[n_a][n_b];
}

namespace {

MannWhitneyResult prepare(const std::vector<double>& a, const std::vector<double>& b,
                          Alternative alternative, std::vector<double>& ranks) {
  if (a.empty() || b.empty())
    throw Error("Mann-Whitney needs two non-empty groups");
  MannWhitneyResult r;
  r.alternative = alternative;
  r.n_a = a.size();
  r.n_b = b.size();
  r.median_a = median(a);
  r.median_b = median(b);
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  ranks = midranks(pooled);
  const double rank_sum = std::accumulate(ranks.begin(), ranks.begin() + a.size(), 0.0);
  const double na = static_cast<double>(r.n_a);
  r.U = rank_sum - na * (na + 1.0) / 2.0;
  r.r = 1.0 - 2.0 * r.U / (na * static_cast<double>(r.n_b));
  r.degenerate = std::all_of(pooled.begin(), pooled.end(), [&](double x) { return x == pooled[0]; });
  if (r.degenerate) {
    r.p = 1.0;
    r.r = 0.0;
    r.method = Method::normal_approx;
  }
  return r;
}

double clamp_p(double p) { return std::clamp(p, DBL_MIN, 1.0); }

void normal_p(MannWhitneyResult& r, const std::vector<double>& ranks) {
  const double na = static_cast<double>(r.n_a), nb = static_cast<double>(r.n_b);
  const double n = na + nb;
  std::vector<double> sorted(ranks);
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i])
      ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mu = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  r.method = Method::normal_approx;
  if (var <= 0.0) {
    r.p = 1.0;
    return;
  }
  const double sd = std::sqrt(var);
  double p = 1.0;
  switch (r.alternative) {
  case Alternative::two_sided: {
    const double z = std::max(0.0, std::abs(r.U - mu) - 0.5) / sd;
    p = std::erfc(z / std::sqrt(2.0));
    break;
  }
  case Alternative::greater: {
    const double z = (r.U - mu - 0.5) / sd;
    p = 0.5 * std::erfc(z / std::sqrt(2.0));
    break;
  }
  case Alternative::less: {
    const double z = (r.U - mu + 0.5) / sd;
    p = 0.5 * std::erfc(-z / std::sqrt(2.0));
    break;
  }
  }
  r.p = clamp_p(p);
}

void exact_p(MannWhitneyResult& r) {
  const auto dist = u_distribution(r.n_a, r.n_b);
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  const auto u = static_cast<std::size_t>(std::llround(r.U));
  const double le = std::accumulate(dist.begin(), dist.begin() + u + 1, 0.0) / total;
  const double ge = std::accumulate(dist.begin() + u, dist.end(), 0.0) / total;
  double p = 1.0;
  switch (r.alternative) {
  case Alternative::two_sided:
    p = 2.0 * std::min(le, ge);
    break;
  case Alternative::greater:
    p = ge;
    break;
  case Alternative::less:
    p = le;
    break;
  }
  r.method = Method::exact;
  r.p = clamp_p(p);
}

} // namespace

MannWhitneyResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b,
                               Alternative alternative) {
  std::vector<double> ranks;
  auto r = prepare(a, b, alternative, ranks);
  if (r.degenerate)
    return r;
  std::vector<double> sorted(ranks);
  std::sort(sorted.begin(), sorted.end());
  const bool ties = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
  if (r.n_a + r.n_b <= 20 && !ties)
    exact_p(r);
  else
    normal_p(r, ranks);
  return r;
}

MannWhitneyResult mann_whitney_normal(const std::vector<double>& a, const std::vector<double>& b,
                                      Alternative alternative) {
  std::vector<double> ranks;
  auto r = prepare(a, b, alternative, ranks);
  if (!r.degenerate)
    normal_p(r, ranks);
  return r;
}

std::string format_line(const MannWhitneyResult& r) {
  return fmt::format("{}: {} (Mdn={}, N={}) vs {} (Mdn={}, N={}, U={}, p={}, r={})", r.axis,
                     r.label_a, fixed2(r.median_a), r.n_a, r.label_b, fixed2(r.median_b), r.n_b,
                     fixed2(r.U), fixed2(r.p), fixed2(r.r));
}

void to_json(nlohmann::json& j, const MannWhitneyResult& r) {
  j = nlohmann::json{{"axis", r.axis},
                     {"group_a", r.label_a},
                     {"group_b", r.label_b},
                     {"median_a", tidy(r.median_a)},
                     {"median_b", tidy(r.median_b)},
                     {"n_a", r.n_a},
                     {"n_b", r.n_b},
                     {"U", tidy(r.U)},
                     {"p", round12(r.p)},
                     {"r", tidy(r.r)},
                     {"method", to_string(r.method)},
                     {"alternative", to_string(r.alternative)},
                     {"degenerate", r.degenerate},
                     {"line", format_line(r)}};
}

std::string to_csv(const std::vector<MannWhitneyResult>& results) {
  std::ostringstream out;
  csv::write_row(out, {"axis", "group_a", "group_b", "median_a", "median_b", "n_a", "n_b", "U", "p",
                       "r", "method", "alternative", "degenerate"});
  for (const auto& r : results)
    csv::write_row(out, {r.axis, r.label_a, r.label_b, fixed(r.median_a, 6),
                         fixed(r.median_b, 6), std::to_string(r.n_a),
                         std::to_string(r.n_b), fixed(r.U, 2),
                         fixed(r.p, 6), fixed(r.r, 6),
                         to_string(r.method), to_string(r.alternative),
                         r.degenerate ? "1" : "0"});
  return out.str();
}

} // namespace enacode::stats
