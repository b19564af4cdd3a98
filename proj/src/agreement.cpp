#include "enacode/agreement.hpp"

#include "enacode/csv.hpp"
#include "enacode/error.hpp"
#include "enacode/numfmt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace enacode::agreement {

namespace {

std::map<EntryId, const CodedRow*> index_rows(const CodedTable& t) {
  std::map<EntryId, const CodedRow*> out;
  for (const auto& r : t.rows)
    out[r.entry_id] = &r;
  return out;
}

void require_same_ids(const std::map<EntryId, const CodedRow*>& x,
                      const std::map<EntryId, const CodedRow*>& y) {
  std::vector<EntryId> only_x, only_y;
  for (const auto& [id, _] : x)
    if (!y.count(id))
      only_x.push_back(id);
  for (const auto& [id, _] : y)
    if (!x.count(id))
      only_y.push_back(id);
  if (only_x.empty() && only_y.empty())
    return;
  auto list = [](const std::vector<EntryId>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i)
      s += (i ? "," : "") + std::to_string(ids[i]);
    return "{" + s + "}";
  };
  throw MergeError("codings cover different entries: only in rater 1 " + list(only_x) +
                   ", only in rater 2 " + list(only_y));
}

} // namespace

ConfusionCounts confusion(const CodedTable& rater1, const CodedTable& rater2, const std::string& code) {
  const auto i1 = rater1.code_index(code);
  const auto i2 = rater2.code_index(code);
  const auto rows1 = index_rows(rater1);
  const auto rows2 = index_rows(rater2);
  if (rows1.size() != rater1.rows.size() || rows2.size() != rater2.rows.size())
    throw SchemaError("duplicate entry ids in a coding");
  require_same_ids(rows1, rows2);
  ConfusionCounts cc;
  for (const auto& [id, r1] : rows1) {
    const bool x = r1->flags[i1] != 0;
    const bool y = rows2.at(id)->flags[i2] != 0;
    if (x && y)
      ++cc.a;
    else if (x)
      ++cc.b;
    else if (y)
      ++cc.c;
    else
      ++cc.d;
  }
  return cc;
}

double kappa(const ConfusionCounts& k) {
  const double n = static_cast<double>(k.n());
  if (n < 1)
    throw Error("kappa needs at least one rated item");
  const double po = (k.a + k.d) / n;
  const double pe =
      (static_cast<double>(k.a + k.b) * (k.a + k.c) + static_cast<double>(k.c + k.d) * (k.b + k.d)) /
      (n * n);
  if (pe == 1.0)
    return po == 1.0 ? 1.0 : 0.0;
  return (po - pe) / (1.0 - pe);
}

std::string to_string(Band band) {
  switch (band) {
  case Band::none:
    return "none";
  case Band::minimal:
    return "minimal";
  case Band::weak:
    return "weak";
  case Band::moderate:
    return "moderate";
  case Band::strong:
    return "strong";
  case Band::almost_perfect:
    return "almost-perfect";
  }
  return "none";
}

Band band(double kappa, const BandThresholds& t) {
  if (kappa >= t.almost_perfect)
    return Band::almost_perfect;
  if (kappa >= t.strong)
    return Band::strong;
  if (kappa >= t.moderate)
    return Band::moderate;
  if (kappa >= t.weak)
    return Band::weak;
  if (kappa >= t.minimal)
    return Band::minimal;
  return Band::none;
}

KappaReport compare(const CodedTable& rater1, const CodedTable& rater2,
                    const BandThresholds& thresholds) {
  const std::set<std::string> c1(rater1.codes.begin(), rater1.codes.end());
  const std::set<std::string> c2(rater2.codes.begin(), rater2.codes.end());
  if (c1 != c2)
    throw SchemaError("codings use different code names");
  KappaReport report;
  for (const auto& code : rater1.codes) {
    CodeAgreement ca;
    ca.code = code;
    ca.counts = confusion(rater1, rater2, code);
    ca.kappa = kappa(ca.counts);
    ca.band = band(ca.kappa, thresholds);
    report.per_code.push_back(ca);
  }
  return report;
}

std::string to_csv(const KappaReport& report) {
  std::ostringstream out;
  csv::write_row(out, {"code", "a", "b", "c", "d", "kappa", "band"});
  for (const auto& r : report.per_code)
    csv::write_row(out, {r.code, std::to_string(r.counts.a), std::to_string(r.counts.b),
                         std::to_string(r.counts.c), std::to_string(r.counts.d),
                         fixed(r.kappa, 4), to_string(r.band)});
  return out.str();
}

void to_json(nlohmann::json& j, const KappaReport& report) {
  j = nlohmann::json::array();
  for (const auto& r : report.per_code)
    j.push_back({{"code", r.code},
                 {"a", r.counts.a},
                 {"b", r.counts.b},
                 {"c", r.counts.c},
                 {"d", r.counts.d},
                 {"kappa", tidy(r.kappa)},
                 {"band", to_string(r.band)}});
}

} // namespace enacode::agreement
