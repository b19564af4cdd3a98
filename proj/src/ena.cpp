#include "enacode/ena.hpp"

#include "enacode/error.hpp"
#include "enacode/numfmt.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace enacode::ena {

std::string to_string(Accumulation a) { return a == Accumulation::binary ? "binary" : "count"; }

Accumulation parse_accumulation(const std::string& text) {
  if (text == "binary")
    return Accumulation::binary;
  if (text == "count")
    return Accumulation::count;
  throw ConfigError("accumulation must be 'binary' or 'count', got '" + text + "'");
}

PairOrder::PairOrder(std::vector<std::string> code_names) : codes(std::move(code_names)) {
  std::sort(codes.begin(), codes.end());
  for (int i = 0; i < static_cast<int>(codes.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(codes.size()); ++j)
      pairs.emplace_back(i, j);
}

std::string PairOrder::label(std::size_t p) const {
  return codes[pairs[p].first] + " and " + codes[pairs[p].second];
}

int PairOrder::code_index(const std::string& name) const {
  auto it = std::lower_bound(codes.begin(), codes.end(), name);
  return it != codes.end() && *it == name ? static_cast<int>(it - codes.begin()) : -1;
}

UnitResolver unit_resolver(UnitKey key, const Corpus* corpus) {
  if (key == UnitKey::user)
    return [](const CodedRow& r) { return r.user_id; };
  if (!corpus)
    throw ConfigError("user+semester units need the corpus for semester lookup");
  return [corpus](const CodedRow& r) {
    const Post* p = corpus->find(r.entry_id);
    if (!p)
      throw SchemaError("entry " + std::to_string(r.entry_id) + " is not in the corpus");
    return corpus->unit_of(*p);
  };
}

namespace {

struct UnitRows {
  std::string unit_id;
  Source source;
  std::vector<const CodedRow*> rows;
};

std::vector<UnitRows> group_rows(const CodedTable& table, const UnitResolver& unit_of) {
  std::map<std::pair<int, std::string>, UnitRows> groups;
  for (const auto& r : table.rows) {
    auto key = std::make_pair(static_cast<int>(r.source), unit_of(r));
    auto& g = groups[key];
    g.unit_id = key.second;
    g.source = r.source;
    g.rows.push_back(&r);
  }
  std::vector<UnitRows> out;
  out.reserve(groups.size());
  for (auto& [_, g] : groups) {
    std::stable_sort(g.rows.begin(), g.rows.end(),
                     [](const CodedRow* a, const CodedRow* b) { return a->entry_id < b->entry_id; });
    out.push_back(std::move(g));
  }
  return out;
}

// table code index for each sorted code
std::vector<std::size_t> code_columns(const CodedTable& table, const PairOrder& order) {
  if (order.codes.size() < 2)
    throw SchemaError("network accumulation needs at least two codes");
  std::vector<std::size_t> cols;
  for (const auto& c : order.codes)
    cols.push_back(table.code_index(c));
  return cols;
}

AdjacencyVector accumulate_unit(const UnitRows& unit, const PairOrder& order,
                                const std::vector<std::size_t>& cols, Accumulation mode) {
  AdjacencyVector v{unit.unit_id, unit.source, std::vector<double>(order.size(), 0.0)};
  std::vector<bool> seen(cols.size(), false);
  std::vector<bool> current(cols.size(), false);
  for (const CodedRow* row : unit.rows) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      current[c] = row->flags[cols[c]] != 0;
      seen[c] = seen[c] || current[c];
    }
    if (mode != Accumulation::count)
      continue;
    for (std::size_t p = 0; p < order.size(); ++p) {
      const auto [i, j] = order.pairs[p];
      if ((current[i] && seen[j]) || (current[j] && seen[i]))
        v.weights[p] += 1.0;
    }
  }
  if (mode == Accumulation::binary)
    for (std::size_t p = 0; p < order.size(); ++p)
      v.weights[p] = seen[order.pairs[p].first] && seen[order.pairs[p].second] ? 1.0 : 0.0;
  return v;
}

} // namespace

std::vector<AdjacencyVector> accumulate(const CodedTable& table, const PairOrder& order,
                                        const UnitResolver& unit_of, Accumulation mode) {
  const auto cols = code_columns(table, order);
  const auto units = group_rows(table, unit_of);
  std::vector<AdjacencyVector> out(units.size());
  const auto n = static_cast<std::ptrdiff_t>(units.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t u = 0; u < n; ++u)
    out[u] = accumulate_unit(units[u], order, cols, mode);
  return out;
}

namespace serial {

std::vector<AdjacencyVector> accumulate(const CodedTable& table, const PairOrder& order,
                                        const UnitResolver& unit_of, Accumulation mode) {
  const auto cols = code_columns(table, order);
  std::vector<AdjacencyVector> out;
  for (const auto& unit : group_rows(table, unit_of))
    out.push_back(accumulate_unit(unit, order, cols, mode));
  return out;
}

} // namespace serial

Normalized normalize_spherical(const std::vector<AdjacencyVector>& vectors) {
  Normalized out;
  out.vectors = vectors;
  out.zero.assign(vectors.size(), false);
  for (std::size_t u = 0; u < vectors.size(); ++u) {
    auto& w = out.vectors[u].weights;
    const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    if (norm == 0.0) {
      out.zero[u] = true;
      continue;
    }
    for (auto& x : w)
      x /= norm;
  }
  return out;
}

// ---------------------------------------------------------------------------
// projection

namespace {

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = n ? static_cast<Eigen::Index>(rows.front().size()) : 0;
  Eigen::MatrixXd m(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != p)
      throw SchemaError("adjacency vectors differ in length");
    for (Eigen::Index j = 0; j < p; ++j)
      m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// deterministic sign: the largest-magnitude component (first on ties) is positive
void orient(Eigen::VectorXd& axis) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < axis.size(); ++i)
    if (std::abs(axis(i)) > std::abs(axis(best)) + 1e-12)
      best = i;
  if (axis(best) < 0)
    axis = -axis;
}

} // namespace

Projection project_means_rotation(const std::vector<std::vector<double>>& vectors,
                                  const std::vector<bool>& in_group_a) {
  if (vectors.size() != in_group_a.size())
    throw SchemaError("group labels do not match the vectors");
  const auto na = std::count(in_group_a.begin(), in_group_a.end(), true);
  const auto nb = static_cast<std::ptrdiff_t>(in_group_a.size()) - na;
  if (na == 0 || nb == 0)
    throw DegenerateError("means rotation needs two non-empty groups");

  const Eigen::MatrixXd X = to_matrix(vectors);
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const Eigen::VectorXd center = X.colwise().mean().transpose();
  const Eigen::MatrixXd Xc = X.rowwise() - center.transpose();

  Eigen::VectorXd mean_a = Eigen::VectorXd::Zero(p), mean_b = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < n; ++i)
    (in_group_a[i] ? mean_a : mean_b) += Xc.row(i).transpose();
  mean_a /= static_cast<double>(na);
  mean_b /= static_cast<double>(nb);
  const Eigen::VectorXd diff = mean_a - mean_b;
  if (diff.norm() < 1e-12)
    throw DegenerateError("group means coincide, so the means rotation is undefined; use a plain "
                          "SVD projection instead");
  const Eigen::VectorXd mr1 = diff / diff.norm();

  const Eigen::MatrixXd residual = Xc - (Xc * mr1) * mr1.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol =
      std::max<double>(1e-10, static_cast<double>(std::max(n, p)) * 1e-15 * (sv.size() ? sv(0) : 0.0));

  Projection out;
  out.mean_center = to_std(center);
  out.axes.push_back(to_std(mr1));
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= tol)
      break;
    Eigen::VectorXd axis = svd.matrixV().col(k);
    // re-orthogonalize against MR1 to shed round-off
    axis -= axis.dot(mr1) * mr1;
    axis.normalize();
    orient(axis);
    out.axes.push_back(to_std(axis));
  }

  Eigen::MatrixXd A(p, static_cast<Eigen::Index>(out.axes.size()));
  for (std::size_t k = 0; k < out.axes.size(); ++k)
    for (Eigen::Index j = 0; j < p; ++j)
      A(j, static_cast<Eigen::Index>(k)) = out.axes[k][j];
  const Eigen::MatrixXd P = Xc * A;
  const double total = Xc.squaredNorm();
  for (Eigen::Index k = 0; k < P.cols(); ++k)
    out.variance_explained.push_back(total > 0 ? P.col(k).squaredNorm() / total : 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    out.points.push_back(to_std(P.row(i).transpose()));
  return out;
}

Registration register_nodes(const EnaSpace& space) {
  const auto& order = space.pair_order;
  const auto C = static_cast<Eigen::Index>(order.codes.size());
  std::vector<std::size_t> units;
  for (std::size_t u = 0; u < space.normalized.size(); ++u)
    if (space.included[u])
      units.push_back(u);

  Registration reg;
  for (const auto& c : order.codes)
    reg.nodes.push_back(NodePosition{c, 0.0, 0.0});
  if (units.empty())
    return reg;

  // row u: centroid_u = sum_c A(u, c) * pos_c
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(units.size()), C);
  for (std::size_t r = 0; r < units.size(); ++r) {
    const auto& w = space.normalized[units[r]].weights;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (std::size_t p = 0; p < w.size(); ++p) {
      const double share = w[p] / total / 2.0;
      A(static_cast<Eigen::Index>(r), order.pairs[p].first) += share;
      A(static_cast<Eigen::Index>(r), order.pairs[p].second) += share;
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  cod.setThreshold(1e-12);
  reg.rank_deficient = cod.rank() < C;

  for (std::size_t axis = 0; axis < space.plotted_axes(); ++axis) {
    Eigen::VectorXd b(static_cast<Eigen::Index>(units.size()));
    for (std::size_t r = 0; r < units.size(); ++r)
      b(static_cast<Eigen::Index>(r)) = space.points[units[r]][axis];
    const Eigen::VectorXd x = cod.solve(b);
    const Eigen::VectorXd centroid = A * x;
    reg.residual.push_back((centroid - b).squaredNorm());
    for (Eigen::Index c = 0; c < C; ++c)
      (axis == 0 ? reg.nodes[c].x : reg.nodes[c].y) = x(c);

    const Eigen::VectorXd pc = b.array() - b.mean();
    const Eigen::VectorXd cc = centroid.array() - centroid.mean();
    const double denom = pc.norm() * cc.norm();
    if (denom < 1e-12)
      reg.goodness.emplace_back(std::nullopt);
    else
      reg.goodness.emplace_back(std::clamp(pc.dot(cc) / denom, -1.0, 1.0));
  }
  return reg;
}

EnaSpace build_space(const std::vector<AdjacencyVector>& raw, const PairOrder& order,
                     Accumulation mode) {
  EnaSpace space;
  space.pair_order = order;
  space.accumulation = mode;
  space.raw = raw;
  auto norm = normalize_spherical(raw);
  space.normalized = std::move(norm.vectors);
  space.included.resize(raw.size());
  std::vector<std::vector<double>> rows;
  std::vector<bool> in_a;
  for (std::size_t u = 0; u < raw.size(); ++u) {
    space.included[u] = !norm.zero[u];
    if (norm.zero[u]) {
      space.warnings.push_back(fmt::format("unit {} ({}) has no connections; excluded from the "
                                           "projection",
                                           raw[u].unit_id, enacode::to_string(raw[u].source)));
      continue;
    }
    rows.push_back(space.normalized[u].weights);
    in_a.push_back(raw[u].source == Source::algorithm);
  }
  auto proj = project_means_rotation(rows, in_a);
  space.mean_center = std::move(proj.mean_center);
  space.axes = std::move(proj.axes);
  space.variance_explained = std::move(proj.variance_explained);
  for (std::size_t k = 0; k < space.axes.size(); ++k)
    space.axis_labels.push_back(k == 0 ? "MR1" : "SVD" + std::to_string(k + 1));
  space.points.resize(raw.size());
  for (std::size_t u = 0, r = 0; u < raw.size(); ++u)
    if (space.included[u])
      space.points[u] = std::move(proj.points[r++]);
  space.registration = register_nodes(space);
  if (space.registration.rank_deficient)
    space.warnings.emplace_back("node registration is rank deficient; minimum-norm positions used");
  return space;
}

// ---------------------------------------------------------------------------
// networks

std::string to_string(NetworkKind kind) {
  switch (kind) {
  case NetworkKind::unit:
    return "unit";
  case NetworkKind::group_mean:
    return "group_mean";
  case NetworkKind::difference:
    break;
  }
  return "difference";
}

namespace {

NetworkGraph skeleton(const EnaSpace& space, NetworkKind kind, std::string label) {
  NetworkGraph g;
  g.kind = kind;
  g.label = std::move(label);
  g.codes = space.pair_order.codes;
  g.nodes = space.registration.nodes;
  for (const auto& [i, j] : space.pair_order.pairs)
    g.edges.push_back(Edge{i, j, 0.0});
  return g;
}

} // namespace

NetworkGraph group_network(const EnaSpace& space, Source group) {
  auto g = skeleton(space, NetworkKind::group_mean, enacode::to_string(group));
  std::size_t members = 0;
  for (std::size_t u = 0; u < space.normalized.size(); ++u) {
    if (!space.included[u] || space.normalized[u].source != group)
      continue;
    ++members;
    for (std::size_t p = 0; p < g.edges.size(); ++p)
      g.edges[p].weight += space.normalized[u].weights[p];
  }
  if (members == 0)
    throw DegenerateError("group " + enacode::to_string(group) + " has no units with connections");
  for (auto& e : g.edges)
    e.weight /= static_cast<double>(members);
  return g;
}

NetworkGraph unit_network(const EnaSpace& space, std::size_t unit) {
  const auto& v = space.normalized.at(unit);
  auto g = skeleton(space, NetworkKind::unit, v.unit_id + " (" + enacode::to_string(v.source) + ")");
  for (std::size_t p = 0; p < g.edges.size(); ++p)
    g.edges[p].weight = v.weights[p];
  return g;
}

NetworkGraph difference_network(const NetworkGraph& a, const NetworkGraph& b) {
  if (a.codes != b.codes || a.edges.size() != b.edges.size())
    throw SchemaError("networks are over different codes");
  NetworkGraph g = a;
  g.kind = NetworkKind::difference;
  g.label = a.label + " - " + b.label;
  for (std::size_t p = 0; p < g.edges.size(); ++p)
    g.edges[p].weight = a.edges[p].weight - b.edges[p].weight;
  return g;
}

std::vector<StrengthRow> strengths(const NetworkGraph& primary, const NetworkGraph& secondary) {
  if (primary.codes != secondary.codes)
    throw SchemaError("networks are over different codes");
  std::vector<StrengthRow> rows;
  for (std::size_t p = 0; p < primary.edges.size(); ++p) {
    const auto& e = primary.edges[p];
    rows.push_back(StrengthRow{primary.codes[e.a] + " and " + primary.codes[e.b], e.weight,
                               secondary.edges[p].weight});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const StrengthRow& x, const StrengthRow& y) {
    return x.primary != y.primary ? x.primary > y.primary : x.secondary > y.secondary;
  });
  return rows;
}

void to_json(nlohmann::json& j, const EnaSpace& s) {
  auto pairs = nlohmann::json::array();
  for (const auto& [a, b] : s.pair_order.pairs)
    pairs.push_back({s.pair_order.codes[a], s.pair_order.codes[b]});
  auto units = nlohmann::json::array();
  for (std::size_t u = 0; u < s.raw.size(); ++u) {
    nlohmann::json unit{{"id", s.raw[u].unit_id},
                        {"source", enacode::to_string(s.raw[u].source)},
                        {"included", static_cast<bool>(s.included[u])},
                        {"raw", tidy(s.raw[u].weights)},
                        {"normalized", tidy(s.normalized[u].weights)}};
    unit["point"] = s.included[u] ? nlohmann::json(tidy(s.points[u])) : nlohmann::json(nullptr);
    units.push_back(std::move(unit));
  }
  auto axes = nlohmann::json::array();
  for (std::size_t k = 0; k < s.axes.size(); ++k)
    axes.push_back({{"label", s.axis_labels[k]},
                    {"vector", tidy(s.axes[k])},
                    {"variance", tidy(s.variance_explained[k])}});
  auto nodes = nlohmann::json::object();
  for (const auto& n : s.registration.nodes)
    nodes[n.code] = {tidy(n.x), tidy(n.y)};
  auto goodness = nlohmann::json::object();
  for (std::size_t k = 0; k < s.registration.goodness.size(); ++k)
    goodness[s.axis_labels[k]] = s.registration.goodness[k]
                                     ? nlohmann::json(tidy(*s.registration.goodness[k]))
                                     : nlohmann::json(nullptr);
  j = nlohmann::json{{"accumulation", to_string(s.accumulation)},
                     {"pair_order", pairs},
                     {"groups", {"algorithm", "human"}},
                     {"units", units},
                     {"mean_center", tidy(s.mean_center)},
                     {"axes", axes},
                     {"node_positions", nodes},
                     {"goodness", goodness},
                     {"rank_deficient", s.registration.rank_deficient},
                     {"warnings", s.warnings}};
}

void to_json(nlohmann::json& j, const NetworkGraph& g) {
  auto nodes = nlohmann::json::array();
  for (const auto& n : g.nodes)
    nodes.push_back({{"code", n.code}, {"x", tidy(n.x)}, {"y", tidy(n.y)}});
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"a", g.codes[e.a]}, {"b", g.codes[e.b]}, {"weight", tidy(e.weight)}});
  j = nlohmann::json{{"kind", to_string(g.kind)}, {"label", g.label}, {"nodes", nodes}, {"edges", edges}};
}

} // namespace enacode::ena
