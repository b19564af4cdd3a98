#pragma once

#include "enacode/corpus.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace enacode::ena {

/// binary: a pair is connected when both codes occur anywhere in the unit's
/// rows (infinite stanza). count: every row adds one per pair it connects to
/// the codes seen so far in the unit, itself included.
enum class Accumulation { binary, count };

std::string to_string(Accumulation a);
Accumulation parse_accumulation(const std::string& text);

/// Unordered code pairs in lexicographic order of (first, second) over the
/// sorted code names.
struct PairOrder {
  std::vector<std::string> codes; // sorted
  std::vector<std::pair<int, int>> pairs;

  explicit PairOrder(std::vector<std::string> code_names = {});
  std::size_t size() const { return pairs.size(); }
  std::string label(std::size_t p) const;
  int code_index(const std::string& name) const; // -1 when absent
};

struct AdjacencyVector {
  std::string unit_id;
  Source source = Source::algorithm;
  std::vector<double> weights; // aligned with PairOrder::pairs
};

using UnitResolver = std::function<std::string(const CodedRow&)>;

/// Unit by user id, or user+semester looked up in `corpus`.
UnitResolver unit_resolver(UnitKey key, const Corpus* corpus = nullptr);

/// One vector per (source, unit), ordered by source then unit id. Rows are
/// taken in entry id order within a unit.
std::vector<AdjacencyVector> accumulate(const CodedTable& table, const PairOrder& order,
                                        const UnitResolver& unit_of,
                                        Accumulation mode = Accumulation::binary);

namespace serial {
std::vector<AdjacencyVector> accumulate(const CodedTable& table, const PairOrder& order,
                                        const UnitResolver& unit_of,
                                        Accumulation mode = Accumulation::binary);
}

struct Normalized {
  std::vector<AdjacencyVector> vectors;
  std::vector<bool> zero; // true where the input had no connections
};

/// Scales each nonzero vector to unit Euclidean length; zero vectors stay zero.
Normalized normalize_spherical(const std::vector<AdjacencyVector>& vectors);

struct NodePosition {
  std::string code;
  double x = 0.0;
  double y = 0.0;
};

struct Registration {
  std::vector<NodePosition> nodes;          // PairOrder::codes order
  std::vector<std::optional<double>> goodness; // Pearson r per plotted axis; empty when undefined
  std::vector<double> residual;             // sum of squares per plotted axis
  bool rank_deficient = false;
};

struct EnaSpace {
  PairOrder pair_order;
  Accumulation accumulation = Accumulation::binary;
  std::vector<AdjacencyVector> raw;
  std::vector<AdjacencyVector> normalized;
  std::vector<bool> included; // false for zero-vector units
  std::vector<double> mean_center;
  std::vector<std::vector<double>> axes; // MR1 then SVD2, SVD3, ...
  std::vector<std::string> axis_labels;
  std::vector<double> variance_explained;
  std::vector<std::vector<double>> points; // per unit; empty when excluded
  Registration registration;
  std::vector<std::string> warnings;

  std::size_t plotted_axes() const { return std::min<std::size_t>(2, axes.size()); }
};

/// Centered means rotation. Group A is Source::algorithm, group B
/// Source::human; MR1 points from B's mean towards A's.
struct Projection {
  std::vector<double> mean_center;
  std::vector<std::vector<double>> axes;
  std::vector<double> variance_explained;
  std::vector<std::vector<double>> points;
};

/// `in_group_a[i]` selects the group of row i. Throws DegenerateError when a
/// group is empty or both group means coincide.
Projection project_means_rotation(const std::vector<std::vector<double>>& vectors,
                                  const std::vector<bool>& in_group_a);

/// Least-squares node placement: for each plotted axis minimizes the squared
/// distance between unit points and their weighted pair-midpoint centroids.
/// Minimum-norm solution when the system is rank deficient.
Registration register_nodes(const EnaSpace& space);

/// accumulate -> normalize -> means rotation -> registration.
EnaSpace build_space(const std::vector<AdjacencyVector>& raw, const PairOrder& order,
                     Accumulation mode);

struct Edge {
  int a = 0;
  int b = 0;
  double weight = 0.0;
};

enum class NetworkKind { unit, group_mean, difference };

struct NetworkGraph {
  NetworkKind kind = NetworkKind::group_mean;
  std::string label;
  std::vector<NodePosition> nodes;
  std::vector<std::string> codes;
  std::vector<Edge> edges; // PairOrder order
};

std::string to_string(NetworkKind kind);

/// Mean of normalized weights over the group's included units.
NetworkGraph group_network(const EnaSpace& space, Source group);
NetworkGraph unit_network(const EnaSpace& space, std::size_t unit);
/// a - b elementwise.
NetworkGraph difference_network(const NetworkGraph& a, const NetworkGraph& b);

void to_json(nlohmann::json& j, const EnaSpace& space);
void to_json(nlohmann::json& j, const NetworkGraph& g);

/// Rows of the strengths table, strongest first by `primary` weight.
struct StrengthRow {
  std::string connection;
  double primary = 0.0;
  double secondary = 0.0;
};
std::vector<StrengthRow> strengths(const NetworkGraph& primary, const NetworkGraph& secondary);

} // namespace enacode::ena
