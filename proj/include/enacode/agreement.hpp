#pragma once

#include "enacode/corpus.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace enacode::agreement {

/// 2x2 tallies between rater 1 (rows) and rater 2 (columns).
struct ConfusionCounts {
  long a = 0; // both 1
  long b = 0; // rater 1 only
  long c = 0; // rater 2 only
  long d = 0; // both 0

  long n() const { return a + b + c + d; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Aligns two codings by entry id; both must cover the same ids.
ConfusionCounts confusion(const CodedTable& rater1, const CodedTable& rater2, const std::string& code);

/// Cohen's kappa. When expected agreement is 1 (a single category used by
/// both raters) the result is 1 for perfect observed agreement, else 0.
double kappa(const ConfusionCounts& counts);

enum class Band { none, minimal, weak, moderate, strong, almost_perfect };

std::string to_string(Band band);

/// Lower bounds of each band; kappa below `minimal` is `none`.
struct BandThresholds {
  double minimal = 0.20;
  double weak = 0.40;
  double moderate = 0.60;
  double strong = 0.80;
  double almost_perfect = 0.90;
};

Band band(double kappa, const BandThresholds& thresholds = {});

struct CodeAgreement {
  std::string code;
  ConfusionCounts counts;
  double kappa = 0.0;
  Band band = Band::none;
};

struct KappaReport {
  std::vector<CodeAgreement> per_code; // in rater 1's code order
};

KappaReport compare(const CodedTable& rater1, const CodedTable& rater2,
                    const BandThresholds& thresholds = {});

std::string to_csv(const KappaReport& report);
void to_json(nlohmann::json& j, const KappaReport& report);

} // namespace enacode::agreement
