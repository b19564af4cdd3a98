#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace enacode::stats {

enum class Method { exact, normal_approx };
/// greater: group A tends to larger values (large U_A).
enum class Alternative { two_sided, greater, less };

std::string to_string(Method m);
std::string to_string(Alternative a);
Alternative parse_alternative(const std::string& text);

struct MannWhitneyResult {
  std::string axis;
  std::string label_a = "A";
  std::string label_b = "B";
  double median_a = 0.0;
  double median_b = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  double U = 0.0; // for group A
  double p = 1.0;
  double r = 0.0; // 1 - 2U / (n_a n_b)
  Method method = Method::exact;
  Alternative alternative = Alternative::two_sided;
  bool degenerate = false; // every value identical
};

double median(std::vector<double> values);

/// Midranks (1-based) of the pooled sample, in input order.
std::vector<double> midranks(const std::vector<double>& pooled);

/// Number of rank assignments giving each U in 0..n_a*n_b (no ties).
std::vector<double> u_distribution(std::size_t n_a, std::size_t n_b);

/// Exact when n_a + n_b <= 20 and there are no ties, otherwise the normal
/// approximation with tie and continuity corrections. Throws Error when a
/// group is empty.
MannWhitneyResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b,
                               Alternative alternative = Alternative::two_sided);

/// Normal approximation regardless of sample size.
MannWhitneyResult mann_whitney_normal(const std::vector<double>& a, const std::vector<double>& b,
                                      Alternative alternative = Alternative::two_sided);

/// "MR1: human (Mdn=-0.13, N=25) vs algorithm (Mdn=0.13, N=25, U=206.00, p=0.04, r=0.34)"
std::string format_line(const MannWhitneyResult& r);

void to_json(nlohmann::json& j, const MannWhitneyResult& r);
std::string to_csv(const std::vector<MannWhitneyResult>& results);

} // namespace enacode::stats
