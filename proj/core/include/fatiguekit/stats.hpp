#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fatiguekit/errors.hpp"

namespace fatiguekit {

/// Sample summary. SD uses the n-1 denominator; with a single value it is
/// reported as 0 and n carries the flag.
struct Summary {
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

Summary summarize(std::span<const double> values);

/// Cohort analysis table: one row per subject, named numeric columns.
/// Missing values are stored as NaN and excluded pairwise.
class CohortTable {
 public:
  void set_ids(std::vector<std::string> ids);
  void add_column(const std::string& name, std::vector<double> values);

  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::string>& column_names() const { return names_; }
  const std::vector<double>& column(const std::string& name) const;
  bool has_column(const std::string& name) const;
  std::size_t n_rows() const { return ids_.size(); }

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

/// One cell of the correlation matrix. `defined` is false when a column pair
/// had fewer than three complete cases or no variance.
struct CorrelationCell {
  double r = 0.0;
  double p = 1.0;
  std::size_t n = 0;
  bool defined = false;
};

class CorrelationMatrix {
 public:
  CorrelationMatrix(std::vector<std::string> columns)
      : columns_(std::move(columns)),
        cells_(columns_.size() * columns_.size()) {}

  const std::vector<std::string>& columns() const { return columns_; }
  CorrelationCell& cell(std::size_t i, std::size_t j) {
    return cells_[i * columns_.size() + j];
  }
  const CorrelationCell& cell(std::size_t i, std::size_t j) const {
    return cells_[i * columns_.size() + j];
  }

 private:
  std::vector<std::string> columns_;
  std::vector<CorrelationCell> cells_;
};

/// Pairwise Pearson correlations with two-sided p-values from the
/// t-distribution transform of r. Diagonal entries are exactly 1.
CorrelationMatrix correlation_matrix(const CohortTable& table,
                                     std::span<const std::string> columns);

struct StrengthSplit {
  std::vector<std::string> high_group;  // the `group_size` highest strengths
  std::vector<std::string> low_group;   // the `group_size` lowest strengths
  bool boundary_tie = false;  // a strength value sits in both groups
};

/// Splits subjects by a strength column into the highest and lowest
/// `group_size`. Ties are broken by subject id (ascending), so the split is
/// deterministic.
StrengthSplit split_by_strength(const CohortTable& table,
                                std::size_t group_size,
                                const std::string& strength_column =
                                    "joint_moment_strength");

enum class TTestVariant { welch, pooled };

constexpr const char* to_string(TTestVariant v) {
  return v == TTestVariant::welch ? "welch" : "pooled";
}

struct GroupComparison {
  Summary group_a;
  Summary group_b;
  double t_statistic = 0.0;
  double p_value = 1.0;
  double df = 0.0;
  TTestVariant variant = TTestVariant::welch;
  bool degenerate = false;  // both groups had zero variance
};

/// Two-sample t-test, Welch (unequal variances, Welch-Satterthwaite df) by
/// default; two-sided p. Identical groups give t = 0, p = 1; zero variance
/// with unequal means gives an infinite t, flagged degenerate.
GroupComparison t_test(std::span<const double> a, std::span<const double> b,
                       TTestVariant variant = TTestVariant::welch);

/// The same test from (mean, sd, n) summaries; `t_test` delegates here, so
/// raw-data and summary-form results agree identically.
GroupComparison t_test_from_summary(const Summary& a, const Summary& b,
                                    TTestVariant variant = TTestVariant::welch);

}  // namespace fatiguekit
