#include "fatiguekit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fatiguekit/distributions.hpp"

namespace fatiguekit {

Summary summarize(std::span<const double> values) {
  if (values.empty()) throw ValidationError("summarize needs at least one value");

  Summary s;
  s.n = values.size();
  s.min = values.front();
  s.max = values.front();
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("summarize requires finite values");
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(s.n);

  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

void CohortTable::set_ids(std::vector<std::string> ids) {
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (std::size_t j = i + 1; j < ids.size(); ++j)
      if (ids[i] == ids[j])
        throw ValidationError("duplicate subject id '" + ids[i] + "' in cohort table");
  ids_ = std::move(ids);
}

void CohortTable::add_column(const std::string& name, std::vector<double> values) {
  if (values.size() != ids_.size())
    throw ValidationError("column '" + name + "' size does not match row count");
  if (has_column(name))
    throw ValidationError("column '" + name + "' already present");
  names_.push_back(name);
  columns_.push_back(std::move(values));
}

const std::vector<double>& CohortTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return columns_[i];
  throw ValidationError("no column named '" + name + "'");
}

bool CohortTable::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

namespace {

CorrelationCell pearson(const std::vector<double>& x, const std::vector<double>& y) {
  CorrelationCell cell;
  double sx = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;  // pairwise deletion
    sx += x[i];
    sy += y[i];
    ++n;
  }
  cell.n = n;
  if (n < 3) return cell;

  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return cell;  // constant column: r undefined

  cell.r = sxy / std::sqrt(sxx * syy);
  cell.r = std::clamp(cell.r, -1.0, 1.0);
  cell.defined = true;

  const double df = static_cast<double>(n - 2);
  if (std::abs(cell.r) >= 1.0) {
    cell.p = 0.0;
  } else {
    const double t = cell.r * std::sqrt(df / (1.0 - cell.r * cell.r));
    cell.p = student_t_two_sided_p(t, df);
  }
  return cell;
}

}  // namespace

CorrelationMatrix correlation_matrix(const CohortTable& table,
                                     std::span<const std::string> columns) {
  CorrelationMatrix matrix(
      std::vector<std::string>(columns.begin(), columns.end()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const auto& x = table.column(columns[i]);
    std::size_t n_present = 0;
    for (double v : x)
      if (!std::isnan(v)) ++n_present;
    matrix.cell(i, i) = {1.0, 0.0, n_present, true};
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      const auto cell = pearson(x, table.column(columns[j]));
      matrix.cell(i, j) = cell;
      matrix.cell(j, i) = cell;
    }
  }
  return matrix;
}

StrengthSplit split_by_strength(const CohortTable& table,
                                std::size_t group_size,
                                const std::string& strength_column) {
  if (group_size == 0) throw ValidationError("group size must be positive");
  if (table.n_rows() < 2 * group_size)
    throw ValidationError("cohort has " + std::to_string(table.n_rows()) +
                          " rows; need at least " + std::to_string(2 * group_size) +
                          " for a split of " + std::to_string(group_size));

  const auto& strength = table.column(strength_column);
  for (double v : strength)
    if (std::isnan(v))
      throw ValidationError("strength column has missing values; cannot split");

  std::vector<std::size_t> order(table.n_rows());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (strength[a] != strength[b]) return strength[a] > strength[b];
    return table.ids()[a] < table.ids()[b];
  });

  StrengthSplit split;
  for (std::size_t i = 0; i < group_size; ++i)
    split.high_group.push_back(table.ids()[order[i]]);
  for (std::size_t i = table.n_rows() - group_size; i < table.n_rows(); ++i)
    split.low_group.push_back(table.ids()[order[i]]);
  split.boundary_tie =
      strength[order[group_size - 1]] == strength[order[table.n_rows() - group_size]];
  return split;
}

GroupComparison t_test(std::span<const double> a, std::span<const double> b,
                       TTestVariant variant) {
  if (a.size() < 2 || b.size() < 2)
    throw ValidationError("t-test needs at least two values per group");
  return t_test_from_summary(summarize(a), summarize(b), variant);
}

GroupComparison t_test_from_summary(const Summary& a, const Summary& b,
                                    TTestVariant variant) {
  if (a.n < 2 || b.n < 2)
    throw ValidationError("t-test needs at least two values per group");
  if (!(a.sd >= 0.0) || !(b.sd >= 0.0))
    throw ValidationError("group SDs must be nonnegative");

  GroupComparison cmp;
  cmp.group_a = a;
  cmp.group_b = b;
  cmp.variant = variant;

  const double na = static_cast<double>(a.n);
  const double nb = static_cast<double>(b.n);
  const double va = a.sd * a.sd;
  const double vb = b.sd * b.sd;

  double se2 = 0.0;
  if (variant == TTestVariant::welch) {
    se2 = va / na + vb / nb;
    if (se2 > 0.0) {
      cmp.df = se2 * se2 /
               ((va / na) * (va / na) / (na - 1.0) +
                (vb / nb) * (vb / nb) / (nb - 1.0));
    }
  } else {
    const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
    se2 = pooled * (1.0 / na + 1.0 / nb);
    cmp.df = na + nb - 2.0;
  }

  const double diff = a.mean - b.mean;
  if (se2 > 0.0) {
    cmp.t_statistic = diff / std::sqrt(se2);
    cmp.p_value = student_t_two_sided_p(cmp.t_statistic, cmp.df);
  } else if (diff == 0.0) {
    cmp.t_statistic = 0.0;
    cmp.p_value = 1.0;
    cmp.degenerate = true;
    cmp.df = na + nb - 2.0;
  } else {
    cmp.t_statistic = diff > 0.0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
    cmp.p_value = 0.0;
    cmp.degenerate = true;
    cmp.df = na + nb - 2.0;
  }
  return cmp;
}

}  // namespace fatiguekit
