#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amagcn/matrix.hpp"

namespace amagcn::pswe {

enum class MeasureKind { quantitative, non_quantitative };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Declaration of one phenotypic measure. theta gates the per-value class
// purity test for categorical measures; delta gates the outside-interval
// concentration test for quantitative ones. A quantitative measure without an
// explicit interval derives one from the data (interquartile range).
struct MeasureSpec {
  std::string name;
  MeasureKind kind = MeasureKind::non_quantitative;
  double theta = 0.5;
  double delta = 0.2;
  std::optional<Interval> interval;  // quantitative only; nullopt = auto
};

// Column storage: quantitative values as doubles, categorical values interned
// to dense ids (category_names maps id -> token, first-appearance order).
struct MeasureColumn {
  std::vector<double> numeric;
  std::vector<int> category;
  std::vector<std::string> category_names;
};

struct PhenotypeTable {
  std::vector<std::string> subject_ids;
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<MeasureSpec> measures;
  std::vector<MeasureColumn> columns;  // parallel to measures

  std::size_t size() const { return subject_ids.size(); }
  int measure_index(std::string_view name) const;
};

struct MeasureScore {
  std::string measure;
  double count = 0.0;      // discriminative sample count for the measure
  double pms_score = 0.0;  // selection weight; 0 means rejected
  bool selected = false;
};

// Discriminative count of a categorical measure: for every (value, class)
// cell, the cell's samples count when the class dominates that value
// ((n_value - n_cell) / n_cell < theta); the total is averaged over the
// number of distinct values. Zero-count cells carry no evidence and are
// skipped.
double count_nonquantitative(const PhenotypeTable& table, const MeasureSpec& measure);

// Discriminative count of a quantitative measure: per class, the subjects
// falling strictly outside the interval count when they make up enough of the
// class ((n_class - n_outside) / n_outside < delta).
double count_quantitative(const PhenotypeTable& table, const MeasureSpec& measure,
                          Interval interval);

// Data-driven interval: the interquartile range [q25, q75] of the measure's
// values, linear-interpolation quantiles. Errors when there are fewer than 4
// values or the quartiles collapse; such measures need a user interval.
Interval derive_interval(const PhenotypeTable& table, const MeasureSpec& measure);

// Selection scores: measures whose count reaches the mean count are kept with
// weight H * count / sum(counts); the rest drop to zero. An all-zero count
// vector yields all-zero scores and a diagnostic on stderr.
std::vector<MeasureScore> compute_pms_scores(
    const std::vector<std::pair<std::string, double>>& counts);

// Kronecker delta on category tokens.
double similarity_nonquantitative(std::string_view a, std::string_view b);

// Quantitative similarity kernel over a closed interval [lo, hi]; cases in
// precedence order: both values outside -> 1; |v - w| < hi - lo ->
// exp(-cbrt|v - w|); otherwise 0. Endpoints count as inside.
double similarity_quantitative(double v, double w, Interval interval);

// Per-measure intervals resolved against this table: explicit interval if
// given, derived otherwise; nullopt for categorical measures.
std::vector<std::optional<Interval>> resolve_intervals(const PhenotypeTable& table);

// Counts + scores for every measure of `stats_table`, using pre-resolved
// intervals (indexed like stats_table.measures).
std::vector<MeasureScore> score_measures(
    const PhenotypeTable& stats_table,
    const std::vector<std::optional<Interval>>& intervals);

// Weighted population adjacency: A(v,w) = sum over selected measures of
// pms_score * kernel(value_v, value_w); zero diagonal. Each unordered pair is
// evaluated once and written to both cells, so the result is bitwise
// symmetric. Errors when no measure is selected.
Matrix build_adjacency(const PhenotypeTable& table, const std::vector<MeasureScore>& scores,
                       const std::vector<std::optional<Interval>>& intervals);

// Manual scores: weight 1 for every named measure (graph modes that bypass
// selection).
std::vector<MeasureScore> manual_scores(const PhenotypeTable& table,
                                        const std::vector<std::string>& names);

// Copy of the table restricted to rows with keep[i] set. Category ids and
// their name mapping survive unchanged.
PhenotypeTable filter_rows(const PhenotypeTable& table, const std::vector<char>& keep);

// Selection kept, weights flattened to 1.
std::vector<MeasureScore> unit_weights(std::vector<MeasureScore> scores);

}  // namespace amagcn::pswe
