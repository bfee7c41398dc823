#include "amagcn/pswe.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "amagcn/errors.hpp"

namespace amagcn::pswe {

namespace {

const MeasureColumn& column_for(const PhenotypeTable& table, const MeasureSpec& measure,
                                MeasureKind expected) {
  const int idx = table.measure_index(measure.name);
  if (idx < 0) throw DataError("unknown measure: " + measure.name);
  const MeasureSpec& in_table = table.measures[static_cast<std::size_t>(idx)];
  if (in_table.kind != expected || measure.kind != expected)
    throw DataError("measure kind mismatch for " + measure.name);
  return table.columns[static_cast<std::size_t>(idx)];
}

bool outside(double v, Interval d) { return v < d.lo || v > d.hi; }

// Linear-interpolation quantile on a sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

int PhenotypeTable::measure_index(std::string_view name) const {
  for (std::size_t i = 0; i < measures.size(); ++i)
    if (measures[i].name == name) return static_cast<int>(i);
  return -1;
}

double count_nonquantitative(const PhenotypeTable& table, const MeasureSpec& measure) {
  const MeasureColumn& col = column_for(table, measure, MeasureKind::non_quantitative);
  const std::size_t num_values = col.category_names.size();
  if (num_values == 0 || table.size() == 0) return 0.0;
  const std::size_t p = static_cast<std::size_t>(table.num_classes);

  // cell(u, p) = subjects with value u and class p; value_total(u) = subjects
  // with value u.
  std::vector<double> cell(num_values * p, 0.0);
  std::vector<double> value_total(num_values, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::size_t u = static_cast<std::size_t>(col.category[i]);
    cell[u * p + static_cast<std::size_t>(table.labels[i])] += 1.0;
    value_total[u] += 1.0;
  }

  double total = 0.0;
  for (std::size_t u = 0; u < num_values; ++u) {
    for (std::size_t c = 0; c < p; ++c) {
      const double n_cell = cell[u * p + c];
      if (n_cell <= 0.0) continue;
      if ((value_total[u] - n_cell) / n_cell < measure.theta) total += n_cell;
    }
  }
  return total / static_cast<double>(num_values);
}

double count_quantitative(const PhenotypeTable& table, const MeasureSpec& measure,
                          Interval interval) {
  if (table.size() == 0) throw DataError("empty table for measure " + measure.name);
  const MeasureColumn& col = column_for(table, measure, MeasureKind::quantitative);
  const std::size_t p = static_cast<std::size_t>(table.num_classes);

  std::vector<double> class_total(p, 0.0), class_outside(p, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::size_t c = static_cast<std::size_t>(table.labels[i]);
    class_total[c] += 1.0;
    if (outside(col.numeric[i], interval)) class_outside[c] += 1.0;
  }

  double total = 0.0;
  for (std::size_t c = 0; c < p; ++c) {
    if (class_outside[c] <= 0.0) continue;
    if ((class_total[c] - class_outside[c]) / class_outside[c] < measure.delta)
      total += class_outside[c];
  }
  return total;
}

Interval derive_interval(const PhenotypeTable& table, const MeasureSpec& measure) {
  const MeasureColumn& col = column_for(table, measure, MeasureKind::quantitative);
  if (col.numeric.size() < 4)
    throw DataError("measure " + measure.name +
                    ": too few values to derive an interval; supply one explicitly");
  std::vector<double> sorted = col.numeric;
  std::sort(sorted.begin(), sorted.end());
  Interval d{quantile_sorted(sorted, 0.25), quantile_sorted(sorted, 0.75)};
  if (d.lo == d.hi)
    throw DataError("measure " + measure.name +
                    ": degenerate interquartile range; supply an interval explicitly");
  return d;
}

std::vector<MeasureScore> compute_pms_scores(
    const std::vector<std::pair<std::string, double>>& counts) {
  const double h = static_cast<double>(counts.size());
  double sum = 0.0;
  for (const auto& [name, c] : counts) sum += c;

  std::vector<MeasureScore> scores;
  scores.reserve(counts.size());
  if (sum <= 0.0) {
    std::cerr << "warning: all measure counts are zero; no measure selected\n";
    for (const auto& [name, c] : counts) scores.push_back({name, c, 0.0, false});
    return scores;
  }
  for (const auto& [name, c] : counts) {
    MeasureScore s{name, c, 0.0, false};
    if (h * c >= sum) {
      s.pms_score = h * c / sum;
      s.selected = true;
    }
    scores.push_back(std::move(s));
  }
  return scores;
}

double similarity_nonquantitative(std::string_view a, std::string_view b) {
  return a == b ? 1.0 : 0.0;
}

double similarity_quantitative(double v, double w, Interval interval) {
  if (outside(v, interval) && outside(w, interval)) return 1.0;
  const double dist = std::abs(v - w);
  if (dist < interval.hi - interval.lo) return std::exp(-std::cbrt(dist));
  return 0.0;
}

std::vector<std::optional<Interval>> resolve_intervals(const PhenotypeTable& table) {
  std::vector<std::optional<Interval>> out;
  out.reserve(table.measures.size());
  for (const MeasureSpec& m : table.measures) {
    if (m.kind != MeasureKind::quantitative) {
      out.push_back(std::nullopt);
    } else if (m.interval) {
      out.push_back(*m.interval);
    } else {
      out.push_back(derive_interval(table, m));
    }
  }
  return out;
}

std::vector<MeasureScore> score_measures(
    const PhenotypeTable& stats_table,
    const std::vector<std::optional<Interval>>& intervals) {
  if (intervals.size() != stats_table.measures.size())
    throw DataError("interval list does not match measure list");
  std::vector<std::pair<std::string, double>> counts;
  counts.reserve(stats_table.measures.size());
  for (std::size_t h = 0; h < stats_table.measures.size(); ++h) {
    const MeasureSpec& m = stats_table.measures[h];
    const double c = m.kind == MeasureKind::quantitative
                         ? count_quantitative(stats_table, m, *intervals[h])
                         : count_nonquantitative(stats_table, m);
    counts.emplace_back(m.name, c);
  }
  return compute_pms_scores(counts);
}

Matrix build_adjacency(const PhenotypeTable& table, const std::vector<MeasureScore>& scores,
                       const std::vector<std::optional<Interval>>& intervals) {
  struct Term {
    std::size_t column;
    double weight;
    bool quantitative;
    Interval interval;
  };
  std::vector<Term> terms;
  for (const MeasureScore& s : scores) {
    if (!s.selected) continue;
    const int idx = table.measure_index(s.measure);
    if (idx < 0) throw DataError("scored measure missing from table: " + s.measure);
    const std::size_t h = static_cast<std::size_t>(idx);
    const bool quant = table.measures[h].kind == MeasureKind::quantitative;
    Term t{h, s.pms_score, quant, {}};
    if (quant) {
      if (h >= intervals.size() || !intervals[h])
        throw DataError("no interval resolved for measure " + s.measure);
      t.interval = *intervals[h];
    }
    terms.push_back(t);
  }
  if (terms.empty())
    throw DataError(
        "empty graph: no measure selected; supply measures manually "
        "(--mode manual with --manual-measures)");

  const std::size_t n = table.size();
  Matrix a(n, n);
  // Each unordered pair is evaluated once; the row owner writes both cells, so
  // distinct iterations touch disjoint cells and the matrix is bitwise
  // symmetric by construction.
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w = v + 1; w < n; ++w) {
      double sum = 0.0;
      for (const Term& t : terms) {
        const MeasureColumn& col = table.columns[t.column];
        const double gamma =
            t.quantitative
                ? similarity_quantitative(col.numeric[v], col.numeric[w], t.interval)
                : (col.category[v] == col.category[w] ? 1.0 : 0.0);
        sum += t.weight * gamma;
      }
      a(v, w) = sum;
      a(w, v) = sum;
    }
  }
  return a;
}

std::vector<MeasureScore> manual_scores(const PhenotypeTable& table,
                                        const std::vector<std::string>& names) {
  if (names.empty()) throw UsageError("manual measure list is empty");
  std::vector<MeasureScore> scores;
  for (const std::string& name : names) {
    if (table.measure_index(name) < 0)
      throw DataError("manual measure not in table: " + name);
    scores.push_back({name, 0.0, 1.0, true});
  }
  return scores;
}

PhenotypeTable filter_rows(const PhenotypeTable& table, const std::vector<char>& keep) {
  if (keep.size() != table.size()) throw DataError("row filter does not match table size");
  PhenotypeTable out;
  out.num_classes = table.num_classes;
  out.measures = table.measures;
  out.columns.resize(table.columns.size());
  for (std::size_t m = 0; m < table.columns.size(); ++m)
    out.columns[m].category_names = table.columns[m].category_names;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!keep[i]) continue;
    out.subject_ids.push_back(table.subject_ids[i]);
    out.labels.push_back(table.labels[i]);
    for (std::size_t m = 0; m < table.columns.size(); ++m) {
      const MeasureColumn& src = table.columns[m];
      if (table.measures[m].kind == MeasureKind::quantitative) {
        out.columns[m].numeric.push_back(src.numeric[i]);
      } else {
        out.columns[m].category.push_back(src.category[i]);
      }
    }
  }
  return out;
}

std::vector<MeasureScore> unit_weights(std::vector<MeasureScore> scores) {
  for (MeasureScore& s : scores)
    if (s.selected) s.pms_score = 1.0;
  return scores;
}

}  // namespace amagcn::pswe
