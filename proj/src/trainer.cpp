#include "amagcn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include <json.hpp>

#include "amagcn/errors.hpp"
#include "amagcn/rng.hpp"

namespace amagcn::trainer {

namespace {

using nlohmann::json;

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct FoldOutcome {
  double acc = 0.0;
  double auc = 0.0;
  bool auc_defined = false;
};

// Lower-triangular Cholesky solve of (A)x = b for SPD A, in place.
void cholesky_solve(Matrix& a, std::vector<double>& b) {
  const std::size_t m = a.rows;
  for (std::size_t j = 0; j < m; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d <= 0.0) throw NumericError("ridge normal equations lost positive definiteness");
    a(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / a(j, j);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a(i, k) * b[k];
    b[i] = s / a(i, i);
  }
  for (std::size_t i = m; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < m; ++k) s -= a(k, i) * b[k];
    b[i] = s / a(i, i);
  }
}

}  // namespace

std::vector<pswe::MeasureScore> scores_for_run(
    const pswe::PhenotypeTable& full_table, const pswe::PhenotypeTable& stats_table,
    const std::vector<std::optional<pswe::Interval>>& intervals, const RunOptions& opts) {
  switch (opts.source) {
    case GraphSource::manual:
      return pswe::manual_scores(full_table, opts.manual_measures);
    case GraphSource::single_measure:
      return pswe::manual_scores(full_table, {opts.single_measure});
    case GraphSource::pswe:
      break;
    default:
      throw UsageError("graph source does not use measure scores");
  }
  if (opts.config.ablation == model::Ablation::noP)
    return pswe::manual_scores(full_table, opts.manual_measures);
  std::vector<pswe::MeasureScore> scores = pswe::score_measures(stats_table, intervals);
  if (opts.config.ablation == model::Ablation::noW)
    return pswe::unit_weights(std::move(scores));
  return scores;
}

FoldPlan kfold_split(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("need at least two folds");
  if (n < static_cast<std::size_t>(k))
    throw UsageError("cannot split " + std::to_string(n) + " rows into " + std::to_string(k) +
                     " folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::child(seed, "kfold");
  rng.shuffle(order);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.fold_assignments.assign(n, 0);
  std::size_t cursor = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = n / static_cast<std::size_t>(k) +
                             (static_cast<std::size_t>(f) < n % static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < size; ++j) plan.fold_assignments[order[cursor++]] = f;
  }
  return plan;
}

double compute_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw DataError("scores and labels must be nonempty and aligned");
  std::size_t positives = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw DataError("AUC needs binary 0/1 labels");
    positives += static_cast<std::size_t>(l);
  }
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0)
    throw DataError("AUC undefined: only one class present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks over tie groups; rank sum of positives gives the statistic.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t t = i; t <= j; ++t)
      if (labels[order[t]] == 1) positive_rank_sum += avg_rank;
    i = j + 1;
  }
  const double np = static_cast<double>(positives);
  const double nn = static_cast<double>(negatives);
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth,
                const std::vector<char>& mask) {
  std::size_t hit = 0, total = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!mask[i]) continue;
    ++total;
    hit += predicted[i] == truth[i];
  }
  if (total == 0) throw DataError("accuracy over an empty mask");
  return static_cast<double>(hit) / static_cast<double>(total);
}

std::string report_to_json(const MetricsReport& report) {
  json doc;
  doc["seed"] = report.seed;
  doc["config_hash"] = report.config_hash;
  json variants = json::array();
  for (const VariantResult& v : report.variants) {
    json row;
    row["variant"] = v.variant;
    row["fold_acc"] = v.fold_acc;
    row["mean_acc"] = v.mean_acc;
    if (v.has_auc) {
      row["fold_auc"] = v.fold_auc;
      row["mean_auc"] = v.mean_auc;
    } else {
      row["fold_auc"] = nullptr;
      row["mean_auc"] = nullptr;
    }
    variants.push_back(std::move(row));
  }
  doc["variants"] = std::move(variants);
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const MetricsReport& report) {
  std::string out = "variant,fold,acc,auc\n";
  char buf[96];
  for (const VariantResult& v : report.variants) {
    for (std::size_t f = 0; f < v.fold_acc.size(); ++f) {
      if (v.has_auc) {
        std::snprintf(buf, sizeof(buf), "%s,%zu,%.17g,%.17g\n", v.variant.c_str(), f,
                      v.fold_acc[f], v.fold_auc[f]);
      } else {
        std::snprintf(buf, sizeof(buf), "%s,%zu,%.17g,\n", v.variant.c_str(), f,
                      v.fold_acc[f]);
      }
      out += buf;
    }
  }
  return out;
}

Matrix random_adjacency(std::size_t n, std::uint64_t seed) {
  Matrix a(n, n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double w = rng.uniform();
      a(i, j) = w;
      a(j, i) = w;
    }
  return a;
}

FitResult fit(const PopulationGraph& g, const spectral::ChebBasis& basis,
              const model::AmaGcnConfig& cfg, std::uint64_t seed, std::ostream* log) {
  FitResult result;
  result.params = model::init_params(cfg, g.features.cols, g.num_classes, seed);
  model::TrainerState state = model::init_trainer(result.params, cfg, seed);

  bool any_val = false;
  for (char c : g.val_mask) any_val |= static_cast<bool>(c);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const nn::LossTerms terms = model::train_step(g, basis, result.params, state, cfg);
    result.history.push_back(terms);
    if (!log) continue;
    const model::Prediction pred = model::predict(g, basis, result.params, cfg);
    json record;
    record["epoch"] = epoch;
    record["semi"] = terms.semi;
    record["sim"] = terms.sim;
    record["total"] = terms.total;
    record["train_acc"] = accuracy(pred.labels, g.labels, g.train_mask);
    if (any_val) {
      record["val_acc"] = accuracy(pred.labels, g.labels, g.val_mask);
    } else {
      record["val_acc"] = nullptr;
    }
    *log << record.dump() << "\n";
  }
  return result;
}

VariantResult run_cross_validation(const pswe::PhenotypeTable& table, const Matrix& features,
                                   const RunOptions& opts, const std::string& variant_name) {
  opts.config.validate();
  const std::size_t n = table.size();
  if (features.rows != n)
    throw DataError("feature rows (" + std::to_string(features.rows) +
                    ") do not match table rows (" + std::to_string(n) + ")");
  if (opts.jobs < 1) throw UsageError("jobs must be >= 1");

  const FoldPlan plan = kfold_split(n, opts.folds, opts.seed);
  const std::vector<std::optional<pswe::Interval>> intervals = pswe::resolve_intervals(table);

  // Label-independent graphs (and the paper-faithful protocol) are shared
  // across folds; the honest protocol rebuilds the graph per fold from that
  // fold's training labels.
  const bool per_fold_graph = opts.source == GraphSource::pswe && !opts.paper_faithful &&
                              opts.config.ablation != model::Ablation::noP;
  Matrix shared_adjacency;
  spectral::ChebBasis shared_basis;
  if (!per_fold_graph) {
    switch (opts.source) {
      case GraphSource::random:
        shared_adjacency = random_adjacency(n, Rng::derive_seed(opts.seed, "random-graph"));
        break;
      case GraphSource::prebuilt:
        if (!opts.prebuilt_adjacency) throw UsageError("prebuilt source needs an adjacency");
        shared_adjacency = *opts.prebuilt_adjacency;
        if (shared_adjacency.rows != n || shared_adjacency.cols != n)
          throw DataError("prebuilt adjacency does not match table size");
        break;
      default: {
        const std::vector<pswe::MeasureScore> scores =
            scores_for_run(table, table, intervals, opts);
        shared_adjacency = pswe::build_adjacency(table, scores, intervals);
      }
    }
    shared_basis = spectral::basis_for_adjacency(shared_adjacency, opts.config.cheb_order);
  }

  std::vector<FoldOutcome> outcomes(static_cast<std::size_t>(opts.folds));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(opts.folds));

  const auto run_fold = [&](int f) {
    PopulationGraph g;
    g.features = features;
    g.labels = table.labels;
    g.num_classes = table.num_classes;
    g.train_mask.assign(n, 0);
    g.val_mask.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (plan.fold_assignments[i] == f) {
        g.val_mask[i] = 1;
      } else {
        g.train_mask[i] = 1;
      }
    }

    spectral::ChebBasis fold_basis;
    const spectral::ChebBasis* basis = &shared_basis;
    if (per_fold_graph) {
      const pswe::PhenotypeTable stats = pswe::filter_rows(table, g.train_mask);
      const std::vector<pswe::MeasureScore> scores =
          scores_for_run(table, stats, intervals, opts);
      g.adjacency = pswe::build_adjacency(table, scores, intervals);
      fold_basis = spectral::basis_for_adjacency(g.adjacency, opts.config.cheb_order);
      basis = &fold_basis;
    } else {
      g.adjacency = shared_adjacency;
    }

    const std::uint64_t fold_seed =
        Rng::derive_seed(opts.seed, "fold", static_cast<std::uint64_t>(f));
    const FitResult fitted = fit(g, *basis, opts.config, fold_seed);
    const model::Prediction pred = model::predict(g, *basis, fitted.params, opts.config);

    FoldOutcome& out = outcomes[static_cast<std::size_t>(f)];
    out.acc = accuracy(pred.labels, g.labels, g.val_mask);
    if (table.num_classes == 2) {
      std::vector<double> scores;
      std::vector<int> labels;
      bool both = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!g.val_mask[i]) continue;
        scores.push_back(pred.probs(i, 1));
        labels.push_back(g.labels[i]);
        both |= labels.size() > 1 && labels.back() != labels.front();
      }
      if (both) {
        out.auc = compute_auc(scores, labels);
        out.auc_defined = true;
      }
    }
  };

  if (opts.jobs > 1) {
#pragma omp parallel for num_threads(opts.jobs) schedule(dynamic, 1)
    for (int f = 0; f < opts.folds; ++f) {
      try {
        run_fold(f);
      } catch (...) {
        errors[static_cast<std::size_t>(f)] = std::current_exception();
      }
    }
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (int f = 0; f < opts.folds; ++f) run_fold(f);
  }

  VariantResult result;
  result.variant = variant_name;
  result.has_auc = table.num_classes == 2;
  for (const FoldOutcome& out : outcomes) {
    result.fold_acc.push_back(out.acc);
    if (!out.auc_defined) result.has_auc = false;
    result.fold_auc.push_back(out.auc);
  }
  if (!result.has_auc) result.fold_auc.clear();
  result.mean_acc = mean(result.fold_acc);
  result.mean_auc = result.has_auc ? mean(result.fold_auc) : 0.0;
  return result;
}

VariantResult ridge_baseline(const Matrix& features, const std::vector<int>& labels,
                             int num_classes, const FoldPlan& plan, double reg) {
  if (reg <= 0.0) throw UsageError("ridge regularization must be positive");
  const std::size_t n = features.rows;
  const std::size_t m = features.cols;
  if (labels.size() != n) throw DataError("labels do not match feature rows");

  VariantResult result;
  result.variant = "ridge";
  result.has_auc = num_classes == 2;

  for (int f = 0; f < plan.k; ++f) {
    std::vector<std::size_t> train_rows;
    for (std::size_t i = 0; i < n; ++i)
      if (plan.fold_assignments[i] != f) train_rows.push_back(i);
    if (train_rows.empty()) throw DataError("empty training fold");

    std::vector<double> mu(m, 0.0);
    for (std::size_t i : train_rows) {
      const double* r = features.row(i);
      for (std::size_t j = 0; j < m; ++j) mu[j] += r[j];
    }
    for (double& v : mu) v /= static_cast<double>(train_rows.size());

    // Gram matrix of centered training features, shared by every class.
    Matrix gram(m, m);
    for (std::size_t i : train_rows) {
      const double* r = features.row(i);
      for (std::size_t a = 0; a < m; ++a) {
        const double xa = r[a] - mu[a];
        for (std::size_t b = a; b < m; ++b) gram(a, b) += xa * (r[b] - mu[b]);
      }
    }
    for (std::size_t a = 0; a < m; ++a) {
      gram(a, a) += reg;
      for (std::size_t b = 0; b < a; ++b) gram(a, b) = gram(b, a);
    }

    Matrix scores(n, static_cast<std::size_t>(num_classes));
    for (int c = 0; c < num_classes; ++c) {
      double y_mean = 0.0;
      for (std::size_t i : train_rows) y_mean += labels[i] == c ? 1.0 : -1.0;
      y_mean /= static_cast<double>(train_rows.size());

      std::vector<double> rhs(m, 0.0);
      for (std::size_t i : train_rows) {
        const double yc = (labels[i] == c ? 1.0 : -1.0) - y_mean;
        const double* r = features.row(i);
        for (std::size_t j = 0; j < m; ++j) rhs[j] += (r[j] - mu[j]) * yc;
      }
      Matrix chol = gram;
      cholesky_solve(chol, rhs);
      for (std::size_t i = 0; i < n; ++i) {
        const double* r = features.row(i);
        double s = y_mean;
        for (std::size_t j = 0; j < m; ++j) s += (r[j] - mu[j]) * rhs[j];
        scores(i, static_cast<std::size_t>(c)) = s;
      }
    }

    std::size_t hit = 0, total = 0;
    std::vector<double> val_scores;
    std::vector<int> val_labels;
    for (std::size_t i = 0; i < n; ++i) {
      if (plan.fold_assignments[i] != f) continue;
      const double* r = scores.row(i);
      std::size_t best = 0;
      for (std::size_t c = 1; c < scores.cols; ++c)
        if (r[c] > r[best]) best = c;
      ++total;
      hit += static_cast<int>(best) == labels[i];
      if (num_classes == 2) {
        val_scores.push_back(r[1]);
        val_labels.push_back(labels[i]);
      }
    }
    result.fold_acc.push_back(static_cast<double>(hit) / static_cast<double>(total));
    if (num_classes == 2) {
      const bool both =
          std::count(val_labels.begin(), val_labels.end(), 1) > 0 &&
          std::count(val_labels.begin(), val_labels.end(), 0) > 0;
      if (both) {
        result.fold_auc.push_back(compute_auc(val_scores, val_labels));
      } else {
        result.has_auc = false;
      }
    }
  }

  if (!result.has_auc) result.fold_auc.clear();
  result.mean_acc = mean(result.fold_acc);
  result.mean_auc = result.has_auc ? mean(result.fold_auc) : 0.0;
  return result;
}

MetricsReport run_measure_sweep(const pswe::PhenotypeTable& table, const Matrix& features,
                                const RunOptions& opts) {
  MetricsReport report;
  report.seed = opts.seed;
  report.config_hash = opts.config_hash;

  RunOptions pswe_opts = opts;
  pswe_opts.source = GraphSource::pswe;
  report.variants.push_back(run_cross_validation(table, features, pswe_opts, "pswe"));

  for (const pswe::MeasureSpec& m : table.measures) {
    RunOptions single = opts;
    single.source = GraphSource::single_measure;
    single.single_measure = m.name;
    report.variants.push_back(
        run_cross_validation(table, features, single, "measure:" + m.name));
  }

  RunOptions random_opts = opts;
  random_opts.source = GraphSource::random;
  report.variants.push_back(run_cross_validation(table, features, random_opts, "random"));

  const FoldPlan plan = kfold_split(table.size(), opts.folds, opts.seed);
  report.variants.push_back(
      ridge_baseline(features, table.labels, table.num_classes, plan, opts.ridge_reg));
  return report;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace amagcn::trainer
