#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "amagcn/graph.hpp"
#include "amagcn/matrix.hpp"
#include "amagcn/model.hpp"
#include "amagcn/nn.hpp"
#include "amagcn/pswe.hpp"
#include "amagcn/spectral.hpp"

namespace amagcn::trainer {

struct FoldPlan {
  std::vector<int> fold_assignments;
  int k = 10;
  std::uint64_t seed = 0;
};

// Seeded shuffle then contiguous chunking; fold sizes differ by at most one.
FoldPlan kfold_split(std::size_t n, int k, std::uint64_t seed);

// Mann-Whitney rank AUC with ties counted half. Labels must be 0/1 with both
// classes present.
double compute_auc(const std::vector<double>& scores, const std::vector<int>& labels);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth,
                const std::vector<char>& mask);

// One experiment row: per-fold metrics and their means. AUC entries are
// present only for binary problems.
struct VariantResult {
  std::string variant;
  std::vector<double> fold_acc;
  std::vector<double> fold_auc;
  double mean_acc = 0.0;
  double mean_auc = 0.0;
  bool has_auc = false;
};

struct MetricsReport {
  std::vector<VariantResult> variants;
  std::uint64_t seed = 0;
  std::string config_hash;
};

std::string report_to_json(const MetricsReport& report);
std::string report_to_csv(const MetricsReport& report);

// How the population graph is built for a run. `pswe` follows the configured
// ablation (selection + weighting, unit weights for noW, manual list for
// noP); the rest bypass selection for sweep baselines.
enum class GraphSource { pswe, manual, random, single_measure, prebuilt };

struct RunOptions {
  model::AmaGcnConfig config;
  int folds = 10;
  std::uint64_t seed = 1;
  int jobs = 1;
  // Selection statistics from all labels, held-out rows included, instead
  // of training-fold labels only. Inflates CV scores through label leakage;
  // kept for comparability with whole-dataset protocols.
  bool paper_faithful = false;
  GraphSource source = GraphSource::pswe;
  std::vector<std::string> manual_measures;
  std::string single_measure;
  const Matrix* prebuilt_adjacency = nullptr;
  std::string config_hash;
  double ridge_reg = 1.0;
};

// Measure weights for one run, honoring the graph source and the configured
// ablation. stats_table carries only the rows whose labels may be consulted;
// manual and single-measure sources ignore it.
std::vector<pswe::MeasureScore> scores_for_run(
    const pswe::PhenotypeTable& full_table, const pswe::PhenotypeTable& stats_table,
    const std::vector<std::optional<pswe::Interval>>& intervals, const RunOptions& opts);

// Per-fold graphs are rebuilt with selection statistics restricted to that
// fold's training rows unless paper_faithful is set. Intervals derive from
// values only, so they resolve once against the full table.
VariantResult run_cross_validation(const pswe::PhenotypeTable& table, const Matrix& features,
                                   const RunOptions& opts, const std::string& variant_name);

// Rows: full PSWE graph, one per single-measure graph, a random graph, and
// the feature-only ridge baseline, all under the same fold plan.
MetricsReport run_measure_sweep(const pswe::PhenotypeTable& table, const Matrix& features,
                                const RunOptions& opts);

// Closed-form ridge regression on centered features, one-vs-rest targets in
// {-1, +1}, unpenalized intercept. Scores for AUC are raw regression outputs.
VariantResult ridge_baseline(const Matrix& features, const std::vector<int>& labels,
                             int num_classes, const FoldPlan& plan, double reg);

struct FitResult {
  model::ModelParams params;
  std::vector<nn::LossTerms> history;
};

// Epoch loop over one graph. When log is given, every epoch appends one JSON
// record {epoch, semi, sim, total, train_acc, val_acc}; the evaluation
// forward pass behind those accuracies only runs when logging is on.
FitResult fit(const PopulationGraph& g, const spectral::ChebBasis& basis,
              const model::AmaGcnConfig& cfg, std::uint64_t seed, std::ostream* log = nullptr);

// Seeded dense symmetric graph with uniform [0,1) weights, zero diagonal.
Matrix random_adjacency(std::size_t n, std::uint64_t seed);

// 64-bit FNV-1a, lowercase hex. Used to stamp configs into outputs.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace amagcn::trainer
