#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "amagcn/container.hpp"
#include "amagcn/dataio.hpp"
#include "amagcn/errors.hpp"
#include "amagcn/model.hpp"
#include "amagcn/pswe.hpp"
#include "amagcn/spectral.hpp"
#include "amagcn/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace amagcn;

namespace {

struct Args {
  std::string phenotypes;
  std::string measures;
  std::string features;
  std::string graph;
  std::string out;
  std::string config_file;
  std::string mode = "pswe";
  std::string ablation = "full";
  std::vector<std::string> manual_measures;
  std::string dump_laplacian;
  std::uint64_t seed = 1;
  int folds = 10;
  int jobs = 1;
  int val_fold = 0;
  bool paper_faithful = false;
  double ridge_reg = 1.0;
  model::AmaGcnConfig mc;

  dataio::SynthSpec synth;
  std::string out_prefix;
};

void add_run_flags(CLI::App* cmd, Args& a) {
  cmd->add_option("--seed", a.seed, "Root seed for every random stream");
  cmd->add_option("--config", a.config_file,
                  "JSON config file; its values override command-line flags");
}

void add_model_flags(CLI::App* cmd, Args& a) {
  cmd->add_option("--ablation", a.ablation, "Run variant: full|noP|noW|noA|noS");
  cmd->add_option("--mla-layers", a.mc.mla_layers, "Backbone depth");
  cmd->add_option("--adu-layers", a.mc.adu_layers, "Auxiliary channel depth");
  cmd->add_option("--hidden-dim", a.mc.hidden_dim, "Graph convolution width");
  cmd->add_option("--cheb-order", a.mc.cheb_order, "Chebyshev filter order K");
  cmd->add_option("--dropout", a.mc.dropout, "Dropout probability on conv inputs");
  cmd->add_option("--lr-mla", a.mc.lr_mla, "Backbone learning rate");
  cmd->add_option("--lr-adu", a.mc.lr_adu, "Auxiliary channel learning rate");
  cmd->add_option("--weight-decay", a.mc.weight_decay, "L2 decay on weight matrices");
  cmd->add_option("--epochs", a.mc.epochs, "Training epochs");
  cmd->add_option("--lambda", a.mc.lambda, "Similarity loss weight");
  cmd->add_option("--xi", a.mc.xi, "Similarity loss offset");
  cmd->add_option("--sigma", a.mc.sigma, "Similarity loss kernel width");
}

void add_graph_flags(CLI::App* cmd, Args& a) {
  cmd->add_option("--mode", a.mode, "Graph construction: pswe|manual|random");
  cmd->add_option("--manual-measures", a.manual_measures,
                  "Measures for manual mode and the noP variant")
      ->delimiter(',');
}

void add_data_flags(CLI::App* cmd, Args& a, bool need_features) {
  cmd->add_option("--phenotypes", a.phenotypes, "Phenotype CSV")->required();
  cmd->add_option("--measures", a.measures, "Measure spec JSON")->required();
  if (need_features)
    cmd->add_option("--features", a.features, "Feature matrix (CSV or binary container)")
        ->required();
}

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

// Config file wins over flags, flags over defaults.
void apply_config_file(Args& a) {
  if (a.config_file.empty()) return;
  std::ifstream in(a.config_file);
  if (!in) throw UsageError("cannot open config file: " + a.config_file);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config file is not valid JSON: " + std::string(e.what()));
  }
  static const std::vector<std::string> known = {
      "mla_layers", "adu_layers", "hidden_dim",      "cheb_order",      "dropout",
      "lr_mla",     "lr_adu",     "weight_decay",    "epochs",          "lambda",
      "xi",         "sigma",      "ablation",        "seed",            "folds",
      "jobs",       "val_fold",   "paper_faithful",  "mode",            "manual_measures",
      "ridge_reg"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw UsageError("unknown config key '" + key + "' in " + a.config_file);
  }
  take(j, "mla_layers", a.mc.mla_layers);
  take(j, "adu_layers", a.mc.adu_layers);
  take(j, "hidden_dim", a.mc.hidden_dim);
  take(j, "cheb_order", a.mc.cheb_order);
  take(j, "dropout", a.mc.dropout);
  take(j, "lr_mla", a.mc.lr_mla);
  take(j, "lr_adu", a.mc.lr_adu);
  take(j, "weight_decay", a.mc.weight_decay);
  take(j, "epochs", a.mc.epochs);
  take(j, "lambda", a.mc.lambda);
  take(j, "xi", a.mc.xi);
  take(j, "sigma", a.mc.sigma);
  take(j, "ablation", a.ablation);
  take(j, "seed", a.seed);
  take(j, "folds", a.folds);
  take(j, "jobs", a.jobs);
  take(j, "val_fold", a.val_fold);
  take(j, "paper_faithful", a.paper_faithful);
  take(j, "mode", a.mode);
  take(j, "manual_measures", a.manual_measures);
  take(j, "ridge_reg", a.ridge_reg);
}

// Settings that shape results. File locations and job counts stay out: the
// same experiment hashes identically from any directory at any parallelism.
json semantic_config(const Args& a) {
  json j;
  j["mla_layers"] = a.mc.mla_layers;
  j["adu_layers"] = a.mc.adu_layers;
  j["hidden_dim"] = a.mc.hidden_dim;
  j["cheb_order"] = a.mc.cheb_order;
  j["dropout"] = a.mc.dropout;
  j["lr_mla"] = a.mc.lr_mla;
  j["lr_adu"] = a.mc.lr_adu;
  j["weight_decay"] = a.mc.weight_decay;
  j["epochs"] = a.mc.epochs;
  j["lambda"] = a.mc.lambda;
  j["xi"] = a.mc.xi;
  j["sigma"] = a.mc.sigma;
  j["ablation"] = model::to_string(a.mc.ablation);
  j["seed"] = a.seed;
  j["folds"] = a.folds;
  j["val_fold"] = a.val_fold;
  j["paper_faithful"] = a.paper_faithful;
  j["mode"] = a.mode;
  j["manual_measures"] = a.manual_measures;
  j["ridge_reg"] = a.ridge_reg;
  return j;
}

// Fills in derived fields, computes the config hash, echoes the resolved
// config. Call once per command after apply_config_file.
std::string resolve_and_echo(Args& a) {
  a.mc.ablation = model::ablation_from_string(a.ablation);
  if (a.mc.ablation == model::Ablation::noS) a.mc.lambda = 0.0;
  a.mc.validate();
  if (a.mc.ablation == model::Ablation::noP && a.manual_measures.empty())
    throw UsageError("ablation noP needs --manual-measures");
  if (a.mode != "pswe" && a.mode != "manual" && a.mode != "random")
    throw UsageError("unknown mode '" + a.mode + "' (expected pswe|manual|random)");
  if (a.mode == "manual" && a.manual_measures.empty())
    throw UsageError("manual mode needs --manual-measures");
  if (!a.graph.empty() && a.mode != "pswe")
    throw UsageError("--graph supplies a prebuilt adjacency; drop --mode");

  json resolved = semantic_config(a);
  const std::string hash = trainer::fnv1a_hex(resolved.dump());
  resolved["config_hash"] = hash;
  resolved["jobs"] = a.jobs;
  if (!a.phenotypes.empty()) resolved["phenotypes"] = a.phenotypes;
  if (!a.measures.empty()) resolved["measures"] = a.measures;
  if (!a.features.empty()) resolved["features"] = a.features;
  if (!a.graph.empty()) resolved["graph"] = a.graph;
  if (!a.out.empty()) resolved["out"] = a.out;
  std::cout << resolved.dump() << "\n";
  return hash;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

json synth_config(const dataio::SynthSpec& s) {
  json j;
  j["n"] = s.n;
  j["classes"] = s.classes;
  j["informative_quant"] = s.informative_quant;
  j["informative_cat"] = s.informative_cat;
  j["noise_quant"] = s.noise_quant;
  j["noise_cat"] = s.noise_cat;
  j["feature_dim"] = s.feature_dim;
  j["class_separation"] = s.class_separation;
  j["purity"] = s.purity;
  j["seed"] = s.seed;
  return j;
}

int cmd_synth(Args& a) {
  if (!a.config_file.empty()) {
    std::ifstream in(a.config_file);
    if (!in) throw UsageError("cannot open config file: " + a.config_file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("config file is not valid JSON: " + std::string(e.what()));
    }
    take(j, "n", a.synth.n);
    take(j, "classes", a.synth.classes);
    take(j, "informative_quant", a.synth.informative_quant);
    take(j, "informative_cat", a.synth.informative_cat);
    take(j, "noise_quant", a.synth.noise_quant);
    take(j, "noise_cat", a.synth.noise_cat);
    take(j, "feature_dim", a.synth.feature_dim);
    take(j, "class_separation", a.synth.class_separation);
    take(j, "purity", a.synth.purity);
    take(j, "seed", a.synth.seed);
  }
  a.synth.validate();

  json resolved = synth_config(a.synth);
  const std::string hash = trainer::fnv1a_hex(resolved.dump());
  resolved["config_hash"] = hash;
  resolved["out_prefix"] = a.out_prefix;
  std::cout << resolved.dump() << "\n";

  const dataio::SynthData data = dataio::generate_synthetic(a.synth);
  const fs::path prefix(a.out_prefix);
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  dataio::save_phenotypes(fs::path(a.out_prefix + ".phenotypes.csv"), data.table);
  dataio::save_measure_specs(fs::path(a.out_prefix + ".measures.json"), data.table.measures);
  dataio::save_features_binary(fs::path(a.out_prefix + ".features.bin"), data.features,
                               a.synth.seed, hash);

  std::cout << "planted informative measures:";
  for (const std::string& m : data.informative_measures) std::cout << ' ' << m;
  std::cout << "\nwrote " << a.out_prefix << ".phenotypes.csv, " << a.out_prefix
            << ".measures.json, " << a.out_prefix << ".features.bin\n";
  return 0;
}

int cmd_select_measures(Args& a) {
  const std::string hash = resolve_and_echo(a);
  std::size_t dropped = 0;
  const pswe::PhenotypeTable table = dataio::load_phenotypes(a.phenotypes, a.measures, &dropped);
  const auto intervals = pswe::resolve_intervals(table);
  const auto scores = pswe::score_measures(table, intervals);

  json report;
  report["seed"] = a.seed;
  report["config_hash"] = hash;
  report["rows_dropped"] = dropped;
  report["rows_used"] = table.size();
  json rows = json::array();
  for (std::size_t h = 0; h < scores.size(); ++h) {
    json row;
    row["measure"] = scores[h].measure;
    row["kind"] = table.measures[h].kind == pswe::MeasureKind::quantitative
                      ? "quantitative"
                      : "non_quantitative";
    row["count"] = scores[h].count;
    row["pms_score"] = scores[h].pms_score;
    row["selected"] = scores[h].selected;
    if (intervals[h]) {
      row["interval"] = {intervals[h]->lo, intervals[h]->hi};
    } else {
      row["interval"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  report["measures"] = std::move(rows);

  write_text(a.out, report.dump(2) + "\n");
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

int cmd_build_graph(Args& a) {
  resolve_and_echo(a);
  std::size_t dropped = 0;
  const pswe::PhenotypeTable table = dataio::load_phenotypes(a.phenotypes, a.measures, &dropped);

  Matrix adjacency;
  if (a.mode == "random") {
    adjacency = trainer::random_adjacency(table.size(), Rng::derive_seed(a.seed, "random-graph"));
  } else {
    const auto intervals = pswe::resolve_intervals(table);
    trainer::RunOptions opts;
    opts.config = a.mc;
    opts.seed = a.seed;
    opts.source =
        a.mode == "manual" ? trainer::GraphSource::manual : trainer::GraphSource::pswe;
    opts.manual_measures = a.manual_measures;
    const auto scores = trainer::scores_for_run(table, table, intervals, opts);
    adjacency = pswe::build_adjacency(table, scores, intervals);
  }

  const fs::path prefix(a.out);
  if (prefix.has_parent_path()) fs::create_directories(prefix.parent_path());
  dataio::save_matrix_csv(fs::path(a.out + ".adjacency.csv"), adjacency);
  dataio::save_adjacency_tsv(fs::path(a.out + ".adjacency.tsv"), adjacency);
  if (!a.dump_laplacian.empty())
    dataio::save_matrix_csv(a.dump_laplacian, spectral::normalized_laplacian(adjacency));

  std::size_t edges = 0;
  for (std::size_t i = 0; i < adjacency.rows; ++i)
    for (std::size_t j = i + 1; j < adjacency.cols; ++j) edges += adjacency(i, j) > 0.0;
  std::cout << "graph over " << table.size() << " subjects (" << dropped
            << " rows dropped), " << edges << " positive edges\nwrote " << a.out
            << ".adjacency.csv, " << a.out << ".adjacency.tsv\n";
  return 0;
}

trainer::GraphSource source_from_args(const Args& a) {
  if (!a.graph.empty()) return trainer::GraphSource::prebuilt;
  if (a.mode == "manual") return trainer::GraphSource::manual;
  if (a.mode == "random") return trainer::GraphSource::random;
  return trainer::GraphSource::pswe;
}

int cmd_train(Args& a) {
  const std::string hash = resolve_and_echo(a);
  std::size_t dropped = 0;
  const pswe::PhenotypeTable table = dataio::load_phenotypes(a.phenotypes, a.measures, &dropped);
  const Matrix features = dataio::load_features(a.features);
  if (features.rows != table.size())
    throw DataError("feature rows do not match phenotype rows after filtering");

  const std::size_t n = table.size();
  PopulationGraph g;
  g.features = features;
  g.labels = table.labels;
  g.num_classes = table.num_classes;
  g.train_mask.assign(n, 1);
  g.val_mask.assign(n, 0);
  if (a.val_fold >= 0) {
    if (a.val_fold >= a.folds) throw UsageError("val_fold must be below folds");
    const trainer::FoldPlan plan = trainer::kfold_split(n, a.folds, a.seed);
    for (std::size_t i = 0; i < n; ++i)
      if (plan.fold_assignments[i] == a.val_fold) {
        g.train_mask[i] = 0;
        g.val_mask[i] = 1;
      }
  }

  trainer::RunOptions opts;
  opts.config = a.mc;
  opts.seed = a.seed;
  opts.source = source_from_args(a);
  opts.manual_measures = a.manual_measures;
  opts.paper_faithful = a.paper_faithful;

  if (opts.source == trainer::GraphSource::prebuilt) {
    g.adjacency = dataio::load_matrix_csv(a.graph);
    if (g.adjacency.rows != n || g.adjacency.cols != n)
      throw DataError("prebuilt adjacency does not match table size");
  } else if (opts.source == trainer::GraphSource::random) {
    g.adjacency = trainer::random_adjacency(n, Rng::derive_seed(a.seed, "random-graph"));
  } else {
    const auto intervals = pswe::resolve_intervals(table);
    const bool restrict_stats = !a.paper_faithful &&
                                opts.source == trainer::GraphSource::pswe &&
                                a.mc.ablation != model::Ablation::noP && a.val_fold >= 0;
    const pswe::PhenotypeTable stats =
        restrict_stats ? pswe::filter_rows(table, g.train_mask) : table;
    const auto scores = trainer::scores_for_run(table, stats, intervals, opts);
    g.adjacency = pswe::build_adjacency(table, scores, intervals);
  }

  const spectral::ChebBasis basis = spectral::basis_for_adjacency(g.adjacency, a.mc.cheb_order);

  fs::create_directories(a.out);
  std::ofstream log(fs::path(a.out) / "log.ndjson", std::ios::trunc);
  if (!log) throw DataError("cannot open training log in " + a.out);

  const trainer::FitResult fitted = trainer::fit(g, basis, a.mc, a.seed, &log);
  model::save_checkpoint(fs::path(a.out) / "checkpoint.bin", fitted.params, a.seed, hash);

  const model::Prediction pred = model::predict(g, basis, fitted.params, a.mc);
  trainer::MetricsReport report;
  report.seed = a.seed;
  report.config_hash = hash;
  trainer::VariantResult row;
  row.variant = "train:" + model::to_string(a.mc.ablation);
  const bool has_val = a.val_fold >= 0;
  row.fold_acc.push_back(
      trainer::accuracy(pred.labels, g.labels, has_val ? g.val_mask : g.train_mask));
  row.mean_acc = row.fold_acc[0];
  if (table.num_classes == 2) {
    std::vector<double> scores;
    std::vector<int> labels;
    const std::vector<char>& mask = has_val ? g.val_mask : g.train_mask;
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      scores.push_back(pred.probs(i, 1));
      labels.push_back(g.labels[i]);
    }
    const bool both = std::count(labels.begin(), labels.end(), 1) > 0 &&
                      std::count(labels.begin(), labels.end(), 0) > 0;
    if (both) {
      row.fold_auc.push_back(trainer::compute_auc(scores, labels));
      row.mean_auc = row.fold_auc[0];
      row.has_auc = true;
    }
  }
  report.variants.push_back(std::move(row));

  write_text(fs::path(a.out) / "report.json", trainer::report_to_json(report));
  json cfg = semantic_config(a);
  cfg["config_hash"] = hash;
  write_text(fs::path(a.out) / "config.json", cfg.dump(2) + "\n");
  std::cout << "final loss " << fitted.history.back().total << ", "
            << (has_val ? "validation" : "training") << " accuracy " << report.variants[0].mean_acc
            << "\nwrote " << a.out << "/log.ndjson, checkpoint.bin, report.json, config.json\n";
  return 0;
}

int cmd_cross_validate(Args& a) {
  const std::string hash = resolve_and_echo(a);
  std::size_t dropped = 0;
  const pswe::PhenotypeTable table = dataio::load_phenotypes(a.phenotypes, a.measures, &dropped);
  const Matrix features = dataio::load_features(a.features);

  trainer::RunOptions opts;
  opts.config = a.mc;
  opts.folds = a.folds;
  opts.seed = a.seed;
  opts.jobs = a.jobs;
  opts.paper_faithful = a.paper_faithful;
  opts.source = source_from_args(a);
  opts.manual_measures = a.manual_measures;
  opts.config_hash = hash;

  Matrix prebuilt;
  if (opts.source == trainer::GraphSource::prebuilt) {
    prebuilt = dataio::load_matrix_csv(a.graph);
    opts.prebuilt_adjacency = &prebuilt;
  }

  trainer::MetricsReport report;
  report.seed = a.seed;
  report.config_hash = hash;
  report.variants.push_back(
      trainer::run_cross_validation(table, features, opts, model::to_string(a.mc.ablation)));

  fs::create_directories(a.out);
  write_text(fs::path(a.out) / "report.json", trainer::report_to_json(report));
  write_text(fs::path(a.out) / "report.csv", trainer::report_to_csv(report));
  json cfg = semantic_config(a);
  cfg["config_hash"] = hash;
  write_text(fs::path(a.out) / "config.json", cfg.dump(2) + "\n");

  const trainer::VariantResult& v = report.variants[0];
  std::cout << v.variant << ": mean accuracy " << v.mean_acc;
  if (v.has_auc) std::cout << ", mean AUC " << v.mean_auc;
  std::cout << " over " << a.folds << " folds\nwrote " << a.out
            << "/report.json, report.csv, config.json\n";
  return 0;
}

int cmd_sweep(Args& a) {
  const std::string hash = resolve_and_echo(a);
  std::size_t dropped = 0;
  const pswe::PhenotypeTable table = dataio::load_phenotypes(a.phenotypes, a.measures, &dropped);
  const Matrix features = dataio::load_features(a.features);

  trainer::RunOptions opts;
  opts.config = a.mc;
  opts.folds = a.folds;
  opts.seed = a.seed;
  opts.jobs = a.jobs;
  opts.paper_faithful = a.paper_faithful;
  opts.manual_measures = a.manual_measures;
  opts.config_hash = hash;
  opts.ridge_reg = a.ridge_reg;

  trainer::MetricsReport report = trainer::run_measure_sweep(table, features, opts);

  fs::create_directories(a.out);
  write_text(fs::path(a.out) / "report.json", trainer::report_to_json(report));
  write_text(fs::path(a.out) / "report.csv", trainer::report_to_csv(report));
  json cfg = semantic_config(a);
  cfg["config_hash"] = hash;
  write_text(fs::path(a.out) / "config.json", cfg.dump(2) + "\n");

  for (const trainer::VariantResult& v : report.variants) {
    std::cout << v.variant << ": mean accuracy " << v.mean_acc;
    if (v.has_auc) std::cout << ", mean AUC " << v.mean_auc;
    std::cout << "\n";
  }
  std::cout << "wrote " << a.out << "/report.json, report.csv, config.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted population graphs from phenotypic measures and the"
               " multi-layer-aggregation graph network trained on them"};
  app.require_subcommand(1);
  Args a;

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic population dataset");
  synth->add_option("--out-prefix", a.out_prefix, "Output path prefix")->required();
  synth->add_option("--n", a.synth.n, "Subjects");
  synth->add_option("--classes", a.synth.classes, "Class count");
  synth->add_option("--informative-quant", a.synth.informative_quant,
                    "Planted quantitative measures");
  synth->add_option("--informative-cat", a.synth.informative_cat,
                    "Planted categorical measures");
  synth->add_option("--noise-quant", a.synth.noise_quant, "Noise quantitative measures");
  synth->add_option("--noise-cat", a.synth.noise_cat, "Noise categorical measures");
  synth->add_option("--feature-dim", a.synth.feature_dim, "Node feature width");
  synth->add_option("--class-separation", a.synth.class_separation,
                    "Gaussian mean gap in feature space");
  synth->add_option("--purity", a.synth.purity, "Categorical class skew in [1/classes, 1]");
  synth->add_option("--seed", a.synth.seed, "Generator seed");
  synth->add_option("--config", a.config_file, "JSON config overriding flags");

  CLI::App* select = app.add_subcommand("select-measures",
                                        "Score and select measures, report weights");
  add_data_flags(select, a, false);
  select->add_option("--out", a.out, "Report JSON path")->required();
  add_run_flags(select, a);

  CLI::App* build = app.add_subcommand("build-graph", "Construct the population graph");
  add_data_flags(build, a, false);
  build->add_option("--out", a.out, "Output path prefix")->required();
  add_graph_flags(build, a);
  build->add_option("--dump-laplacian", a.dump_laplacian,
                    "Also write the normalized Laplacian as CSV");
  add_run_flags(build, a);

  CLI::App* train = app.add_subcommand("train", "Train one model and write a checkpoint");
  add_data_flags(train, a, true);
  train->add_option("--graph", a.graph, "Prebuilt adjacency CSV (skips graph construction)");
  train->add_option("--out", a.out, "Output directory")->required();
  train->add_option("--val-fold", a.val_fold,
                    "Held-out fold for logging/metrics; -1 trains on all rows");
  train->add_option("--folds", a.folds, "Fold count behind --val-fold");
  train->add_flag("--paper-faithful", a.paper_faithful,
                  "Selection statistics from all labels, not training rows only");
  add_graph_flags(train, a);
  add_model_flags(train, a);
  add_run_flags(train, a);

  CLI::App* cv = app.add_subcommand("cross-validate", "K-fold cross-validated metrics");
  add_data_flags(cv, a, true);
  cv->add_option("--graph", a.graph, "Prebuilt adjacency CSV (skips graph construction)");
  cv->add_option("--out", a.out, "Output directory")->required();
  cv->add_option("--folds", a.folds, "Fold count");
  cv->add_option("--jobs", a.jobs, "Concurrent folds");
  cv->add_flag("--paper-faithful", a.paper_faithful,
               "Selection statistics from all labels, not training rows only");
  add_graph_flags(cv, a);
  add_model_flags(cv, a);
  add_run_flags(cv, a);

  CLI::App* sweep = app.add_subcommand("sweep",
                                       "Per-measure, random-graph, and ridge baselines");
  add_data_flags(sweep, a, true);
  sweep->add_option("--out", a.out, "Output directory")->required();
  sweep->add_option("--folds", a.folds, "Fold count");
  sweep->add_option("--jobs", a.jobs, "Concurrent folds");
  sweep->add_flag("--paper-faithful", a.paper_faithful,
                  "Selection statistics from all labels, not training rows only");
  sweep->add_option("--ridge-reg", a.ridge_reg, "Ridge baseline regularization");
  add_model_flags(sweep, a);
  add_run_flags(sweep, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*synth) return cmd_synth(a);
    apply_config_file(a);
    if (*select) return cmd_select_measures(a);
    if (*build) return cmd_build_graph(a);
    if (*train) return cmd_train(a);
    if (*cv) return cmd_cross_validate(a);
    if (*sweep) return cmd_sweep(a);
    throw UsageError("no command selected");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
