#include "amagcn/dataio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "amagcn/container.hpp"
#include "amagcn/errors.hpp"
#include "amagcn/rng.hpp"

namespace amagcn::dataio {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

int intern_token(pswe::MeasureColumn& col, const std::string& token,
                 std::unordered_map<std::string, int>& lookup) {
  auto it = lookup.find(token);
  if (it != lookup.end()) return it->second;
  const int id = static_cast<int>(col.category_names.size());
  col.category_names.push_back(token);
  lookup.emplace(token, id);
  return id;
}

}  // namespace

std::vector<pswe::MeasureSpec> load_measure_specs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open measure spec: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("measure spec is not valid JSON (" + path.string() + "): " + e.what());
  }
  if (!doc.is_array()) throw DataError("measure spec must be a JSON array: " + path.string());

  std::vector<pswe::MeasureSpec> specs;
  std::unordered_set<std::string> seen;
  for (const json& entry : doc) {
    pswe::MeasureSpec spec;
    spec.name = entry.at("name").get<std::string>();
    if (spec.name.empty()) throw DataError("measure with empty name in " + path.string());
    if (!seen.insert(spec.name).second)
      throw DataError("duplicate measure '" + spec.name + "' in " + path.string());

    const std::string kind = entry.at("kind").get<std::string>();
    if (kind == "quantitative") {
      spec.kind = pswe::MeasureKind::quantitative;
    } else if (kind == "non_quantitative") {
      spec.kind = pswe::MeasureKind::non_quantitative;
    } else {
      throw DataError("measure '" + spec.name + "': unknown kind '" + kind +
                      "' (expected quantitative|non_quantitative)");
    }
    spec.theta = entry.value("theta", 0.5);
    spec.delta = entry.value("delta", 0.2);
    if (spec.theta <= 0.0) throw DataError("measure '" + spec.name + "': theta must be > 0");
    if (spec.delta <= 0.0) throw DataError("measure '" + spec.name + "': delta must be > 0");

    if (entry.contains("interval") && entry["interval"] != json("auto")) {
      if (spec.kind != pswe::MeasureKind::quantitative)
        throw DataError("measure '" + spec.name + "': interval on a non-quantitative measure");
      const json& iv = entry["interval"];
      if (!iv.is_array() || iv.size() != 2)
        throw DataError("measure '" + spec.name + "': interval must be [lo, hi] or \"auto\"");
      pswe::Interval interval{iv[0].get<double>(), iv[1].get<double>()};
      if (!(interval.lo < interval.hi))
        throw DataError("measure '" + spec.name + "': interval needs lo < hi");
      spec.interval = interval;
    }
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw DataError("measure spec lists no measures: " + path.string());
  return specs;
}

void save_measure_specs(const std::filesystem::path& path,
                        const std::vector<pswe::MeasureSpec>& specs) {
  json doc = json::array();
  for (const pswe::MeasureSpec& spec : specs) {
    json entry;
    entry["name"] = spec.name;
    entry["kind"] =
        spec.kind == pswe::MeasureKind::quantitative ? "quantitative" : "non_quantitative";
    entry["theta"] = spec.theta;
    entry["delta"] = spec.delta;
    if (spec.kind == pswe::MeasureKind::quantitative) {
      if (spec.interval) {
        entry["interval"] = {spec.interval->lo, spec.interval->hi};
      } else {
        entry["interval"] = "auto";
      }
    }
    doc.push_back(std::move(entry));
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << doc.dump(2) << "\n";
}

pswe::PhenotypeTable load_phenotypes(const std::filesystem::path& csv_path,
                                     const std::filesystem::path& measures_path,
                                     std::size_t* rows_dropped) {
  pswe::PhenotypeTable table;
  table.measures = load_measure_specs(measures_path);
  table.columns.resize(table.measures.size());

  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open phenotype table: " + csv_path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("phenotype table is empty: " + csv_path.string());
  const std::vector<std::string> header = split_line(strip_cr(line), ',');
  if (header.size() < 2 || header[0] != "subject_id" || header[1] != "label")
    throw DataError("phenotype header must start with subject_id,label: " + csv_path.string());

  // Column position of every spec measure; extra CSV columns are ignored.
  std::unordered_map<std::string, std::size_t> header_pos;
  for (std::size_t i = 2; i < header.size(); ++i) header_pos.emplace(header[i], i);
  std::vector<std::size_t> measure_pos;
  for (const pswe::MeasureSpec& spec : table.measures) {
    auto it = header_pos.find(spec.name);
    if (it == header_pos.end())
      throw DataError("measure '" + spec.name + "' missing from header of " + csv_path.string());
    measure_pos.push_back(it->second);
  }

  std::vector<std::unordered_map<std::string, int>> interners(table.measures.size());
  std::unordered_set<std::string> seen_ids;
  std::size_t dropped = 0;
  std::size_t line_no = 1;
  int max_label = -1;

  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line, ',');
    if (cells.size() != header.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));

    bool has_empty = false;
    for (const std::string& c : cells)
      if (c.empty()) {
        has_empty = true;
        break;
      }
    if (has_empty) {
      ++dropped;
      continue;
    }

    if (!seen_ids.insert(cells[0]).second)
      throw DataError("line " + std::to_string(line_no) + ": duplicate subject_id '" +
                      cells[0] + "'");

    double label_val = 0.0;
    if (!parse_double(cells[1], label_val) || label_val != std::floor(label_val) ||
        label_val < 0)
      throw DataError("line " + std::to_string(line_no) +
                      ": label must be a nonnegative integer, got '" + cells[1] + "'");
    const int label = static_cast<int>(label_val);

    table.subject_ids.push_back(cells[0]);
    table.labels.push_back(label);
    max_label = std::max(max_label, label);

    for (std::size_t m = 0; m < table.measures.size(); ++m) {
      const std::string& cell = cells[measure_pos[m]];
      pswe::MeasureColumn& col = table.columns[m];
      if (table.measures[m].kind == pswe::MeasureKind::quantitative) {
        double v = 0.0;
        if (!parse_double(cell, v))
          throw DataError("line " + std::to_string(line_no) + ", column '" +
                          table.measures[m].name + "': not a number: '" + cell + "'");
        if (!std::isfinite(v))
          throw DataError("line " + std::to_string(line_no) + ", column '" +
                          table.measures[m].name + "': non-finite value");
        col.numeric.push_back(v);
      } else {
        col.category.push_back(intern_token(col, cell, interners[m]));
      }
    }
  }

  if (table.size() == 0)
    throw DataError("no usable rows in " + csv_path.string() +
                    (dropped ? " (" + std::to_string(dropped) + " dropped for empty cells)"
                             : std::string()));
  table.num_classes = max_label + 1;
  if (table.num_classes < 2)
    throw DataError("phenotype table has a single class; need at least two");
  if (rows_dropped) *rows_dropped = dropped;
  return table;
}

void save_phenotypes(const std::filesystem::path& path, const pswe::PhenotypeTable& table) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  out << "subject_id,label";
  for (const pswe::MeasureSpec& spec : table.measures) out << ',' << spec.name;
  out << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.subject_ids[i] << ',' << table.labels[i];
    for (std::size_t m = 0; m < table.measures.size(); ++m) {
      const pswe::MeasureColumn& col = table.columns[m];
      if (table.measures[m].kind == pswe::MeasureKind::quantitative) {
        out << ',' << format_double(col.numeric[i]);
      } else {
        out << ',' << col.category_names[static_cast<std::size_t>(col.category[i])];
      }
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

Matrix load_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line, ',');
    if (cols == 0) cols = cells.size();
    if (cells.size() != cols)
      throw DataError(path.string() + " line " + std::to_string(line_no) + ": expected " +
                      std::to_string(cols) + " columns, got " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      if (!parse_double(cells[j], v))
        throw DataError(path.string() + " line " + std::to_string(line_no) + ", column " +
                        std::to_string(j + 1) + ": not a number: '" + cells[j] + "'");
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw DataError("empty matrix file: " + path.string());
  Matrix m(rows, cols);
  m.data = std::move(values);
  return m;
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j) out << ',';
      out << format_double(r[j]);
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

Matrix load_features(const std::filesystem::path& path) {
  Matrix m;
  if (container::is_container_file(path)) {
    const container::Container c = container::load(path);
    if (c.arrays.empty()) throw DataError("container holds no arrays: " + path.string());
    m = c.arrays.front().data;
  } else {
    m = load_matrix_csv(path);
  }
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (!std::isfinite(m(i, j)))
        throw DataError("non-finite feature at row " + std::to_string(i) + ", column " +
                        std::to_string(j) + " in " + path.string());
  return m;
}

void save_features_binary(const std::filesystem::path& path, const Matrix& features,
                          std::uint64_t seed, const std::string& config_hash) {
  container::Container c;
  c.kind = "features";
  c.seed = seed;
  c.config_hash = config_hash;
  c.arrays.push_back({"features", features});
  container::save(path, c);
}

void save_adjacency_tsv(const std::filesystem::path& path, const Matrix& adjacency) {
  if (adjacency.rows != adjacency.cols) throw DataError("adjacency must be square");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  for (std::size_t i = 0; i < adjacency.rows; ++i)
    for (std::size_t j = i + 1; j < adjacency.cols; ++j)
      if (adjacency(i, j) > 0.0)
        out << i << '\t' << j << '\t' << format_double(adjacency(i, j)) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

void SynthSpec::validate() const {
  if (classes < 2) throw UsageError("synthetic spec needs at least two classes");
  if (n < static_cast<std::size_t>(classes))
    throw UsageError("synthetic spec needs at least one subject per class");
  if (informative_quant < 0 || informative_cat < 0 || noise_quant < 0 || noise_cat < 0)
    throw UsageError("measure counts must be nonnegative");
  if (informative_quant + informative_cat + noise_quant + noise_cat < 1)
    throw UsageError("synthetic spec needs at least one measure");
  if (feature_dim < 1) throw UsageError("feature_dim must be >= 1");
  if (purity < 1.0 / classes || purity > 1.0)
    throw UsageError("purity must lie in [1/classes, 1]");
  if (class_separation < 0.0) throw UsageError("class_separation must be nonnegative");
}

SynthData generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const int P = spec.classes;

  SynthData out;
  pswe::PhenotypeTable& table = out.table;
  table.num_classes = P;

  std::size_t id_width = 1;
  for (std::size_t v = n; v >= 10; v /= 10) ++id_width;
  for (std::size_t i = 0; i < n; ++i) {
    std::string id = std::to_string(i);
    id.insert(0, id_width - std::min(id_width, id.size()), '0');
    table.subject_ids.push_back("s" + id);
    table.labels.push_back(static_cast<int>(i % static_cast<std::size_t>(P)));
  }

  auto add_measure = [&table](const std::string& name, pswe::MeasureKind kind) {
    pswe::MeasureSpec m;
    m.name = name;
    m.kind = kind;
    table.measures.push_back(std::move(m));
    table.columns.emplace_back();
    return &table.columns.back();
  };

  // Informative quantitative: the last class draws from a symmetric two-hump
  // distribution far outside the pooled interquartile interval; every other
  // class stays standard normal inside it.
  for (int q = 0; q < spec.informative_quant; ++q) {
    const std::string name = "iq" + std::to_string(q);
    pswe::MeasureColumn* col = add_measure(name, pswe::MeasureKind::quantitative);
    out.informative_measures.push_back(name);
    Rng rng = Rng::child(spec.seed, "synth-iq", static_cast<std::uint64_t>(q));
    for (std::size_t i = 0; i < n; ++i) {
      if (table.labels[i] == P - 1) {
        const double sign = rng.next_u64() & 1 ? 1.0 : -1.0;
        col->numeric.push_back(rng.normal(sign * 6.0, 1.0));
      } else {
        col->numeric.push_back(rng.normal());
      }
    }
  }

  // Informative categorical: class-preferred token with probability purity,
  // otherwise uniform over the other classes' tokens.
  for (int q = 0; q < spec.informative_cat; ++q) {
    const std::string name = "ic" + std::to_string(q);
    pswe::MeasureColumn* col = add_measure(name, pswe::MeasureKind::non_quantitative);
    out.informative_measures.push_back(name);
    std::unordered_map<std::string, int> interner;
    Rng rng = Rng::child(spec.seed, "synth-ic", static_cast<std::uint64_t>(q));
    for (std::size_t i = 0; i < n; ++i) {
      int token = table.labels[i];
      if (rng.uniform() >= spec.purity) {
        const int shift = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(P - 1)));
        token = (token + shift) % P;
      }
      col->category.push_back(intern_token(*col, "t" + std::to_string(token), interner));
    }
  }

  for (int q = 0; q < spec.noise_quant; ++q) {
    pswe::MeasureColumn* col =
        add_measure("nq" + std::to_string(q), pswe::MeasureKind::quantitative);
    Rng rng = Rng::child(spec.seed, "synth-nq", static_cast<std::uint64_t>(q));
    for (std::size_t i = 0; i < n; ++i) col->numeric.push_back(rng.normal());
  }

  for (int q = 0; q < spec.noise_cat; ++q) {
    pswe::MeasureColumn* col =
        add_measure("nc" + std::to_string(q), pswe::MeasureKind::non_quantitative);
    std::unordered_map<std::string, int> interner;
    Rng rng = Rng::child(spec.seed, "synth-nc", static_cast<std::uint64_t>(q));
    for (std::size_t i = 0; i < n; ++i) {
      const int token = static_cast<int>(rng.uniform_int(3));
      col->category.push_back(intern_token(*col, "u" + std::to_string(token), interner));
    }
  }

  // Features: class-mean Gaussian blobs. Means are scaled by 1/sqrt(m) so the
  // expected squared mean gap between two classes is 2 * class_separation^2
  // regardless of dimension.
  const std::size_t m = spec.feature_dim;
  Matrix means(static_cast<std::size_t>(P), m);
  {
    Rng rng = Rng::child(spec.seed, "synth-class-means");
    const double scale = spec.class_separation / std::sqrt(static_cast<double>(m));
    for (double& v : means.data) v = scale * rng.normal();
  }
  out.features = Matrix(n, m);
  {
    Rng rng = Rng::child(spec.seed, "synth-features");
    for (std::size_t i = 0; i < n; ++i) {
      const double* mu = means.row(static_cast<std::size_t>(table.labels[i]));
      double* row = out.features.row(i);
      for (std::size_t j = 0; j < m; ++j) row[j] = mu[j] + rng.normal();
    }
  }
  return out;
}

}  // namespace amagcn::dataio
