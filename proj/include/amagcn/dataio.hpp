#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "amagcn/matrix.hpp"
#include "amagcn/pswe.hpp"

namespace amagcn::dataio {

std::vector<pswe::MeasureSpec> load_measure_specs(const std::filesystem::path& path);
void save_measure_specs(const std::filesystem::path& path,
                        const std::vector<pswe::MeasureSpec>& specs);

// Phenotype CSV with header `subject_id,label,<measure>,...`. Rows containing
// any empty cell are dropped (the count lands in rows_dropped when given);
// labels are 0-based integers. Errors name the offending line and column.
pswe::PhenotypeTable load_phenotypes(const std::filesystem::path& csv_path,
                                     const std::filesystem::path& measures_path,
                                     std::size_t* rows_dropped = nullptr);
void save_phenotypes(const std::filesystem::path& path, const pswe::PhenotypeTable& table);

// Feature matrix from dense CSV or the binary container (detected by magic).
// Non-finite entries are rejected with their coordinates.
Matrix load_features(const std::filesystem::path& path);
void save_features_binary(const std::filesystem::path& path, const Matrix& features,
                          std::uint64_t seed, const std::string& config_hash);

Matrix load_matrix_csv(const std::filesystem::path& path);
void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);

// Sparse edge list `i\tj\tweight`, upper triangle, positive weights only.
void save_adjacency_tsv(const std::filesystem::path& path, const Matrix& adjacency);

// Synthetic population with planted structure. Informative categorical
// measures draw the class-preferred token with probability `purity`;
// informative quantitative measures give the last class a far-out two-sided
// distribution the derived interquartile interval cannot cover. Noise
// measures are label-independent. Features are class-mean Gaussian blobs.
struct SynthSpec {
  std::size_t n = 300;
  int classes = 2;
  int informative_quant = 2;
  int informative_cat = 2;
  int noise_quant = 2;
  int noise_cat = 1;
  std::size_t feature_dim = 32;
  double class_separation = 1.2;
  double purity = 0.9;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthData {
  pswe::PhenotypeTable table;
  Matrix features;
  std::vector<std::string> informative_measures;
};

SynthData generate_synthetic(const SynthSpec& spec);

}  // namespace amagcn::dataio
