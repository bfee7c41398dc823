#pragma once

#include <vector>

#include "amagcn/matrix.hpp"

namespace amagcn {

// Population graph: subjects as nodes, phenotype-derived similarities as edge
// weights, per-node feature rows. Masks select labeled training rows and the
// held-out evaluation rows; they never overlap.
struct PopulationGraph {
  Matrix adjacency;
  Matrix features;
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<char> train_mask;
  std::vector<char> val_mask;

  std::size_t size() const { return labels.size(); }
};

}  // namespace amagcn
