#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dlad/dataset.hpp"

namespace dlad {

// Per-client class sampling probabilities; entries >= 0, sum 1 within 1e-12.
struct ClassProbability {
  std::vector<double> p;
  void validate() const;
};

enum class Scheme { Iid, Niid1, Niid2, Niid3 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

struct PartitionPlan {
  Scheme scheme = Scheme::Iid;
  int n_clients = 0;
  std::vector<ClassProbability> client_probs;
};

// Client i (0-based) gets the row for residue i mod 5 of the 5-row cycle:
//   niid1: two consecutive classes at 0.5 each
//   niid2: classes 0..4 plus one unique class in 5..9, each at 1/6
//   niid3: four classes at 0.25 ({0,1,2,3}, {0,4,5,6}, {1,4,7,8},
//          {2,5,7,9}, {3,6,8,9})
// The non-IID rows are defined for exactly 10 classes.
PartitionPlan scheme_probabilities(Scheme scheme, int n_clients,
                                   int num_classes);

// Draws `size` samples with replacement: class by p, then uniform within
// the class. Requires every class with positive probability to be present
// in the client pool.
LabeledDataset sample_client_dataset(const LabeledDataset& client_pool,
                                     const ClassProbability& p,
                                     std::size_t size, std::uint64_t seed);

// Empirical class counts of the pool's hidden labels (audited read).
struct ClassFrequencies {
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;
  std::vector<double> freq() const;
};

ClassFrequencies class_frequencies(const UnlabeledPool& pool);

}  // namespace dlad
