#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dlad/client.hpp"
#include "dlad/dataset.hpp"
#include "dlad/partition.hpp"
#include "dlad/tensor.hpp"

namespace dlad {

// Positive softmax temperature for the confidence weighting.
struct Temperature {
  explicit Temperature(double t);
  double value;
};

// Per-sample classifier outputs, one entry per client, each in [0,1].
using ConfidenceVector = std::vector<double>;

// Point on the N-simplex: entries >= 0, sum 1 within 1e-9.
struct WeightVector {
  std::vector<double> w;
  void validate() const;
};

// The ideal discriminator output p_i / (p_dist + p_i) for a sample whose
// class carries mass p_i under the client and p_dist under the pool.
// Strictly increasing in p_i for fixed p_dist > 0.
double optimal_confidence(double p_i_mass, double p_dist_mass);

// w_i = exp(c_i / T) / sum_j exp(c_j / T), computed with max subtraction so
// temperatures down to 1e-6 cannot overflow.
WeightVector confidence_weights(const ConfidenceVector& c, Temperature t);

// Convex combination of client output rows [N x L] -> length-L probability
// vector.
std::vector<double> aggregate_targets(const WeightVector& weights,
                                      const Tensor& client_outputs);

// Ideal-classifier weights for a pool sample of known class: Eq-style
// confidences from the partition plan and the pool's class frequencies,
// then the temperature softmax.
WeightVector oracle_weights(int hidden_label, const PartitionPlan& plan,
                            const std::vector<double>& pool_freq,
                            Temperature t);

// Uniform 1/N baseline.
WeightVector average_weights(int n_clients);

enum class AggregationMode { Dlad, Average, Oracle };
std::string to_string(AggregationMode m);
AggregationMode aggregation_mode_from_string(const std::string& name);

// Row-stochastic soft targets over the pool, one row per sample.
struct SoftTargetSet {
  Tensor targets;  // [m x L]
  AggregationMode mode = AggregationMode::Average;
  double temperature = 0.0;
};

// Precomputes the aggregated teacher distribution for every pool sample.
// dlad weights come from the trained confidence classifiers; average is the
// uniform baseline; oracle reads the pool's hidden labels (plan and
// pool_freq required). Clients must all emit the same class count.
SoftTargetSet build_soft_targets(const UnlabeledPool& pool,
                                 const std::vector<ClientBundle>& bundles,
                                 AggregationMode mode, Temperature t,
                                 const PartitionPlan* plan = nullptr,
                                 const ClassFrequencies* pool_freq = nullptr);

// Columnar text round trip (header: m L mode T; one row per line).
void save_soft_targets(const std::filesystem::path& path,
                       const SoftTargetSet& targets);
SoftTargetSet load_soft_targets(const std::filesystem::path& path);

}  // namespace dlad
