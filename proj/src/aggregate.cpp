#include "dlad/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>

#include "dlad/error.hpp"

namespace dlad {

Temperature::Temperature(double t) : value(t) {
  if (!(t > 0.0)) {
    throw ValueError("Temperature: must be > 0, got " + std::to_string(t));
  }
}

void WeightVector::validate() const {
  double sum = 0.0;
  for (double v : w) {
    if (!(v >= 0.0)) throw ValueError("WeightVector: negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValueError("WeightVector: sums to " + std::to_string(sum));
  }
}

double optimal_confidence(double p_i_mass, double p_dist_mass) {
  if (!(p_i_mass >= 0.0)) {
    throw ValueError("optimal_confidence: negative client mass");
  }
  if (!(p_dist_mass > 0.0)) {
    throw ValueError("optimal_confidence: pool mass must be > 0");
  }
  return p_i_mass / (p_dist_mass + p_i_mass);
}

WeightVector confidence_weights(const ConfidenceVector& c, Temperature t) {
  if (c.empty()) throw ValueError("confidence_weights: empty confidences");
  double mx = *std::max_element(c.begin(), c.end());
  WeightVector out;
  out.w.resize(c.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    out.w[i] = std::exp((c[i] - mx) / t.value);
    sum += out.w[i];
  }
  for (double& v : out.w) v /= sum;
  return out;
}

std::vector<double> aggregate_targets(const WeightVector& weights,
                                      const Tensor& client_outputs) {
  weights.validate();
  std::size_t n = client_outputs.rows(), L = client_outputs.cols();
  if (weights.w.size() != n) {
    throw ShapeError("aggregate_targets: " + std::to_string(weights.w.size()) +
                     " weights for " + std::to_string(n) + " client rows");
  }
  check_row_stochastic(client_outputs, 1e-6, "aggregate_targets inputs");
  std::vector<double> out(L, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double wi = weights.w[i];
    for (std::size_t j = 0; j < L; ++j) {
      out[j] += wi * client_outputs.at(i, j);
    }
  }
  return out;
}

WeightVector oracle_weights(int hidden_label, const PartitionPlan& plan,
                            const std::vector<double>& pool_freq,
                            Temperature t) {
  if (hidden_label < 0 ||
      static_cast<std::size_t>(hidden_label) >= pool_freq.size()) {
    throw ValueError("oracle_weights: label out of range");
  }
  double p_dist = pool_freq[hidden_label];
  if (!(p_dist > 0.0)) {
    throw ValueError("oracle_weights: sample class has zero pool mass");
  }
  ConfidenceVector c(plan.client_probs.size());
  for (std::size_t i = 0; i < plan.client_probs.size(); ++i) {
    c[i] = optimal_confidence(plan.client_probs[i].p[hidden_label], p_dist);
  }
  return confidence_weights(c, t);
}

WeightVector average_weights(int n_clients) {
  if (n_clients < 1) throw ValueError("average_weights: n_clients must be >= 1");
  WeightVector out;
  out.w.assign(n_clients, 1.0 / n_clients);
  return out;
}

std::string to_string(AggregationMode m) {
  switch (m) {
    case AggregationMode::Dlad: return "dlad";
    case AggregationMode::Average: return "average";
    case AggregationMode::Oracle: return "oracle";
  }
  return "?";
}

AggregationMode aggregation_mode_from_string(const std::string& name) {
  if (name == "dlad") return AggregationMode::Dlad;
  if (name == "average") return AggregationMode::Average;
  if (name == "oracle") return AggregationMode::Oracle;
  throw ValueError("unknown aggregation mode '" + name + "'");
}

SoftTargetSet build_soft_targets(const UnlabeledPool& pool,
                                 const std::vector<ClientBundle>& bundles,
                                 AggregationMode mode, Temperature t,
                                 const PartitionPlan* plan,
                                 const ClassFrequencies* pool_freq) {
  if (bundles.empty()) throw ValueError("build_soft_targets: no clients");
  std::size_t n_clients = bundles.size();
  std::size_t m = pool.size();
  std::size_t L = bundles.front().model_spec.output_dim;
  for (const ClientBundle& b : bundles) {
    if (b.model_params.weights.empty()) {
      throw ValueError("build_soft_targets: client " +
                       std::to_string(b.client_id) + " has no trained model");
    }
    if (b.model_spec.output_dim != L) {
      throw ShapeError("build_soft_targets: client " +
                       std::to_string(b.client_id) + " emits " +
                       std::to_string(b.model_spec.output_dim) +
                       " classes, expected " + std::to_string(L));
    }
  }

  // Per-sample weight matrix [m x N] for the requested mode.
  Tensor weights = Tensor::matrix(m, n_clients);
  switch (mode) {
    case AggregationMode::Average: {
      double inv = 1.0 / static_cast<double>(n_clients);
      for (double& v : weights.values) v = inv;
      break;
    }
    case AggregationMode::Dlad: {
      // Classifier outputs per client over the whole pool, then the
      // temperature softmax row by row.
      Tensor conf = Tensor::matrix(m, n_clients);
      for (std::size_t i = 0; i < n_clients; ++i) {
        if (!bundles[i].classifier_spec || !bundles[i].classifier_params) {
          throw ValueError("build_soft_targets: client " +
                           std::to_string(bundles[i].client_id) +
                           " has no trained confidence classifier");
        }
        Tensor ci = batched_forward(*bundles[i].classifier_spec,
                                    *bundles[i].classifier_params,
                                    pool.features());
        for (std::size_t s = 0; s < m; ++s) conf.at(s, i) = ci[s];
      }
      for (std::size_t s = 0; s < m; ++s) {
        ConfidenceVector c(conf.data() + s * n_clients,
                           conf.data() + (s + 1) * n_clients);
        WeightVector wv = confidence_weights(c, t);
        std::copy(wv.w.begin(), wv.w.end(), weights.data() + s * n_clients);
      }
      break;
    }
    case AggregationMode::Oracle: {
      if (plan == nullptr || pool_freq == nullptr) {
        throw ValueError(
            "build_soft_targets: oracle mode needs a partition plan and pool "
            "frequencies");
      }
      if (plan->client_probs.size() != n_clients) {
        throw ShapeError("build_soft_targets: plan has " +
                         std::to_string(plan->client_probs.size()) +
                         " clients, bundles have " +
                         std::to_string(n_clients));
      }
      const std::vector<int>& labels = pool.audited_hidden_labels();
      std::vector<double> freq = pool_freq->freq();
      for (std::size_t s = 0; s < m; ++s) {
        WeightVector wv = oracle_weights(labels[s], *plan, freq, t);
        std::copy(wv.w.begin(), wv.w.end(), weights.data() + s * n_clients);
      }
      break;
    }
  }

  // targets[s] = sum_i weights[s][i] * M_i(x_s), accumulated client by
  // client so only one client's outputs are resident at a time.
  Tensor targets = Tensor::matrix(m, L);
  for (std::size_t i = 0; i < n_clients; ++i) {
    Tensor out_i = batched_forward(bundles[i].model_spec,
                                   bundles[i].model_params, pool.features());
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(m); ++s) {
      double wi = weights.at(s, i);
      double* trow = targets.data() + s * L;
      const double* orow = out_i.data() + s * L;
      for (std::size_t j = 0; j < L; ++j) trow[j] += wi * orow[j];
    }
  }
  check_row_stochastic(targets, 1e-9, "soft targets");

  SoftTargetSet result;
  result.targets = std::move(targets);
  result.mode = mode;
  result.temperature = t.value;
  return result;
}

void save_soft_targets(const std::filesystem::path& path,
                       const SoftTargetSet& targets) {
  std::ofstream os(path);
  if (!os) throw IoError("save_soft_targets: cannot open " + path.string());
  std::size_t m = targets.targets.rows(), L = targets.targets.cols();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", targets.temperature);
  os << m << ' ' << L << ' ' << to_string(targets.mode) << ' ' << buf << '\n';
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = targets.targets.data() + i * L;
    for (std::size_t j = 0; j < L; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      os << (j ? " " : "") << buf;
    }
    os << '\n';
  }
  if (!os) throw IoError("save_soft_targets: write failed");
}

SoftTargetSet load_soft_targets(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("load_soft_targets: cannot open " + path.string());
  std::size_t m = 0, L = 0;
  std::string mode;
  double temperature = 0.0;
  if (!(is >> m >> L >> mode >> temperature)) {
    throw FormatError("soft targets: bad header in " + path.string());
  }
  SoftTargetSet out;
  out.mode = aggregation_mode_from_string(mode);
  out.temperature = temperature;
  out.targets = Tensor::matrix(m, L);
  for (std::size_t i = 0; i < m * L; ++i) {
    if (!(is >> out.targets[i])) {
      throw FormatError("soft targets: truncated in " + path.string());
    }
  }
  check_row_stochastic(out.targets, 1e-9, "loaded soft targets");
  return out;
}

}  // namespace dlad
