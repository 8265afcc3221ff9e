#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dlad/aggregate.hpp"
#include "dlad/client.hpp"
#include "dlad/partition.hpp"

namespace dlad {

enum class DatasetKind { Mnist, SynthEasy, SynthHard };
std::string to_string(DatasetKind k);

struct DatasetConfig {
  DatasetKind kind = DatasetKind::SynthEasy;
  // IDX file paths (mnist kind only).
  std::string images, labels, test_images, test_labels;
  std::size_t sample_cap = 0;  // 0 keeps everything
  std::size_t test_sample_cap = 0;
  // Synthetic blob parameters.
  int classes = 10;
  std::size_t dim = 16;
  std::size_t per_class = 500;
  std::size_t test_per_class = 100;
  double spread = -1.0;  // negative -> kind default

  double effective_spread() const;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  Scheme scheme = Scheme::Niid1;
  int n_clients = 5;
  double pool_fraction = 0.8;
  std::size_t client_dataset_size = 0;  // 0 -> half the client pool

  std::vector<std::pair<std::string, double>> client_arch_mix = {
      {"deep", 1.0}};
  std::string global_arch = "deep";
  double temperature = 0.05;

  std::vector<AggregationMode> modes = {AggregationMode::Dlad,
                                        AggregationMode::Average,
                                        AggregationMode::Oracle};
  TrainingHyper client_hyper{30, 64, 1e-3};
  TrainingHyper classifier_hyper{10, 64, 1e-3};
  TrainingHyper global_hyper{50, 64, 1e-3};

  std::uint64_t master_seed = 42;
  std::string output_dir = "out";
  int repetitions = 1;
  std::string run_id;  // empty -> derived from dataset/scheme/seed

  void validate() const;
  std::string effective_run_id() const;
};

// Flat key = value lines grouped by [section] headers; '#' starts a
// comment; keys may also be written top-level via documented aliases.
// Unknown keys, duplicate keys and invariant violations are reported with
// their line number.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin = "<config>");

// Named architectures for clients and the global model.
bool known_arch(const std::string& name);
ModelSpec make_arch(const std::string& name, std::size_t input_dim,
                    std::size_t output_dim, Head head = Head::Softmax);

// "deep:0.5,wide:0.5" -> pairs; bare "deep" means deep:1.
std::vector<std::pair<std::string, double>> parse_arch_mix(
    const std::string& text);

// Largest-remainder apportionment of the mix over n clients, filled in
// mix order: the first share of clients gets the first architecture, etc.
std::vector<std::string> assign_architectures(
    const std::vector<std::pair<std::string, double>>& mix, int n_clients);

}  // namespace dlad
