#include "dlad/harness.hpp"

#include <exception>
#include <fstream>
#include <map>
#include <string>
#include <utility>

#include <json.hpp>

#include "dlad/checkpoint.hpp"
#include "dlad/distill.hpp"
#include "dlad/error.hpp"
#include "dlad/rng.hpp"

namespace dlad {

namespace {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

struct StageLog {
  json stages = json::object();
  json artifacts = json::object();
  json info = json::object();

  void mark(const std::string& stage, const std::string& status) {
    stages[stage] = status;
  }
  void artifact(const std::filesystem::path& root,
                const std::filesystem::path& file) {
    artifacts[std::filesystem::relative(file, root).string()] =
        hex64(file_hash(file));
  }
};

LabeledDataset build_train_set(const ExperimentConfig& cfg,
                               std::uint64_t seed) {
  const DatasetConfig& d = cfg.dataset;
  if (d.kind == DatasetKind::Mnist) {
    LabeledDataset base = load_idx(d.images, d.labels);
    return subsample(base, d.sample_cap, derive_seed(seed, "subsample-train", 0));
  }
  return synth_blobs(d.classes, d.dim, d.per_class, d.effective_spread(),
                     derive_seed(seed, "synth-train", 0));
}

LabeledDataset build_test_set(const ExperimentConfig& cfg, std::uint64_t seed) {
  const DatasetConfig& d = cfg.dataset;
  if (d.kind == DatasetKind::Mnist) {
    LabeledDataset test = load_idx(d.test_images, d.test_labels);
    return subsample(test, d.test_sample_cap,
                     derive_seed(seed, "subsample-test", 0));
  }
  return synth_blobs(d.classes, d.dim, d.test_per_class, d.effective_spread(),
                     derive_seed(seed, "synth-test", 0));
}

struct SingleRun {
  std::vector<MetricsRecord> records;
  std::uint64_t hidden_label_reads = 0;
  bool client_params_frozen = false;
};

// One full three-stage pipeline for one (seed, run_id).
SingleRun run_single(const ExperimentConfig& cfg, std::uint64_t seed,
                     const std::string& run_id,
                     const std::filesystem::path& out_dir, StageLog& log) {
  SingleRun result;
  const int n_clients = cfg.n_clients;

  LabeledDataset train_base = build_train_set(cfg, seed);
  LabeledDataset test = build_test_set(cfg, seed);
  const std::size_t input_dim = train_base.dim();
  const int num_classes = train_base.num_classes;

  auto [pool, client_pool] =
      split_pool(train_base, cfg.pool_fraction, derive_seed(seed, "split", 0));
  PartitionPlan plan =
      scheme_probabilities(cfg.scheme, n_clients, num_classes);
  std::size_t client_size = cfg.client_dataset_size > 0
                                ? cfg.client_dataset_size
                                : client_pool.size() / 2;
  std::vector<std::string> archs =
      assign_architectures(cfg.client_arch_mix, n_clients);

  std::filesystem::path ckpt_dir = out_dir / "checkpoints";
  std::filesystem::create_directories(ckpt_dir);

  // --- stage 1: client models, independent and parallel -------------------
  std::vector<ClientBundle> bundles(n_clients);
  std::vector<std::vector<MetricsRecord>> per_client(n_clients);
  std::vector<std::exception_ptr> errors(n_clients);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n_clients; ++i) {
    try {
      LabeledDataset d_i = sample_client_dataset(
          client_pool, plan.client_probs[i], client_size,
          derive_seed(seed, "client-sample", i));
      ModelSpec spec = make_arch(archs[i], input_dim, num_classes);
      std::string entity = "client_" + std::to_string(i);
      auto hook = [&](int epoch, double loss, double acc,
                      const ModelParams& params) {
        per_client[i].push_back(
            {run_id, "client", entity, epoch, "train", loss, acc});
        Evaluation ev = evaluate(spec, params, test);
        per_client[i].push_back(
            {run_id, "client", entity, epoch, "test", ev.loss, ev.accuracy});
      };
      bundles[i] = train_client(d_i, spec, cfg.client_hyper,
                                derive_seed(seed, "client-train", i), i, hook);
      bundles[i].class_probability = plan.client_probs[i];
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (int i = 0; i < n_clients; ++i) {
    if (errors[i]) {
      log.mark("clients", "failed");
      std::rethrow_exception(errors[i]);
    }
  }
  log.mark("clients", "completed");
  for (int i = 0; i < n_clients; ++i) {
    for (auto& r : per_client[i]) result.records.push_back(std::move(r));
    per_client[i].clear();
    std::filesystem::path p =
        ckpt_dir / (run_id + "-client_" + std::to_string(i) + ".model");
    save_checkpoint(p, bundles[i].model_spec, bundles[i].model_params);
    log.artifact(out_dir, p);
  }

  // --- stage 2: confidence classifiers, parallel ---------------------------
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n_clients; ++i) {
    try {
      // Same derived seed as stage 1, so D_i is resampled bit-identically
      // instead of being kept in memory.
      LabeledDataset d_i = sample_client_dataset(
          client_pool, plan.client_probs[i], client_size,
          derive_seed(seed, "client-sample", i));
      std::string entity = "client_" + std::to_string(i);
      auto hook = [&](int epoch, double loss, double acc, const ModelParams&) {
        per_client[i].push_back(
            {run_id, "classifier", entity, epoch, "train", loss, acc});
      };
      bundles[i] = train_confidence_classifier(
          std::move(bundles[i]), d_i.features, pool, cfg.classifier_hyper,
          derive_seed(seed, "classifier-train", i), hook);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (int i = 0; i < n_clients; ++i) {
    if (errors[i]) {
      log.mark("classifiers", "failed");
      std::rethrow_exception(errors[i]);
    }
  }
  log.mark("classifiers", "completed");
  for (int i = 0; i < n_clients; ++i) {
    for (auto& r : per_client[i]) result.records.push_back(std::move(r));
    std::filesystem::path p =
        ckpt_dir / (run_id + "-client_" + std::to_string(i) + ".classifier");
    save_checkpoint(p, *bundles[i].classifier_spec,
                    *bundles[i].classifier_params);
    log.artifact(out_dir, p);
  }

  // --- stage 3: soft targets + global model per mode -----------------------
  std::vector<std::uint64_t> hashes_before(n_clients);
  for (int i = 0; i < n_clients; ++i) {
    hashes_before[i] = params_hash(bundles[i].model_params);
  }
  json hash_json_before = json::array();
  for (std::uint64_t h : hashes_before) hash_json_before.push_back(hex64(h));
  log.info[run_id]["client_params_hash_before_stage3"] = hash_json_before;

  ModelSpec global_spec = make_arch(cfg.global_arch, input_dim, num_classes);
  std::map<AggregationMode, GlobalRunResult> comparison;
  try {
    comparison = run_comparison(pool, bundles, plan, cfg.modes, global_spec,
                                cfg.global_hyper, Temperature(cfg.temperature),
                                test, derive_seed(seed, "global-train", 0));
  } catch (...) {
    log.mark("global", "failed");
    throw;
  }
  for (AggregationMode mode : cfg.modes) {
    const GlobalRunResult& res = comparison.at(mode);
    std::string entity = to_string(mode);
    for (const EpochMetric& em : res.run.epochs) {
      result.records.push_back({run_id, "global", entity, em.epoch, "train",
                                em.train_loss, em.train_agreement});
      result.records.push_back({run_id, "global", entity, em.epoch, "test",
                                em.test_loss, em.test_accuracy});
    }
    std::filesystem::path p =
        ckpt_dir / (run_id + "-global_" + entity + ".model");
    save_checkpoint(p, res.model.spec, res.model.params);
    log.artifact(out_dir, p);
    log.mark("global:" + entity, "completed");
  }

  result.client_params_frozen = true;
  json hash_json_after = json::array();
  for (int i = 0; i < n_clients; ++i) {
    std::uint64_t h = params_hash(bundles[i].model_params);
    hash_json_after.push_back(hex64(h));
    result.client_params_frozen &= (h == hashes_before[i]);
  }
  log.info[run_id]["client_params_hash_after_stage3"] = hash_json_after;

  result.hidden_label_reads = pool.hidden_label_reads();
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::path out_dir(cfg.output_dir);
  std::filesystem::create_directories(out_dir);

  ExperimentResult result;
  result.output_dir = out_dir;
  result.client_params_frozen = true;

  StageLog log;
  json manifest;
  manifest["schema"] = "dlad-run-manifest-1";
  manifest["run_id"] = cfg.effective_run_id();
  manifest["scheme"] = to_string(cfg.scheme);
  manifest["n_clients"] = cfg.n_clients;
  manifest["master_seed"] = cfg.master_seed;
  json mode_names = json::array();
  for (AggregationMode m : cfg.modes) mode_names.push_back(to_string(m));
  manifest["modes"] = mode_names;

  auto flush_manifest = [&](const std::string& status,
                            const std::string& error) {
    manifest["stages"] = log.stages;
    manifest["artifacts"] = log.artifacts;
    manifest["runs"] = log.info;
    manifest["hidden_label_reads"] = result.hidden_label_reads;
    manifest["client_params_frozen"] = result.client_params_frozen;
    manifest["status"] = status;
    if (!error.empty()) manifest["error"] = error;
    std::ofstream os(out_dir / "manifest.json");
    os << manifest.dump(2) << '\n';
  };

  try {
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      std::uint64_t seed = rep == 0
                               ? cfg.master_seed
                               : derive_seed(cfg.master_seed, "rep", rep);
      std::string run_id = cfg.effective_run_id();
      if (cfg.repetitions > 1) run_id += "-r" + std::to_string(rep);
      SingleRun single = run_single(cfg, seed, run_id, out_dir, log);
      for (auto& r : single.records) result.records.push_back(std::move(r));
      result.hidden_label_reads += single.hidden_label_reads;
      result.client_params_frozen &= single.client_params_frozen;
    }
  } catch (const std::exception& e) {
    flush_manifest("failed", e.what());
    throw;
  }

  std::filesystem::path metrics_path = out_dir / "metrics.csv";
  write_metrics_csv(metrics_path, result.records);
  log.artifact(out_dir, metrics_path);

  // Summaries are recomputed from the written CSV so the two files agree to
  // the byte even after the 9-digit float formatting.
  result.summary = summarize(read_metrics_csv(metrics_path));
  std::filesystem::path summary_path = out_dir / "summary.csv";
  write_summary_csv(summary_path, result.summary);
  log.artifact(out_dir, summary_path);

  flush_manifest("ok", "");
  return result;
}

}  // namespace dlad
