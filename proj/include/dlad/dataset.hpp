#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <utility>
#include <vector>

#include "dlad/tensor.hpp"

namespace dlad {

// Features in [0,1] with integer labels in 0..num_classes-1.
struct LabeledDataset {
  Tensor features;  // [n x d]
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }
  void validate() const;
};

// Distillation pool. Labels are kept only so the oracle aggregation arm and
// evaluation-style checks can read them; every read is counted, and runs
// that must not peek (dlad, average) assert the counter stayed at zero.
class UnlabeledPool {
 public:
  UnlabeledPool(Tensor features, std::vector<int> hidden_labels,
                int num_classes);

  const Tensor& features() const { return features_; }
  std::size_t size() const { return hidden_labels_.size(); }
  std::size_t dim() const { return features_.cols(); }
  int num_classes() const { return num_classes_; }

  // Audited access; increments the read counter.
  const std::vector<int>& audited_hidden_labels() const;
  std::uint64_t hidden_label_reads() const { return audit_->load(); }

 private:
  Tensor features_;
  std::vector<int> hidden_labels_;
  int num_classes_;
  // Shared so copies of the pool keep one counter.
  std::shared_ptr<std::atomic<std::uint64_t>> audit_;
};

// IDX files, big-endian: images magic 0x00000803 then count/rows/cols and
// unsigned bytes; labels magic 0x00000801 then count and unsigned bytes.
// Pixels are scaled by 1/255 into [0,1].
LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path);

// Isotropic Gaussian blobs, one fixed center per class, samples clipped to
// [0,1]. Centers depend only on (num_classes, dim), so different seeds
// sample the same distribution.
LabeledDataset synth_blobs(int num_classes, std::size_t dim,
                           std::size_t per_class, double spread,
                           std::uint64_t seed);

// Random permutation split: the first floor(pool_fraction * n) samples
// become the unlabeled pool, the rest the client data pool.
std::pair<UnlabeledPool, LabeledDataset> split_pool(
    const LabeledDataset& dataset, double pool_fraction, std::uint64_t seed);

// Uniform subsample without replacement (cap == 0 or cap >= n keeps all).
LabeledDataset subsample(const LabeledDataset& dataset, std::size_t cap,
                         std::uint64_t seed);

// Columnar text fixture format. Header line: n d L; then one sample per
// line, label followed by d floats. Floats survive a round trip exactly.
void save_columnar(const std::filesystem::path& path,
                   const LabeledDataset& dataset);
LabeledDataset load_columnar(const std::filesystem::path& path);

// Row extraction helpers used across the pipeline.
Tensor gather_rows(const Tensor& src, const std::vector<std::size_t>& idx);

}  // namespace dlad
