#include "dlad/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "dlad/error.hpp"
#include "dlad/rng.hpp"

namespace dlad {

void LabeledDataset::validate() const {
  if (features.ndim() != 2) throw ShapeError("dataset features must be 2-d");
  if (features.rows() != labels.size()) {
    throw DataError("dataset: " + std::to_string(features.rows()) +
                    " feature rows vs " + std::to_string(labels.size()) +
                    " labels");
  }
  if (num_classes <= 0) throw DataError("dataset: num_classes must be > 0");
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw DataError("dataset: label " + std::to_string(y) +
                      " outside 0.." + std::to_string(num_classes - 1));
    }
  }
}

UnlabeledPool::UnlabeledPool(Tensor features, std::vector<int> hidden_labels,
                             int num_classes)
    : features_(std::move(features)),
      hidden_labels_(std::move(hidden_labels)),
      num_classes_(num_classes),
      audit_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
  if (features_.rows() != hidden_labels_.size()) {
    throw DataError("pool: feature/label count mismatch");
  }
}

const std::vector<int>& UnlabeledPool::audited_hidden_labels() const {
  audit_->fetch_add(1);
  return hidden_labels_;
}

// --- IDX -------------------------------------------------------------------

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_be_u32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw FormatError("idx: truncated header in " + what);
  }
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

LabeledDataset load_idx(const std::filesystem::path& images_path,
                        const std::filesystem::path& labels_path) {
  std::ifstream imgs(images_path, std::ios::binary);
  if (!imgs) throw IoError("idx: cannot open " + images_path.string());
  std::ifstream labs(labels_path, std::ios::binary);
  if (!labs) throw IoError("idx: cannot open " + labels_path.string());

  std::uint32_t magic = read_be_u32(imgs, images_path.string());
  if (magic != kImagesMagic) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "0x%08X", magic);
    throw FormatError("idx: bad images magic " + std::string(buf) + " in " +
                      images_path.string());
  }
  std::uint32_t n_images = read_be_u32(imgs, images_path.string());
  std::uint32_t rows = read_be_u32(imgs, images_path.string());
  std::uint32_t cols = read_be_u32(imgs, images_path.string());

  magic = read_be_u32(labs, labels_path.string());
  if (magic != kLabelsMagic) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "0x%08X", magic);
    throw FormatError("idx: bad labels magic " + std::string(buf) + " in " +
                      labels_path.string());
  }
  std::uint32_t n_labels = read_be_u32(labs, labels_path.string());
  if (n_images != n_labels) {
    throw DataError("idx: " + std::to_string(n_images) + " images vs " +
                    std::to_string(n_labels) + " labels");
  }

  std::size_t d = std::size_t(rows) * cols;
  std::vector<unsigned char> pixel_buf(d);
  Tensor features = Tensor::matrix(n_images, d);
  for (std::size_t i = 0; i < n_images; ++i) {
    if (!imgs.read(reinterpret_cast<char*>(pixel_buf.data()), d)) {
      throw FormatError("idx: truncated image data in " +
                        images_path.string());
    }
    double* row = features.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) row[j] = pixel_buf[j] / 255.0;
  }

  std::vector<unsigned char> label_buf(n_labels);
  if (!labs.read(reinterpret_cast<char*>(label_buf.data()), n_labels)) {
    throw FormatError("idx: truncated label data in " + labels_path.string());
  }
  LabeledDataset out;
  out.features = std::move(features);
  out.labels.reserve(n_labels);
  for (unsigned char y : label_buf) {
    if (y > 9) {
      throw DataError("idx: label " + std::to_string(int(y)) +
                      " outside 0..9 in " + labels_path.string());
    }
    out.labels.push_back(int(y));
  }
  out.num_classes = 10;
  out.validate();
  return out;
}

// --- synthetic blobs --------------------------------------------------------

namespace {

// Fixed per-(class, coordinate) center, independent of the sampling seed.
// Coordinate c of class c is pushed high so classes stay distinguishable
// whenever dim >= num_classes; the rest is a hashed value in [0.25, 0.75].
double blob_center(int cls, std::size_t coord) {
  if (coord == static_cast<std::size_t>(cls)) return 0.85;
  std::uint64_t h = mix64(0x5B1CEB10B5ULL ^ (std::uint64_t(cls) << 32) ^
                          std::uint64_t(coord));
  double u = (h >> 11) * 0x1.0p-53;
  return 0.25 + 0.5 * u;
}

}  // namespace

LabeledDataset synth_blobs(int num_classes, std::size_t dim,
                           std::size_t per_class, double spread,
                           std::uint64_t seed) {
  if (num_classes < 2) throw ValueError("synth_blobs: need at least 2 classes");
  if (per_class < 1) throw ValueError("synth_blobs: per_class must be >= 1");
  if (dim < 1) throw ValueError("synth_blobs: dim must be >= 1");

  Rng rng(seed);
  std::size_t n = std::size_t(num_classes) * per_class;
  LabeledDataset out;
  out.features = Tensor::matrix(n, dim);
  out.labels.reserve(n);
  out.num_classes = num_classes;
  std::size_t row = 0;
  for (int c = 0; c < num_classes; ++c) {
    for (std::size_t s = 0; s < per_class; ++s, ++row) {
      double* f = out.features.data() + row * dim;
      for (std::size_t k = 0; k < dim; ++k) {
        double v = blob_center(c, k) + spread * rng.next_normal();
        f[k] = std::clamp(v, 0.0, 1.0);
      }
      out.labels.push_back(c);
    }
  }
  out.validate();
  return out;
}

// --- split / subsample ------------------------------------------------------

Tensor gather_rows(const Tensor& src, const std::vector<std::size_t>& idx) {
  std::size_t d = src.cols();
  Tensor out = Tensor::matrix(idx.size(), d);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double* from = src.data() + idx[i] * d;
    std::copy(from, from + d, out.data() + i * d);
  }
  return out;
}

std::pair<UnlabeledPool, LabeledDataset> split_pool(
    const LabeledDataset& dataset, double pool_fraction, std::uint64_t seed) {
  if (!(pool_fraction > 0.0 && pool_fraction < 1.0)) {
    throw ValueError("split_pool: pool_fraction must be in (0,1)");
  }
  std::size_t n = dataset.size();
  std::size_t n_pool =
      static_cast<std::size_t>(pool_fraction * static_cast<double>(n));
  if (n_pool == 0 || n_pool == n) {
    throw ValueError("split_pool: split leaves one side empty (n=" +
                     std::to_string(n) + ", fraction=" +
                     std::to_string(pool_fraction) + ")");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm);

  std::vector<std::size_t> pool_idx(perm.begin(), perm.begin() + n_pool);
  std::vector<std::size_t> client_idx(perm.begin() + n_pool, perm.end());

  std::vector<int> pool_labels(n_pool);
  for (std::size_t i = 0; i < n_pool; ++i) {
    pool_labels[i] = dataset.labels[pool_idx[i]];
  }
  UnlabeledPool pool(gather_rows(dataset.features, pool_idx),
                     std::move(pool_labels), dataset.num_classes);

  LabeledDataset client_pool;
  client_pool.features = gather_rows(dataset.features, client_idx);
  client_pool.labels.reserve(client_idx.size());
  for (std::size_t i : client_idx) client_pool.labels.push_back(dataset.labels[i]);
  client_pool.num_classes = dataset.num_classes;
  return {std::move(pool), std::move(client_pool)};
}

LabeledDataset subsample(const LabeledDataset& dataset, std::size_t cap,
                         std::uint64_t seed) {
  std::size_t n = dataset.size();
  if (cap == 0 || cap >= n) return dataset;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm);
  perm.resize(cap);
  LabeledDataset out;
  out.features = gather_rows(dataset.features, perm);
  out.labels.reserve(cap);
  for (std::size_t i : perm) out.labels.push_back(dataset.labels[i]);
  out.num_classes = dataset.num_classes;
  return out;
}

// --- columnar text ----------------------------------------------------------

void save_columnar(const std::filesystem::path& path,
                   const LabeledDataset& dataset) {
  std::ofstream os(path);
  if (!os) throw IoError("save_columnar: cannot open " + path.string());
  std::size_t n = dataset.size(), d = dataset.dim();
  os << n << ' ' << d << ' ' << dataset.num_classes << '\n';
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    os << dataset.labels[i];
    const double* row = dataset.features.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      os << ' ' << buf;
    }
    os << '\n';
  }
  if (!os) throw IoError("save_columnar: write failed on " + path.string());
}

LabeledDataset load_columnar(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("load_columnar: cannot open " + path.string());
  std::size_t n = 0, d = 0;
  int num_classes = 0;
  if (!(is >> n >> d >> num_classes)) {
    throw FormatError("columnar: bad header in " + path.string());
  }
  LabeledDataset out;
  out.features = Tensor::matrix(n, d);
  out.labels.resize(n);
  out.num_classes = num_classes;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(is >> out.labels[i])) {
      throw FormatError("columnar: truncated at sample " + std::to_string(i));
    }
    double* row = out.features.data() + i * d;
    for (std::size_t j = 0; j < d; ++j) {
      if (!(is >> row[j])) {
        throw FormatError("columnar: truncated at sample " +
                          std::to_string(i));
      }
    }
  }
  out.validate();
  return out;
}

}  // namespace dlad
