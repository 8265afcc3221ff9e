#include "dlad/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <string>

#include "dlad/error.hpp"

namespace dlad {

namespace {

constexpr char kMagic[8] = {'D', 'L', 'A', 'D', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xFF;
  os.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xFF;
  os.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(os, bits);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) {
    throw FormatError("checkpoint: truncated");
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) {
    throw FormatError("checkpoint: truncated");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

double read_f64(std::istream& is) {
  std::uint64_t bits = read_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

void write_tensor(std::ostream& os, const Tensor& t) {
  write_u64(os, t.ndim());
  for (std::size_t d : t.shape) write_u64(os, d);
  for (double v : t.values) write_f64(os, v);
}

Tensor read_tensor(std::istream& is) {
  std::size_t ndim = read_u64(is);
  if (ndim > 2) throw FormatError("checkpoint: unexpected tensor rank");
  std::vector<std::size_t> shape(ndim);
  std::size_t count = 1;
  for (std::size_t& d : shape) {
    d = read_u64(is);
    count *= d;
  }
  std::vector<double> values(count);
  for (double& v : values) v = read_f64(is);
  return Tensor(std::move(shape), std::move(values));
}

constexpr std::uint64_t kFnvOffset = 0xCBF29CE484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001B3ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                     const ModelParams& params) {
  if (!params.matches(spec)) {
    throw ShapeError("save_checkpoint: params do not match spec");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_checkpoint: cannot open " + path.string());
  os.write(kMagic, sizeof(kMagic));
  write_u32(os, kVersion);
  write_u64(os, spec.input_dim);
  write_u64(os, spec.hidden.size());
  for (const LayerSpec& l : spec.hidden) {
    write_u64(os, l.width);
    write_u32(os, l.act == Activation::Relu ? 0 : 1);
  }
  write_u64(os, spec.output_dim);
  write_u32(os, spec.head == Head::Softmax ? 0 : 1);
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    write_tensor(os, params.weights[l]);
    write_tensor(os, params.biases[l]);
  }
  if (!os) throw IoError("save_checkpoint: write failed on " + path.string());
}

std::pair<ModelSpec, ModelParams> load_checkpoint(
    const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("load_checkpoint: cannot open " + path.string());
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) {
    throw FormatError("checkpoint: bad magic in " + path.string());
  }
  std::uint32_t version = read_u32(is);
  if (version != kVersion) {
    throw FormatError("checkpoint: unsupported version " +
                      std::to_string(version));
  }
  ModelSpec spec;
  spec.input_dim = read_u64(is);
  std::size_t n_hidden = read_u64(is);
  for (std::size_t i = 0; i < n_hidden; ++i) {
    LayerSpec l;
    l.width = read_u64(is);
    l.act = read_u32(is) == 0 ? Activation::Relu : Activation::Tanh;
    spec.hidden.push_back(l);
  }
  spec.output_dim = read_u64(is);
  spec.head = read_u32(is) == 0 ? Head::Softmax : Head::Sigmoid;
  spec.validate();
  ModelParams params;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    params.weights.push_back(read_tensor(is));
    params.biases.push_back(read_tensor(is));
  }
  if (!params.matches(spec)) {
    throw FormatError("checkpoint: params inconsistent with spec");
  }
  return {std::move(spec), std::move(params)};
}

std::uint64_t params_hash(const ModelParams& params) {
  std::uint64_t h = kFnvOffset;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    fnv_bytes(h, params.weights[l].values.data(),
              params.weights[l].size() * sizeof(double));
    fnv_bytes(h, params.biases[l].values.data(),
              params.biases[l].size() * sizeof(double));
  }
  return h;
}

std::uint64_t file_hash(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("file_hash: cannot open " + path.string());
  std::uint64_t h = kFnvOffset;
  char buf[65536];
  while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
    fnv_bytes(h, buf, static_cast<std::size_t>(is.gcount()));
    if (is.eof()) break;
  }
  return h;
}

}  // namespace dlad
