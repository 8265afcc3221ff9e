#include "dlad/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "dlad/error.hpp"

namespace dlad {

std::string to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::Mnist: return "mnist";
    case DatasetKind::SynthEasy: return "synth-easy";
    case DatasetKind::SynthHard: return "synth-hard";
  }
  return "?";
}

double DatasetConfig::effective_spread() const {
  if (spread >= 0.0) return spread;
  return kind == DatasetKind::SynthHard ? 0.22 : 0.06;
}

// --- architectures ----------------------------------------------------------

namespace {

const std::map<std::string, std::vector<LayerSpec>>& arch_table() {
  static const std::map<std::string, std::vector<LayerSpec>> table = {
      {"linear", {}},
      {"small", {{32, Activation::Relu}}},
      {"wide", {{128, Activation::Relu}}},
      {"deep", {{64, Activation::Relu}, {32, Activation::Relu}}},
  };
  return table;
}

}  // namespace

bool known_arch(const std::string& name) {
  return arch_table().count(name) != 0;
}

ModelSpec make_arch(const std::string& name, std::size_t input_dim,
                    std::size_t output_dim, Head head) {
  auto it = arch_table().find(name);
  if (it == arch_table().end()) {
    throw ValueError("unknown architecture '" + name + "'");
  }
  ModelSpec spec;
  spec.input_dim = input_dim;
  spec.hidden = it->second;
  spec.output_dim = output_dim;
  spec.head = head;
  spec.validate();
  return spec;
}

std::vector<std::pair<std::string, double>> parse_arch_mix(
    const std::string& text) {
  std::vector<std::pair<std::string, double>> mix;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) {
      mix.emplace_back(item, 1.0);
    } else {
      std::string name = item.substr(0, colon);
      double prop = 0.0;
      try {
        prop = std::stod(item.substr(colon + 1));
      } catch (const std::exception&) {
        throw ValueError("arch mix: bad proportion in '" + item + "'");
      }
      mix.emplace_back(name, prop);
    }
  }
  if (mix.empty()) throw ValueError("arch mix: empty");
  return mix;
}

std::vector<std::string> assign_architectures(
    const std::vector<std::pair<std::string, double>>& mix, int n_clients) {
  std::vector<int> counts(mix.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < mix.size(); ++i) {
    double exact = mix[i].second * n_clients;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    remainders.push_back({exact - std::floor(exact), i});
  }
  // Largest fractional remainder first; ties keep mix order.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n_clients; ++k, ++assigned) {
    counts[remainders[k % remainders.size()].second] += 1;
  }
  std::vector<std::string> out;
  out.reserve(n_clients);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    for (int c = 0; c < counts[i]; ++c) out.push_back(mix[i].first);
  }
  out.resize(n_clients);
  return out;
}

// --- validation --------------------------------------------------------------

namespace {

void validate_mix(const std::vector<std::pair<std::string, double>>& mix) {
  double sum = 0.0;
  for (const auto& [name, prop] : mix) {
    if (!known_arch(name)) {
      throw ConfigError("client_arch_mix: unknown architecture '" + name +
                        "'");
    }
    if (!(prop > 0.0)) {
      throw ConfigError("client_arch_mix: proportion for '" + name +
                        "' must be > 0");
    }
    sum += prop;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("client_arch_mix: proportions sum to " +
                      std::to_string(sum) + ", expected 1");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (dataset.kind == DatasetKind::Mnist) {
    if (dataset.images.empty() || dataset.labels.empty() ||
        dataset.test_images.empty() || dataset.test_labels.empty()) {
      throw ConfigError(
          "mnist dataset requires images, labels, test_images and "
          "test_labels paths");
    }
  } else {
    if (dataset.classes < 2) throw ConfigError("dataset.classes must be >= 2");
    if (dataset.dim < 1) throw ConfigError("dataset.dim must be >= 1");
    if (dataset.per_class < 1) {
      throw ConfigError("dataset.per_class must be >= 1");
    }
    if (dataset.test_per_class < 1) {
      throw ConfigError("dataset.test_per_class must be >= 1");
    }
  }
  if (n_clients < 1) throw ConfigError("n_clients must be >= 1");
  if (!(pool_fraction > 0.0 && pool_fraction < 1.0)) {
    throw ConfigError("pool_fraction must be in (0,1)");
  }
  validate_mix(client_arch_mix);
  if (!known_arch(global_arch)) {
    throw ConfigError("global_arch: unknown architecture '" + global_arch +
                      "'");
  }
  if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
  if (modes.empty()) throw ConfigError("modes must not be empty");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      if (modes[i] == modes[j]) throw ConfigError("modes: duplicate mode");
    }
  }
  try {
    client_hyper.validate();
    classifier_hyper.validate();
    global_hyper.validate();
  } catch (const ValueError& e) {
    throw ConfigError(e.what());
  }
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
}

std::string ExperimentConfig::effective_run_id() const {
  if (!run_id.empty()) return run_id;
  return to_string(dataset.kind) + "-" + to_string(scheme) + "-n" +
         std::to_string(n_clients) + "-s" + std::to_string(master_seed);
}

// --- parser ------------------------------------------------------------------

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct RawConfig {
  std::string origin;
  std::map<std::string, RawEntry> entries;

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
  }

  const RawEntry* find(const std::string& key) {
    auto it = entries.find(key);
    if (it == entries.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Aliases let the common knobs live at the top level of a config file.
const std::map<std::string, std::string>& alias_table() {
  static const std::map<std::string, std::string> table = {
      {"dataset", "dataset.kind"},
      {"scheme", "partition.scheme"},
      {"n_clients", "partition.n_clients"},
      {"pool_fraction", "partition.pool_fraction"},
      {"client_dataset_size", "partition.client_dataset_size"},
      {"client_arch_mix", "model.client_arch_mix"},
      {"global_arch", "model.global_arch"},
      {"temperature", "model.temperature"},
      {"modes", "run.modes"},
      {"master_seed", "run.master_seed"},
      {"seed", "run.master_seed"},
      {"output_dir", "run.output_dir"},
      {"repetitions", "run.repetitions"},
      {"run_id", "run.id"},
  };
  return table;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "dataset.kind", "dataset.images", "dataset.labels",
      "dataset.test_images", "dataset.test_labels", "dataset.sample_cap",
      "dataset.test_sample_cap", "dataset.classes", "dataset.dim",
      "dataset.per_class", "dataset.test_per_class", "dataset.spread",
      "partition.scheme", "partition.n_clients", "partition.pool_fraction",
      "partition.client_dataset_size", "model.client_arch_mix",
      "model.global_arch", "model.temperature", "client.epochs",
      "client.batch_size", "client.lr", "classifier.epochs",
      "classifier.batch_size", "classifier.lr", "global.epochs",
      "global.batch_size", "global.lr", "run.modes", "run.master_seed",
      "run.output_dir", "run.repetitions", "run.id",
  };
  return keys;
}

RawConfig tokenize(const std::string& text, const std::string& origin) {
  RawConfig raw;
  raw.origin = origin;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') raw.fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) raw.fail(lineno, "empty section name");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      raw.fail(lineno, "expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) raw.fail(lineno, "empty key");

    std::string canonical;
    if (key.find('.') != std::string::npos) {
      canonical = key;
    } else if (!section.empty()) {
      canonical = section + "." + key;
    } else if (auto it = alias_table().find(key); it != alias_table().end()) {
      canonical = it->second;
    } else {
      canonical = key;
    }
    if (std::find(known_keys().begin(), known_keys().end(), canonical) ==
        known_keys().end()) {
      raw.fail(lineno, "unknown key '" + key + "'");
    }
    if (raw.entries.count(canonical)) {
      raw.fail(lineno, "duplicate key '" + key + "'");
    }
    raw.entries[canonical] = {value, lineno, false};
  }
  return raw;
}

std::uint64_t to_u64(RawConfig& raw, const RawEntry& e, const std::string& key) {
  try {
    std::size_t pos = 0;
    std::uint64_t v = std::stoull(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    raw.fail(e.line, key + ": expected unsigned integer, got '" + e.value + "'");
  }
}

int to_int(RawConfig& raw, const RawEntry& e, const std::string& key) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    raw.fail(e.line, key + ": expected integer, got '" + e.value + "'");
  }
}

double to_double(RawConfig& raw, const RawEntry& e, const std::string& key) {
  try {
    std::size_t pos = 0;
    double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    raw.fail(e.line, key + ": expected number, got '" + e.value + "'");
  }
}

void read_hyper(RawConfig& raw, const std::string& section,
                TrainingHyper& hyper) {
  if (const RawEntry* e = raw.find(section + ".epochs")) {
    hyper.epochs = to_int(raw, *e, section + ".epochs");
  }
  if (const RawEntry* e = raw.find(section + ".batch_size")) {
    hyper.batch_size = to_int(raw, *e, section + ".batch_size");
  }
  if (const RawEntry* e = raw.find(section + ".lr")) {
    hyper.lr = to_double(raw, *e, section + ".lr");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin) {
  RawConfig raw = tokenize(text, origin);
  ExperimentConfig cfg;

  if (const RawEntry* e = raw.find("dataset.kind")) {
    if (e->value == "mnist") cfg.dataset.kind = DatasetKind::Mnist;
    else if (e->value == "synth-easy") cfg.dataset.kind = DatasetKind::SynthEasy;
    else if (e->value == "synth-hard") cfg.dataset.kind = DatasetKind::SynthHard;
    else raw.fail(e->line, "dataset: expected mnist|synth-easy|synth-hard");
  } else {
    throw ConfigError(origin + ": missing required key 'dataset'");
  }
  if (const RawEntry* e = raw.find("dataset.images")) cfg.dataset.images = e->value;
  if (const RawEntry* e = raw.find("dataset.labels")) cfg.dataset.labels = e->value;
  if (const RawEntry* e = raw.find("dataset.test_images")) {
    cfg.dataset.test_images = e->value;
  }
  if (const RawEntry* e = raw.find("dataset.test_labels")) {
    cfg.dataset.test_labels = e->value;
  }
  if (const RawEntry* e = raw.find("dataset.sample_cap")) {
    cfg.dataset.sample_cap = to_u64(raw, *e, "sample_cap");
  }
  if (const RawEntry* e = raw.find("dataset.test_sample_cap")) {
    cfg.dataset.test_sample_cap = to_u64(raw, *e, "test_sample_cap");
  }
  if (const RawEntry* e = raw.find("dataset.classes")) {
    cfg.dataset.classes = to_int(raw, *e, "classes");
  }
  if (const RawEntry* e = raw.find("dataset.dim")) {
    cfg.dataset.dim = to_u64(raw, *e, "dim");
  }
  if (const RawEntry* e = raw.find("dataset.per_class")) {
    cfg.dataset.per_class = to_u64(raw, *e, "per_class");
  }
  if (const RawEntry* e = raw.find("dataset.test_per_class")) {
    cfg.dataset.test_per_class = to_u64(raw, *e, "test_per_class");
  }
  if (const RawEntry* e = raw.find("dataset.spread")) {
    cfg.dataset.spread = to_double(raw, *e, "spread");
  }

  if (const RawEntry* e = raw.find("partition.scheme")) {
    try {
      cfg.scheme = scheme_from_string(e->value);
    } catch (const ValueError& err) {
      raw.fail(e->line, err.what());
    }
  } else {
    throw ConfigError(origin + ": missing required key 'scheme'");
  }
  if (const RawEntry* e = raw.find("partition.n_clients")) {
    cfg.n_clients = to_int(raw, *e, "n_clients");
  } else {
    throw ConfigError(origin + ": missing required key 'n_clients'");
  }
  if (const RawEntry* e = raw.find("partition.pool_fraction")) {
    cfg.pool_fraction = to_double(raw, *e, "pool_fraction");
  }
  if (const RawEntry* e = raw.find("partition.client_dataset_size")) {
    cfg.client_dataset_size = to_u64(raw, *e, "client_dataset_size");
  }

  if (const RawEntry* e = raw.find("model.client_arch_mix")) {
    try {
      cfg.client_arch_mix = parse_arch_mix(e->value);
    } catch (const ValueError& err) {
      raw.fail(e->line, err.what());
    }
  }
  if (const RawEntry* e = raw.find("model.global_arch")) {
    cfg.global_arch = e->value;
  }
  if (const RawEntry* e = raw.find("model.temperature")) {
    cfg.temperature = to_double(raw, *e, "temperature");
    if (!(cfg.temperature > 0.0)) {
      raw.fail(e->line, "temperature must be > 0");
    }
  }

  read_hyper(raw, "client", cfg.client_hyper);
  read_hyper(raw, "classifier", cfg.classifier_hyper);
  read_hyper(raw, "global", cfg.global_hyper);

  if (const RawEntry* e = raw.find("run.modes")) {
    cfg.modes.clear();
    std::stringstream ms(e->value);
    std::string mode;
    while (std::getline(ms, mode, ',')) {
      try {
        cfg.modes.push_back(aggregation_mode_from_string(trim(mode)));
      } catch (const ValueError& err) {
        raw.fail(e->line, err.what());
      }
    }
  }
  if (const RawEntry* e = raw.find("run.master_seed")) {
    cfg.master_seed = to_u64(raw, *e, "master_seed");
  }
  if (const RawEntry* e = raw.find("run.output_dir")) {
    cfg.output_dir = e->value;
  }
  if (const RawEntry* e = raw.find("run.repetitions")) {
    cfg.repetitions = to_int(raw, *e, "repetitions");
  }
  if (const RawEntry* e = raw.find("run.id")) cfg.run_id = e->value;

  // tokenize() rejects unknown keys, so every entry is consumed here; the
  // final validation pass applies the cross-field invariants.
  try {
    cfg.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(origin + ": " + err.what());
  }
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace dlad
