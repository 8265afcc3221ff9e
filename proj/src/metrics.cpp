#include "dlad/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "dlad/error.hpp"

namespace dlad {

namespace {

constexpr const char* kMetricsHeader =
    "run_id,stage,entity,epoch,split,loss,accuracy";
constexpr const char* kSummaryHeader =
    "run_id,entity,median_accuracy_last10,final_loss,insufficient_epochs";

std::string fmt9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRecord>& records) {
  std::ofstream os(path);
  if (!os) throw IoError("metrics: cannot open " + path.string());
  os << kMetricsHeader << '\n';
  for (const MetricsRecord& r : records) {
    os << r.run_id << ',' << r.stage << ',' << r.entity << ',' << r.epoch
       << ',' << r.split << ',' << fmt9(r.loss) << ',' << fmt9(r.accuracy)
       << '\n';
  }
  if (!os) throw IoError("metrics: write failed on " + path.string());
}

std::vector<MetricsRecord> read_metrics_csv(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("metrics: cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kMetricsHeader) {
    throw FormatError("metrics: bad header in " + path.string());
  }
  std::vector<MetricsRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 7) {
      throw FormatError("metrics: line " + std::to_string(lineno) + " has " +
                        std::to_string(f.size()) + " fields");
    }
    MetricsRecord r;
    r.run_id = f[0];
    r.stage = f[1];
    r.entity = f[2];
    r.epoch = std::stoi(f[3]);
    r.split = f[4];
    r.loss = std::stod(f[5]);
    r.accuracy = std::stod(f[6]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<MetricsRecord>& records) {
  struct EntityAgg {
    std::string run_id;
    std::vector<std::pair<int, double>> test_acc;  // (epoch, accuracy)
    double final_loss = 0.0;
    int final_loss_epoch = -1;
    std::size_t order = 0;
  };
  // Keyed by (run_id, entity) so repetitions stay separate.
  std::map<std::string, EntityAgg> agg;
  std::size_t next_order = 0;
  for (const MetricsRecord& r : records) {
    auto [it, inserted] = agg.try_emplace(r.run_id + "\x1f" + r.entity);
    EntityAgg& e = it->second;
    if (inserted) {
      e.order = next_order++;
      e.run_id = r.run_id;
    }
    if (r.split == "test") {
      e.test_acc.push_back({r.epoch, r.accuracy});
    } else if (r.split == "train" && r.epoch >= e.final_loss_epoch) {
      e.final_loss_epoch = r.epoch;
      e.final_loss = r.loss;
    }
  }

  std::vector<const std::pair<const std::string, EntityAgg>*> ordered;
  for (const auto& kv : agg) {
    if (!kv.second.test_acc.empty()) ordered.push_back(&kv);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](auto* a, auto* b) { return a->second.order < b->second.order; });

  std::vector<SummaryRow> rows;
  for (auto* kv : ordered) {
    const EntityAgg& e = kv->second;
    std::vector<std::pair<int, double>> by_epoch = e.test_acc;
    std::stable_sort(by_epoch.begin(), by_epoch.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t take = std::min<std::size_t>(10, by_epoch.size());
    std::vector<double> tail;
    for (std::size_t i = by_epoch.size() - take; i < by_epoch.size(); ++i) {
      tail.push_back(by_epoch[i].second);
    }
    std::sort(tail.begin(), tail.end());
    double median = tail.size() % 2 == 1
                        ? tail[tail.size() / 2]
                        : 0.5 * (tail[tail.size() / 2 - 1] +
                                 tail[tail.size() / 2]);
    SummaryRow row;
    row.run_id = e.run_id;
    row.entity = kv->first.substr(kv->first.find('\x1f') + 1);
    row.median_accuracy = median;
    row.final_loss = e.final_loss;
    row.insufficient_epochs = by_epoch.size() < 10;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("summary: cannot open " + path.string());
  os << kSummaryHeader << '\n';
  for (const SummaryRow& r : rows) {
    os << r.run_id << ',' << r.entity << ',' << fmt9(r.median_accuracy) << ','
       << fmt9(r.final_loss) << ',' << (r.insufficient_epochs ? 1 : 0) << '\n';
  }
  if (!os) throw IoError("summary: write failed on " + path.string());
}

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("summary: cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != kSummaryHeader) {
    throw FormatError("summary: bad header in " + path.string());
  }
  std::vector<SummaryRow> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 5) throw FormatError("summary: malformed row");
    SummaryRow r;
    r.run_id = f[0];
    r.entity = f[1];
    r.median_accuracy = std::stod(f[2]);
    r.final_loss = std::stod(f[3]);
    r.insufficient_epochs = f[4] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dlad
