#include "dlad/partition.hpp"

#include <cmath>
#include <numeric>

#include "dlad/error.hpp"
#include "dlad/rng.hpp"

namespace dlad {

void ClassProbability::validate() const {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ValueError("ClassProbability: negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValueError("ClassProbability: sums to " + std::to_string(sum));
  }
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Iid: return "iid";
    case Scheme::Niid1: return "niid1";
    case Scheme::Niid2: return "niid2";
    case Scheme::Niid3: return "niid3";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "iid") return Scheme::Iid;
  if (name == "niid1") return Scheme::Niid1;
  if (name == "niid2") return Scheme::Niid2;
  if (name == "niid3") return Scheme::Niid3;
  throw ValueError("unknown scheme '" + name + "'");
}

namespace {

ClassProbability scheme_row(Scheme scheme, int residue, int num_classes) {
  ClassProbability cp;
  cp.p.assign(num_classes, 0.0);
  switch (scheme) {
    case Scheme::Iid:
      for (double& v : cp.p) v = 1.0 / num_classes;
      break;
    case Scheme::Niid1:
      cp.p[2 * residue] = 0.5;
      cp.p[2 * residue + 1] = 0.5;
      break;
    case Scheme::Niid2:
      for (int c = 0; c < 5; ++c) cp.p[c] = 1.0 / 6.0;
      cp.p[5 + residue] = 1.0 / 6.0;
      break;
    case Scheme::Niid3: {
      static constexpr int kRows[5][4] = {
          {0, 1, 2, 3}, {0, 4, 5, 6}, {1, 4, 7, 8}, {2, 5, 7, 9}, {3, 6, 8, 9}};
      for (int c : kRows[residue]) cp.p[c] = 0.25;
      break;
    }
  }
  return cp;
}

}  // namespace

PartitionPlan scheme_probabilities(Scheme scheme, int n_clients,
                                   int num_classes) {
  if (n_clients < 1) throw ValueError("scheme_probabilities: n_clients >= 1");
  if (scheme != Scheme::Iid && num_classes != 10) {
    throw ValueError("scheme_probabilities: " + to_string(scheme) +
                     " is defined for 10 classes, got " +
                     std::to_string(num_classes));
  }
  if (num_classes < 1) {
    throw ValueError("scheme_probabilities: num_classes >= 1");
  }
  PartitionPlan plan;
  plan.scheme = scheme;
  plan.n_clients = n_clients;
  plan.client_probs.reserve(n_clients);
  for (int i = 0; i < n_clients; ++i) {
    ClassProbability cp = scheme_row(scheme, i % 5, num_classes);
    cp.validate();
    plan.client_probs.push_back(std::move(cp));
  }
  return plan;
}

LabeledDataset sample_client_dataset(const LabeledDataset& client_pool,
                                     const ClassProbability& p,
                                     std::size_t size, std::uint64_t seed) {
  p.validate();
  client_pool.validate();
  if (p.p.size() != static_cast<std::size_t>(client_pool.num_classes)) {
    throw ShapeError("sample_client_dataset: probability length " +
                     std::to_string(p.p.size()) + " vs " +
                     std::to_string(client_pool.num_classes) + " classes");
  }

  std::vector<std::vector<std::size_t>> by_class(client_pool.num_classes);
  for (std::size_t i = 0; i < client_pool.size(); ++i) {
    by_class[client_pool.labels[i]].push_back(i);
  }
  for (std::size_t c = 0; c < p.p.size(); ++c) {
    if (p.p[c] > 0.0 && by_class[c].empty()) {
      throw DataError("sample_client_dataset: class " + std::to_string(c) +
                      " required but absent from client pool");
    }
  }

  std::vector<double> cdf(p.p.size());
  std::partial_sum(p.p.begin(), p.p.end(), cdf.begin());

  Rng rng(seed);
  std::vector<std::size_t> chosen;
  chosen.reserve(size);
  for (std::size_t s = 0; s < size; ++s) {
    double u = rng.next_double();
    std::size_t c = 0;
    while (c + 1 < cdf.size() && u >= cdf[c]) ++c;
    // Guard against u landing beyond the (rounded) final cumulative value.
    while (p.p[c] == 0.0) --c;
    const auto& members = by_class[c];
    chosen.push_back(members[rng.next_below(members.size())]);
  }

  LabeledDataset out;
  out.features = gather_rows(client_pool.features, chosen);
  out.labels.reserve(size);
  for (std::size_t i : chosen) out.labels.push_back(client_pool.labels[i]);
  out.num_classes = client_pool.num_classes;
  return out;
}

std::vector<double> ClassFrequencies::freq() const {
  std::vector<double> f(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    f[c] = static_cast<double>(counts[c]) / static_cast<double>(total);
  }
  return f;
}

ClassFrequencies class_frequencies(const UnlabeledPool& pool) {
  ClassFrequencies cf;
  cf.counts.assign(pool.num_classes(), 0);
  const std::vector<int>& labels = pool.audited_hidden_labels();
  for (int y : labels) cf.counts[y] += 1;
  cf.total = static_cast<std::int64_t>(labels.size());
  return cf;
}

}  // namespace dlad
