#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtilink/error.hpp"
#include "mtilink/rng.hpp"
#include "mtilink/tsv.hpp"

namespace mtilink {

enum class Side { Molecule, Target };

inline const char* side_name(Side s) { return s == Side::Molecule ? "molecule" : "target"; }

// Observed entry state of a (molecule, target) cell. Missing entries are the
// complement of the stored pairs and are what prediction fills in.
enum class InteractionLabel : int { Inactive = 0, Active = 1, Missing = 2 };

inline InteractionLabel to_interaction_label(int y) {
  return y == 1 ? InteractionLabel::Active : InteractionLabel::Inactive;
}

// One supervision pair. label is 0 (inactive) or 1 (active); unobserved
// entries are never materialized.
struct Edge {
  std::uint32_t m = 0;
  std::uint32_t t = 0;
  int label = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// The observed bipartite interaction network. Molecule/target ids are mapped
// to dense indices in first-seen order. Adjacency indexes positive edges
// only: negative labels are supervision, not topology. Immutable after
// ingestion.
class BipartiteNetwork {
 public:
  static BipartiteNetwork ingest(const std::vector<TsvRow>& rows) {
    BipartiteNetwork net;
    for (const auto& row : rows) {
      if (row.fields.size() != 3) {
        raise(Errc::MalformedRow,
              "line " + std::to_string(row.line_no) + ": expected 3 columns");
      }
      const std::string& mol_id = row.fields[0];
      const std::string& tgt_id = row.fields[1];
      const std::string& label_str = row.fields[2];
      if (mol_id.empty() || tgt_id.empty()) {
        raise(Errc::MalformedRow, "line " + std::to_string(row.line_no) + ": empty id");
      }
      int label;
      if (label_str == "0") {
        label = 0;
      } else if (label_str == "1") {
        label = 1;
      } else {
        raise(Errc::MalformedRow, "line " + std::to_string(row.line_no) + ": label '" +
                                      label_str + "' is not 0 or 1");
      }
      const std::uint32_t m = net.intern(net.molecule_ids_, net.molecule_index_, mol_id);
      const std::uint32_t t = net.intern(net.target_ids_, net.target_index_, tgt_id);
      const std::uint64_t key = pair_key(m, t);
      auto it = net.label_by_pair_.find(key);
      if (it != net.label_by_pair_.end()) {
        if (it->second != label) {
          raise(Errc::ConflictingLabel,
                "pair (" + mol_id + ", " + tgt_id + ") appears with both labels");
        }
        continue;  // identical duplicate
      }
      net.label_by_pair_.emplace(key, label);
      net.edges_.push_back({m, t, label});
    }
    if (net.molecule_ids_.empty() || net.target_ids_.empty()) {
      raise(Errc::MalformedRow, "no data rows");
    }
    net.build_adjacency();
    return net;
  }

  static BipartiteNetwork ingest_file(const std::string& path) {
    return ingest(read_tsv_file(path, 3));
  }

  std::size_t num_molecules() const { return molecule_ids_.size(); }
  std::size_t num_targets() const { return target_ids_.size(); }
  std::size_t num_nodes(Side s) const {
    return s == Side::Molecule ? num_molecules() : num_targets();
  }

  const std::string& molecule_id(std::uint32_t i) const { return molecule_ids_.at(i); }
  const std::string& target_id(std::uint32_t i) const { return target_ids_.at(i); }
  const std::vector<std::string>& molecule_ids() const { return molecule_ids_; }
  const std::vector<std::string>& target_ids() const { return target_ids_; }

  std::optional<std::uint32_t> find_molecule(const std::string& id) const {
    auto it = molecule_index_.find(id);
    if (it == molecule_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::uint32_t> find_target(const std::string& id) const {
    auto it = target_index_.find(id);
    if (it == target_index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<Edge>& edges() const { return edges_; }

  std::size_t num_positive_edges() const { return num_positive_; }

  // Positively-linked opposite-side indices, sorted ascending.
  const std::vector<std::uint32_t>& neighbors(Side side, std::uint32_t index) const {
    check_index(side, index);
    return side == Side::Molecule ? molecule_adj_[index] : target_adj_[index];
  }

  std::optional<int> label_of(std::uint32_t m, std::uint32_t t) const {
    auto it = label_by_pair_.find(pair_key(m, t));
    if (it == label_by_pair_.end()) return std::nullopt;
    return it->second;
  }

  bool has_positive(std::uint32_t m, std::uint32_t t) const {
    auto l = label_of(m, t);
    return l.has_value() && *l == 1;
  }

  // Degree counts positive edges only; zero-degree nodes are included.
  std::map<int, int> degree_histogram(Side side) const {
    std::map<int, int> hist;
    const auto& adj = side == Side::Molecule ? molecule_adj_ : target_adj_;
    for (const auto& nbrs : adj) ++hist[static_cast<int>(nbrs.size())];
    return hist;
  }

  void check_index(Side side, std::uint32_t index) const {
    if (index >= num_nodes(side)) {
      raise(Errc::IndexOutOfRange, std::string(side_name(side)) + " index " +
                                       std::to_string(index) + " out of range [0, " +
                                       std::to_string(num_nodes(side)) + ")");
    }
  }

  // Edge rows in stored order; ingest(to_rows()) reproduces the network.
  std::vector<TsvRow> to_rows() const {
    std::vector<TsvRow> rows;
    rows.reserve(edges_.size());
    for (const Edge& e : edges_) {
      rows.push_back(
          {{molecule_ids_[e.m], target_ids_[e.t], std::to_string(e.label)}, rows.size() + 1});
    }
    return rows;
  }

 private:
  static std::uint64_t pair_key(std::uint32_t m, std::uint32_t t) {
    return (static_cast<std::uint64_t>(m) << 32) | t;
  }

  std::uint32_t intern(std::vector<std::string>& ids,
                       std::unordered_map<std::string, std::uint32_t>& index,
                       const std::string& id) {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    const auto dense = static_cast<std::uint32_t>(ids.size());
    ids.push_back(id);
    index.emplace(id, dense);
    return dense;
  }

  void build_adjacency() {
    molecule_adj_.assign(molecule_ids_.size(), {});
    target_adj_.assign(target_ids_.size(), {});
    num_positive_ = 0;
    for (const Edge& e : edges_) {
      if (e.label != 1) continue;
      molecule_adj_[e.m].push_back(e.t);
      target_adj_[e.t].push_back(e.m);
      ++num_positive_;
    }
    for (auto& v : molecule_adj_) std::sort(v.begin(), v.end());
    for (auto& v : target_adj_) std::sort(v.begin(), v.end());
  }

  std::vector<std::string> molecule_ids_;
  std::vector<std::string> target_ids_;
  std::unordered_map<std::string, std::uint32_t> molecule_index_;
  std::unordered_map<std::string, std::uint32_t> target_index_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, int> label_by_pair_;
  std::vector<std::vector<std::uint32_t>> molecule_adj_;
  std::vector<std::vector<std::uint32_t>> target_adj_;
  std::size_t num_positive_ = 0;
};

struct HoldoutSplit {
  std::vector<Edge> train;
  std::vector<Edge> test;
};

struct Fold {
  std::vector<Edge> train;
  std::vector<Edge> test;
};

// Seed-deterministic shuffle + cut. fraction is the test share.
inline HoldoutSplit holdout_split(std::vector<Edge> pairs, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("holdout fraction must be in (0, 1)");
  }
  const std::size_t n = pairs.size();
  const auto n_test = static_cast<std::size_t>(
      std::min<double>(static_cast<double>(n), fraction * static_cast<double>(n) + 0.5));
  if (n_test == 0 || n_test == n) {
    raise(Errc::TooFewSamples,
          "holdout(" + std::to_string(fraction) + ") on " + std::to_string(n) + " pairs");
  }
  Xoshiro256ss rng(seed, streams::kSplit);
  rng.shuffle(pairs);
  HoldoutSplit out;
  out.test.assign(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(n_test));
  out.train.assign(pairs.begin() + static_cast<std::ptrdiff_t>(n_test), pairs.end());
  return out;
}

// k folds differing in size by at most one; union of tests covers the input.
inline std::vector<Fold> kfold_split(std::vector<Edge> pairs, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold requires k >= 2");
  const std::size_t n = pairs.size();
  if (n < static_cast<std::size_t>(k)) {
    raise(Errc::TooFewSamples, std::to_string(n) + " pairs for " + std::to_string(k) + " folds");
  }
  Xoshiro256ss rng(seed, streams::kSplit);
  rng.shuffle(pairs);
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
      const bool in_test = i >= start && i < start + size;
      (in_test ? folds[f].test : folds[f].train).push_back(pairs[i]);
    }
    start += size;
  }
  return folds;
}

}  // namespace mtilink
