#pragma once

// Synthetic 50x10 bipartite network with planted block structure: two
// molecule clusters tied to disjoint target blocks, fully observed (within-
// block cells positive, cross-block cells negative), plus cluster-correlated
// structures (linear alkanes vs alkylbenzenes). Both branches carry signal:
// the structures separate the molecule clusters, the star sizes separate the
// target blocks.

#include <string>
#include <vector>

#include "mtilink/bipartite.hpp"
#include "mtilink/smiles.hpp"
#include "mtilink/tsv.hpp"

namespace planted {

inline constexpr int kMolsA = 30;
inline constexpr int kTargetsA = 6;
inline constexpr int kMolsB = 20;
inline constexpr int kTargetsB = 4;

inline std::string molecule_id(int cluster, int i) {
  return (cluster == 0 ? "am" : "bm") + std::to_string(i);
}

inline std::string target_id(int cluster, int i) {
  return (cluster == 0 ? "at" : "bt") + std::to_string(i);
}

inline std::string molecule_smiles(int cluster, int i) {
  if (cluster == 0) return std::string(static_cast<std::size_t>(i) + 1, 'C');
  return std::string(static_cast<std::size_t>(i), 'C') + "c1ccccc1";
}

inline std::vector<mtilink::TsvRow> edge_rows() {
  std::vector<mtilink::TsvRow> rows;
  const auto add = [&rows](const std::string& m, const std::string& t, const char* label) {
    rows.push_back({{m, t, label}, rows.size() + 1});
  };
  for (int i = 0; i < kMolsA; ++i) {
    for (int j = 0; j < kTargetsA; ++j) add(molecule_id(0, i), target_id(0, j), "1");
    for (int j = 0; j < kTargetsB; ++j) add(molecule_id(0, i), target_id(1, j), "0");
  }
  for (int i = 0; i < kMolsB; ++i) {
    for (int j = 0; j < kTargetsB; ++j) add(molecule_id(1, i), target_id(1, j), "1");
    for (int j = 0; j < kTargetsA; ++j) add(molecule_id(1, i), target_id(0, j), "0");
  }
  return rows;
}

inline mtilink::BipartiteNetwork network() {
  return mtilink::BipartiteNetwork::ingest(edge_rows());
}

inline mtilink::MoleculeTable molecules() {
  std::vector<mtilink::TsvRow> rows;
  for (int i = 0; i < kMolsA; ++i) {
    rows.push_back({{molecule_id(0, i), molecule_smiles(0, i)}, rows.size() + 1});
  }
  for (int i = 0; i < kMolsB; ++i) {
    rows.push_back({{molecule_id(1, i), molecule_smiles(1, i)}, rows.size() + 1});
  }
  return mtilink::MoleculeTable::load(rows);
}

}  // namespace planted
