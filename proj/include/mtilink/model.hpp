#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mtilink/error.hpp"
#include "mtilink/rng.hpp"
#include "mtilink/smiles.hpp"
#include "mtilink/subgraph.hpp"
#include "mtilink/tensor.hpp"

namespace mtilink {

// Embedding vocabulary sizes. Attribute ids outside these ranges are
// UnknownAttributeValue at embedding time.
namespace vocab {
inline constexpr int kElement = 119;  // atomic number, 0..118
inline constexpr int kDegree = 9;     // heavy-atom degree 0..8
inline constexpr int kCharge = 9;     // formal charge -4..+4, stored shifted
inline constexpr int kChargeOffset = 4;
inline constexpr int kChirality = 3;
inline constexpr int kHydrogens = 9;  // 0..8
inline constexpr int kHybridization = 4;
inline constexpr int kAromatic = 2;
inline constexpr int kRoles = kNumNodeRoles;
inline constexpr int kBonds = kNumBondTypes;
inline constexpr int kMoleculeAttrs = 7;

inline const std::vector<int>& molecule_table_rows() {
  static const std::vector<int> rows = {kElement, kDegree,    kCharge,       kChirality,
                                        kHydrogens, kHybridization, kAromatic};
  return rows;
}
}  // namespace vocab

struct ModelConfig {
  int K = 5;             // GNN layers per branch
  int d = 64;            // embedding / layer width
  int head_hidden1 = 128;
  int head_hidden2 = 32;
  bool bond_embedding = true;  // add bond-type rows to molecule messages

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// A graph lowered to flat arrays the tensor core can consume: one id vector
// per attribute table, plus directed message edges (src -> dst; undirected
// input edges appear in both directions).
struct GraphEncoding {
  std::size_t num_nodes = 0;
  std::vector<std::vector<int>> attr_ids;
  std::vector<int> src;
  std::vector<int> dst;
  std::vector<int> bond_ids;  // aligned with src/dst; empty for the network branch
};

inline GraphEncoding encode_pair_graph(const PairedSubgraph& pg) {
  GraphEncoding enc;
  enc.num_nodes = pg.num_nodes();
  enc.attr_ids.resize(1);
  enc.attr_ids[0].reserve(enc.num_nodes);
  for (NodeRole role : pg.node_roles()) enc.attr_ids[0].push_back(static_cast<int>(role));
  for (const auto& [a, b] : pg.local_edges()) {
    enc.src.push_back(static_cast<int>(a));
    enc.dst.push_back(static_cast<int>(b));
    enc.src.push_back(static_cast<int>(b));
    enc.dst.push_back(static_cast<int>(a));
  }
  return enc;
}

inline GraphEncoding encode_molecule(const MolecularGraph& g) {
  GraphEncoding enc;
  enc.num_nodes = g.num_atoms();
  enc.attr_ids.assign(vocab::kMoleculeAttrs, {});
  for (const AtomAttr& a : g.atoms) {
    const auto f = a.features();
    enc.attr_ids[0].push_back(f[0]);
    enc.attr_ids[1].push_back(f[1]);
    enc.attr_ids[2].push_back(f[2] + vocab::kChargeOffset);
    enc.attr_ids[3].push_back(f[3]);
    enc.attr_ids[4].push_back(f[4]);
    enc.attr_ids[5].push_back(f[5]);
    enc.attr_ids[6].push_back(f[6]);
  }
  for (const Bond& b : g.bonds) {
    enc.src.push_back(static_cast<int>(b.i));
    enc.dst.push_back(static_cast<int>(b.j));
    enc.bond_ids.push_back(static_cast<int>(b.order));
    enc.src.push_back(static_cast<int>(b.j));
    enc.dst.push_back(static_cast<int>(b.i));
    enc.bond_ids.push_back(static_cast<int>(b.order));
  }
  return enc;
}

// One GIN-style layer: phi_k(concat(h_v, agg_v)), a 2-layer MLP with a
// rectifier between.
struct LayerParams {
  Tensor W1, b1, W2, b2;
};

// One branch of the pseudo-siamese pair. The two branches are structurally
// identical but never share weights.
struct BranchParams {
  std::vector<Tensor> tables;       // one embedding table per attribute
  Tensor bond_table;                // molecule branch only
  std::vector<LayerParams> layers;  // K of them
};

struct HeadParams {
  Tensor W1, b1, W2, b2, W3, b3;
};

struct ModelParams {
  ModelConfig config;
  BranchParams network;
  BranchParams molecule;
  HeadParams head;
};

namespace detail {

inline Tensor glorot(std::size_t fan_in, std::size_t fan_out, std::size_t rows,
                     std::size_t cols, Xoshiro256ss& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t = Tensor::zeros({rows, cols});
  for (double& v : t.data) v = (rng.uniform() * 2.0 - 1.0) * a;
  return t;
}

inline LayerParams init_layer(int d, Xoshiro256ss& rng) {
  LayerParams layer;
  const auto dd = static_cast<std::size_t>(d);
  layer.W1 = glorot(2 * dd, dd, 2 * dd, dd, rng);
  layer.b1 = Tensor::zeros({dd});
  layer.W2 = glorot(dd, dd, dd, dd, rng);
  layer.b2 = Tensor::zeros({dd});
  return layer;
}

inline BranchParams init_branch(const std::vector<int>& table_rows, bool with_bonds,
                                const ModelConfig& config, std::uint64_t seed,
                                std::uint64_t tag) {
  Xoshiro256ss rng(seed, tag);
  BranchParams branch;
  const auto d = static_cast<std::size_t>(config.d);
  for (int rows : table_rows) {
    branch.tables.push_back(glorot(static_cast<std::size_t>(rows), d,
                                   static_cast<std::size_t>(rows), d, rng));
  }
  if (with_bonds) {
    branch.bond_table = glorot(vocab::kBonds, d, vocab::kBonds, d, rng);
  }
  for (int k = 0; k < config.K; ++k) branch.layers.push_back(init_layer(config.d, rng));
  return branch;
}

}  // namespace detail

// Glorot-uniform weights, zero biases; the two branches draw from
// independent streams of the same seed (pseudo-siamese: no sharing).
inline ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  if (config.K < 1 || config.d < 1) {
    raise(Errc::ShapeMismatch, "model needs K >= 1 and d >= 1");
  }
  ModelParams params;
  params.config = config;
  params.network = detail::init_branch({vocab::kRoles}, false, config, seed,
                                       streams::kInitNetworkBranch);
  params.molecule = detail::init_branch(vocab::molecule_table_rows(),
                                        config.bond_embedding, config, seed,
                                        streams::kInitMoleculeBranch);
  Xoshiro256ss rng(seed, streams::kInitHead);
  const auto in = static_cast<std::size_t>(2 * config.K * config.d);
  const auto h1 = static_cast<std::size_t>(config.head_hidden1);
  const auto h2 = static_cast<std::size_t>(config.head_hidden2);
  params.head.W1 = detail::glorot(in, h1, in, h1, rng);
  params.head.b1 = Tensor::zeros({h1});
  params.head.W2 = detail::glorot(h1, h2, h1, h2, rng);
  params.head.b2 = Tensor::zeros({h2});
  params.head.W3 = detail::glorot(h2, 1, h2, 1, rng);
  params.head.b3 = Tensor::zeros({1});
  return params;
}

// Fixed parameter enumeration order: the contract for the optimizer state,
// checkpoints and gradient reports.
inline std::vector<NamedParam> param_list(ModelParams& params) {
  std::vector<NamedParam> out;
  auto branch = [&out](const std::string& prefix, BranchParams& b) {
    for (std::size_t i = 0; i < b.tables.size(); ++i) {
      out.push_back({prefix + ".table" + std::to_string(i), &b.tables[i]});
    }
    if (b.bond_table.rank() == 2) out.push_back({prefix + ".bond_table", &b.bond_table});
    for (std::size_t k = 0; k < b.layers.size(); ++k) {
      const std::string lp = prefix + ".layer" + std::to_string(k + 1);
      out.push_back({lp + ".W1", &b.layers[k].W1});
      out.push_back({lp + ".b1", &b.layers[k].b1});
      out.push_back({lp + ".W2", &b.layers[k].W2});
      out.push_back({lp + ".b2", &b.layers[k].b2});
    }
  };
  branch("network", params.network);
  branch("molecule", params.molecule);
  out.push_back({"head.W1", &params.head.W1});
  out.push_back({"head.b1", &params.head.b1});
  out.push_back({"head.W2", &params.head.W2});
  out.push_back({"head.b2", &params.head.b2});
  out.push_back({"head.W3", &params.head.W3});
  out.push_back({"head.b3", &params.head.b3});
  return out;
}

namespace detail {

inline void check_attr_ids(const GraphEncoding& g, const BranchParams& branch) {
  if (g.attr_ids.size() != branch.tables.size()) {
    raise(Errc::ShapeMismatch, "graph has " + std::to_string(g.attr_ids.size()) +
                                   " attributes, branch has " +
                                   std::to_string(branch.tables.size()) + " tables");
  }
  for (std::size_t a = 0; a < g.attr_ids.size(); ++a) {
    const auto rows = static_cast<int>(branch.tables[a].shape[0]);
    for (int id : g.attr_ids[a]) {
      if (id < 0 || id >= rows) {
        raise(Errc::UnknownAttributeValue, "attribute " + std::to_string(a) + " id " +
                                               std::to_string(id) + " outside table of " +
                                               std::to_string(rows) + " rows");
      }
    }
  }
}

}  // namespace detail

// f_v: the network branch looks up the role row; the molecule branch sums
// its 7 per-attribute rows, learning the attribute combination.
inline Tape::Ref embed_nodes(Tape& tape, const GraphEncoding& g, const BranchParams& branch) {
  detail::check_attr_ids(g, branch);
  Tape::Ref features = tape.embedding_lookup(tape.parameter(branch.tables[0]), g.attr_ids[0]);
  for (std::size_t a = 1; a < branch.tables.size(); ++a) {
    features = tape.add(features,
                        tape.embedding_lookup(tape.parameter(branch.tables[a]), g.attr_ids[a]));
  }
  return features;
}

// agg_v = sum of neighbor messages + elementwise max of neighbor messages;
// empty neighborhoods contribute agg = 0. Messages are neighbor features,
// plus the bond-type row when enabled on this branch.
inline Tape::Ref gin_layer(Tape& tape, Tape::Ref features, const GraphEncoding& g,
                           const LayerParams& layer, const BranchParams& branch,
                           bool use_bonds) {
  Tape::Ref messages = tape.embedding_lookup(features, g.src);
  if (use_bonds && !g.bond_ids.empty()) {
    messages = tape.add(messages,
                        tape.embedding_lookup(tape.parameter(branch.bond_table), g.bond_ids));
  }
  const Tape::Ref agg = tape.add(tape.segment_sum(messages, g.dst, g.num_nodes),
                                 tape.segment_max(messages, g.dst, g.num_nodes));
  const Tape::Ref joint = tape.concat({features, agg}, 1);
  const Tape::Ref hidden = tape.relu(
      tape.add(tape.matmul(joint, tape.parameter(layer.W1)), tape.parameter(layer.b1)));
  return tape.add(tape.matmul(hidden, tape.parameter(layer.W2)), tape.parameter(layer.b2));
}

// H_G: mean over nodes of concat(h^K, ..., h^1); width K*d.
inline Tape::Ref branch_forward(Tape& tape, const GraphEncoding& g, const BranchParams& branch,
                                const ModelConfig& config, bool use_bonds) {
  if (g.num_nodes == 0) raise(Errc::EmptyGraph, "branch_forward on an empty graph");
  Tape::Ref h = embed_nodes(tape, g, branch);
  std::vector<Tape::Ref> per_layer;  // filled h^1 .. h^K
  per_layer.reserve(static_cast<std::size_t>(config.K));
  for (int k = 0; k < config.K; ++k) {
    h = gin_layer(tape, h, g, branch.layers[static_cast<std::size_t>(k)], branch, use_bonds);
    per_layer.push_back(h);
  }
  std::vector<Tape::Ref> jk(per_layer.rbegin(), per_layer.rend());  // h^K first
  return tape.mean(tape.concat(jk, 1));
}

// y_hat = Phi(concat(H_pair, H_mol)): 3 affine layers, rectifiers between,
// sigmoid on the scalar output.
inline Tape::Ref predict_pair(Tape& tape, const GraphEncoding& pair_g,
                              const GraphEncoding& mol_g, const ModelParams& params) {
  const Tape::Ref h_net = branch_forward(tape, pair_g, params.network, params.config, false);
  const Tape::Ref h_mol = branch_forward(tape, mol_g, params.molecule, params.config,
                                         params.config.bond_embedding);
  const Tape::Ref fused = tape.concat({h_net, h_mol}, 1);
  const HeadParams& head = params.head;
  const Tape::Ref a1 = tape.relu(
      tape.add(tape.matmul(fused, tape.parameter(head.W1)), tape.parameter(head.b1)));
  const Tape::Ref a2 =
      tape.relu(tape.add(tape.matmul(a1, tape.parameter(head.W2)), tape.parameter(head.b2)));
  return tape.sigmoid(
      tape.add(tape.matmul(a2, tape.parameter(head.W3)), tape.parameter(head.b3)));
}

inline double predict_value(const PairedSubgraph& pg, const MolecularGraph& mol,
                            const ModelParams& params) {
  Tape tape;
  const Tape::Ref y = predict_pair(tape, encode_pair_graph(pg), encode_molecule(mol), params);
  return tape.value(y).data[0];
}

}  // namespace mtilink
