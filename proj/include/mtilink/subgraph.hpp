#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "mtilink/bipartite.hpp"
#include "mtilink/error.hpp"
#include "mtilink/threading.hpp"

namespace mtilink {

struct NodeRef {
  Side side = Side::Molecule;
  std::uint32_t index = 0;

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

// 1-hop star around a center node: the center plus its positively-linked
// opposite-side neighbors. Every edge is center-neighbor, so the edge list
// is implied by the neighbor list.
struct Subgraph {
  NodeRef center;
  std::vector<std::uint32_t> neighbors;  // opposite-side indices, ascending

  std::size_t degree() const { return neighbors.size(); }

  std::vector<std::pair<NodeRef, NodeRef>> edge_list() const {
    const Side opposite = center.side == Side::Molecule ? Side::Target : Side::Molecule;
    std::vector<std::pair<NodeRef, NodeRef>> edges;
    edges.reserve(neighbors.size());
    for (std::uint32_t n : neighbors) edges.push_back({center, NodeRef{opposite, n}});
    return edges;
  }

  friend bool operator==(const Subgraph&, const Subgraph&) = default;
};

// Role of a node inside a regrouped pair graph. The values are the embedding
// ids of the network branch: roles are the only node input on that side,
// which keeps the branch inductive (no node identities).
enum class NodeRole : int {
  CenterMolecule = 0,
  CenterTarget = 1,
  NeighborTarget = 2,
  NeighborMolecule = 3,
};

inline constexpr int kNumNodeRoles = 4;

// The regrouped graph for a (m, t) query: the disjoint union of the two
// 1-hop stars with the queried link removed. There is deliberately no edge
// between the two centers. Local node order is fixed:
//   [0]                 center molecule
//   [1 .. A]            neighbor targets of m (ascending)
//   [A+1]               center target
//   [A+2 .. A+1+B]      neighbor molecules of t (ascending)
struct PairedSubgraph {
  Subgraph molecule_side;
  Subgraph target_side;
  InteractionLabel label = InteractionLabel::Missing;

  std::size_t num_nodes() const {
    return 2 + molecule_side.neighbors.size() + target_side.neighbors.size();
  }
  std::size_t num_edges() const {
    return molecule_side.neighbors.size() + target_side.neighbors.size();
  }
  std::size_t target_center_local() const { return molecule_side.neighbors.size() + 1; }

  std::vector<NodeRole> node_roles() const {
    std::vector<NodeRole> roles;
    roles.reserve(num_nodes());
    roles.push_back(NodeRole::CenterMolecule);
    roles.insert(roles.end(), molecule_side.neighbors.size(), NodeRole::NeighborTarget);
    roles.push_back(NodeRole::CenterTarget);
    roles.insert(roles.end(), target_side.neighbors.size(), NodeRole::NeighborMolecule);
    return roles;
  }

  // Undirected edges as local index pairs (center, neighbor).
  std::vector<std::pair<std::uint32_t, std::uint32_t>> local_edges() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(num_edges());
    for (std::uint32_t j = 0; j < molecule_side.neighbors.size(); ++j) {
      edges.push_back({0u, 1u + j});
    }
    const auto tc = static_cast<std::uint32_t>(target_center_local());
    for (std::uint32_t j = 0; j < target_side.neighbors.size(); ++j) {
      edges.push_back({tc, tc + 1u + j});
    }
    return edges;
  }

  friend bool operator==(const PairedSubgraph&, const PairedSubgraph&) = default;
};

inline Subgraph extract_subgraph(const BipartiteNetwork& net, NodeRef center) {
  net.check_index(center.side, center.index);
  return Subgraph{center, net.neighbors(center.side, center.index)};
}

// Builds the regrouped graph for (m, t). Whenever the network holds the
// positive edge (m, t) -- or the caller labels the pair active -- that edge
// and the opposite center are dropped from both stars, so the model can
// never see the link it is asked to predict.
inline PairedSubgraph pair_subgraphs(const BipartiteNetwork& net, std::uint32_t m,
                                     std::uint32_t t,
                                     InteractionLabel label = InteractionLabel::Missing) {
  PairedSubgraph out;
  out.molecule_side = extract_subgraph(net, NodeRef{Side::Molecule, m});
  out.target_side = extract_subgraph(net, NodeRef{Side::Target, t});
  out.label = label;
  if (net.has_positive(m, t) || label == InteractionLabel::Active) {
    std::erase(out.molecule_side.neighbors, t);
    std::erase(out.target_side.neighbors, m);
  }
  return out;
}

struct PairQuery {
  std::uint32_t m = 0;
  std::uint32_t t = 0;
  InteractionLabel label = InteractionLabel::Missing;
};

// Output order matches input order regardless of the worker count.
inline std::vector<PairedSubgraph> batch_pairs(const BipartiteNetwork& net,
                                               const std::vector<PairQuery>& queries,
                                               int threads = 1) {
  std::vector<PairedSubgraph> out(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) {
    try {
      out[i] = pair_subgraphs(net, queries[i].m, queries[i].t, queries[i].label);
    } catch (const Error& e) {
      raise(e.code(), "pair " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

}  // namespace mtilink
