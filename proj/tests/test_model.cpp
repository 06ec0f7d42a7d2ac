#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "mtilink/model.hpp"
#include "test_util.hpp"

using namespace mtilink;

namespace {

ModelConfig tiny_config() {
  ModelConfig c;
  c.K = 2;
  c.d = 3;
  c.head_hidden1 = 4;
  c.head_hidden2 = 3;
  return c;
}

// Star with one center (id 0) and scalar-feature neighbors; table row i
// holds value row_values[i]. d = 1 throughout.
GraphEncoding star_encoding(int n_neighbors) {
  GraphEncoding g;
  g.num_nodes = static_cast<std::size_t>(1 + n_neighbors);
  g.attr_ids.resize(1);
  for (std::size_t i = 0; i < g.num_nodes; ++i) g.attr_ids[0].push_back(static_cast<int>(i));
  for (int j = 1; j <= n_neighbors; ++j) {
    g.src.push_back(j);
    g.dst.push_back(0);
    g.src.push_back(0);
    g.dst.push_back(j);
  }
  return g;
}

// phi that copies the aggregate through: W1 = [[0],[1]], W2 = [1].
LayerParams passthrough_agg_layer() {
  LayerParams layer;
  layer.W1 = Tensor::matrix(2, 1, {0.0, 1.0});
  layer.b1 = Tensor::vec({0.0});
  layer.W2 = Tensor::matrix(1, 1, {1.0});
  layer.b2 = Tensor::vec({0.0});
  return layer;
}

MolecularGraph permute_atoms(const MolecularGraph& g, const std::vector<std::uint32_t>& perm) {
  MolecularGraph out;
  out.atoms.resize(g.atoms.size());
  out.adjacency.assign(g.atoms.size(), {});
  for (std::size_t i = 0; i < g.atoms.size(); ++i) out.atoms[perm[i]] = g.atoms[i];
  for (const Bond& b : g.bonds) {
    out.bonds.push_back({perm[b.i], perm[b.j], b.order});
    out.adjacency[perm[b.i]].push_back(perm[b.j]);
    out.adjacency[perm[b.j]].push_back(perm[b.i]);
  }
  for (auto& adj : out.adjacency) std::sort(adj.begin(), adj.end());
  return out;
}

}  // namespace

TEST_CASE("aggregate is sum plus elementwise max of neighbor features") {
  BranchParams branch;
  branch.tables.push_back(Tensor::matrix(4, 1, {0.0, 1.0, 2.0, 3.0}));
  auto g = star_encoding(3);
  Tape tape;
  auto h = embed_nodes(tape, g, branch);
  auto out = tape.value(gin_layer(tape, h, g, passthrough_agg_layer(), branch, false));
  REQUIRE(out.at(0, 0) == 9.0);  // (1+2+3) + max{1,2,3}
}

TEST_CASE("a single neighbor gives agg = 2 * h_u") {
  BranchParams branch;
  branch.tables.push_back(Tensor::matrix(2, 1, {0.0, 5.0}));
  auto g = star_encoding(1);
  Tape tape;
  auto h = embed_nodes(tape, g, branch);
  auto out = tape.value(gin_layer(tape, h, g, passthrough_agg_layer(), branch, false));
  REQUIRE(out.at(0, 0) == 10.0);
}

TEST_CASE("an isolated node aggregates zero") {
  BranchParams branch;
  branch.tables.push_back(Tensor::matrix(1, 1, {7.0}));
  GraphEncoding g;
  g.num_nodes = 1;
  g.attr_ids = {{0}};
  LayerParams layer;  // output = h + agg
  layer.W1 = Tensor::matrix(2, 1, {1.0, 1.0});
  layer.b1 = Tensor::vec({0.0});
  layer.W2 = Tensor::matrix(1, 1, {1.0});
  layer.b2 = Tensor::vec({0.0});
  Tape tape;
  auto out = tape.value(gin_layer(tape, embed_nodes(tape, g, branch), g, layer, branch, false));
  REQUIRE(out.at(0, 0) == 7.0);  // h + 0
}

TEST_CASE("molecule features sum one row per attribute table") {
  auto mol = parse_smiles("C");
  auto enc = encode_molecule(mol);
  REQUIRE(enc.attr_ids.size() == 7);
  // element 6, degree 0, charge shifted to 4, chirality 0, 4 H, sp3, not aromatic
  REQUIRE(enc.attr_ids[0][0] == 6);
  REQUIRE(enc.attr_ids[2][0] == vocab::kChargeOffset);
  REQUIRE(enc.attr_ids[4][0] == 4);
  REQUIRE(enc.attr_ids[5][0] == 2);

  BranchParams branch;
  double mark = 1.0;
  for (int rows : vocab::molecule_table_rows()) {
    Tensor t = Tensor::zeros({static_cast<std::size_t>(rows), 1});
    for (double& v : t.data) v = mark;
    branch.tables.push_back(t);
    mark *= 2.0;
  }
  Tape tape;
  auto f = tape.value(embed_nodes(tape, enc, branch));
  REQUIRE(f.at(0, 0) == 1 + 2 + 4 + 8 + 16 + 32 + 64);  // one row from each table
}

TEST_CASE("all-zero tables embed to all-zero features") {
  BranchParams branch;
  branch.tables.push_back(Tensor::zeros({vocab::kRoles, 2}));
  GraphEncoding g;
  g.num_nodes = 2;
  g.attr_ids = {{0, 1}};
  Tape tape;
  auto f = tape.value(embed_nodes(tape, g, branch));
  REQUIRE(f.data == std::vector<double>(4, 0.0));
}

TEST_CASE("attribute ids outside the vocabulary are rejected") {
  auto mol = parse_smiles("[C-5]");  // charge below the vocabulary range
  auto enc = encode_molecule(mol);
  auto params = init_params(tiny_config(), 1);
  Tape tape;
  try {
    embed_nodes(tape, enc, params.molecule);
    FAIL("expected UnknownAttributeValue");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::UnknownAttributeValue);
  }
}

TEST_CASE("branch_forward rejects empty graphs and concatenates layers K..1") {
  auto params = init_params(tiny_config(), 3);
  GraphEncoding empty;
  Tape tape;
  try {
    branch_forward(tape, empty, params.network, params.config, false);
    FAIL("expected EmptyGraph");
  } catch (const Error& e) {
    REQUIRE(e.code() == Errc::EmptyGraph);
  }

  GraphEncoding one;
  one.num_nodes = 1;
  one.attr_ids = {{2}};
  auto h = tape.value(branch_forward(tape, one, params.network, params.config, false));
  REQUIRE(h.shape == std::vector<std::size_t>{1, static_cast<std::size_t>(
                                                     params.config.K * params.config.d)});
}

TEST_CASE("init_params is seed-deterministic with independent branches") {
  ModelConfig config = tiny_config();
  auto a = init_params(config, 42);
  auto b = init_params(config, 42);
  auto c = init_params(config, 43);
  REQUIRE(a.network.tables[0] == b.network.tables[0]);
  REQUIRE(a.molecule.layers[0].W1 == b.molecule.layers[0].W1);
  REQUIRE(a.head.W1 == b.head.W1);
  REQUIRE(a.network.tables[0] != c.network.tables[0]);
  // pseudo-siamese: branch draws are independent
  REQUIRE(a.network.layers[0].W1 != a.molecule.layers[0].W1);
  REQUIRE(a.head.b1.data == std::vector<double>(4, 0.0));
}

TEST_CASE("paper-scale config yields the 640-wide head input") {
  ModelConfig config;  // defaults: K=5, d=64
  auto params = init_params(config, 1);
  REQUIRE(params.head.W1.shape == std::vector<std::size_t>{640, 128});
  // network: 1 table + 5 layers * 4; molecule: 7 tables + bond + 5 layers * 4; head: 6
  REQUIRE(param_list(params).size() == 1 + 20 + 7 + 1 + 20 + 6);
}

TEST_CASE("zero head output layer predicts exactly one half") {
  auto params = init_params(tiny_config(), 7);
  for (double& v : params.head.W3.data) v = 0.0;
  params.head.b3.data[0] = 0.0;
  auto net = BipartiteNetwork::ingest(testutil::rows_from("m0\tt0\t1\nm0\tt1\t1\n"));
  auto pg = pair_subgraphs(net, 0, 0, InteractionLabel::Active);
  REQUIRE(predict_value(pg, parse_smiles("CCO"), params) == 0.5);
}

TEST_CASE("bare-centers pair still yields a valid prediction") {
  auto net = BipartiteNetwork::ingest(testutil::rows_from("m0\tt0\t1\n"));
  auto pg = pair_subgraphs(net, 0, 0, InteractionLabel::Active);
  REQUIRE(pg.num_edges() == 0);
  auto params = init_params(tiny_config(), 11);
  const double y = predict_value(pg, parse_smiles("C"), params);
  REQUIRE(y > 0.0);
  REQUIRE(y < 1.0);
}

TEST_CASE("prediction is bitwise deterministic") {
  auto net = BipartiteNetwork::ingest(testutil::rows_from(
      "m0\tt0\t1\nm0\tt1\t1\nm1\tt0\t1\nm1\tt1\t0\n"));
  auto pg = pair_subgraphs(net, 0, 0, InteractionLabel::Active);
  auto params = init_params(tiny_config(), 13);
  auto mol = parse_smiles("CC(=O)O");
  REQUIRE(predict_value(pg, mol, params) == predict_value(pg, mol, params));
}

TEST_CASE("prediction is invariant to atom permutation") {
  auto net = BipartiteNetwork::ingest(testutil::rows_from(
      "m0\tt0\t1\nm0\tt1\t1\nm1\tt0\t1\nm2\tt0\t1\n"));
  auto pg = pair_subgraphs(net, 0, 0, InteractionLabel::Active);
  auto params = init_params(tiny_config(), 17);
  auto mol = parse_smiles("CC(=O)Oc1ccccc1C(=O)O");

  Xoshiro256ss rng(99);
  const double base = predict_value(pg, mol, params);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint32_t> perm(mol.num_atoms());
    std::iota(perm.begin(), perm.end(), 0u);
    rng.shuffle(perm);
    const double permuted = predict_value(pg, permute_atoms(mol, perm), params);
    REQUIRE(permuted == Catch::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("prediction is invariant to neighbor order within the pair graph") {
  auto net = BipartiteNetwork::ingest(testutil::rows_from(
      "m0\tt0\t1\nm0\tt1\t1\nm0\tt2\t1\nm0\tt3\t1\nm1\tt0\t1\nm2\tt0\t1\n"));
  auto pg = pair_subgraphs(net, 0, 0, InteractionLabel::Active);
  auto params = init_params(tiny_config(), 19);
  auto mol = parse_smiles("CCN");
  const double base = predict_value(pg, mol, params);
  Xoshiro256ss rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    PairedSubgraph shuffled = pg;
    rng.shuffle(shuffled.molecule_side.neighbors);
    rng.shuffle(shuffled.target_side.neighbors);
    REQUIRE(predict_value(shuffled, mol, params) == Catch::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("branches are independent: molecule readout ignores network weights") {
  auto params = init_params(tiny_config(), 23);
  auto enc = encode_molecule(parse_smiles("c1ccncc1"));
  auto run = [&] {
    Tape tape;
    return tape.value(branch_forward(tape, enc, params.molecule, params.config, true)).data;
  };
  const auto before = run();
  for (double& v : params.network.layers[0].W1.data) v += 10.0;
  for (double& v : params.network.tables[0].data) v -= 3.0;
  REQUIRE(run() == before);
}

TEST_CASE("full pair prediction passes the finite-difference oracle") {
  // toy pair: 4-node regrouped graph, 6-atom molecule
  auto net = BipartiteNetwork::ingest(testutil::rows_from(
      "m0\tt0\t1\nm0\tt1\t1\nm1\tt0\t1\n"));
  auto pg = pair_subgraphs(net, 0, 0, InteractionLabel::Active);
  REQUIRE(pg.num_nodes() == 4);
  auto pair_enc = encode_pair_graph(pg);
  auto mol_enc = encode_molecule(parse_smiles("c1ccccc1"));

  auto params = init_params(tiny_config(), 29);
  auto build = [&](Tape& tape) {
    auto y = predict_pair(tape, pair_enc, mol_enc, params);
    return tape.binary_cross_entropy(y, Tensor::scalar(1.0));
  };
  auto report = grad_check(build, param_list(params));
  INFO("worst rel err " << report.worst);
  REQUIRE(report.pass);
}

TEST_CASE("bond embeddings distinguish single from double bonds") {
  ModelConfig with = tiny_config();
  ModelConfig without = tiny_config();
  without.bond_embedding = false;
  auto net = BipartiteNetwork::ingest(testutil::rows_from("m0\tt0\t1\n"));
  auto pg = pair_subgraphs(net, 0, 0, InteractionLabel::Active);

  // same atoms, different bond orders (C2H6 vs C2H4 differ in H too, so pin
  // attributes manually: encode propene vs cyclopropane-like is overkill --
  // craft two encodings differing only in bond_ids)
  auto enc1 = encode_molecule(parse_smiles("CC"));
  auto enc2 = enc1;
  for (auto& b : enc2.bond_ids) b = static_cast<int>(BondType::Double);

  auto params_on = init_params(with, 31);
  auto params_off = init_params(without, 31);
  auto value = [&](const ModelParams& p, const GraphEncoding& mol) {
    Tape tape;
    return tape.value(predict_pair(tape, encode_pair_graph(pg), mol, p)).data[0];
  };
  REQUIRE(value(params_on, enc1) != value(params_on, enc2));
  REQUIRE(value(params_off, enc1) == value(params_off, enc2));
}
