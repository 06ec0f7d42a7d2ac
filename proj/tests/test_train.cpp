#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "mtilink/train.hpp"
#include "test_util.hpp"

using namespace mtilink;

namespace {

BipartiteNetwork toy_net() {
  return BipartiteNetwork::ingest(testutil::rows_from(
      "m0\tt0\t1\n"
      "m0\tt1\t0\n"
      "m1\tt0\t1\n"
      "m1\tt1\t0\n"
      "m2\tt0\t0\n"
      "m2\tt1\t1\n"
      "m3\tt0\t0\n"
      "m3\tt1\t1\n"));
}

MoleculeTable toy_mols() {
  return MoleculeTable::load(testutil::rows_from(
      "m0\tc1ccccc1\n"
      "m1\tCc1ccccc1\n"
      "m2\tCCCC\n"
      "m3\tCCC(C)C\n"));
}

ModelConfig tiny_model() {
  ModelConfig mc;
  mc.K = 1;
  mc.d = 4;
  mc.head_hidden1 = 4;
  mc.head_hidden2 = 2;
  return mc;
}

std::vector<Tensor> grads_for(Tape& tape, const std::vector<NamedParam>& named) {
  std::vector<Tensor> out;
  out.reserve(named.size());
  for (const auto& np : named) out.push_back(tape.grad_of(*np.tensor));
  return out;
}

bool same_params(ModelParams& a, ModelParams& b) {
  const auto pa = param_list(a);
  const auto pb = param_list(b);
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (!(*pa[i].tensor == *pb[i].tensor)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("train config defaults match the published recipe", "[train]") {
  const TrainConfig cfg;
  CHECK(cfg.learning_rate == 0.001);
  CHECK(cfg.adam_epsilon == 1e-16);
  CHECK(cfg.beta0 == 0.9);
  CHECK(cfg.beta1 == 0.999);
  CHECK(cfg.weight_decay == 0.0001);
  CHECK(cfg.batch_size == 256);
  CHECK(cfg.epochs == 1000);
  CHECK(cfg.rebalance);
  CHECK(cfg.negative_sampling_ratio == 1.0);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("train config invariants", "[train]") {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.beta0 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.beta1 = -0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.epochs = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.adam_epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.negative_sampling_ratio = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("bce_loss pins", "[train]") {
  CHECK(bce_loss(0.5, 1.0) == std::log(2.0));
  CHECK(bce_loss(0.5, 0.0) == std::log(2.0));
  CHECK(bce_loss(0.9, 0.0) == Catch::Approx(-std::log(0.1)).epsilon(1e-12));
  CHECK(bce_loss(0.999999, 1.0) < 1e-5);
  CHECK(bce_loss(1e-6, 0.0) < 1e-5);
  CHECK(std::isfinite(bce_loss(1.0, 0.0)));  // clamp keeps the log finite
}

TEST_CASE("adam zero gradients with zero decay leave params untouched", "[train]") {
  Tensor w = Tensor::vec({0.7, -0.3, 1.5});
  const Tensor before = w;
  std::vector<NamedParam> params = {{"w", &w}};
  AdamState state(params);
  TrainConfig cfg;
  cfg.weight_decay = 0.0;
  adam_step(params, {Tensor::zeros_like(w)}, state, cfg);
  CHECK(w == before);
  CHECK(state.step == 1);
}

TEST_CASE("adam first step approximates a signed step", "[train]") {
  Tensor w = Tensor::vec({1.0, 1.0, 1.0});
  std::vector<NamedParam> params = {{"w", &w}};
  AdamState state(params);
  TrainConfig cfg;
  cfg.weight_decay = 0.0;
  adam_step(params, {Tensor::vec({0.5, -0.02, 3.0})}, state, cfg);
  CHECK_THAT(w.data[0], Catch::Matchers::WithinAbs(1.0 - cfg.learning_rate, 1e-12));
  CHECK_THAT(w.data[1], Catch::Matchers::WithinAbs(1.0 + cfg.learning_rate, 1e-12));
  CHECK_THAT(w.data[2], Catch::Matchers::WithinAbs(1.0 - cfg.learning_rate, 1e-12));
}

TEST_CASE("adam hand-evaluated first step", "[train]") {
  Tensor w = Tensor::scalar(1.0);
  std::vector<NamedParam> params = {{"w", &w}};
  AdamState state(params);
  TrainConfig cfg;
  cfg.weight_decay = 0.0;
  adam_step(params, {Tensor::scalar(0.5)}, state, cfg);
  CHECK_THAT(w.data[0], Catch::Matchers::WithinAbs(0.999, 1e-12));
}

TEST_CASE("adam two steps match the scalar recurrence", "[train]") {
  Tensor w = Tensor::scalar(0.7);
  std::vector<NamedParam> params = {{"w", &w}};
  AdamState state(params);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.weight_decay = 0.03;

  double rw = 0.7, rm = 0.0, rv = 0.0;
  const double raw[2] = {0.5, -0.2};
  for (int t = 1; t <= 2; ++t) {
    const double g = raw[t - 1] + cfg.weight_decay * rw;
    rm = cfg.beta0 * rm + (1.0 - cfg.beta0) * g;
    rv = cfg.beta1 * rv + (1.0 - cfg.beta1) * g * g;
    const double m_hat = rm / (1.0 - std::pow(cfg.beta0, static_cast<double>(t)));
    const double v_hat = rv / (1.0 - std::pow(cfg.beta1, static_cast<double>(t)));
    rw -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
    adam_step(params, {Tensor::scalar(raw[t - 1])}, state, cfg);
  }
  CHECK(w.data[0] == rw);
  CHECK(state.step == 2);
  CHECK(state.v[0].data[0] >= 0.0);
}

TEST_CASE("weight decay pulls an unforced parameter toward zero", "[train]") {
  Tensor w = Tensor::scalar(1.0);
  std::vector<NamedParam> params = {{"w", &w}};
  AdamState state(params);
  TrainConfig cfg;
  cfg.weight_decay = 0.1;
  adam_step(params, {Tensor::scalar(0.0)}, state, cfg);
  CHECK(w.data[0] < 1.0);
  CHECK(w.data[0] > 0.0);
}

TEST_CASE("adam input validation", "[train]") {
  Tensor w = Tensor::vec({1.0, 2.0});
  std::vector<NamedParam> params = {{"w", &w}};
  AdamState state(params);
  TrainConfig cfg;
  try {
    adam_step(params, {Tensor::vec({1.0, 2.0, 3.0})}, state, cfg);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ShapeMismatch);
  }
  try {
    adam_step(params, {}, state, cfg);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ShapeMismatch);
  }
  try {
    adam_step(params, {Tensor::vec({1.0, std::nan("")})}, state, cfg);
    FAIL("expected NonFiniteValue");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonFiniteValue);
  }
}

TEST_CASE("rebalance undersamples the majority class", "[train]") {
  std::vector<Edge> samples;
  for (std::uint32_t i = 0; i < 10; ++i) samples.push_back({i, 0, 1});
  for (std::uint32_t i = 0; i < 4; ++i) samples.push_back({100 + i, 0, 0});

  const auto out = rebalance(samples, 17);
  REQUIRE(out.size() == 8);
  std::size_t pos = 0;
  std::set<std::uint32_t> pos_ids, neg_ids;
  for (const Edge& e : out) {
    if (e.label == 1) {
      ++pos;
      CHECK(e.m < 10);
      pos_ids.insert(e.m);
    } else {
      CHECK(e.m >= 100);
      neg_ids.insert(e.m);
    }
  }
  CHECK(pos == 4);
  CHECK(pos_ids.size() == 4);   // without replacement
  CHECK(neg_ids.size() == 4);   // minority kept whole

  CHECK(rebalance(samples, 17) == out);
  CHECK(rebalance(samples, 18) != out);
}

TEST_CASE("rebalance of a balanced set only shuffles", "[train]") {
  std::vector<Edge> samples;
  for (std::uint32_t i = 0; i < 5; ++i) {
    samples.push_back({i, 0, 1});
    samples.push_back({i, 1, 0});
  }
  auto out = rebalance(samples, 3);
  REQUIRE(out.size() == samples.size());
  auto key = [](const Edge& e) { return std::tuple(e.m, e.t, e.label); };
  auto sorted_in = samples, sorted_out = out;
  std::sort(sorted_in.begin(), sorted_in.end(),
            [&](const Edge& a, const Edge& b) { return key(a) < key(b); });
  std::sort(sorted_out.begin(), sorted_out.end(),
            [&](const Edge& a, const Edge& b) { return key(a) < key(b); });
  CHECK(sorted_in == sorted_out);
}

TEST_CASE("rebalance rejects single-class input", "[train]") {
  std::vector<Edge> samples = {{0, 0, 1}, {1, 0, 1}};
  try {
    rebalance(samples, 1);
    FAIL("expected SingleClassDataset");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SingleClassDataset);
  }
}

TEST_CASE("rebalance selections cover the majority class across seeds", "[train]") {
  std::vector<Edge> samples;
  for (std::uint32_t i = 0; i < 10; ++i) samples.push_back({i, 0, 1});
  for (std::uint32_t i = 0; i < 4; ++i) samples.push_back({100 + i, 0, 0});
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    for (const Edge& e : rebalance(samples, seed)) {
      if (e.label == 1) ++hits[e.m];
    }
  }
  // each of the 10 positives expects 300 * 4/10 = 120 appearances
  for (int h : hits) {
    CHECK(h > 80);
    CHECK(h < 160);
  }
}

TEST_CASE("sample_negatives draws from unobserved cells only", "[train]") {
  const auto net = BipartiteNetwork::ingest(testutil::rows_from(
      "m0\tt0\t1\n"
      "m1\tt1\t0\n"));
  // 2x2 grid, 2 observed, missing = {(m0,t1), (m1,t0)}
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto neg = sample_negatives(net, 1.0, seed);
    REQUIRE(neg.size() == 1);  // 1 positive, ratio 1
    CHECK(neg[0].label == 0);
    CHECK_FALSE(net.label_of(neg[0].m, neg[0].t).has_value());
    seen.insert({neg[0].m, neg[0].t});
  }
  CHECK(seen.size() == 2);  // both missing cells appear across seeds

  CHECK(sample_negatives(net, 1.0, 9) == sample_negatives(net, 1.0, 9));

  const auto both = sample_negatives(net, 2.0, 5);
  REQUIRE(both.size() == 2);
  CHECK(both[0] != both[1]);

  try {
    sample_negatives(net, 3.0, 5);
    FAIL("expected InsufficientMissingEntries");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientMissingEntries);
  }
}

TEST_CASE("sample_negatives on a fully observed matrix", "[train]") {
  const auto net = BipartiteNetwork::ingest(testutil::rows_from(
      "m0\tt0\t1\n"
      "m0\tt1\t0\n"
      "m1\tt0\t0\n"
      "m1\tt1\t1\n"));
  try {
    sample_negatives(net, 1.0, 0);
    FAIL("expected InsufficientMissingEntries");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientMissingEntries);
  }
}

TEST_CASE("sample_negatives never collides with observed entries", "[train]") {
  Xoshiro256ss rng(7, 77);
  for (int trial = 0; trial < 20; ++trial) {
    std::string rows = "m0\tt0\t1\n";
    for (int r = 0; r < 12; ++r) {
      const auto m = rng.below(5);
      const auto t = rng.below(5);
      if (m == 0 && t == 0) continue;
      rows += "m" + std::to_string(m) + "\tt" + std::to_string(t) + "\t" +
              std::to_string(rng.below(2)) + "\n";
    }
    BipartiteNetwork net = [&] {
      try {
        return BipartiteNetwork::ingest(testutil::rows_from(rows));
      } catch (const Error&) {
        return BipartiteNetwork::ingest(testutil::rows_from("m0\tt0\t1\nm1\tt1\t0\n"));
      }
    }();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::vector<Edge> neg;
      try {
        neg = sample_negatives(net, 1.0, seed);
      } catch (const Error& e) {
        CHECK(e.code() == Errc::InsufficientMissingEntries);
        continue;
      }
      std::set<std::pair<std::uint32_t, std::uint32_t>> distinct;
      for (const Edge& e : neg) {
        CHECK_FALSE(net.label_of(e.m, e.t).has_value());
        distinct.insert({e.m, e.t});
      }
      CHECK(distinct.size() == neg.size());
    }
  }
}

TEST_CASE("build_dataset encodes pairs and shares molecules", "[train]") {
  const auto net = toy_net();
  const auto mols = toy_mols();
  const Dataset ds = build_dataset(net, mols, net.edges());
  REQUIRE(ds.samples.size() == net.edges().size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Edge& e = net.edges()[i];
    CHECK(ds.samples[i].label == e.label);
    CHECK(ds.samples[i].molecule == e.m);
    // regrouped graph: 2 centers + surviving neighbors
    CHECK(ds.samples[i].pair_graph.num_nodes >= 2);
    CHECK(ds.samples[i].pair_graph.attr_ids.size() == 1);
  }
  // benzene appears in two pairs but is encoded once
  CHECK(ds.molecules[0].num_nodes == 6);
  CHECK(ds.labels() == std::vector<int>{1, 0, 1, 0, 0, 1, 0, 1});
}

TEST_CASE("build_dataset propagates missing structures", "[train]") {
  const auto net = toy_net();
  const auto partial = MoleculeTable::load(testutil::rows_from("m0\tCCO\n"));
  try {
    build_dataset(net, partial, net.edges());
    FAIL("expected MissingStructure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingStructure);
  }
}

TEST_CASE("encode_dataset rejects unlabeled pairs", "[train]") {
  const auto net = toy_net();
  const auto mols = toy_mols();
  std::vector<PairedSubgraph> pgs = {pair_subgraphs(net, 0, 0, InteractionLabel::Missing)};
  try {
    encode_dataset(net, mols, pgs);
    FAIL("expected MalformedRow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedRow);
  }
}

TEST_CASE("zero epochs returns initialized params unchanged", "[train]") {
  const auto net = toy_net();
  const auto mols = toy_mols();
  const Dataset ds = build_dataset(net, mols, net.edges());
  TrainConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 12;
  const ModelConfig mc = tiny_model();
  TrainResult result = train_encoded(ds, {}, mc, cfg);
  CHECK(result.history.empty());
  ModelParams fresh = init_params(mc, cfg.seed);
  CHECK(same_params(result.params, fresh));
}

TEST_CASE("rebalanced constant predictor loses exactly ln 2", "[train]") {
  const auto net = BipartiteNetwork::ingest(testutil::rows_from(
      "m0\tt0\t1\n"
      "m1\tt0\t0\n"));
  const auto mols = MoleculeTable::load(testutil::rows_from(
      "m0\tCCO\n"
      "m1\tCCN\n"));
  const Dataset ds = build_dataset(net, mols, net.edges());
  ModelParams params = init_params(tiny_model(), 5);
  params.head.W3 = Tensor::zeros(params.head.W3.shape);
  params.head.b3 = Tensor::zeros(params.head.b3.shape);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 8;
  cfg.seed = 11;
  const TrainResult result = train_encoded(std::move(params), ds, {}, cfg);
  REQUIRE(result.history.size() == 1);
  CHECK(result.history[0].loss == std::log(2.0));
  CHECK(std::isnan(result.history[0].val_auroc));
}

TEST_CASE("single positive pair overfits within 100 adam steps", "[train]") {
  const auto net = BipartiteNetwork::ingest(testutil::rows_from("m0\tt0\t1\n"));
  const auto mols = MoleculeTable::load(testutil::rows_from("m0\tCCO\n"));
  const Dataset ds = build_dataset(net, mols, net.edges());
  ModelConfig mc = tiny_model();
  mc.d = 8;
  mc.head_hidden1 = 8;
  mc.head_hidden2 = 4;
  ModelParams params = init_params(mc, 3);
  auto named = param_list(params);
  AdamState state(named);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.weight_decay = 0.0;
  const Sample& s = ds.samples[0];
  for (int step = 0; step < 100; ++step) {
    Tape tape;
    const auto y_hat = predict_pair(tape, s.pair_graph, ds.molecules[s.molecule], params);
    const auto loss = tape.binary_cross_entropy(y_hat, Tensor::scalar(1.0));
    tape.backward(loss);
    adam_step(named, grads_for(tape, named), state, cfg);
  }
  CHECK(predict_sample(ds, s, params) >= 0.99);
}

TEST_CASE("training run is reproducible and thread-count independent", "[train]") {
  const auto net = toy_net();
  const auto mols = toy_mols();
  const Dataset train_set = build_dataset(net, mols, net.edges());
  Dataset val_set = train_set;
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 4;
  cfg.learning_rate = 0.01;
  cfg.seed = 21;
  const ModelConfig mc = tiny_model();

  TrainResult a = train_encoded(train_set, val_set, mc, cfg, 1);
  TrainResult b = train_encoded(train_set, val_set, mc, cfg, 1);
  TrainResult c = train_encoded(train_set, val_set, mc, cfg, 4);
  REQUIRE(a.history.size() == 3);
  CHECK(a.history == b.history);
  CHECK(a.history == c.history);
  CHECK(same_params(a.params, b.params));
  CHECK(same_params(a.params, c.params));

  TrainConfig other = cfg;
  other.seed = 22;
  TrainResult d = train_encoded(train_set, val_set, mc, other);
  CHECK_FALSE(same_params(a.params, d.params));
}

TEST_CASE("training separates a structure-labeled toy set", "[train]") {
  const auto net = toy_net();
  const auto mols = toy_mols();
  const Dataset ds = build_dataset(net, mols, net.edges());
  TrainConfig cfg;
  cfg.epochs = 40;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.02;
  cfg.seed = 2;
  ModelConfig mc = tiny_model();
  mc.d = 8;
  const TrainResult result = train_encoded(ds, ds, mc, cfg);
  REQUIRE(result.history.size() == 40);
  CHECK(result.history.back().loss < result.history.front().loss);
  CHECK(result.history.back().train_auroc >= 0.9);
  CHECK(result.history.back().val_auroc == result.history.back().train_auroc);
}

TEST_CASE("single-class training set raises under rebalancing", "[train]") {
  const auto net = BipartiteNetwork::ingest(testutil::rows_from(
      "m0\tt0\t1\n"
      "m1\tt0\t1\n"));
  const auto mols = MoleculeTable::load(testutil::rows_from(
      "m0\tCCO\n"
      "m1\tCCN\n"));
  const Dataset ds = build_dataset(net, mols, net.edges());
  TrainConfig cfg;
  cfg.epochs = 1;
  try {
    train_encoded(ds, {}, tiny_model(), cfg);
    FAIL("expected SingleClassDataset");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SingleClassDataset);
  }
}

TEST_CASE("non-finite failures carry epoch and batch context", "[train]") {
  const auto net = toy_net();
  const auto mols = toy_mols();
  const Dataset ds = build_dataset(net, mols, net.edges());
  ModelParams params = init_params(tiny_model(), 1);
  params.head.W1.data[0] = std::nan("");
  TrainConfig cfg;
  cfg.epochs = 1;
  try {
    train_encoded(std::move(params), ds, {}, cfg);
    FAIL("expected NonFiniteValue");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonFiniteValue);
    CHECK(std::string(e.what()).find("epoch 1 batch 1") != std::string::npos);
  }
}

TEST_CASE("empty training set with epochs rejected", "[train]") {
  TrainConfig cfg;
  cfg.epochs = 1;
  try {
    train_encoded(Dataset{}, Dataset{}, tiny_model(), cfg);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooFewSamples);
  }
}

TEST_CASE("history records serialize as JSON lines", "[train]") {
  EpochRecord rec;
  rec.epoch = 7;
  rec.loss = 0.5;
  rec.train_auroc = 0.75;
  rec.train_aupr = 0.8;
  rec.val_auroc = std::numeric_limits<double>::quiet_NaN();
  rec.val_aupr = 0.25;
  const nlohmann::json j = nlohmann::json::parse(rec.to_json());
  CHECK(j.at("epoch").get<int>() == 7);
  CHECK(j.at("loss").get<double>() == 0.5);
  CHECK(j.at("train_auroc").get<double>() == 0.75);
  CHECK(j.at("train_aupr").get<double>() == 0.8);
  CHECK(j.at("val_auroc").is_null());
  CHECK(j.at("val_aupr").get<double>() == 0.25);
}

TEST_CASE("end-to-end train wrapper with a validation split", "[train]") {
  const auto net = toy_net();
  const auto mols = toy_mols();
  auto pairs = net.edges();
  const HoldoutSplit split = holdout_split(pairs, 0.25, 3);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.seed = 4;
  const TrainResult result = train(net, mols, split.train, split.test, tiny_model(), cfg);
  REQUIRE(result.history.size() == 2);
  for (const EpochRecord& rec : result.history) {
    CHECK(std::isfinite(rec.loss));
    CHECK(rec.train_auroc >= 0.0);
    CHECK(rec.train_auroc <= 1.0);
  }
}
