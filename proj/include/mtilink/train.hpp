#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mtilink/bipartite.hpp"
#include "mtilink/error.hpp"
#include "mtilink/metrics.hpp"
#include "mtilink/model.hpp"
#include "mtilink/rng.hpp"
#include "mtilink/smiles.hpp"
#include "mtilink/subgraph.hpp"
#include "mtilink/tensor.hpp"
#include "mtilink/threading.hpp"

namespace mtilink {

struct TrainConfig {
  double learning_rate = 0.001;
  double adam_epsilon = 1e-16;
  double beta0 = 0.9;    // first-moment decay
  double beta1 = 0.999;  // second-moment decay
  double weight_decay = 0.0001;
  int batch_size = 256;
  int epochs = 1000;
  std::uint64_t seed = 0;
  bool rebalance = true;
  double negative_sampling_ratio = 1.0;

  void validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (!(adam_epsilon > 0.0)) throw std::invalid_argument("adam_epsilon must be > 0");
    if (!(beta0 >= 0.0 && beta0 < 1.0) || !(beta1 >= 0.0 && beta1 < 1.0)) {
      throw std::invalid_argument("betas must lie in [0, 1)");
    }
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (!(negative_sampling_ratio >= 0.0)) {
      throw std::invalid_argument("negative_sampling_ratio must be >= 0");
    }
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Eq. 5 on plain numbers, with the same clamp as the differentiable path.
inline double bce_loss(double y_hat, double y) {
  const double pc = std::min(1.0 - 1e-12, std::max(1e-12, y_hat));
  return -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
}

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  long long step = 0;

  AdamState() = default;
  explicit AdamState(const std::vector<NamedParam>& params) {
    m.reserve(params.size());
    v.reserve(params.size());
    for (const auto& p : params) {
      m.push_back(Tensor::zeros_like(*p.tensor));
      v.push_back(Tensor::zeros_like(*p.tensor));
    }
  }
};

// Bias-corrected Adam. Weight decay couples as lambda * w added to the
// gradient before the moment updates; epsilon sits inside sqrt(v_hat) + eps.
inline void adam_step(const std::vector<NamedParam>& params, const std::vector<Tensor>& grads,
                      AdamState& state, const TrainConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    raise(Errc::ShapeMismatch, "adam_step: " + std::to_string(params.size()) + " params vs " +
                                   std::to_string(grads.size()) + " grads vs " +
                                   std::to_string(state.m.size()) + " moment slots");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(cfg.beta0, t);
  const double bc2 = 1.0 - std::pow(cfg.beta1, t);
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& w = *params[p].tensor;
    const Tensor& g = grads[p];
    if (w.shape != g.shape) {
      raise(Errc::ShapeMismatch,
            params[p].name + ": param " + w.shape_str() + " vs grad " + g.shape_str());
    }
    if (!g.finite()) raise(Errc::NonFiniteValue, "gradient for " + params[p].name);
    Tensor& m = state.m[p];
    Tensor& v = state.v[p];
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double grad = g.data[i] + cfg.weight_decay * w.data[i];
      m.data[i] = cfg.beta0 * m.data[i] + (1.0 - cfg.beta0) * grad;
      v.data[i] = cfg.beta1 * v.data[i] + (1.0 - cfg.beta1) * grad * grad;
      const double m_hat = m.data[i] / bc1;
      const double v_hat = v.data[i] / bc2;
      w.data[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
    }
    if (!w.finite()) raise(Errc::NonFiniteValue, params[p].name + " after update");
  }
}

namespace detail {

// Balanced 1:1 index selection: the majority class is uniformly undersampled
// without replacement, then the union is shuffled.
inline std::vector<std::size_t> rebalance_indices(const std::vector<int>& labels,
                                                  Xoshiro256ss& rng) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == 1 ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    raise(Errc::SingleClassDataset, "rebalance needs both classes, got " +
                                        std::to_string(pos.size()) + " positive / " +
                                        std::to_string(neg.size()) + " negative");
  }
  const std::size_t k = std::min(pos.size(), neg.size());
  auto undersample = [&](std::vector<std::size_t>& cls) {
    if (cls.size() == k) return;
    std::vector<std::size_t> kept;
    kept.reserve(k);
    for (std::size_t slot : rng.sample_indices(cls.size(), k)) kept.push_back(cls[slot]);
    cls = std::move(kept);
  };
  undersample(pos);
  undersample(neg);
  std::vector<std::size_t> out;
  out.reserve(2 * k);
  out.insert(out.end(), pos.begin(), pos.end());
  out.insert(out.end(), neg.begin(), neg.end());
  rng.shuffle(out);
  return out;
}

}  // namespace detail

template <typename T, typename LabelFn>
std::vector<T> rebalance(const std::vector<T>& samples, LabelFn label_of, std::uint64_t seed) {
  std::vector<int> labels(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) labels[i] = label_of(samples[i]);
  Xoshiro256ss rng(seed, streams::kRebalance);
  std::vector<T> out;
  out.reserve(samples.size());
  for (std::size_t i : detail::rebalance_indices(labels, rng)) out.push_back(samples[i]);
  return out;
}

inline std::vector<Edge> rebalance(const std::vector<Edge>& samples, std::uint64_t seed) {
  return rebalance(samples, [](const Edge& e) { return e.label; }, seed);
}

// Uniform draw without replacement from the unobserved cells of the
// interaction matrix; count = ratio * positives. Enumerates all M*N cells,
// which is fine at the network sizes this engine targets.
inline std::vector<Edge> sample_negatives(const BipartiteNetwork& net, double ratio,
                                          std::uint64_t seed) {
  if (!(ratio >= 0.0)) throw std::invalid_argument("negative sampling ratio must be >= 0");
  const auto want = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(net.num_positive_edges())));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> missing;
  for (std::uint32_t m = 0; m < net.num_molecules(); ++m) {
    for (std::uint32_t t = 0; t < net.num_targets(); ++t) {
      if (!net.label_of(m, t).has_value()) missing.push_back({m, t});
    }
  }
  if (missing.size() < want) {
    raise(Errc::InsufficientMissingEntries, "need " + std::to_string(want) +
                                                " unobserved entries, matrix has " +
                                                std::to_string(missing.size()));
  }
  Xoshiro256ss rng(seed, streams::kNegativeSampling);
  std::vector<Edge> out;
  out.reserve(want);
  for (std::size_t i : rng.sample_indices(missing.size(), want)) {
    out.push_back({missing[i].first, missing[i].second, 0});
  }
  return out;
}

// One supervised sample, lowered to tensor-ready encodings. molecule indexes
// the shared per-molecule encoding pool (many pairs reuse one molecule).
struct Sample {
  GraphEncoding pair_graph;
  std::uint32_t molecule = 0;
  int label = 0;
};

struct Dataset {
  std::vector<GraphEncoding> molecules;  // dense by network molecule index
  std::vector<Sample> samples;

  std::vector<int> labels() const {
    std::vector<int> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].label;
    return out;
  }
};

// Encodes labeled (possibly perturbed) paired subgraphs. Keeping this split
// from extraction lets knockout runs reuse one extraction pass.
inline Dataset encode_dataset(const BipartiteNetwork& net, const MoleculeTable& molecules,
                              const std::vector<PairedSubgraph>& subgraphs) {
  Dataset ds;
  ds.molecules.resize(net.num_molecules());
  std::vector<char> encoded(net.num_molecules(), 0);
  ds.samples.reserve(subgraphs.size());
  for (const PairedSubgraph& pg : subgraphs) {
    if (pg.label == InteractionLabel::Missing) {
      raise(Errc::MalformedRow, "unlabeled pair in a supervised dataset");
    }
    const std::uint32_t m = pg.molecule_side.center.index;
    if (!encoded[m]) {
      ds.molecules[m] = encode_molecule(molecules.graph_of(net.molecule_id(m)));
      encoded[m] = 1;
    }
    ds.samples.push_back(
        {encode_pair_graph(pg), m, pg.label == InteractionLabel::Active ? 1 : 0});
  }
  return ds;
}

inline Dataset build_dataset(const BipartiteNetwork& net, const MoleculeTable& molecules,
                             const std::vector<Edge>& pairs, int threads = 1) {
  std::vector<PairQuery> queries;
  queries.reserve(pairs.size());
  for (const Edge& e : pairs) queries.push_back({e.m, e.t, to_interaction_label(e.label)});
  return encode_dataset(net, molecules, batch_pairs(net, queries, threads));
}

inline double predict_sample(const Dataset& ds, const Sample& s, const ModelParams& params) {
  Tape tape;
  return tape.value(predict_pair(tape, s.pair_graph, ds.molecules[s.molecule], params)).data[0];
}

inline std::vector<double> score_dataset(const Dataset& ds, const ModelParams& params,
                                         int threads = 1) {
  std::vector<double> out(ds.samples.size());
  parallel_for(ds.samples.size(), threads,
               [&](std::size_t i) { out[i] = predict_sample(ds, ds.samples[i], params); });
  return out;
}

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double train_auroc = 0.0;
  double train_aupr = 0.0;
  double val_auroc = 0.0;
  double val_aupr = 0.0;

  // One history JSONL record.
  std::string to_json() const {
    std::string out = "{\"epoch\": " + std::to_string(epoch);
    out += ", \"loss\": " + detail::json_number(loss);
    out += ", \"train_auroc\": " + detail::json_number(train_auroc);
    out += ", \"train_aupr\": " + detail::json_number(train_aupr);
    out += ", \"val_auroc\": " + detail::json_number(val_auroc);
    out += ", \"val_aupr\": " + detail::json_number(val_aupr);
    out += "}";
    return out;
  }

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochRecord> history;
};

namespace detail {

// Same composition as evaluate_scores, except degenerate telemetry never
// aborts a run: a single-class split records NaN (null in the history), and
// a perfectly inverted scorer (both class views exactly 0) records the
// harmonic-mean limit 0.
inline std::pair<double, double> epoch_auroc_aupr(const std::vector<double>& scores,
                                                  const std::vector<int>& labels) {
  bool has_pos = false;
  bool has_neg = false;
  for (int y : labels) (y == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const auto harmonic_or_zero = [](double a, double b) {
    return a + b == 0.0 ? 0.0 : harmonic_average(a, b);
  };
  const double auroc_pos = auroc(scores, labels);
  std::vector<double> neg_scores(scores.size());
  std::vector<int> neg_labels(labels.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    neg_scores[i] = -scores[i];
    neg_labels[i] = labels[i] == 1 ? 0 : 1;
  }
  const double auroc_neg = auroc(neg_scores, neg_labels);
  const double aupr_pos = aupr(scores, labels, 1);
  const double aupr_neg = aupr(scores, labels, 0);
  return {harmonic_or_zero(auroc_pos, auroc_neg), harmonic_or_zero(aupr_pos, aupr_neg)};
}

}  // namespace detail

// Epoch loop: rebalance -> shuffle -> mini-batches -> mean batch loss ->
// backward -> adam_step. Per-sample tapes may run in parallel; gradients
// reduce in sample order, so any thread count reproduces the same bits.
// History metrics use the untouched (non-rebalanced) train and val sets.
inline TrainResult train_encoded(ModelParams params, const Dataset& train_set,
                                 const Dataset& val_set, const TrainConfig& cfg,
                                 int threads = 1) {
  cfg.validate();
  if (cfg.epochs > 0 && train_set.samples.empty()) {
    raise(Errc::TooFewSamples, "no training samples");
  }
  const std::vector<NamedParam> named = param_list(params);
  AdamState state(named);
  const std::vector<int> train_labels = train_set.labels();
  const std::vector<int> val_labels = val_set.labels();

  TrainResult result;
  result.history.reserve(static_cast<std::size_t>(cfg.epochs));
  const auto batch = static_cast<std::size_t>(cfg.batch_size);
  const std::size_t chunk = std::max<std::size_t>(1, static_cast<std::size_t>(threads));
  std::vector<std::vector<Tensor>> sample_grads(chunk);
  std::vector<double> sample_loss(chunk);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::vector<std::size_t> order;
    if (cfg.rebalance) {
      Xoshiro256ss rng(cfg.seed, streams::kRebalance, static_cast<std::uint64_t>(epoch));
      order = detail::rebalance_indices(train_labels, rng);
    } else {
      order.resize(train_set.samples.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
    }
    Xoshiro256ss shuffle_rng(cfg.seed, streams::kEpochShuffle, static_cast<std::uint64_t>(epoch));
    shuffle_rng.shuffle(order);

    double epoch_loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t bsz = std::min(batch, order.size() - start);
      try {
        std::vector<Tensor> batch_grads;
        batch_grads.reserve(named.size());
        for (const auto& np : named) batch_grads.push_back(Tensor::zeros_like(*np.tensor));
        for (std::size_t cs = 0; cs < bsz; cs += chunk) {
          const std::size_t c = std::min(chunk, bsz - cs);
          parallel_for(c, threads, [&](std::size_t ci) {
            const Sample& s = train_set.samples[order[start + cs + ci]];
            Tape tape;
            const Tape::Ref y_hat =
                predict_pair(tape, s.pair_graph, train_set.molecules[s.molecule], params);
            const Tape::Ref loss =
                tape.binary_cross_entropy(y_hat, Tensor::scalar(static_cast<double>(s.label)));
            tape.backward(loss);
            sample_loss[ci] = tape.value(loss).data[0];
            auto& g = sample_grads[ci];
            g.clear();
            g.reserve(named.size());
            for (const auto& np : named) g.push_back(tape.grad_of(*np.tensor));
          });
          for (std::size_t ci = 0; ci < c; ++ci) {
            epoch_loss_sum += sample_loss[ci];
            for (std::size_t p = 0; p < named.size(); ++p) {
              const Tensor& g = sample_grads[ci][p];
              for (std::size_t j = 0; j < g.size(); ++j) batch_grads[p].data[j] += g.data[j];
            }
          }
        }
        for (auto& g : batch_grads) {
          for (double& v : g.data) v /= static_cast<double>(bsz);
        }
        adam_step(named, batch_grads, state, cfg);
      } catch (const Error& e) {
        if (e.code() == Errc::NonFiniteValue) {
          raise(Errc::NonFiniteValue, "epoch " + std::to_string(epoch) + " batch " +
                                          std::to_string(start / batch + 1) + ": " + e.what());
        }
        throw;
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = epoch_loss_sum / static_cast<double>(order.size());
    std::tie(rec.train_auroc, rec.train_aupr) =
        detail::epoch_auroc_aupr(score_dataset(train_set, params, threads), train_labels);
    if (val_set.samples.empty()) {
      rec.val_auroc = std::numeric_limits<double>::quiet_NaN();
      rec.val_aupr = std::numeric_limits<double>::quiet_NaN();
    } else {
      std::tie(rec.val_auroc, rec.val_aupr) =
          detail::epoch_auroc_aupr(score_dataset(val_set, params, threads), val_labels);
    }
    result.history.push_back(rec);
  }
  result.params = std::move(params);
  return result;
}

inline TrainResult train_encoded(const Dataset& train_set, const Dataset& val_set,
                                 const ModelConfig& model_cfg, const TrainConfig& cfg,
                                 int threads = 1) {
  return train_encoded(init_params(model_cfg, cfg.seed), train_set, val_set, cfg, threads);
}

inline TrainResult train(const BipartiteNetwork& net, const MoleculeTable& molecules,
                         const std::vector<Edge>& train_pairs,
                         const std::vector<Edge>& val_pairs, const ModelConfig& model_cfg,
                         const TrainConfig& cfg, int threads = 1) {
  const Dataset train_set = build_dataset(net, molecules, train_pairs, threads);
  const Dataset val_set = build_dataset(net, molecules, val_pairs, threads);
  return train_encoded(train_set, val_set, model_cfg, cfg, threads);
}

}  // namespace mtilink
