#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtilink/bipartite.hpp"
#include "mtilink/checkpoint.hpp"
#include "mtilink/error.hpp"
#include "mtilink/gradcheck.hpp"
#include "mtilink/jsonio.hpp"
#include "mtilink/knockout.hpp"
#include "mtilink/metrics.hpp"
#include "mtilink/model.hpp"
#include "mtilink/smiles.hpp"
#include "mtilink/subgraph.hpp"
#include "mtilink/threading.hpp"
#include "mtilink/train.hpp"
#include "mtilink/tsv.hpp"

namespace mtilink::cli {

namespace detail {

using mtilink::detail::json_number;
using mtilink::detail::json_string;

// Pair extraction keyed by id strings. Ids absent from the topology become
// bare centers, which is exactly the cold-start path: the molecule branch
// still sees the structure, the network branch sees a single role label.
inline PairedSubgraph pair_for_ids(const BipartiteNetwork& topo, const std::string& mol_id,
                                   const std::string& tgt_id, InteractionLabel label) {
  const auto mi = topo.find_molecule(mol_id);
  const auto ti = topo.find_target(tgt_id);
  if (mi && ti) return pair_subgraphs(topo, *mi, *ti, label);
  PairedSubgraph out;
  out.label = label;
  out.molecule_side =
      mi ? extract_subgraph(topo, NodeRef{Side::Molecule, *mi}) : Subgraph{NodeRef{Side::Molecule, 0}, {}};
  out.target_side =
      ti ? extract_subgraph(topo, NodeRef{Side::Target, *ti}) : Subgraph{NodeRef{Side::Target, 0}, {}};
  return out;
}

struct LabeledIdPair {
  std::string molecule;
  std::string target;
  int label = 0;
};

inline std::vector<double> score_id_pairs(const ModelParams& params, const BipartiteNetwork& topo,
                                          const MoleculeTable& molecules,
                                          const std::vector<LabeledIdPair>& rows, int threads) {
  for (const LabeledIdPair& r : rows) molecules.graph_of(r.molecule);  // fill the cache serially
  std::vector<double> scores(rows.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    const LabeledIdPair& r = rows[i];
    const PairedSubgraph pg = pair_for_ids(topo, r.molecule, r.target, to_interaction_label(r.label));
    scores[i] = predict_value(pg, molecules.graph_of(r.molecule), params);
  });
  return scores;
}

// Structures shipped inside the checkpoint, optionally extended by a SMILES
// file; the same id must map to the same structure everywhere.
inline MoleculeTable merged_molecules(const Checkpoint& ckpt, const std::string& smiles_path) {
  MoleculeTable table;
  for (const auto& [id, smi] : ckpt.smiles) table.add(id, smi);
  if (!smiles_path.empty()) {
    for (const TsvRow& row : read_tsv_file(smiles_path, 2)) table.add(row.fields[0], row.fields[1]);
  }
  return table;
}

inline void write_edges_tsv(const std::string& path, const BipartiteNetwork& net,
                            const std::vector<Edge>& edges) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot open " + path + " for writing");
  for (const Edge& e : edges) {
    out << net.molecule_id(e.m) << '\t' << net.target_id(e.t) << '\t' << e.label << '\n';
  }
  out.flush();
  if (!out) raise(Errc::IoError, "failed while writing " + path);
}

inline std::string histogram_json(const std::map<int, int>& hist) {
  std::string s = "{";
  bool first = true;
  for (const auto& [degree, count] : hist) {
    if (!first) s += ", ";
    first = false;
    s += "\"" + std::to_string(degree) + "\": " + std::to_string(count);
  }
  return s + "}";
}

// Config file: {"train": {...}, "model": {...}}, both sections and all keys
// optional. Unknown keys are rejected so typos cannot silently fall back to
// defaults.
inline void apply_config_file(const std::string& path, TrainConfig& tc, ModelConfig& mc) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    raise(Errc::DeserializeError,
          path + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    for (const auto& [section, body] : j.items()) {
      if (section == "train") {
        for (const auto& [key, value] : body.items()) {
          if (key == "learning_rate") tc.learning_rate = value.get<double>();
          else if (key == "adam_epsilon") tc.adam_epsilon = value.get<double>();
          else if (key == "beta0") tc.beta0 = value.get<double>();
          else if (key == "beta1") tc.beta1 = value.get<double>();
          else if (key == "weight_decay") tc.weight_decay = value.get<double>();
          else if (key == "batch_size") tc.batch_size = value.get<int>();
          else if (key == "epochs") tc.epochs = value.get<int>();
          else if (key == "seed") tc.seed = value.get<std::uint64_t>();
          else if (key == "rebalance") tc.rebalance = value.get<bool>();
          else if (key == "negative_sampling_ratio") tc.negative_sampling_ratio = value.get<double>();
          else raise(Errc::DeserializeError, path + ": unknown train key '" + key + "'");
        }
      } else if (section == "model") {
        for (const auto& [key, value] : body.items()) {
          if (key == "K") mc.K = value.get<int>();
          else if (key == "d") mc.d = value.get<int>();
          else if (key == "head_hidden1") mc.head_hidden1 = value.get<int>();
          else if (key == "head_hidden2") mc.head_hidden2 = value.get<int>();
          else if (key == "bond_embedding") mc.bond_embedding = value.get<bool>();
          else raise(Errc::DeserializeError, path + ": unknown model key '" + key + "'");
        }
      } else {
        raise(Errc::DeserializeError, path + ": unknown section '" + section + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::DeserializeError, path + ": " + e.what());
  }
}

}  // namespace detail

struct TrainCli {
  std::string edges, smiles, config, out, history;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  int threads = 0;
  TrainConfig tc;  // CLI override holders; only count()>0 entries are applied
  ModelConfig mc;
};

inline int run_train(const TrainCli& args, const CLI::App& sub, std::ostream& out_stream) {
  TrainConfig tc;
  ModelConfig mc;
  if (!args.config.empty()) detail::apply_config_file(args.config, tc, mc);
  if (sub.count("--lr") > 0) tc.learning_rate = args.tc.learning_rate;
  if (sub.count("--adam-epsilon") > 0) tc.adam_epsilon = args.tc.adam_epsilon;
  if (sub.count("--weight-decay") > 0) tc.weight_decay = args.tc.weight_decay;
  if (sub.count("--batch-size") > 0) tc.batch_size = args.tc.batch_size;
  if (sub.count("--epochs") > 0) tc.epochs = args.tc.epochs;
  if (sub.count("--seed") > 0) tc.seed = args.seed;
  if (sub.count("--rebalance") > 0) tc.rebalance = args.tc.rebalance;
  if (sub.count("--neg-ratio") > 0) tc.negative_sampling_ratio = args.tc.negative_sampling_ratio;
  if (sub.count("--layers") > 0) mc.K = args.mc.K;
  if (sub.count("--width") > 0) mc.d = args.mc.d;
  if (sub.count("--bond-embedding") > 0) mc.bond_embedding = args.mc.bond_embedding;
  tc.validate();
  if (!(args.val_fraction >= 0.0 && args.val_fraction < 1.0)) {
    throw std::invalid_argument("--val-fraction must lie in [0, 1)");
  }

  const BipartiteNetwork net = BipartiteNetwork::ingest_file(args.edges);
  const MoleculeTable molecules = MoleculeTable::load_file(args.smiles);
  const int threads = resolve_threads(args.threads);

  // Positive-only inputs get supervision negatives drawn from the
  // unobserved cells; explicitly labeled inputs are used as-is.
  std::vector<Edge> supervision = net.edges();
  if (net.num_positive_edges() == supervision.size()) {
    const std::vector<Edge> negs =
        sample_negatives(net, tc.negative_sampling_ratio, tc.seed);
    supervision.insert(supervision.end(), negs.begin(), negs.end());
  }

  std::vector<Edge> train_pairs = supervision;
  std::vector<Edge> val_pairs;
  if (args.val_fraction > 0.0) {
    HoldoutSplit split = holdout_split(supervision, args.val_fraction, tc.seed);
    train_pairs = std::move(split.train);
    val_pairs = std::move(split.test);
  }

  TrainResult result = train(net, molecules, train_pairs, val_pairs, mc, tc, threads);

  const std::string history_path = args.history.empty() ? args.out + ".history.jsonl" : args.history;
  {
    std::ofstream h(history_path);
    if (!h) raise(Errc::IoError, "cannot open " + history_path + " for writing");
    for (const EpochRecord& rec : result.history) h << rec.to_json() << '\n';
    h.flush();
    if (!h) raise(Errc::IoError, "failed while writing " + history_path);
  }

  Checkpoint ckpt;
  ckpt.model = mc;
  ckpt.train = tc;
  ckpt.molecule_ids = net.molecule_ids();
  ckpt.target_ids = net.target_ids();
  for (const std::string& id : net.molecule_ids()) ckpt.smiles[id] = molecules.smiles_of(id);
  ckpt.params = std::move(result.params);
  save_checkpoint_file(args.out, ckpt);

  std::string summary = "{\"checkpoint\": " + detail::json_string(args.out);
  summary += ", \"history\": " + detail::json_string(history_path);
  summary += ", \"epochs\": " + std::to_string(result.history.size());
  summary += ", \"train_pairs\": " + std::to_string(train_pairs.size());
  summary += ", \"val_pairs\": " + std::to_string(val_pairs.size());
  if (result.history.empty()) {
    summary += ", \"final_loss\": null, \"final_val_auroc\": null";
  } else {
    summary += ", \"final_loss\": " + detail::json_number(result.history.back().loss);
    summary += ", \"final_val_auroc\": " + detail::json_number(result.history.back().val_auroc);
  }
  summary += "}";
  out_stream << summary << '\n';
  return 0;
}

struct EvaluateCli {
  std::string ckpt, edges, network, smiles;
  int threads = 0;
};

inline int run_evaluate(const EvaluateCli& args, std::ostream& out_stream) {
  const Checkpoint ckpt = load_checkpoint_file(args.ckpt);
  const BipartiteNetwork sup = BipartiteNetwork::ingest_file(args.edges);
  const BipartiteNetwork topo_file =
      args.network.empty() ? BipartiteNetwork{} : BipartiteNetwork::ingest_file(args.network);
  const BipartiteNetwork& topo = args.network.empty() ? sup : topo_file;
  const MoleculeTable molecules = detail::merged_molecules(ckpt, args.smiles);

  std::vector<detail::LabeledIdPair> rows;
  std::vector<int> labels;
  for (const Edge& e : sup.edges()) {
    rows.push_back({sup.molecule_id(e.m), sup.target_id(e.t), e.label});
    labels.push_back(e.label);
  }
  const std::vector<double> scores =
      detail::score_id_pairs(ckpt.params, topo, molecules, rows, resolve_threads(args.threads));
  out_stream << evaluate_scores(scores, labels).to_json() << '\n';
  return 0;
}

struct PredictCli {
  std::string ckpt, molecule, target, network, smiles;
};

inline int run_predict(const PredictCli& args, std::ostream& out_stream) {
  const Checkpoint ckpt = load_checkpoint_file(args.ckpt);
  const MoleculeTable molecules = detail::merged_molecules(ckpt, args.smiles);
  BipartiteNetwork topo;
  if (!args.network.empty()) topo = BipartiteNetwork::ingest_file(args.network);
  const PairedSubgraph pg =
      detail::pair_for_ids(topo, args.molecule, args.target, InteractionLabel::Missing);
  const double score = predict_value(pg, molecules.graph_of(args.molecule), ckpt.params);
  std::string s = "{\"molecule\": " + detail::json_string(args.molecule);
  s += ", \"target\": " + detail::json_string(args.target);
  s += ", \"score\": " + detail::json_number(score) + "}";
  out_stream << s << '\n';
  return 0;
}

struct KnockoutCli {
  std::string edges, out;
  std::uint64_t seed = 0;
  int threads = 0;
};

inline int run_knockout(const KnockoutCli& args, std::ostream& out_stream) {
  const BipartiteNetwork net = BipartiteNetwork::ingest_file(args.edges);
  const int threads = resolve_threads(args.threads);
  std::vector<PairQuery> queries;
  for (const Edge& e : net.edges()) queries.push_back({e.m, e.t, to_interaction_label(e.label)});
  const std::vector<PairedSubgraph> before = batch_pairs(net, queries, threads);
  const std::vector<PairedSubgraph> after = knockout_dataset(before, args.seed, threads);

  std::ofstream out(args.out);
  if (!out) raise(Errc::IoError, "cannot open " + args.out + " for writing");
  for (std::size_t i = 0; i < after.size(); ++i) {
    const Edge& e = net.edges()[i];
    std::string line = "{\"molecule\": " + detail::json_string(net.molecule_id(e.m));
    line += ", \"target\": " + detail::json_string(net.target_id(e.t));
    line += ", \"label\": " + std::to_string(e.label);
    line += ", \"molecule_side\": [";
    const PairedSubgraph& pg = after[i];
    for (std::size_t k = 0; k < pg.molecule_side.neighbors.size(); ++k) {
      if (k > 0) line += ", ";
      line += detail::json_string(net.target_id(pg.molecule_side.neighbors[k]));
    }
    line += "], \"target_side\": [";
    for (std::size_t k = 0; k < pg.target_side.neighbors.size(); ++k) {
      if (k > 0) line += ", ";
      line += detail::json_string(net.molecule_id(pg.target_side.neighbors[k]));
    }
    line += "]}";
    out << line << '\n';
  }
  out.flush();
  if (!out) raise(Errc::IoError, "failed while writing " + args.out);

  out_stream << summarize_knockout(before, after).to_json() << '\n';
  return 0;
}

struct IngestCli {
  std::string edges, smiles;
};

inline int run_ingest(const IngestCli& args, std::ostream& out_stream) {
  const BipartiteNetwork net = BipartiteNetwork::ingest_file(args.edges);
  const std::size_t positives = net.num_positive_edges();
  std::string s = "{\"molecules\": " + std::to_string(net.num_molecules());
  s += ", \"targets\": " + std::to_string(net.num_targets());
  s += ", \"edges\": " + std::to_string(net.edges().size());
  s += ", \"positives\": " + std::to_string(positives);
  s += ", \"negatives\": " + std::to_string(net.edges().size() - positives);
  const double density = static_cast<double>(positives) /
                         static_cast<double>(net.num_molecules() * net.num_targets());
  s += ", \"density\": " + detail::json_number(density);
  if (!args.smiles.empty()) {
    const MoleculeTable molecules = MoleculeTable::load_file(args.smiles);
    std::size_t missing = 0;
    for (const std::string& id : net.molecule_ids()) {
      if (molecules.contains(id)) {
        molecules.graph_of(id);  // parse now so bad structures fail loudly here
      } else {
        ++missing;
      }
    }
    s += ", \"structures\": " + std::to_string(molecules.size());
    s += ", \"missing_structures\": " + std::to_string(missing);
  }
  s += "}";
  out_stream << s << '\n';
  return 0;
}

struct SplitCli {
  std::string edges, train_out, test_out, out_prefix;
  double fraction = 0.0;
  int folds = 0;
  std::uint64_t seed = 0;
};

inline int run_split(const SplitCli& args, std::ostream& out_stream) {
  const BipartiteNetwork net = BipartiteNetwork::ingest_file(args.edges);
  if (args.folds > 0) {
    if (args.out_prefix.empty()) throw std::invalid_argument("--folds requires --out-prefix");
    const std::vector<Fold> folds = kfold_split(net.edges(), args.folds, args.seed);
    std::string sizes = "[";
    for (std::size_t i = 0; i < folds.size(); ++i) {
      const std::string base = args.out_prefix + ".fold" + std::to_string(i);
      detail::write_edges_tsv(base + ".train.tsv", net, folds[i].train);
      detail::write_edges_tsv(base + ".test.tsv", net, folds[i].test);
      if (i > 0) sizes += ", ";
      sizes += std::to_string(folds[i].test.size());
    }
    sizes += "]";
    out_stream << "{\"folds\": " << args.folds << ", \"test_sizes\": " << sizes << "}" << '\n';
    return 0;
  }
  if (args.fraction <= 0.0 || args.train_out.empty() || args.test_out.empty()) {
    throw std::invalid_argument("split needs --folds, or --fraction with --train-out and --test-out");
  }
  const HoldoutSplit split = holdout_split(net.edges(), args.fraction, args.seed);
  detail::write_edges_tsv(args.train_out, net, split.train);
  detail::write_edges_tsv(args.test_out, net, split.test);
  out_stream << "{\"train_edges\": " << split.train.size()
             << ", \"test_edges\": " << split.test.size() << "}" << '\n';
  return 0;
}

inline int run_gradcheck_cmd(std::uint64_t seed, std::ostream& out_stream) {
  const GradCheckSuite suite = run_gradcheck(seed);
  for (const GradCheckCase& c : suite.cases) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", c.report.worst);
    out_stream << c.name << '\t' << buf << '\t' << (c.report.pass ? "pass" : "FAIL") << '\n';
  }
  out_stream << suite.to_json() << '\n';
  return suite.pass ? 0 : 3;
}

inline int run_degree_hist(const std::string& edges, std::ostream& out_stream) {
  const BipartiteNetwork net = BipartiteNetwork::ingest_file(edges);
  out_stream << "{\"molecule\": " << detail::histogram_json(net.degree_histogram(Side::Molecule))
             << ", \"target\": " << detail::histogram_json(net.degree_histogram(Side::Target))
             << "}" << '\n';
  return 0;
}

// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
inline int run(int argc, const char* const* argv, std::ostream& out_stream = std::cout) {
  CLI::App app{"Link prediction on bipartite molecule-target networks"};
  app.require_subcommand(1);

  TrainCli train_args;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--edges", train_args.edges, "Interaction TSV (molecule, target, 0/1)")
      ->required();
  train_cmd->add_option("--smiles", train_args.smiles, "Molecule structure TSV (id, SMILES)")
      ->required();
  train_cmd->add_option("--out", train_args.out, "Checkpoint output path")->required();
  train_cmd->add_option("--history", train_args.history, "History JSONL path (default <out>.history.jsonl)");
  train_cmd->add_option("--config", train_args.config, "JSON config file");
  train_cmd->add_option("--val-fraction", train_args.val_fraction, "Validation share, 0 disables");
  train_cmd->add_option("--seed", train_args.seed, "RNG seed");
  train_cmd->add_option("--threads", train_args.threads, "Worker threads (MTILINK_THREADS fallback)");
  train_cmd->add_option("--lr", train_args.tc.learning_rate, "Learning rate");
  train_cmd->add_option("--adam-epsilon", train_args.tc.adam_epsilon, "Adam epsilon");
  train_cmd->add_option("--weight-decay", train_args.tc.weight_decay, "L2 weight decay");
  train_cmd->add_option("--batch-size", train_args.tc.batch_size, "Batch size");
  train_cmd->add_option("--epochs", train_args.tc.epochs, "Training epochs");
  train_cmd->add_flag("--rebalance,!--no-rebalance", train_args.tc.rebalance,
                      "Undersample the majority class each epoch");
  train_cmd->add_option("--neg-ratio", train_args.tc.negative_sampling_ratio,
                        "Sampled negatives per positive when input has none");
  train_cmd->add_option("--layers", train_args.mc.K, "GNN layers per branch");
  train_cmd->add_option("--width", train_args.mc.d, "Embedding width");
  train_cmd->add_flag("--bond-embedding,!--no-bond-embedding", train_args.mc.bond_embedding,
                      "Add bond-type embeddings to molecule messages");

  EvaluateCli eval_args;
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "Score labeled pairs with a checkpoint");
  eval_cmd->add_option("--ckpt", eval_args.ckpt, "Checkpoint path")->required();
  eval_cmd->add_option("--edges", eval_args.edges, "Labeled pairs TSV")->required();
  eval_cmd->add_option("--network", eval_args.network, "Topology TSV (default: the pairs file)");
  eval_cmd->add_option("--smiles", eval_args.smiles, "Extra structures TSV");
  eval_cmd->add_option("--threads", eval_args.threads, "Worker threads");

  PredictCli predict_args;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Score one molecule-target pair");
  predict_cmd->add_option("--ckpt", predict_args.ckpt, "Checkpoint path")->required();
  predict_cmd->add_option("--molecule", predict_args.molecule, "Molecule id")->required();
  predict_cmd->add_option("--target", predict_args.target, "Target id")->required();
  predict_cmd->add_option("--network", predict_args.network, "Topology TSV (optional)");
  predict_cmd->add_option("--smiles", predict_args.smiles, "Extra structures TSV");

  KnockoutCli knockout_args;
  CLI::App* knockout_cmd =
      app.add_subcommand("knockout", "Extract pair subgraphs and knock out edges");
  knockout_cmd->add_option("--edges", knockout_args.edges, "Interaction TSV")->required();
  knockout_cmd->add_option("--out", knockout_args.out, "Perturbed dataset JSONL path")->required();
  knockout_cmd->add_option("--seed", knockout_args.seed, "RNG seed");
  knockout_cmd->add_option("--threads", knockout_args.threads, "Worker threads");

  IngestCli ingest_args;
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "Validate and summarize input files");
  ingest_cmd->add_option("--edges", ingest_args.edges, "Interaction TSV")->required();
  ingest_cmd->add_option("--smiles", ingest_args.smiles, "Structures TSV to cross-check");

  SplitCli split_args;
  CLI::App* split_cmd = app.add_subcommand("split", "Split edges into train/test files");
  split_cmd->add_option("--edges", split_args.edges, "Interaction TSV")->required();
  split_cmd->add_option("--fraction", split_args.fraction, "Test share in (0, 1)");
  split_cmd->add_option("--train-out", split_args.train_out, "Train TSV output");
  split_cmd->add_option("--test-out", split_args.test_out, "Test TSV output");
  split_cmd->add_option("--folds", split_args.folds, "Write k cross-validation folds instead");
  split_cmd->add_option("--out-prefix", split_args.out_prefix, "Prefix for fold files");
  split_cmd->add_option("--seed", split_args.seed, "RNG seed");

  std::uint64_t gradcheck_seed = 0;
  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "Finite-difference check of every tensor op");
  gradcheck_cmd->add_option("--seed", gradcheck_seed, "RNG seed");

  std::string degree_hist_edges;
  CLI::App* degree_hist_cmd =
      app.add_subcommand("degree-hist", "Positive-degree histograms per side");
  degree_hist_cmd->add_option("--edges", degree_hist_edges, "Interaction TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) return run_train(train_args, *train_cmd, out_stream);
    if (*eval_cmd) return run_evaluate(eval_args, out_stream);
    if (*predict_cmd) return run_predict(predict_args, out_stream);
    if (*knockout_cmd) return run_knockout(knockout_args, out_stream);
    if (*ingest_cmd) return run_ingest(ingest_args, out_stream);
    if (*split_cmd) return run_split(split_args, out_stream);
    if (*gradcheck_cmd) return run_gradcheck_cmd(gradcheck_seed, out_stream);
    if (*degree_hist_cmd) return run_degree_hist(degree_hist_edges, out_stream);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.numeric() ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

inline int run(int argc, char** argv) { return run(argc, const_cast<const char* const*>(argv)); }

}  // namespace mtilink::cli
