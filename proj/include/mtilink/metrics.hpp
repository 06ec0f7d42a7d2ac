#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "mtilink/bipartite.hpp"
#include "mtilink/error.hpp"
#include "mtilink/jsonio.hpp"
#include "mtilink/model.hpp"
#include "mtilink/smiles.hpp"
#include "mtilink/subgraph.hpp"
#include "mtilink/threading.hpp"

namespace mtilink {

namespace detail {

inline void check_scored_input(const std::vector<double>& scores, const std::vector<int>& labels,
                               std::size_t n_pos, std::size_t n_neg) {
  if (scores.size() != labels.size()) {
    raise(Errc::ShapeMismatch, std::to_string(scores.size()) + " scores vs " +
                                   std::to_string(labels.size()) + " labels");
  }
  if (n_pos == 0 || n_neg == 0) {
    raise(Errc::SingleClassDataset, "need both classes, got " + std::to_string(n_pos) +
                                        " positive / " + std::to_string(n_neg) + " negative");
  }
}

}  // namespace detail

// Mann-Whitney AUROC: (concordant pairs + 0.5 * tied pairs) / (P * N),
// computed as a rank sum with average ranks on ties. Rank sums and pair
// counts are half-integers, so the two formulations agree bitwise.
inline double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y == 1 ? 1 : 0;
  const std::size_t n_neg = labels.size() - n_pos;
  detail::check_scored_input(scores, labels, n_pos, n_neg);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(n_pos);
  return (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(n_neg));
}

// Average precision over the descending-score sweep with tied scores entering
// as one group. positive_class 0 is the negative-class view: labels flip and
// scores negate, so the same score array serves both views.
inline double aupr(const std::vector<double>& scores, const std::vector<int>& labels,
                   int positive_class = 1) {
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y == positive_class ? 1 : 0;
  detail::check_scored_input(scores, labels, n_pos, n - n_pos);

  std::vector<double> ranked(n);
  for (std::size_t i = 0; i < n; ++i) ranked[i] = positive_class == 1 ? scores[i] : -scores[i];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&ranked](std::size_t a, std::size_t b) { return ranked[a] > ranked[b]; });

  double ap = 0.0;
  double recall_prev = 0.0;
  std::size_t cum_tp = 0;
  std::size_t cum_total = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && ranked[order[j]] == ranked[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == positive_class) ++cum_tp;
    }
    cum_total += j - i;
    const double recall = static_cast<double>(cum_tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(cum_tp) / static_cast<double>(cum_total);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
    i = j;
  }
  return ap;
}

inline double harmonic_average(double a, double b) {
  if (a + b == 0.0) raise(Errc::ZeroDenominator, "harmonic average of values summing to zero");
  if (a == b) return a;  // idempotence, exactly
  return 2.0 * a * b / (a + b);
}

struct EvalReport {
  double auroc = 0.0;
  double aupr = 0.0;
  double auroc_pos = 0.0;
  double auroc_neg = 0.0;
  double aupr_pos = 0.0;
  double aupr_neg = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;

  std::string to_json() const {
    std::string out = "{";
    out += "\"auroc\": " + detail::json_number(auroc);
    out += ", \"aupr\": " + detail::json_number(aupr);
    out += ", \"auroc_pos\": " + detail::json_number(auroc_pos);
    out += ", \"auroc_neg\": " + detail::json_number(auroc_neg);
    out += ", \"aupr_pos\": " + detail::json_number(aupr_pos);
    out += ", \"aupr_neg\": " + detail::json_number(aupr_neg);
    out += ", \"n_pos\": " + std::to_string(n_pos);
    out += ", \"n_neg\": " + std::to_string(n_neg);
    out += "}";
    return out;
  }

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Reported AUROC/AUPR are the harmonic averages of the positive- and
// negative-class views. The AUROC views coincide up to tie effects; they are
// still computed separately, taking the flip-symmetry claim at face value.
inline EvalReport evaluate_scores(const std::vector<double>& scores,
                                  const std::vector<int>& labels) {
  EvalReport report;
  for (int y : labels) ++(y == 1 ? report.n_pos : report.n_neg);
  report.auroc_pos = auroc(scores, labels);
  std::vector<double> neg_scores(scores.size());
  std::vector<int> neg_labels(labels.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    neg_scores[i] = -scores[i];
    neg_labels[i] = labels[i] == 1 ? 0 : 1;
  }
  report.auroc_neg = auroc(neg_scores, neg_labels);
  report.aupr_pos = aupr(scores, labels, 1);
  report.aupr_neg = aupr(scores, labels, 0);
  report.auroc = harmonic_average(report.auroc_pos, report.auroc_neg);
  report.aupr = harmonic_average(report.aupr_pos, report.aupr_neg);
  return report;
}

// Scores every pair with fresh leakage-removed extraction. The molecule
// graph cache is warmed serially first; the parallel section only reads it.
inline std::vector<double> score_pairs(const ModelParams& params, const BipartiteNetwork& net,
                                       const MoleculeTable& molecules,
                                       const std::vector<Edge>& pairs, int threads = 1) {
  for (const Edge& e : pairs) molecules.graph_of(net.molecule_id(e.m));
  std::vector<double> scores(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    const Edge& e = pairs[i];
    const PairedSubgraph pg = pair_subgraphs(net, e.m, e.t, to_interaction_label(e.label));
    scores[i] = predict_value(pg, molecules.graph_of(net.molecule_id(e.m)), params);
  });
  return scores;
}

inline EvalReport evaluate(const ModelParams& params, const BipartiteNetwork& net,
                           const MoleculeTable& molecules, const std::vector<Edge>& pairs,
                           int threads = 1) {
  const std::vector<double> scores = score_pairs(params, net, molecules, pairs, threads);
  std::vector<int> labels(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) labels[i] = pairs[i].label;
  return evaluate_scores(scores, labels);
}

}  // namespace mtilink
