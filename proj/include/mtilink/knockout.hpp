#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mtilink/error.hpp"
#include "mtilink/jsonio.hpp"
#include "mtilink/rng.hpp"
#include "mtilink/subgraph.hpp"
#include "mtilink/threading.hpp"

namespace mtilink {

namespace detail {

// One row of Pascal's triangle by the multiplicative rule; every
// intermediate fits in 128 bits for degree <= 62.
inline std::vector<std::uint64_t> binomial_row(std::size_t n) {
  std::vector<std::uint64_t> row(n + 1);
  row[0] = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const auto wide = static_cast<unsigned __int128>(row[k]) * (n - k);
    row[k + 1] = static_cast<std::uint64_t>(wide / (k + 1));
  }
  return row;
}

}  // namespace detail

// rho_delta = C(Delta, delta) / (2^Delta - 1) for delta in {1..Delta}: the
// chance of deleting each possible removal size, equivalently a uniform draw
// over the non-empty edge subsets. Exact integers up to Delta = 62, then a
// log-gamma fallback (observed degrees rarely get near that).
inline std::vector<double> knockout_pmf(std::size_t degree) {
  if (degree == 0) raise(Errc::DegreeZero, "knockout pmf needs degree >= 1");
  std::vector<double> pmf(degree);
  if (degree <= 62) {
    const std::vector<std::uint64_t> row = detail::binomial_row(degree);
    const auto denom =
        static_cast<double>((std::uint64_t{1} << degree) - 1);
    for (std::size_t d = 1; d <= degree; ++d) {
      pmf[d - 1] = static_cast<double>(row[d]) / denom;
    }
  } else {
    const auto n = static_cast<double>(degree);
    const double log_denom = n * std::log(2.0) + std::log1p(-std::exp2(-n));
    for (std::size_t d = 1; d <= degree; ++d) {
      const auto k = static_cast<double>(d);
      pmf[d - 1] = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                            std::lgamma(n - k + 1.0) - log_denom);
    }
  }
  return pmf;
}

struct KnockoutPlan {
  std::size_t delta = 0;               // 0 means no-op (degree-0 subgraph)
  std::vector<std::size_t> removed;    // distinct edge slots, random order
};

inline KnockoutPlan sample_knockout_plan(std::size_t degree, Xoshiro256ss& rng) {
  KnockoutPlan plan;
  if (degree == 0) return plan;
  const std::vector<double> pmf = knockout_pmf(degree);
  const double u = rng.uniform();
  double cum = 0.0;
  plan.delta = degree;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    cum += pmf[i];
    if (u < cum) {
      plan.delta = i + 1;
      break;
    }
  }
  plan.removed = rng.sample_indices(degree, plan.delta);
  return plan;
}

// Deletes delta ~ pmf uniformly-chosen edges; the orphaned neighbor nodes go
// with them (a star has no other way to reach them). Centers always survive.
inline Subgraph knockout_subgraph(const Subgraph& g, Xoshiro256ss& rng) {
  const KnockoutPlan plan = sample_knockout_plan(g.degree(), rng);
  if (plan.delta == 0) return g;
  std::vector<char> drop(g.neighbors.size(), 0);
  for (std::size_t i : plan.removed) drop[i] = 1;
  Subgraph out;
  out.center = g.center;
  out.neighbors.reserve(g.neighbors.size() - plan.delta);
  for (std::size_t i = 0; i < g.neighbors.size(); ++i) {
    if (!drop[i]) out.neighbors.push_back(g.neighbors[i]);
  }
  return out;
}

// Both sides of every pair are knocked independently. Streams derive from
// (seed, pair index, side), so any schedule produces the same output.
inline std::vector<PairedSubgraph> knockout_dataset(std::vector<PairedSubgraph> pairs,
                                                    std::uint64_t seed, int threads = 1) {
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    Xoshiro256ss mol_rng(seed, streams::kKnockout, 2 * i);
    Xoshiro256ss tgt_rng(seed, streams::kKnockout, 2 * i + 1);
    pairs[i].molecule_side = knockout_subgraph(pairs[i].molecule_side, mol_rng);
    pairs[i].target_side = knockout_subgraph(pairs[i].target_side, tgt_rng);
  });
  return pairs;
}

struct KnockoutSummary {
  std::size_t pairs = 0;
  std::size_t edges_before = 0;
  std::size_t edges_after = 0;
  double mean_delta_fraction = 0.0;

  std::string to_json() const {
    std::string out = "{\"pairs\": " + std::to_string(pairs);
    out += ", \"edges_before\": " + std::to_string(edges_before);
    out += ", \"edges_after\": " + std::to_string(edges_after);
    out += ", \"mean_delta_fraction\": " + detail::json_number(mean_delta_fraction);
    out += "}";
    return out;
  }
};

inline KnockoutSummary summarize_knockout(const std::vector<PairedSubgraph>& before,
                                          const std::vector<PairedSubgraph>& after) {
  if (before.size() != after.size()) {
    raise(Errc::ShapeMismatch, "knockout summary over " + std::to_string(before.size()) +
                                   " vs " + std::to_string(after.size()) + " pairs");
  }
  KnockoutSummary s;
  s.pairs = before.size();
  double fraction_sum = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i) {
    const std::size_t b = before[i].num_edges();
    const std::size_t a = after[i].num_edges();
    s.edges_before += b;
    s.edges_after += a;
    if (b > 0) fraction_sum += static_cast<double>(b - a) / static_cast<double>(b);
  }
  if (s.pairs > 0) s.mean_delta_fraction = fraction_sum / static_cast<double>(s.pairs);
  return s;
}

}  // namespace mtilink
