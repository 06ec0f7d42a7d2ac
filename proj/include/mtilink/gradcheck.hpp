#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mtilink/jsonio.hpp"
#include "mtilink/model.hpp"
#include "mtilink/rng.hpp"
#include "mtilink/smiles.hpp"
#include "mtilink/subgraph.hpp"
#include "mtilink/tensor.hpp"

namespace mtilink {

struct GradCheckCase {
  std::string name;
  GradCheckReport report;
};

struct GradCheckSuite {
  std::vector<GradCheckCase> cases;
  double worst = 0.0;
  double tolerance = 0.0;
  bool pass = true;

  std::string to_json() const {
    std::string s = "{\"pass\": ";
    s += pass ? "true" : "false";
    s += ", \"worst\": " + detail::json_number(worst);
    s += ", \"tolerance\": " + detail::json_number(tolerance);
    s += ", \"cases\": [";
    for (std::size_t i = 0; i < cases.size(); ++i) {
      if (i > 0) s += ", ";
      s += "{\"name\": " + detail::json_string(cases[i].name);
      s += ", \"worst\": " + detail::json_number(cases[i].report.worst);
      s += ", \"pass\": ";
      s += cases[i].report.pass ? "true" : "false";
      s += "}";
    }
    s += "]}";
    return s;
  }
};

namespace detail {

// Magnitudes in [0.2, 0.9] with random sign: far enough from zero that a
// 1e-6 finite-difference step never steps across a relu kink or a max tie.
inline Tensor gradcheck_tensor(std::size_t rows, std::size_t cols, Xoshiro256ss& rng) {
  Tensor t = Tensor::zeros({rows, cols});
  for (double& v : t.data) {
    const double mag = 0.2 + 0.7 * rng.uniform();
    v = (rng.next() & 1) ? mag : -mag;
  }
  return t;
}

// Fixed linear functional u^T M v, so any [rows, cols] output becomes a
// scalar loss with order-one gradients everywhere.
inline Tape::Ref scalarize(Tape& tape, Tape::Ref m, std::size_t rows, std::size_t cols) {
  Tensor u = Tensor::zeros({1, rows});
  Tensor v = Tensor::zeros({cols, 1});
  for (std::size_t i = 0; i < rows; ++i) u.data[i] = 0.3 + 0.1 * static_cast<double>(i);
  for (std::size_t i = 0; i < cols; ++i) v.data[i] = 0.4 - 0.1 * static_cast<double>(i);
  return tape.matmul(tape.matmul(tape.input(u), m), tape.input(v));
}

}  // namespace detail

// One finite-difference check per tape op, then the whole model end to end.
inline GradCheckSuite run_gradcheck(std::uint64_t seed = 0) {
  GradCheckSuite suite;
  suite.tolerance = 1e-4;
  const auto add_case = [&suite](const std::string& name, GradCheckReport report) {
    suite.worst = std::max(suite.worst, report.worst);
    suite.pass = suite.pass && report.pass;
    suite.cases.push_back({name, std::move(report)});
  };
  std::uint64_t stream = 0;
  const auto rng_for_case = [&]() { return Xoshiro256ss(seed, streams::kGradCheck, stream++); };

  {
    Xoshiro256ss rng = rng_for_case();
    Tensor A = detail::gradcheck_tensor(2, 3, rng);
    Tensor B = detail::gradcheck_tensor(3, 2, rng);
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.matmul(t.parameter(A), t.parameter(B)), 2, 2);
    };
    add_case("matmul", grad_check(build, {{"A", &A}, {"B", &B}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor A = detail::gradcheck_tensor(2, 3, rng);
    Tensor B = detail::gradcheck_tensor(2, 3, rng);
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.add(t.parameter(A), t.parameter(B)), 2, 3);
    };
    add_case("add", grad_check(build, {{"A", &A}, {"B", &B}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor A = detail::gradcheck_tensor(2, 3, rng);
    Tensor b = detail::gradcheck_tensor(1, 3, rng);
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.add(t.parameter(A), t.parameter(b)), 2, 3);
    };
    add_case("add_broadcast", grad_check(build, {{"A", &A}, {"b", &b}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor A = detail::gradcheck_tensor(2, 3, rng);
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.scalar_mul(t.parameter(A), 1.7), 2, 3);
    };
    add_case("scalar_mul", grad_check(build, {{"A", &A}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor A = detail::gradcheck_tensor(3, 3, rng);
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.relu(t.parameter(A)), 3, 3);
    };
    add_case("relu", grad_check(build, {{"A", &A}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor A = detail::gradcheck_tensor(3, 3, rng);
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.sigmoid(t.parameter(A)), 3, 3);
    };
    add_case("sigmoid", grad_check(build, {{"A", &A}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor A = detail::gradcheck_tensor(2, 3, rng);
    Tensor B = detail::gradcheck_tensor(1, 3, rng);
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.concat({t.parameter(A), t.parameter(B)}, 0), 3, 3);
    };
    add_case("concat_axis0", grad_check(build, {{"A", &A}, {"B", &B}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor A = detail::gradcheck_tensor(2, 2, rng);
    Tensor B = detail::gradcheck_tensor(2, 3, rng);
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.concat({t.parameter(A), t.parameter(B)}, 1), 2, 5);
    };
    add_case("concat_axis1", grad_check(build, {{"A", &A}, {"B", &B}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor T = detail::gradcheck_tensor(5, 3, rng);
    const std::vector<int> ids{3, 0, 3, 1};
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.embedding_lookup(t.parameter(T), ids), 4, 3);
    };
    add_case("embedding_lookup", grad_check(build, {{"T", &T}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor V = detail::gradcheck_tensor(5, 3, rng);
    const std::vector<int> segments{0, 2, 1, 0, 2};
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.segment_sum(t.parameter(V), segments, 4), 4, 3);
    };
    add_case("segment_sum", grad_check(build, {{"V", &V}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor V = detail::gradcheck_tensor(5, 3, rng);
    const std::vector<int> segments{0, 2, 1, 0, 2};
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.segment_max(t.parameter(V), segments, 4), 4, 3);
    };
    add_case("segment_max", grad_check(build, {{"V", &V}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor A = detail::gradcheck_tensor(4, 3, rng);
    const auto build = [&](Tape& t) {
      return detail::scalarize(t, t.mean(t.parameter(A), 0), 1, 3);
    };
    add_case("mean", grad_check(build, {{"A", &A}}));
  }
  {
    Xoshiro256ss rng = rng_for_case();
    Tensor Z = detail::gradcheck_tensor(1, 4, rng);
    const Tensor y = [] {
      Tensor t = Tensor::zeros({1, 4});
      t.data = {1.0, 0.0, 1.0, 0.0};
      return t;
    }();
    const auto build = [&](Tape& t) {
      return t.binary_cross_entropy(t.sigmoid(t.parameter(Z)), y);
    };
    add_case("binary_cross_entropy", grad_check(build, {{"Z", &Z}}));
  }
  {
    ModelConfig mc;
    mc.K = 2;
    mc.d = 3;
    mc.head_hidden1 = 4;
    mc.head_hidden2 = 3;
    ModelParams params = init_params(mc, seed);
    PairedSubgraph pg;
    pg.molecule_side = Subgraph{NodeRef{Side::Molecule, 0}, {0}};
    pg.target_side = Subgraph{NodeRef{Side::Target, 0}, {1}};
    const GraphEncoding pair_enc = encode_pair_graph(pg);
    const GraphEncoding mol_enc = encode_molecule(parse_smiles("c1ccccc1"));
    const Tensor label = Tensor::scalar(1.0);
    const auto build = [&](Tape& t) {
      return t.binary_cross_entropy(predict_pair(t, pair_enc, mol_enc, params), label);
    };
    add_case("model_composite", grad_check(build, param_list(params)));
  }
  return suite;
}

}  // namespace mtilink
