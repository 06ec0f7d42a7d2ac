#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "mtilink/error.hpp"

namespace mtilink {

// Dense row-major tensor of rank 0, 1 or 2. 64-bit floats everywhere:
// desk-scale sizes make speed a non-issue and the finite-difference checks
// need the precision.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() : data(1, 0.0) {}  // rank-0 zero

  static Tensor scalar(double v) {
    Tensor t;
    t.data[0] = v;
    return t;
  }

  static Tensor vec(std::vector<double> values) {
    Tensor t;
    t.shape = {values.size()};
    t.data = std::move(values);
    return t;
  }

  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
    Tensor t;
    t.shape = {rows, cols};
    if (values.size() != rows * cols) {
      raise(Errc::ShapeMismatch, "matrix data size " + std::to_string(values.size()) +
                                     " != " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    t.data = std::move(values);
    return t;
  }

  static Tensor zeros(std::vector<std::size_t> shape) {
    Tensor t;
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    t.shape = std::move(shape);
    t.data.assign(n, 0.0);
    return t;
  }

  static Tensor zeros_like(const Tensor& other) { return zeros(other.shape); }

  std::size_t rank() const { return shape.size(); }
  std::size_t size() const { return data.size(); }

  std::size_t rows() const { return rank() == 2 ? shape[0] : 1; }
  std::size_t cols() const { return rank() == 2 ? shape[1] : size(); }

  double& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

  bool finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  std::string shape_str() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Recorded forward graph with reverse-mode differentiation. Single-threaded
// by design: one tape per sample, gradients reduced across tapes by the
// caller in fixed sample order.
class Tape {
 public:
  using Ref = std::size_t;

  Ref input(Tensor v) {
    finite_or_raise(v, "input");
    return push(OpKind::Input, std::move(v), {});
  }

  // Registers (or re-uses) a leaf backed by caller-owned storage. The value
  // is copied at registration time; grad_of reads back by address.
  Ref parameter(const Tensor& storage) {
    auto it = param_refs_.find(&storage);
    if (it != param_refs_.end()) return it->second;
    finite_or_raise(storage, "parameter");
    const Ref ref = push(OpKind::Parameter, storage, {});
    nodes_[ref].param = &storage;
    param_refs_.emplace(&storage, ref);
    return ref;
  }

  Ref matmul(Ref a, Ref b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (A.rank() != 2 || B.rank() != 2 || A.shape[1] != B.shape[0]) {
      raise(Errc::ShapeMismatch, "matmul " + A.shape_str() + " x " + B.shape_str());
    }
    const std::size_t n = A.shape[0], k = A.shape[1], m = B.shape[1];
    Tensor out = Tensor::zeros({n, m});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t kk = 0; kk < k; ++kk) {
        const double av = A.at(i, kk);
        for (std::size_t j = 0; j < m; ++j) out.at(i, j) += av * B.at(kk, j);
      }
    }
    return push_checked(OpKind::Matmul, std::move(out), {a, b});
  }

  // Same-shape addition, or broadcast of a row vector (rank-1 [d] or rank-2
  // [1, d]) over the rows of a rank-2 left operand.
  Ref add(Ref a, Ref b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    Tensor out;
    if (A.shape == B.shape) {
      out = A;
      for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += B.data[i];
    } else if (A.rank() == 2 && B.size() == A.shape[1] && (B.rank() == 1 || B.rows() == 1)) {
      out = A;
      for (std::size_t r = 0; r < A.shape[0]; ++r) {
        for (std::size_t c = 0; c < A.shape[1]; ++c) out.at(r, c) += B.data[c];
      }
    } else {
      raise(Errc::ShapeMismatch, "add " + A.shape_str() + " + " + B.shape_str());
    }
    return push_checked(OpKind::Add, std::move(out), {a, b});
  }

  Ref scalar_mul(Ref a, double c) {
    Tensor out = value(a);
    for (double& v : out.data) v *= c;
    const Ref ref = push_checked(OpKind::ScalarMul, std::move(out), {a});
    nodes_[ref].scalar = c;
    return ref;
  }

  Ref relu(Ref a) {
    Tensor out = value(a);
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return push_checked(OpKind::Relu, std::move(out), {a});
  }

  Ref sigmoid(Ref a) {
    Tensor out = value(a);
    for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
    return push_checked(OpKind::Sigmoid, std::move(out), {a});
  }

  // Concatenation along `axis`. Rank-1 inputs join end to end (axis 0);
  // rank-2 inputs stack rows (axis 0) or widen columns (axis 1).
  Ref concat(const std::vector<Ref>& parts, int axis) {
    if (parts.empty()) raise(Errc::ShapeMismatch, "concat of zero tensors");
    const std::size_t rank = value(parts[0]).rank();
    for (Ref p : parts) {
      if (value(p).rank() != rank) raise(Errc::ShapeMismatch, "concat of mixed ranks");
    }
    Tensor out;
    if (rank == 1) {
      if (axis != 0) raise(Errc::ShapeMismatch, "concat axis 1 on rank-1 tensors");
      std::size_t n = 0;
      for (Ref p : parts) n += value(p).size();
      out = Tensor::zeros({n});
      std::size_t off = 0;
      for (Ref p : parts) {
        const Tensor& t = value(p);
        std::copy(t.data.begin(), t.data.end(), out.data.begin() + off);
        off += t.size();
      }
    } else if (rank == 2 && axis == 0) {
      const std::size_t cols = value(parts[0]).shape[1];
      std::size_t rows = 0;
      for (Ref p : parts) {
        if (value(p).shape[1] != cols) {
          raise(Errc::ShapeMismatch, "concat axis 0: column widths differ");
        }
        rows += value(p).shape[0];
      }
      out = Tensor::zeros({rows, cols});
      std::size_t off = 0;
      for (Ref p : parts) {
        const Tensor& t = value(p);
        std::copy(t.data.begin(), t.data.end(), out.data.begin() + off);
        off += t.size();
      }
    } else if (rank == 2 && axis == 1) {
      const std::size_t rows = value(parts[0]).shape[0];
      std::size_t cols = 0;
      for (Ref p : parts) {
        if (value(p).shape[0] != rows) raise(Errc::ShapeMismatch, "concat axis 1: row counts differ");
        cols += value(p).shape[1];
      }
      out = Tensor::zeros({rows, cols});
      std::size_t off = 0;
      for (Ref p : parts) {
        const Tensor& t = value(p);
        for (std::size_t r = 0; r < rows; ++r) {
          std::copy(t.data.begin() + r * t.shape[1], t.data.begin() + (r + 1) * t.shape[1],
                    out.data.begin() + r * cols + off);
        }
        off += t.shape[1];
      }
    } else {
      raise(Errc::ShapeMismatch, "concat axis " + std::to_string(axis));
    }
    const Ref ref = push_checked(OpKind::Concat, std::move(out), parts);
    nodes_[ref].axis = axis;
    return ref;
  }

  // Row gather: out[r, :] = table[ids[r], :]. Doubles as the embedding op.
  Ref embedding_lookup(Ref table, const std::vector<int>& ids) {
    const Tensor& T = value(table);
    if (T.rank() != 2) raise(Errc::ShapeMismatch, "embedding table must be rank 2");
    const std::size_t d = T.shape[1];
    Tensor out = Tensor::zeros({ids.size(), d});
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const int id = ids[r];
      if (id < 0 || static_cast<std::size_t>(id) >= T.shape[0]) {
        raise(Errc::IndexOutOfRange, "embedding id " + std::to_string(id) + " outside table of " +
                                         std::to_string(T.shape[0]) + " rows");
      }
      std::copy(T.data.begin() + id * d, T.data.begin() + (id + 1) * d,
                out.data.begin() + r * d);
    }
    const Ref ref = push_checked(OpKind::EmbeddingLookup, std::move(out), {table});
    nodes_[ref].ids = ids;
    return ref;
  }

  Ref segment_sum(Ref values, const std::vector<int>& segment_ids, std::size_t n_segments) {
    const auto [n, d, rank1] = segment_dims(values, segment_ids, n_segments);
    Tensor out = rank1 ? Tensor::zeros({n_segments}) : Tensor::zeros({n_segments, d});
    const Tensor& V = value(values);
    for (std::size_t r = 0; r < n; ++r) {
      const auto s = static_cast<std::size_t>(segment_ids[r]);
      for (std::size_t c = 0; c < d; ++c) out.data[s * d + c] += V.data[r * d + c];
    }
    const Ref ref = push_checked(OpKind::SegmentSum, std::move(out), {values});
    nodes_[ref].ids = segment_ids;
    return ref;
  }

  // Elementwise max per segment; an empty segment yields 0, matching the
  // model's empty-neighborhood convention. The gradient flows to the FIRST
  // row attaining each maximum.
  Ref segment_max(Ref values, const std::vector<int>& segment_ids, std::size_t n_segments) {
    const auto [n, d, rank1] = segment_dims(values, segment_ids, n_segments);
    Tensor out = rank1 ? Tensor::zeros({n_segments}) : Tensor::zeros({n_segments, d});
    std::vector<std::size_t> winner(n_segments * d, kNoWinner);
    const Tensor& V = value(values);
    for (std::size_t r = 0; r < n; ++r) {
      const auto s = static_cast<std::size_t>(segment_ids[r]);
      for (std::size_t c = 0; c < d; ++c) {
        const double v = V.data[r * d + c];
        std::size_t& w = winner[s * d + c];
        if (w == kNoWinner || v > out.data[s * d + c]) {
          out.data[s * d + c] = v;
          w = r;
        }
      }
    }
    const Ref ref = push_checked(OpKind::SegmentMax, std::move(out), {values});
    nodes_[ref].ids = segment_ids;
    nodes_[ref].winners = std::move(winner);
    return ref;
  }

  // Mean over axis 0: [n, d] -> [1, d]; rank-1 [n] -> scalar.
  Ref mean(Ref a, int axis = 0) {
    const Tensor& A = value(a);
    if (axis != 0) raise(Errc::ShapeMismatch, "mean supports axis 0 only");
    if (A.shape.empty()) raise(Errc::ShapeMismatch, "mean of a scalar");
    if (A.shape[0] == 0) raise(Errc::ShapeMismatch, "mean over zero rows");
    Tensor out;
    if (A.rank() == 1) {
      double sum = 0.0;
      for (double v : A.data) sum += v;
      out = Tensor::scalar(sum / static_cast<double>(A.size()));
    } else if (A.rank() == 2) {
      const std::size_t n = A.shape[0], d = A.shape[1];
      out = Tensor::zeros({1, d});
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) out.data[c] += A.at(r, c);
      }
      for (double& v : out.data) v /= static_cast<double>(n);
    } else {
      raise(Errc::ShapeMismatch, "mean of rank " + std::to_string(A.rank()));
    }
    const Ref ref = push_checked(OpKind::Mean, std::move(out), {a});
    nodes_[ref].axis = axis;
    return ref;
  }

  // Mean binary cross-entropy of predictions against fixed 0/1 labels.
  // Predictions are clamped into [eps, 1-eps], eps = 1e-12, to avoid log(0).
  Ref binary_cross_entropy(Ref p, const Tensor& y) {
    const Tensor& P = value(p);
    if (P.size() != y.size() || P.size() == 0) {
      raise(Errc::ShapeMismatch,
            "binary_cross_entropy: " + P.shape_str() + " vs " + y.shape_str());
    }
    double total = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
      const double pc = clamp_p(P.data[i]);
      total += -(y.data[i] * std::log(pc) + (1.0 - y.data[i]) * std::log(1.0 - pc));
    }
    Tensor out = Tensor::scalar(total / static_cast<double>(P.size()));
    const Ref ref = push_checked(OpKind::BinaryCrossEntropy, std::move(out), {p});
    nodes_[ref].labels = y;
    return ref;
  }

  const Tensor& value(Ref r) const { return nodes_.at(r).value; }

  // Reverse sweep from a scalar loss. Gradients accumulate by summation
  // across fan-out; every consumed gradient is checked finite.
  void backward(Ref loss) {
    if (value(loss).size() != 1) {
      raise(Errc::ShapeMismatch, "backward needs a scalar loss, got " + value(loss).shape_str());
    }
    for (Node& n : nodes_) n.grad = Tensor::zeros_like(n.value);
    nodes_[loss].grad.data[0] = 1.0;
    for (std::size_t i = loss + 1; i-- > 0;) {
      finite_or_raise(nodes_[i].grad, "gradient");
      dispatch(i);
    }
    has_grads_ = true;
  }

  const Tensor& grad(Ref r) const {
    if (!has_grads_) raise(Errc::NonFiniteValue, "grad read before backward");
    return nodes_.at(r).grad;
  }

  // Gradient of a registered parameter; zero for parameters off the path.
  Tensor grad_of(const Tensor& param) const {
    auto it = param_refs_.find(&param);
    if (it == param_refs_.end()) return Tensor::zeros_like(param);
    return grad(it->second);
  }

  std::size_t num_nodes() const { return nodes_.size(); }

 private:
  enum class OpKind {
    Input,
    Parameter,
    Matmul,
    Add,
    ScalarMul,
    Concat,
    Relu,
    Sigmoid,
    EmbeddingLookup,
    SegmentSum,
    SegmentMax,
    Mean,
    BinaryCrossEntropy,
  };

  static constexpr std::size_t kNoWinner = static_cast<std::size_t>(-1);
  static constexpr double kClampEps = 1e-12;

  struct Node {
    OpKind op = OpKind::Input;
    Tensor value;
    Tensor grad;
    std::vector<Ref> inputs;
    std::vector<int> ids;               // embedding / segment ids
    std::vector<std::size_t> winners;   // segment_max argmax per output cell
    Tensor labels;                      // binary_cross_entropy targets
    double scalar = 0.0;
    int axis = 0;
    const Tensor* param = nullptr;
  };

  static double clamp_p(double p) {
    return std::min(1.0 - kClampEps, std::max(kClampEps, p));
  }

  static void finite_or_raise(const Tensor& t, const char* what) {
    if (!t.finite()) raise(Errc::NonFiniteValue, std::string(what) + " contains NaN or Inf");
  }

  Ref push(OpKind op, Tensor value, std::vector<Ref> inputs) {
    Node n;
    n.op = op;
    n.value = std::move(value);
    n.inputs = std::move(inputs);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  Ref push_checked(OpKind op, Tensor value, std::vector<Ref> inputs) {
    finite_or_raise(value, "op result");
    return push(op, std::move(value), std::move(inputs));
  }

  std::tuple<std::size_t, std::size_t, bool> segment_dims(Ref values,
                                                          const std::vector<int>& segment_ids,
                                                          std::size_t n_segments) const {
    const Tensor& V = value(values);
    if (V.rank() != 1 && V.rank() != 2) {
      raise(Errc::ShapeMismatch, "segment op input must be rank 1 or 2");
    }
    const bool rank1 = V.rank() == 1;
    const std::size_t n = V.shape[0];
    const std::size_t d = rank1 ? 1 : V.shape[1];
    if (segment_ids.size() != n) {
      raise(Errc::ShapeMismatch, "segment ids: " + std::to_string(segment_ids.size()) +
                                     " for " + std::to_string(n) + " rows");
    }
    for (int id : segment_ids) {
      if (id < 0 || static_cast<std::size_t>(id) >= n_segments) {
        raise(Errc::IndexOutOfRange, "segment id " + std::to_string(id) + " outside " +
                                         std::to_string(n_segments) + " segments");
      }
    }
    return {n, d, rank1};
  }

  void dispatch(std::size_t i) {
    Node& n = nodes_[i];
    const Tensor& g = n.grad;
    switch (n.op) {
      case OpKind::Input:
      case OpKind::Parameter:
        break;
      case OpKind::Matmul: {
        const Tensor& A = nodes_[n.inputs[0]].value;
        const Tensor& B = nodes_[n.inputs[1]].value;
        Tensor& dA = nodes_[n.inputs[0]].grad;
        Tensor& dB = nodes_[n.inputs[1]].grad;
        const std::size_t rows = A.shape[0], k = A.shape[1], m = B.shape[1];
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < m; ++j) {
            const double gv = g.at(r, j);
            if (gv == 0.0) continue;
            for (std::size_t kk = 0; kk < k; ++kk) {
              dA.at(r, kk) += gv * B.at(kk, j);
              dB.at(kk, j) += gv * A.at(r, kk);
            }
          }
        }
        break;
      }
      case OpKind::Add: {
        Tensor& dA = nodes_[n.inputs[0]].grad;
        Tensor& dB = nodes_[n.inputs[1]].grad;
        for (std::size_t j = 0; j < g.size(); ++j) dA.data[j] += g.data[j];
        if (dB.shape == g.shape) {
          for (std::size_t j = 0; j < g.size(); ++j) dB.data[j] += g.data[j];
        } else {  // row broadcast: sum over rows
          const std::size_t d = dB.size();
          for (std::size_t j = 0; j < g.size(); ++j) dB.data[j % d] += g.data[j];
        }
        break;
      }
      case OpKind::ScalarMul: {
        Tensor& dA = nodes_[n.inputs[0]].grad;
        for (std::size_t j = 0; j < g.size(); ++j) dA.data[j] += n.scalar * g.data[j];
        break;
      }
      case OpKind::Relu: {
        const Tensor& A = nodes_[n.inputs[0]].value;
        Tensor& dA = nodes_[n.inputs[0]].grad;
        for (std::size_t j = 0; j < g.size(); ++j) {
          if (A.data[j] > 0.0) dA.data[j] += g.data[j];
        }
        break;
      }
      case OpKind::Sigmoid: {
        Tensor& dA = nodes_[n.inputs[0]].grad;
        for (std::size_t j = 0; j < g.size(); ++j) {
          const double s = n.value.data[j];
          dA.data[j] += g.data[j] * s * (1.0 - s);
        }
        break;
      }
      case OpKind::Concat: {
        if (n.axis == 1 && n.value.rank() == 2) {
          const std::size_t rows = n.value.shape[0], cols = n.value.shape[1];
          std::size_t off = 0;
          for (Ref p : n.inputs) {
            Tensor& dP = nodes_[p].grad;
            const std::size_t w = nodes_[p].value.shape[1];
            for (std::size_t r = 0; r < rows; ++r) {
              for (std::size_t c = 0; c < w; ++c) dP.at(r, c) += g.data[r * cols + off + c];
            }
            off += w;
          }
        } else {  // rank-1 axis 0 and rank-2 axis 0 are both flat splits
          std::size_t off = 0;
          for (Ref p : n.inputs) {
            Tensor& dP = nodes_[p].grad;
            for (std::size_t j = 0; j < dP.size(); ++j) dP.data[j] += g.data[off + j];
            off += dP.size();
          }
        }
        break;
      }
      case OpKind::EmbeddingLookup: {
        Tensor& dT = nodes_[n.inputs[0]].grad;
        const std::size_t d = dT.shape[1];
        for (std::size_t r = 0; r < n.ids.size(); ++r) {
          const auto id = static_cast<std::size_t>(n.ids[r]);
          for (std::size_t c = 0; c < d; ++c) dT.data[id * d + c] += g.data[r * d + c];
        }
        break;
      }
      case OpKind::SegmentSum: {
        Tensor& dV = nodes_[n.inputs[0]].grad;
        const std::size_t d = n.value.rank() == 1 ? 1 : n.value.shape[1];
        for (std::size_t r = 0; r < n.ids.size(); ++r) {
          const auto s = static_cast<std::size_t>(n.ids[r]);
          for (std::size_t c = 0; c < d; ++c) dV.data[r * d + c] += g.data[s * d + c];
        }
        break;
      }
      case OpKind::SegmentMax: {
        Tensor& dV = nodes_[n.inputs[0]].grad;
        const std::size_t d = n.value.rank() == 1 ? 1 : n.value.shape[1];
        for (std::size_t cell = 0; cell < n.winners.size(); ++cell) {
          const std::size_t w = n.winners[cell];
          if (w == kNoWinner) continue;
          const std::size_t c = cell % d;
          dV.data[w * d + c] += g.data[cell];
        }
        break;
      }
      case OpKind::Mean: {
        const Tensor& A = nodes_[n.inputs[0]].value;
        Tensor& dA = nodes_[n.inputs[0]].grad;
        const auto rows = static_cast<double>(A.shape[0]);
        if (A.rank() == 1) {
          for (std::size_t j = 0; j < dA.size(); ++j) dA.data[j] += g.data[0] / rows;
        } else {
          const std::size_t d = A.shape[1];
          for (std::size_t r = 0; r < A.shape[0]; ++r) {
            for (std::size_t c = 0; c < d; ++c) dA.at(r, c) += g.data[c] / rows;
          }
        }
        break;
      }
      case OpKind::BinaryCrossEntropy: {
        const Tensor& P = nodes_[n.inputs[0]].value;
        Tensor& dP = nodes_[n.inputs[0]].grad;
        const auto count = static_cast<double>(P.size());
        for (std::size_t j = 0; j < P.size(); ++j) {
          const double pc = clamp_p(P.data[j]);
          const double y = n.labels.data[j];
          dP.data[j] += g.data[0] * (-y / pc + (1.0 - y) / (1.0 - pc)) / count;
        }
        break;
      }
    }
  }

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, Ref> param_refs_;
  bool has_grads_ = false;
};

struct NamedParam {
  std::string name;
  Tensor* tensor = nullptr;
};

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double worst = 0.0;
  bool pass = true;
  double tolerance = 0.0;
};

// Central finite differences against the tape's analytic gradients.
// Relative error uses |a - fd| / max(|a|, |fd|, 1e-3), which degrades to an
// absolute comparison near zero. build must be deterministic and register
// every parameter it uses via tape.parameter(*p).
template <typename BuildFn>
GradCheckReport grad_check(const BuildFn& build, const std::vector<NamedParam>& params,
                           double step = 1e-6, double tolerance = 1e-4) {
  GradCheckReport report;
  report.tolerance = tolerance;

  std::vector<Tensor> analytic;
  {
    Tape tape;
    const Tape::Ref loss = build(tape);
    tape.backward(loss);
    analytic.reserve(params.size());
    for (const auto& p : params) analytic.push_back(tape.grad_of(*p.tensor));
  }

  const auto eval = [&build]() {
    Tape tape;
    return tape.value(build(tape)).data[0];
  };

  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    GradCheckEntry entry;
    entry.name = params[pi].name;
    Tensor& t = *params[pi].tensor;
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double saved = t.data[j];
      t.data[j] = saved + step;
      const double up = eval();
      t.data[j] = saved - step;
      const double down = eval();
      t.data[j] = saved;
      const double fd = (up - down) / (2.0 * step);
      const double a = analytic[pi].data[j];
      const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-3});
      entry.max_rel_err = std::max(entry.max_rel_err, rel);
    }
    report.worst = std::max(report.worst, entry.max_rel_err);
    if (entry.max_rel_err > tolerance) report.pass = false;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace mtilink
