#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "jargon/error.hpp"
#include "jargon/rng.hpp"

namespace jargon::nn {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// A named trainable tensor. Row-vector convention: activations are
/// (tokens x features) and weights map features on the right.
struct Parameter {
  std::string name;
  Matrix value;
  bool decay = true;  // receives decoupled weight decay
};

/// Gradient accumulator keyed by parameter identity.
class Gradients {
 public:
  Matrix& at(const Parameter& p) {
    auto [it, inserted] = grads_.try_emplace(&p);
    if (inserted) it->second = Matrix::Zero(p.value.rows(), p.value.cols());
    return it->second;
  }
  const Matrix* find(const Parameter& p) const {
    auto it = grads_.find(&p);
    return it == grads_.end() ? nullptr : &it->second;
  }
  void clear() { grads_.clear(); }
  bool empty() const { return grads_.empty(); }

 private:
  std::unordered_map<const Parameter*, Matrix> grads_;
};

/// Handle to a node on a Tape.
struct Var {
  std::size_t id = 0;
};

/// Reverse-mode tape. Ops record their value eagerly; when recording is off
/// no backward closures are kept (inference, frozen encoders).
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) { nodes_.reserve(256); }
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }
  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const { return nodes_[v.id].value(0, 0); }

  Var constant(Matrix m) { return push(std::move(m)); }
  Var scalar_constant(double x) { return push(Matrix::Constant(1, 1, x)); }

  Var param(const Parameter& p) {
    Var v = push(p.value);
    if (record_) {
      nodes_[v.id].param = &p;
      nodes_[v.id].requires_grad = true;
    }
    return v;
  }

  /// Row gather from an embedding table.
  Var embed(const Parameter& table, std::span<const int> ids) {
    Matrix out(static_cast<Eigen::Index>(ids.size()), table.value.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 0 || ids[i] >= table.value.rows()) throw DimensionMismatch("embedding id out of range");
      out.row(static_cast<Eigen::Index>(i)) = table.value.row(ids[i]);
    }
    Var v = push(std::move(out));
    if (record_) {
      nodes_[v.id].requires_grad = true;
      std::vector<int> idv(ids.begin(), ids.end());
      const Parameter* tp = &table;
      nodes_[v.id].backward = [this, v, tp, idv = std::move(idv)](Gradients& g) {
        Matrix& gt = g.at(*tp);
        const Matrix& go = nodes_[v.id].grad;
        for (std::size_t i = 0; i < idv.size(); ++i) gt.row(idv[i]) += go.row(static_cast<Eigen::Index>(i));
      };
    }
    return v;
  }

  Var matmul(Var a, Var b) {
    check(value(a).cols() == value(b).rows(), "matmul");
    Var v = push_op(value(a) * value(b), {a, b});
    on_backward(v, [this, a, b, v](Gradients&) {
      const Matrix& go = nodes_[v.id].grad;
      accumulate(a, go * value(b).transpose());
      accumulate(b, value(a).transpose() * go);
    });
    return v;
  }

  /// a * b^T
  Var matmul_nt(Var a, Var b) {
    check(value(a).cols() == value(b).cols(), "matmul_nt");
    Var v = push_op(value(a) * value(b).transpose(), {a, b});
    on_backward(v, [this, a, b, v](Gradients&) {
      const Matrix& go = nodes_[v.id].grad;
      accumulate(a, go * value(b));
      accumulate(b, go.transpose() * value(a));
    });
    return v;
  }

  Var add(Var a, Var b) {
    check(value(a).rows() == value(b).rows() && value(a).cols() == value(b).cols(), "add");
    Var v = push_op(value(a) + value(b), {a, b});
    on_backward(v, [this, a, b, v](Gradients&) {
      accumulate(a, nodes_[v.id].grad);
      accumulate(b, nodes_[v.id].grad);
    });
    return v;
  }

  /// Adds a 1 x n row to every row of a.
  Var add_row(Var a, Var row) {
    check(value(row).rows() == 1 && value(row).cols() == value(a).cols(), "add_row");
    Matrix out = value(a);
    out.rowwise() += value(row).row(0);
    Var v = push_op(std::move(out), {a, row});
    on_backward(v, [this, a, row, v](Gradients&) {
      accumulate(a, nodes_[v.id].grad);
      accumulate(row, nodes_[v.id].grad.colwise().sum());
    });
    return v;
  }

  Var scale(Var a, double s) {
    Var v = push_op(value(a) * s, {a});
    on_backward(v, [this, a, s, v](Gradients&) { accumulate(a, nodes_[v.id].grad * s); });
    return v;
  }

  /// mul * a + offset, elementwise.
  Var affine(Var a, double mul, double offset) {
    Var v = push_op((value(a).array() * mul + offset).matrix(), {a});
    on_backward(v, [this, a, mul, v](Gradients&) { accumulate(a, nodes_[v.id].grad * mul); });
    return v;
  }

  /// Elementwise product; either operand may be a 1x1 scalar.
  Var mul(Var a, Var b) {
    const Matrix& va = value(a);
    const Matrix& vb = value(b);
    if (vb.size() == 1 && va.size() != 1) return mul(b, a);
    if (va.size() == 1) {
      const double s = va(0, 0);
      Var v = push_op(vb * s, {a, b});
      on_backward(v, [this, a, b, v](Gradients&) {
        const Matrix& go = nodes_[v.id].grad;
        accumulate(a, Matrix::Constant(1, 1, (go.array() * value(b).array()).sum()));
        accumulate(b, go * value(a)(0, 0));
      });
      return v;
    }
    check(va.rows() == vb.rows() && va.cols() == vb.cols(), "mul");
    Var v = push_op((va.array() * vb.array()).matrix(), {a, b});
    on_backward(v, [this, a, b, v](Gradients&) {
      const Matrix& go = nodes_[v.id].grad;
      accumulate(a, (go.array() * value(b).array()).matrix());
      accumulate(b, (go.array() * value(a).array()).matrix());
    });
    return v;
  }

  Var tanh(Var a) {
    Var v = push_op(value(a).array().tanh().matrix(), {a});
    on_backward(v, [this, a, v](Gradients&) {
      const Matrix& y = nodes_[v.id].value;
      accumulate(a, (nodes_[v.id].grad.array() * (1.0 - y.array().square())).matrix());
    });
    return v;
  }

  Var sigmoid(Var a) {
    Var v = push_op(value(a).unaryExpr([](double x) { return sigmoid_scalar(x); }), {a});
    on_backward(v, [this, a, v](Gradients&) {
      const Matrix& y = nodes_[v.id].value;
      accumulate(a, (nodes_[v.id].grad.array() * y.array() * (1.0 - y.array())).matrix());
    });
    return v;
  }

  /// Exact (erf) GELU.
  Var gelu(Var a) {
    constexpr double kInvSqrt2 = 0.7071067811865476;
    constexpr double kInvSqrt2Pi = 0.3989422804014327;
    Var v = push_op(value(a).unaryExpr([](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }), {a});
    on_backward(v, [this, a, v](Gradients&) {
      Matrix d = value(a).unaryExpr([](double x) {
        return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
      });
      accumulate(a, (nodes_[v.id].grad.array() * d.array()).matrix());
    });
    return v;
  }

  /// Row-wise layer normalization with 1 x n gain and bias.
  Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-12) {
    const Matrix& vx = value(x);
    const Eigen::Index n = vx.cols();
    check(value(gain).cols() == n && value(bias).cols() == n, "layer_norm");
    Matrix xhat(vx.rows(), n);
    Eigen::VectorXd inv_std(vx.rows());
    for (Eigen::Index r = 0; r < vx.rows(); ++r) {
      const double mean = vx.row(r).mean();
      const double var = (vx.row(r).array() - mean).square().mean();
      inv_std(r) = 1.0 / std::sqrt(var + eps);
      xhat.row(r) = (vx.row(r).array() - mean) * inv_std(r);
    }
    Matrix out = (xhat.array().rowwise() * value(gain).row(0).array()).matrix();
    out.rowwise() += value(bias).row(0);
    Var v = push_op(std::move(out), {x, gain, bias});
    on_backward(v, [this, x, gain, bias, v, xhat = std::move(xhat), inv_std = std::move(inv_std)](Gradients&) {
      const Matrix& go = nodes_[v.id].grad;
      accumulate(gain, (go.array() * xhat.array()).colwise().sum().matrix());
      accumulate(bias, go.colwise().sum());
      if (!needs_grad(x)) return;
      Matrix dxhat = (go.array().rowwise() * value(gain).row(0).array()).matrix();
      Matrix dx(dxhat.rows(), dxhat.cols());
      const double n_d = static_cast<double>(dxhat.cols());
      for (Eigen::Index r = 0; r < dxhat.rows(); ++r) {
        const double mean_d = dxhat.row(r).mean();
        const double mean_dx = (dxhat.row(r).array() * xhat.row(r).array()).sum() / n_d;
        dx.row(r) = inv_std(r) * (dxhat.row(r).array() - mean_d - xhat.row(r).array() * mean_dx);
      }
      accumulate(x, dx);
    });
    return v;
  }

  Var softmax_rows(Var a) {
    Matrix y = value(a);
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      y.row(r).array() -= y.row(r).maxCoeff();
      y.row(r) = y.row(r).array().exp().matrix();
      y.row(r) /= y.row(r).sum();
    }
    Var v = push_op(std::move(y), {a});
    on_backward(v, [this, a, v](Gradients&) {
      const Matrix& y = nodes_[v.id].value;
      const Matrix& go = nodes_[v.id].grad;
      Matrix dx(y.rows(), y.cols());
      for (Eigen::Index r = 0; r < y.rows(); ++r) {
        const double dot = (go.row(r).array() * y.row(r).array()).sum();
        dx.row(r) = (y.row(r).array() * (go.row(r).array() - dot)).matrix();
      }
      accumulate(a, dx);
    });
    return v;
  }

  /// Inverted dropout. Identity when rate == 0 or rng == nullptr.
  Var dropout(Var a, double rate, Rng* rng) {
    if (rate <= 0.0 || rng == nullptr) return a;
    const double keep = 1.0 - rate;
    Matrix mask(value(a).rows(), value(a).cols());
    for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng->uniform() < keep ? 1.0 / keep : 0.0;
    Var v = push_op((value(a).array() * mask.array()).matrix(), {a});
    on_backward(v, [this, a, v, mask = std::move(mask)](Gradients&) {
      accumulate(a, (nodes_[v.id].grad.array() * mask.array()).matrix());
    });
    return v;
  }

  Var slice_cols(Var a, Eigen::Index start, Eigen::Index n) {
    check(start >= 0 && start + n <= value(a).cols(), "slice_cols");
    Var v = push_op(value(a).middleCols(start, n), {a});
    on_backward(v, [this, a, start, n, v](Gradients&) {
      if (!needs_grad(a)) return;
      Matrix g = Matrix::Zero(value(a).rows(), value(a).cols());
      g.middleCols(start, n) = nodes_[v.id].grad;
      accumulate(a, g);
    });
    return v;
  }

  Var concat_cols(const std::vector<Var>& parts) {
    Eigen::Index cols = 0;
    const Eigen::Index rows = value(parts.front()).rows();
    for (Var p : parts) {
      check(value(p).rows() == rows, "concat_cols");
      cols += value(p).cols();
    }
    Matrix out(rows, cols);
    Eigen::Index c = 0;
    for (Var p : parts) {
      out.middleCols(c, value(p).cols()) = value(p);
      c += value(p).cols();
    }
    Var v = push_op(std::move(out), parts);
    on_backward(v, [this, parts, v](Gradients&) {
      Eigen::Index c = 0;
      for (Var p : parts) {
        const Eigen::Index w = value(p).cols();
        accumulate(p, nodes_[v.id].grad.middleCols(c, w));
        c += w;
      }
    });
    return v;
  }

  Var row(Var a, Eigen::Index r) {
    check(r >= 0 && r < value(a).rows(), "row");
    Var v = push_op(value(a).row(r), {a});
    on_backward(v, [this, a, r, v](Gradients&) {
      if (!needs_grad(a)) return;
      Matrix g = Matrix::Zero(value(a).rows(), value(a).cols());
      g.row(r) = nodes_[v.id].grad;
      accumulate(a, g);
    });
    return v;
  }

  /// Mean over rows [begin, end), as a 1 x n row.
  Var mean_rows(Var a, Eigen::Index begin, Eigen::Index end) {
    check(begin >= 0 && begin < end && end <= value(a).rows(), "mean_rows");
    const double inv = 1.0 / static_cast<double>(end - begin);
    Var v = push_op(value(a).middleRows(begin, end - begin).colwise().sum() * inv, {a});
    on_backward(v, [this, a, begin, end, inv, v](Gradients&) {
      if (!needs_grad(a)) return;
      Matrix g = Matrix::Zero(value(a).rows(), value(a).cols());
      for (Eigen::Index r = begin; r < end; ++r) g.row(r) = nodes_[v.id].grad * inv;
      accumulate(a, g);
    });
    return v;
  }

  /// Binary cross-entropy of a 1x1 probability against y in {0,1}, with the
  /// probability clamped to [eps, 1-eps]. Gradient is zero where clamped.
  Var bce(Var p, double y, double eps = 1e-7) {
    const double raw = scalar(p);
    const double pc = std::clamp(raw, eps, 1.0 - eps);
    const double loss = -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
    Var v = push_op(Matrix::Constant(1, 1, loss), {p});
    on_backward(v, [this, p, y, raw, pc, eps, v](Gradients&) {
      const double clamped = raw < eps || raw > 1.0 - eps;
      const double d = clamped ? 0.0 : (-y / pc + (1.0 - y) / (1.0 - pc));
      accumulate(p, Matrix::Constant(1, 1, nodes_[v.id].grad(0, 0) * d));
    });
    return v;
  }

  /// Mean softmax cross-entropy of each logits row against its target id.
  Var cross_entropy(Var logits, std::span<const int> targets) {
    const Matrix& z = value(logits);
    check(static_cast<std::size_t>(z.rows()) == targets.size() && z.rows() > 0, "cross_entropy");
    Matrix probs(z.rows(), z.cols());
    double loss = 0.0;
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      const double m = z.row(r).maxCoeff();
      probs.row(r) = (z.row(r).array() - m).exp().matrix();
      const double s = probs.row(r).sum();
      probs.row(r) /= s;
      loss -= (z(r, targets[r]) - m - std::log(s));
    }
    const double inv = 1.0 / static_cast<double>(z.rows());
    Var v = push_op(Matrix::Constant(1, 1, loss * inv), {logits});
    std::vector<int> tv(targets.begin(), targets.end());
    on_backward(v, [this, logits, v, inv, probs = std::move(probs), tv = std::move(tv)](Gradients&) {
      Matrix g = probs;
      for (std::size_t r = 0; r < tv.size(); ++r) g(static_cast<Eigen::Index>(r), tv[r]) -= 1.0;
      accumulate(logits, g * (inv * nodes_[v.id].grad(0, 0)));
    });
    return v;
  }

  /// Gather rows by index.
  Var gather_rows(Var a, std::span<const int> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), value(a).cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = value(a).row(rows[i]);
    Var v = push_op(std::move(out), {a});
    std::vector<int> rv(rows.begin(), rows.end());
    on_backward(v, [this, a, v, rv = std::move(rv)](Gradients&) {
      if (!needs_grad(a)) return;
      Matrix g = Matrix::Zero(value(a).rows(), value(a).cols());
      for (std::size_t i = 0; i < rv.size(); ++i) g.row(rv[i]) += nodes_[v.id].grad.row(static_cast<Eigen::Index>(i));
      accumulate(a, g);
    });
    return v;
  }

  /// Back-propagates d(loss)/d(loss) = 1 and adds parameter gradients to `out`.
  void backward(Var loss, Gradients& out) {
    if (!record_) throw Error("backward on a non-recording tape");
    nodes_[loss.id].grad = Matrix::Ones(value(loss).rows(), value(loss).cols());
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (n.grad.size() == 0) continue;
      if (n.backward) n.backward(out);
      if (n.param != nullptr) out.at(*n.param) += n.grad;
    }
  }

  static double sigmoid_scalar(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void(Gradients&)> backward;
    const Parameter* param = nullptr;
    bool requires_grad = false;
  };

  Var push(Matrix m) {
    nodes_.push_back(Node{std::move(m), {}, {}, nullptr, false});
    return Var{nodes_.size() - 1};
  }

  // An op result is differentiable when any of its inputs is.
  Var push_op(Matrix m, std::initializer_list<Var> inputs) {
    return push_op(std::move(m), std::span<const Var>(inputs.begin(), inputs.size()));
  }
  Var push_op(Matrix m, std::span<const Var> inputs) {
    bool rg = false;
    if (record_) {
      for (Var in : inputs) rg = rg || nodes_[in.id].requires_grad;
    }
    Var v = push(std::move(m));
    nodes_[v.id].requires_grad = rg;
    return v;
  }

  template <class Fn>
  void on_backward(Var v, Fn&& fn) {
    if (!record_ || !nodes_[v.id].requires_grad) return;
    nodes_[v.id].backward = std::forward<Fn>(fn);
  }

  bool needs_grad(Var a) const { return nodes_[a.id].requires_grad; }

  template <class Derived>
  void accumulate(Var a, const Eigen::MatrixBase<Derived>& g) {
    Node& n = nodes_[a.id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  static void check(bool ok, const char* op) {
    if (!ok) throw DimensionMismatch(std::string("shape mismatch in ") + op);
  }

  bool record_;
  std::vector<Node> nodes_;
};

}  // namespace jargon::nn
