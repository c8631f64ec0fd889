// Copyright 2026 The dgparse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Minimal reverse-mode automatic differentiation over dense Eigen matrices.
//
// A Tape records every operation applied to Var handles together with a
// closure that propagates the output gradient to the inputs. Parameters live
// outside the tape; their leaf nodes accumulate into Parameter::grad when
// Tape::backward() runs. All vectors are row vectors (1 x d) so that a stack
// of vectors is a matrix with one row per item.

#ifndef DGPARSE_AUTODIFF_H_
#define DGPARSE_AUTODIFF_H_

#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dgparse::ad {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

template <typename Scalar>
struct Parameter {
  std::string name;
  Matrix<Scalar> value;
  Matrix<Scalar> grad;

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
  Eigen::Index size() const { return value.size(); }
};

template <typename Scalar>
class Tape;

template <typename Scalar>
class Var {
 public:
  Var() = default;
  Var(Tape<Scalar>* tape, int id) : tape_(tape), id_(id) {}

  bool valid() const { return tape_ != nullptr; }
  Tape<Scalar>* tape() const { return tape_; }
  int id() const { return id_; }
  const Matrix<Scalar>& value() const { return tape_->value(id_); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  // Value of a 1x1 node.
  Scalar scalar() const { return value()(0, 0); }

 private:
  Tape<Scalar>* tape_ = nullptr;
  int id_ = -1;
};

template <typename Scalar>
class Tape {
 public:
  using Mat = Matrix<Scalar>;
  using Backward = std::function<void(Tape&, const Mat& grad, const Mat& value)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<Scalar> constant(Mat value) {
    return record(std::move(value), false, nullptr);
  }

  // Leaf bound to a parameter. Repeated calls reuse the same node.
  Var<Scalar> parameter(Parameter<Scalar>& p) {
    auto it = param_nodes_.find(&p);
    if (it != param_nodes_.end()) return Var<Scalar>(this, it->second);
    Parameter<Scalar>* target = &p;
    Var<Scalar> v = record(p.value, true, [target](Tape&, const Mat& g, const Mat&) {
      if (target->grad.size() == 0) target->zero_grad();
      target->grad += g;
    });
    param_nodes_.emplace(&p, v.id());
    return v;
  }

  // Gathers rows of a parameter table; gradients scatter back into those rows
  // only, so large tables do not pay for a dense gradient per lookup.
  Var<Scalar> lookup(Parameter<Scalar>& table, std::span<const int> rows) {
    Mat out(static_cast<Eigen::Index>(rows.size()), table.value.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] < 0 || rows[i] >= table.value.rows()) {
        throw std::out_of_range("lookup row " + std::to_string(rows[i]) +
                                " outside table " + table.name);
      }
      out.row(static_cast<Eigen::Index>(i)) = table.value.row(rows[i]);
    }
    Parameter<Scalar>* target = &table;
    std::vector<int> idx(rows.begin(), rows.end());
    return record(std::move(out), true,
                  [target, idx = std::move(idx)](Tape&, const Mat& g, const Mat&) {
                    if (target->grad.size() == 0) target->zero_grad();
                    for (std::size_t i = 0; i < idx.size(); ++i) {
                      target->grad.row(idx[i]) +=
                          g.row(static_cast<Eigen::Index>(i));
                    }
                  });
  }

  Var<Scalar> record(Mat value, bool requires_grad, Backward backward) {
    Node& n = nodes_.emplace_back();
    n.value = std::move(value);
    n.requires_grad = requires_grad;
    if (requires_grad) n.backward = std::move(backward);
    return Var<Scalar>(this, static_cast<int>(nodes_.size()) - 1);
  }

  const Mat& value(int id) const { return nodes_[id].value; }
  bool requires_grad(int id) const { return nodes_[id].requires_grad; }
  bool requires_grad(const Var<Scalar>& v) const {
    return nodes_[v.id()].requires_grad;
  }
  std::size_t size() const { return nodes_.size(); }

  template <typename Derived>
  void accumulate(int id, const Eigen::MatrixBase<Derived>& g) {
    Node& n = nodes_[id];
    if (!n.requires_grad) return;
    if (!n.has_grad) {
      n.grad = g;
      n.has_grad = true;
    } else {
      n.grad += g;
    }
  }

  // Runs reverse accumulation from a 1x1 root, seeded with d(root) = 1.
  void backward(const Var<Scalar>& root) {
    if (root.rows() != 1 || root.cols() != 1) {
      throw std::invalid_argument("backward() requires a scalar root");
    }
    accumulate(root.id(), Mat::Ones(1, 1));
    for (int i = root.id(); i >= 0; --i) {
      Node& n = nodes_[i];
      if (!n.has_grad || !n.backward) continue;
      n.backward(*this, n.grad, n.value);
    }
  }

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    bool has_grad = false;
    Backward backward;
  };

  // deque keeps element references stable while the tape grows.
  std::deque<Node> nodes_;
  std::unordered_map<const Parameter<Scalar>*, int> param_nodes_;
};

namespace detail {

template <typename Scalar>
Tape<Scalar>& tape_of(const Var<Scalar>& a) {
  if (!a.valid()) throw std::invalid_argument("operation on an empty Var");
  return *a.tape();
}

template <typename Scalar>
Tape<Scalar>& tape_of(const Var<Scalar>& a, const Var<Scalar>& b) {
  if (a.tape() != b.tape()) {
    throw std::invalid_argument("operands recorded on different tapes");
  }
  return tape_of(a);
}

inline std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace detail

template <typename Scalar>
Var<Scalar> matmul(const Var<Scalar>& a, const Var<Scalar>& b) {
  auto& t = detail::tape_of(a, b);
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: " + detail::shape(a.rows(), a.cols()) +
                                " * " + detail::shape(b.rows(), b.cols()));
  }
  const int ia = a.id(), ib = b.id();
  return t.record(a.value() * b.value(),
                  t.requires_grad(ia) || t.requires_grad(ib),
                  [ia, ib](Tape<Scalar>& t, const Matrix<Scalar>& g, const Matrix<Scalar>&) {
                    if (t.requires_grad(ia))
                      t.accumulate(ia, g * t.value(ib).transpose());
                    if (t.requires_grad(ib))
                      t.accumulate(ib, t.value(ia).transpose() * g);
                  });
}

// a * b^T
template <typename Scalar>
Var<Scalar> matmul_nt(const Var<Scalar>& a, const Var<Scalar>& b) {
  auto& t = detail::tape_of(a, b);
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("matmul_nt: " +
                                detail::shape(a.rows(), a.cols()) + " * (" +
                                detail::shape(b.rows(), b.cols()) + ")^T");
  }
  const int ia = a.id(), ib = b.id();
  return t.record(a.value() * b.value().transpose(),
                  t.requires_grad(ia) || t.requires_grad(ib),
                  [ia, ib](Tape<Scalar>& t, const Matrix<Scalar>& g, const Matrix<Scalar>&) {
                    if (t.requires_grad(ia)) t.accumulate(ia, g * t.value(ib));
                    if (t.requires_grad(ib))
                      t.accumulate(ib, g.transpose() * t.value(ia));
                  });
}

// Constant sparse matrix times a dense node.
template <typename Scalar>
Var<Scalar> spmm(std::shared_ptr<const SparseMatrix<Scalar>> s,
                 const Var<Scalar>& b) {
  auto& t = detail::tape_of(b);
  if (s->cols() != b.rows()) {
    throw std::invalid_argument("spmm: " + detail::shape(s->rows(), s->cols()) +
                                " * " + detail::shape(b.rows(), b.cols()));
  }
  const int ib = b.id();
  Matrix<Scalar> v = (*s) * b.value();
  return t.record(std::move(v), t.requires_grad(ib),
                  [s, ib](Tape<Scalar>& t, const Matrix<Scalar>& g, const Matrix<Scalar>&) {
                    t.accumulate(ib, s->transpose() * g);
                  });
}

// Elementwise sum; a 1 x c right operand is broadcast over the rows of a.
template <typename Scalar>
Var<Scalar> operator+(const Var<Scalar>& a, const Var<Scalar>& b) {
  auto& t = detail::tape_of(a, b);
  const int ia = a.id(), ib = b.id();
  const bool grad = t.requires_grad(ia) || t.requires_grad(ib);
  if (a.rows() == b.rows() && a.cols() == b.cols()) {
    return t.record(a.value() + b.value(), grad,
                    [ia, ib](Tape<Scalar>& t, const Matrix<Scalar>& g, const Matrix<Scalar>&) {
                      t.accumulate(ia, g);
                      t.accumulate(ib, g);
                    });
  }
  if (b.rows() == 1 && a.cols() == b.cols()) {
    Matrix<Scalar> v = a.value().rowwise() + b.value().row(0);
    return t.record(std::move(v), grad,
                    [ia, ib](Tape<Scalar>& t, const Matrix<Scalar>& g, const Matrix<Scalar>&) {
                      t.accumulate(ia, g);
                      if (t.requires_grad(ib))
                        t.accumulate(ib, g.colwise().sum());
                    });
  }
  throw std::invalid_argument("add: " + detail::shape(a.rows(), a.cols()) +
                              " + " + detail::shape(b.rows(), b.cols()));
}

template <typename Scalar>
Var<Scalar> operator-(const Var<Scalar>& a, const Var<Scalar>& b) {
  auto& t = detail::tape_of(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("sub: " + detail::shape(a.rows(), a.cols()) +
                                " - " + detail::shape(b.rows(), b.cols()));
  }
  const int ia = a.id(), ib = b.id();
  return t.record(a.value() - b.value(),
                  t.requires_grad(ia) || t.requires_grad(ib),
                  [ia, ib](Tape<Scalar>& t, const Matrix<Scalar>& g, const Matrix<Scalar>&) {
                    t.accumulate(ia, g);
                    if (t.requires_grad(ib)) t.accumulate(ib, -g);
                  });
}

template <typename Scalar>
Var<Scalar> hadamard(const Var<Scalar>& a, const Var<Scalar>& b) {
  auto& t = detail::tape_of(a, b);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("hadamard: shape mismatch");
  }
  const int ia = a.id(), ib = b.id();
  return t.record(a.value().cwiseProduct(b.value()),
                  t.requires_grad(ia) || t.requires_grad(ib),
                  [ia, ib](Tape<Scalar>& t, const Matrix<Scalar>& g, const Matrix<Scalar>&) {
                    if (t.requires_grad(ia))
                      t.accumulate(ia, g.cwiseProduct(t.value(ib)));
                    if (t.requires_grad(ib))
                      t.accumulate(ib, g.cwiseProduct(t.value(ia)));
                  });
}

template <typename Scalar>
Var<Scalar> scale(const Var<Scalar>& a, Scalar s) {
  auto& t = detail::tape_of(a);
  const int ia = a.id();
  return t.record(a.value() * s, t.requires_grad(ia),
                  [ia, s](Tape<Scalar>& t, const Matrix<Scalar>& g, const Matrix<Scalar>&) {
                    t.accumulate(ia, g * s);
                  });
}

template <typename Scalar>
Var<Scalar> tanh(const Var<Scalar>& a) {
  auto& t = detail::tape_of(a);
  const int ia = a.id();
  return t.record(a.value().array().tanh().matrix(), t.requires_grad(ia),
                  [ia](Tape<Scalar>& t, const Matrix<Scalar>& g,
                       const Matrix<Scalar>& v) {
                    t.accumulate(ia, (g.array() * (Scalar(1) - v.array().square()))
                                         .matrix());
                  });
}

template <typename Scalar>
Var<Scalar> sigmoid(const Var<Scalar>& a) {
  auto& t = detail::tape_of(a);
  const int ia = a.id();
  Matrix<Scalar> v = (Scalar(1) / (Scalar(1) + (-a.value().array()).exp())).matrix();
  return t.record(std::move(v), t.requires_grad(ia),
                  [ia](Tape<Scalar>& t, const Matrix<Scalar>& g,
                       const Matrix<Scalar>& v) {
                    t.accumulate(
                        ia, (g.array() * v.array() * (Scalar(1) - v.array())).matrix());
                  });
}

template <typename Scalar>
Var<Scalar> relu(const Var<Scalar>& a) {
  auto& t = detail::tape_of(a);
  const int ia = a.id();
  return t.record(a.value().cwiseMax(Scalar(0)), t.requires_grad(ia),
                  [ia](Tape<Scalar>& t, const Matrix<Scalar>& g,
                       const Matrix<Scalar>& v) {
                    t.accumulate(ia, (v.array() > Scalar(0))
                                         .select(g.array(), Scalar(0))
                                         .matrix());
                  });
}

// Horizontal concatenation of nodes with equal row counts.
template <typename Scalar>
Var<Scalar> hcat(std::span<const Var<Scalar>> parts) {
  if (parts.empty()) throw std::invalid_argument("hcat: no operands");
  auto& t = detail::tape_of(parts.front());
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  bool grad = false;
  std::vector<std::pair<int, Eigen::Index>> layout;
  for (const auto& p : parts) {
    if (p.tape() != &t) throw std::invalid_argument("hcat: mixed tapes");
    if (p.rows() != rows) throw std::invalid_argument("hcat: row mismatch");
    layout.emplace_back(p.id(), p.cols());
    cols += p.cols();
    grad = grad || t.requires_grad(p.id());
  }
  Matrix<Scalar> v(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return t.record(std::move(v), grad,
                  [layout = std::move(layout)](Tape<Scalar>& t,
                                               const Matrix<Scalar>& g,
                                               const Matrix<Scalar>&) {
                    Eigen::Index at = 0;
                    for (const auto& [id, c] : layout) {
                      t.accumulate(id, g.middleCols(at, c));
                      at += c;
                    }
                  });
}

template <typename Scalar>
Var<Scalar> hcat(const Var<Scalar>& a, const Var<Scalar>& b) {
  const Var<Scalar> parts[] = {a, b};
  return hcat<Scalar>(std::span<const Var<Scalar>>(parts));
}

// Vertical concatenation of nodes with equal column counts.
template <typename Scalar>
Var<Scalar> vcat(std::span<const Var<Scalar>> parts) {
  if (parts.empty()) throw std::invalid_argument("vcat: no operands");
  auto& t = detail::tape_of(parts.front());
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  bool grad = false;
  std::vector<std::pair<int, Eigen::Index>> layout;
  for (const auto& p : parts) {
    if (p.tape() != &t) throw std::invalid_argument("vcat: mixed tapes");
    if (p.cols() != cols) throw std::invalid_argument("vcat: column mismatch");
    layout.emplace_back(p.id(), p.rows());
    rows += p.rows();
    grad = grad || t.requires_grad(p.id());
  }
  Matrix<Scalar> v(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    v.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return t.record(std::move(v), grad,
                  [layout = std::move(layout)](Tape<Scalar>& t,
                                               const Matrix<Scalar>& g,
                                               const Matrix<Scalar>&) {
                    Eigen::Index at = 0;
                    for (const auto& [id, r] : layout) {
                      t.accumulate(id, g.middleRows(at, r));
                      at += r;
                    }
                  });
}

template <typename Scalar>
Var<Scalar> row(const Var<Scalar>& a, Eigen::Index i) {
  auto& t = detail::tape_of(a);
  if (i < 0 || i >= a.rows()) throw std::out_of_range("row index");
  const int ia = a.id();
  return t.record(a.value().row(i), t.requires_grad(ia),
                  [ia, i](Tape<Scalar>& t, const Matrix<Scalar>& g,
                          const Matrix<Scalar>&) {
                    Matrix<Scalar> full =
                        Matrix<Scalar>::Zero(t.value(ia).rows(),
                                             t.value(ia).cols());
                    full.row(i) = g.row(0);
                    t.accumulate(ia, full);
                  });
}

// Gathers rows by index; repeated indices accumulate.
template <typename Scalar>
Var<Scalar> rows(const Var<Scalar>& a, std::span<const int> idx) {
  auto& t = detail::tape_of(a);
  Matrix<Scalar> v(static_cast<Eigen::Index>(idx.size()), a.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= a.rows()) throw std::out_of_range("rows index");
    v.row(static_cast<Eigen::Index>(k)) = a.value().row(idx[k]);
  }
  const int ia = a.id();
  std::vector<int> copy(idx.begin(), idx.end());
  return t.record(std::move(v), t.requires_grad(ia),
                  [ia, copy = std::move(copy)](Tape<Scalar>& t,
                                               const Matrix<Scalar>& g,
                                               const Matrix<Scalar>&) {
                    Matrix<Scalar> full =
                        Matrix<Scalar>::Zero(t.value(ia).rows(),
                                             t.value(ia).cols());
                    for (std::size_t k = 0; k < copy.size(); ++k) {
                      full.row(copy[k]) += g.row(static_cast<Eigen::Index>(k));
                    }
                    t.accumulate(ia, full);
                  });
}

template <typename Scalar>
Var<Scalar> middle_rows(const Var<Scalar>& a, Eigen::Index start,
                        Eigen::Index count) {
  auto& t = detail::tape_of(a);
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw std::out_of_range("middle_rows range");
  }
  const int ia = a.id();
  return t.record(a.value().middleRows(start, count), t.requires_grad(ia),
                  [ia, start, count](Tape<Scalar>& t, const Matrix<Scalar>& g,
                                     const Matrix<Scalar>&) {
                    Matrix<Scalar> full =
                        Matrix<Scalar>::Zero(t.value(ia).rows(),
                                             t.value(ia).cols());
                    full.middleRows(start, count) = g;
                    t.accumulate(ia, full);
                  });
}

template <typename Scalar>
Var<Scalar> middle_cols(const Var<Scalar>& a, Eigen::Index start,
                        Eigen::Index count) {
  auto& t = detail::tape_of(a);
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw std::out_of_range("middle_cols range");
  }
  const int ia = a.id();
  return t.record(a.value().middleCols(start, count), t.requires_grad(ia),
                  [ia, start, count](Tape<Scalar>& t, const Matrix<Scalar>& g,
                                     const Matrix<Scalar>&) {
                    Matrix<Scalar> full =
                        Matrix<Scalar>::Zero(t.value(ia).rows(),
                                             t.value(ia).cols());
                    full.middleCols(start, count) = g;
                    t.accumulate(ia, full);
                  });
}

// Column-wise maximum over rows (max pooling); ties route to the first row.
template <typename Scalar>
Var<Scalar> colwise_max(const Var<Scalar>& a) {
  auto& t = detail::tape_of(a);
  if (a.rows() == 0) throw std::invalid_argument("colwise_max: no rows");
  const int ia = a.id();
  std::vector<Eigen::Index> arg(static_cast<std::size_t>(a.cols()));
  Matrix<Scalar> v(1, a.cols());
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    Eigen::Index r = 0;
    v(0, c) = a.value().col(c).maxCoeff(&r);
    arg[static_cast<std::size_t>(c)] = r;
  }
  return t.record(std::move(v), t.requires_grad(ia),
                  [ia, arg = std::move(arg)](Tape<Scalar>& t,
                                             const Matrix<Scalar>& g,
                                             const Matrix<Scalar>&) {
                    Matrix<Scalar> full =
                        Matrix<Scalar>::Zero(t.value(ia).rows(),
                                             t.value(ia).cols());
                    for (std::size_t c = 0; c < arg.size(); ++c) {
                      const auto col = static_cast<Eigen::Index>(c);
                      full(arg[c], col) = g(0, col);
                    }
                    t.accumulate(ia, full);
                  });
}

// Log-softmax of a 1 x n row restricted to the allowed entries. Disallowed
// entries hold -infinity and never receive gradient.
template <typename Scalar>
Var<Scalar> masked_log_softmax(const Var<Scalar>& logits,
                               const std::vector<bool>& allowed) {
  auto& t = detail::tape_of(logits);
  if (logits.rows() != 1 ||
      logits.cols() != static_cast<Eigen::Index>(allowed.size())) {
    throw std::invalid_argument("masked_log_softmax: mask/logit size mismatch");
  }
  const auto& l = logits.value();
  Scalar m = -std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index j = 0; j < l.cols(); ++j) {
    if (allowed[static_cast<std::size_t>(j)]) m = std::max(m, l(0, j));
  }
  if (!std::isfinite(static_cast<double>(m))) {
    throw std::invalid_argument("masked_log_softmax: every entry is masked");
  }
  Scalar z = 0;
  for (Eigen::Index j = 0; j < l.cols(); ++j) {
    if (allowed[static_cast<std::size_t>(j)]) z += std::exp(l(0, j) - m);
  }
  const Scalar lse = m + std::log(z);
  Matrix<Scalar> v(1, l.cols());
  for (Eigen::Index j = 0; j < l.cols(); ++j) {
    v(0, j) = allowed[static_cast<std::size_t>(j)]
                  ? l(0, j) - lse
                  : -std::numeric_limits<Scalar>::infinity();
  }
  const int ia = logits.id();
  return t.record(std::move(v), t.requires_grad(ia),
                  [ia, allowed](Tape<Scalar>& t, const Matrix<Scalar>& g,
                                const Matrix<Scalar>& v) {
                    Scalar total = 0;
                    for (Eigen::Index j = 0; j < v.cols(); ++j) {
                      if (allowed[static_cast<std::size_t>(j)]) total += g(0, j);
                    }
                    Matrix<Scalar> d = Matrix<Scalar>::Zero(1, v.cols());
                    for (Eigen::Index j = 0; j < v.cols(); ++j) {
                      if (allowed[static_cast<std::size_t>(j)]) {
                        d(0, j) = g(0, j) - std::exp(v(0, j)) * total;
                      }
                    }
                    t.accumulate(ia, d);
                  });
}

template <typename Scalar>
Var<Scalar> log_softmax(const Var<Scalar>& logits) {
  return masked_log_softmax(
      logits, std::vector<bool>(static_cast<std::size_t>(logits.cols()), true));
}

// Single entry as a 1x1 node.
template <typename Scalar>
Var<Scalar> pick(const Var<Scalar>& a, Eigen::Index r, Eigen::Index c) {
  auto& t = detail::tape_of(a);
  if (r < 0 || r >= a.rows() || c < 0 || c >= a.cols()) {
    throw std::out_of_range("pick index");
  }
  const int ia = a.id();
  Matrix<Scalar> v(1, 1);
  v(0, 0) = a.value()(r, c);
  return t.record(std::move(v), t.requires_grad(ia),
                  [ia, r, c](Tape<Scalar>& t, const Matrix<Scalar>& g,
                             const Matrix<Scalar>&) {
                    Matrix<Scalar> full =
                        Matrix<Scalar>::Zero(t.value(ia).rows(),
                                             t.value(ia).cols());
                    full(r, c) = g(0, 0);
                    t.accumulate(ia, full);
                  });
}

// Sum of equally shaped nodes.
template <typename Scalar>
Var<Scalar> sum(std::span<const Var<Scalar>> parts) {
  if (parts.empty()) throw std::invalid_argument("sum: no operands");
  auto& t = detail::tape_of(parts.front());
  Matrix<Scalar> v = parts.front().value();
  bool grad = t.requires_grad(parts.front().id());
  std::vector<int> ids{parts.front().id()};
  for (std::size_t k = 1; k < parts.size(); ++k) {
    if (parts[k].tape() != &t) throw std::invalid_argument("sum: mixed tapes");
    if (parts[k].rows() != v.rows() || parts[k].cols() != v.cols()) {
      throw std::invalid_argument("sum: shape mismatch");
    }
    v += parts[k].value();
    grad = grad || t.requires_grad(parts[k].id());
    ids.push_back(parts[k].id());
  }
  return t.record(std::move(v), grad,
                  [ids = std::move(ids)](Tape<Scalar>& t,
                                         const Matrix<Scalar>& g,
                                         const Matrix<Scalar>&) {
                    for (int id : ids) t.accumulate(id, g);
                  });
}

// Sum of all entries as a 1x1 node.
template <typename Scalar>
Var<Scalar> sum_all(const Var<Scalar>& a) {
  auto& t = detail::tape_of(a);
  const int ia = a.id();
  Matrix<Scalar> v(1, 1);
  v(0, 0) = a.value().sum();
  return t.record(std::move(v), t.requires_grad(ia),
                  [ia](Tape<Scalar>& t, const Matrix<Scalar>& g,
                       const Matrix<Scalar>&) {
                    t.accumulate(ia, Matrix<Scalar>::Constant(
                                         t.value(ia).rows(),
                                         t.value(ia).cols(), g(0, 0)));
                  });
}
}  // namespace dgparse::ad

#endif  // DGPARSE_AUTODIFF_H_
