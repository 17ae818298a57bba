#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "colgnn/errors.hpp"
#include "colgnn/tensor.hpp"

namespace colgnn {

// Handle to a value recorded on a Tape. Only meaningful for the tape that
// produced it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Fixed-coefficient neighborhood reduction: terms[u] lists the (source node,
// coefficient) pairs that sum into destination row u.
struct AggregationPlan {
  std::vector<std::vector<std::pair<int, double>>> terms;

  std::size_t num_nodes() const { return terms.size(); }
};

// Dynamic reverse-mode tape over dense tensors. Operations are recorded in
// execution order; backward() replays them in exact reverse order, seeding
// the loss adjoint with 1.
//
// Reductions indexed by graph nodes (aggregate, weighted_aggregate, masked
// softmax denominators) sum their terms in value-sorted order, so relabeling
// the nodes of a graph permutes forward outputs bitwise.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  std::size_t size() const { return nodes_.size(); }

  Var leaf(Tensor value) {
    ensure_finite(value, "leaf");
    return push(std::move(value), nullptr);
  }

  const Tensor& value(Var v) const { return node(v).value; }

  // Valid after backward().
  const Tensor& adjoint(Var v) const {
    if (v.id < 0 || static_cast<std::size_t>(v.id) >= adjoints_.size()) {
      throw InternalError("adjoint requested before backward()");
    }
    return adjoints_[static_cast<std::size_t>(v.id)];
  }

  void backward(Var loss) {
    const Tensor& l = value(loss);
    if (l.size() != 1) throw InvalidInputError("backward: loss must be a scalar");
    adjoints_.clear();
    adjoints_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      adjoints_[i] = Tensor(nodes_[i].value.shape());
    }
    adjoints_[static_cast<std::size_t>(loss.id)](0) = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;) {
      if (nodes_[i].back) nodes_[i].back(*this, static_cast<int>(i));
    }
  }

  // ---- elementwise ----

  Var add(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require_same_shape(A, B, "add");
    Tensor out = A;
    for (std::size_t i = 0; i < out.size(); ++i) out(i) += B(i);
    return record(std::move(out), "add", [ia = a.id, ib = b.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      t.accumulate(ia, d);
      t.accumulate(ib, d);
    });
  }

  Var sub(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require_same_shape(A, B, "sub");
    Tensor out = A;
    for (std::size_t i = 0; i < out.size(); ++i) out(i) -= B(i);
    return record(std::move(out), "sub", [ia = a.id, ib = b.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      t.accumulate(ia, d);
      t.accumulate_scaled(ib, d, -1.0);
    });
  }

  Var mul(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require_same_shape(A, B, "mul");
    Tensor out = A;
    for (std::size_t i = 0; i < out.size(); ++i) out(i) *= B(i);
    return record(std::move(out), "mul", [ia = a.id, ib = b.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      const Tensor& A2 = t.nodes_[ia].value;
      const Tensor& B2 = t.nodes_[ib].value;
      Tensor& da = t.adjoints_[ia];
      Tensor& db = t.adjoints_[ib];
      for (std::size_t i = 0; i < d.size(); ++i) {
        da(i) += d(i) * B2(i);
        db(i) += d(i) * A2(i);
      }
    });
  }

  Var scale(Var a, double c) {
    Tensor out = value(a);
    for (double& v : out.data()) v *= c;
    return record(std::move(out), "scale", [ia = a.id, c](Tape& t, int self) {
      t.accumulate_scaled(ia, t.adjoints_[self], c);
    });
  }

  Var one_minus(Var a) {
    Tensor out = value(a);
    for (double& v : out.data()) v = 1.0 - v;
    return record(std::move(out), "one_minus", [ia = a.id](Tape& t, int self) {
      t.accumulate_scaled(ia, t.adjoints_[self], -1.0);
    });
  }

  // matrix (n x d) + row vector (d), broadcast over rows.
  Var add_rowvec(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    require_matrix(A, "add_rowvec");
    if (B.rank() != 1 || B.size() != A.cols()) {
      throw InvalidInputError("add_rowvec: vector length must match matrix columns");
    }
    Tensor out = A;
    for (std::size_t i = 0; i < A.rows(); ++i) {
      for (std::size_t j = 0; j < A.cols(); ++j) out(i, j) += B(j);
    }
    return record(std::move(out), "add_rowvec", [ia = a.id, ib = b.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      t.accumulate(ia, d);
      Tensor& db = t.adjoints_[ib];
      for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) db(j) += d(i, j);
      }
    });
  }

  // ---- linear algebra ----

  Var matmul(Var a, Var b) {
    Tensor out = colgnn::matmul(value(a), value(b));
    return record(std::move(out), "matmul", [ia = a.id, ib = b.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      const Tensor& A = t.nodes_[ia].value;
      const Tensor& B = t.nodes_[ib].value;
      // dA += d * B^T ; dB += A^T * d
      Tensor& da = t.adjoints_[ia];
      for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t j = 0; j < A.cols(); ++j) {
          double acc = 0.0;
          for (std::size_t p = 0; p < B.cols(); ++p) acc += d(i, p) * B(j, p);
          da(i, j) += acc;
        }
      }
      Tensor& db = t.adjoints_[ib];
      for (std::size_t i = 0; i < B.rows(); ++i) {
        for (std::size_t j = 0; j < B.cols(); ++j) {
          double acc = 0.0;
          for (std::size_t p = 0; p < A.rows(); ++p) acc += A(p, i) * d(p, j);
          db(i, j) += acc;
        }
      }
    });
  }

  // a * b^T
  Var matmul_nt(Var a, Var b) {
    Tensor out = colgnn::matmul_nt(value(a), value(b));
    return record(std::move(out), "matmul_nt", [ia = a.id, ib = b.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      const Tensor& A = t.nodes_[ia].value;
      const Tensor& B = t.nodes_[ib].value;
      // dA += d * B ; dB += d^T * A
      Tensor& da = t.adjoints_[ia];
      for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t j = 0; j < A.cols(); ++j) {
          double acc = 0.0;
          for (std::size_t p = 0; p < B.rows(); ++p) acc += d(i, p) * B(p, j);
          da(i, j) += acc;
        }
      }
      Tensor& db = t.adjoints_[ib];
      for (std::size_t i = 0; i < B.rows(); ++i) {
        for (std::size_t j = 0; j < B.cols(); ++j) {
          double acc = 0.0;
          for (std::size_t p = 0; p < A.rows(); ++p) acc += d(p, i) * A(p, j);
          db(i, j) += acc;
        }
      }
    });
  }

  Var transpose(Var a) {
    Tensor out = colgnn::transpose(value(a));
    return record(std::move(out), "transpose", [ia = a.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      Tensor& da = t.adjoints_[ia];
      for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) da(j, i) += d(i, j);
      }
    });
  }

  Var matvec(Var a, Var x) {
    Tensor out = colgnn::matvec(value(a), value(x));
    return record(std::move(out), "matvec", [ia = a.id, ix = x.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      const Tensor& A = t.nodes_[ia].value;
      const Tensor& X = t.nodes_[ix].value;
      Tensor& da = t.adjoints_[ia];
      Tensor& dx = t.adjoints_[ix];
      for (std::size_t i = 0; i < A.rows(); ++i) {
        for (std::size_t j = 0; j < A.cols(); ++j) {
          da(i, j) += d(i) * X(j);
          dx(j) += d(i) * A(i, j);
        }
      }
    });
  }

  // Contiguous slice of a rank-1 tensor.
  Var segment(Var a, std::size_t offset, std::size_t length) {
    const Tensor& A = value(a);
    if (A.rank() != 1 || offset + length > A.size()) {
      throw InvalidInputError("segment: slice out of range");
    }
    Tensor out({length});
    for (std::size_t i = 0; i < length; ++i) out(i) = A(offset + i);
    return record(std::move(out), "segment", [ia = a.id, offset](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      Tensor& da = t.adjoints_[ia];
      for (std::size_t i = 0; i < d.size(); ++i) da(offset + i) += d(i);
    });
  }

  Var concat_cols(const std::vector<Var>& parts) {
    if (parts.empty()) throw InvalidInputError("concat_cols: empty input");
    std::size_t rows = value(parts[0]).rows();
    std::size_t total = 0;
    for (Var p : parts) {
      const Tensor& P = value(p);
      require_matrix(P, "concat_cols");
      if (P.rows() != rows) throw InvalidInputError("concat_cols: row counts disagree");
      total += P.cols();
    }
    Tensor out({rows, total});
    std::size_t at = 0;
    std::vector<int> ids;
    std::vector<std::size_t> offsets;
    for (Var p : parts) {
      const Tensor& P = value(p);
      for (std::size_t i = 0; i < P.rows(); ++i) {
        for (std::size_t j = 0; j < P.cols(); ++j) out(i, at + j) = P(i, j);
      }
      ids.push_back(p.id);
      offsets.push_back(at);
      at += P.cols();
    }
    return record(std::move(out), "concat_cols",
                  [ids = std::move(ids), offsets = std::move(offsets)](Tape& t, int self) {
                    const Tensor& d = t.adjoints_[self];
                    for (std::size_t p = 0; p < ids.size(); ++p) {
                      Tensor& dp = t.adjoints_[ids[p]];
                      for (std::size_t i = 0; i < dp.rows(); ++i) {
                        for (std::size_t j = 0; j < dp.cols(); ++j) {
                          dp(i, j) += d(i, offsets[p] + j);
                        }
                      }
                    }
                  });
  }

  // ---- nonlinearities ----

  Var relu(Var a) {
    Tensor out = colgnn::relu(value(a));
    // subgradient at exactly 0 is 0
    return record(std::move(out), "relu", [ia = a.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      const Tensor& A = t.nodes_[ia].value;
      Tensor& da = t.adjoints_[ia];
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (A(i) > 0.0) da(i) += d(i);
      }
    });
  }

  Var sigmoid(Var a) {
    Tensor out = colgnn::sigmoid(value(a));
    return record(std::move(out), "sigmoid", [ia = a.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      const Tensor& y = t.nodes_[self].value;
      Tensor& da = t.adjoints_[ia];
      for (std::size_t i = 0; i < d.size(); ++i) da(i) += d(i) * y(i) * (1.0 - y(i));
    });
  }

  Var tanh(Var a) {
    Tensor out = colgnn::tanh(value(a));
    return record(std::move(out), "tanh", [ia = a.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      const Tensor& y = t.nodes_[self].value;
      Tensor& da = t.adjoints_[ia];
      for (std::size_t i = 0; i < d.size(); ++i) da(i) += d(i) * (1.0 - y(i) * y(i));
    });
  }

  // Row-wise max-subtracted softmax of a matrix (a vector is one row).
  Var softmax_rows(Var a) {
    const Tensor& A = value(a);
    if (A.size() == 0) throw InvalidInputError("softmax_rows: empty input");
    std::size_t rows = A.rank() == 2 ? A.rows() : 1;
    std::size_t cols = A.rank() == 2 ? A.cols() : A.size();
    Tensor out = A;
    for (std::size_t i = 0; i < rows; ++i) {
      double mx = out(i * cols);
      for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, out(i * cols + j));
      double denom = 0.0;
      for (std::size_t j = 0; j < cols; ++j) {
        double e = std::exp(out(i * cols + j) - mx);
        out(i * cols + j) = e;
        denom += e;
      }
      for (std::size_t j = 0; j < cols; ++j) out(i * cols + j) /= denom;
    }
    ensure_finite(out, "softmax_rows");
    return record(std::move(out), "softmax_rows", [ia = a.id, rows, cols](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      const Tensor& y = t.nodes_[self].value;
      Tensor& da = t.adjoints_[ia];
      for (std::size_t i = 0; i < rows; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < cols; ++j) dot += d(i * cols + j) * y(i * cols + j);
        for (std::size_t j = 0; j < cols; ++j) {
          da(i * cols + j) += y(i * cols + j) * (d(i * cols + j) - dot);
        }
      }
    });
  }

  // Row-wise softmax over the entries where mask != 0; other entries are 0 in
  // the output and contribute nothing. The mask is a constant.
  Var masked_softmax_rows(Var a, Tensor mask) {
    const Tensor& A = value(a);
    require_matrix(A, "masked_softmax_rows");
    if (!A.same_shape(mask)) throw InvalidInputError("masked_softmax_rows: mask shape mismatch");
    Tensor out(A.shape());
    for (std::size_t i = 0; i < A.rows(); ++i) {
      double mx = -1e300;
      bool any = false;
      for (std::size_t j = 0; j < A.cols(); ++j) {
        if (mask(i, j) != 0.0) {
          mx = any ? std::max(mx, A(i, j)) : A(i, j);
          any = true;
        }
      }
      if (!any) throw InvalidInputError("masked_softmax_rows: row with empty mask");
      scratch_.clear();
      for (std::size_t j = 0; j < A.cols(); ++j) {
        if (mask(i, j) != 0.0) {
          double e = std::exp(A(i, j) - mx);
          out(i, j) = e;
          scratch_.push_back(e);
        }
      }
      double denom = stable_sum(scratch_);
      for (std::size_t j = 0; j < A.cols(); ++j) {
        if (mask(i, j) != 0.0) out(i, j) /= denom;
      }
    }
    ensure_finite(out, "masked_softmax_rows");
    return record(std::move(out), "masked_softmax_rows",
                  [ia = a.id, mask = std::move(mask)](Tape& t, int self) {
                    const Tensor& d = t.adjoints_[self];
                    const Tensor& y = t.nodes_[self].value;
                    Tensor& da = t.adjoints_[ia];
                    for (std::size_t i = 0; i < y.rows(); ++i) {
                      double dot = 0.0;
                      for (std::size_t j = 0; j < y.cols(); ++j) {
                        if (mask(i, j) != 0.0) dot += d(i, j) * y(i, j);
                      }
                      for (std::size_t j = 0; j < y.cols(); ++j) {
                        if (mask(i, j) != 0.0) da(i, j) += y(i, j) * (d(i, j) - dot);
                      }
                    }
                  });
  }

  // S[u, v] = col[u] + row[v].
  Var outer_sum(Var col, Var row) {
    const Tensor& C = value(col);
    const Tensor& R = value(row);
    if (C.rank() != 1 || R.rank() != 1) throw InvalidInputError("outer_sum: expected vectors");
    Tensor out({C.size(), R.size()});
    for (std::size_t i = 0; i < C.size(); ++i) {
      for (std::size_t j = 0; j < R.size(); ++j) out(i, j) = C(i) + R(j);
    }
    return record(std::move(out), "outer_sum", [ic = col.id, ir = row.id](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      Tensor& dc = t.adjoints_[ic];
      Tensor& dr = t.adjoints_[ir];
      for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) {
          dc(i) += d(i, j);
          dr(j) += d(i, j);
        }
      }
    });
  }

  // ---- graph reductions ----

  // out[u, :] = sum over (v, c) in plan.terms[u] of c * states[v, :],
  // summed per component in value-sorted order.
  Var aggregate(Var states, const AggregationPlan& plan) {
    const Tensor& X = value(states);
    require_matrix(X, "aggregate");
    if (plan.num_nodes() != X.rows()) {
      throw InvalidInputError("aggregate: plan size does not match node count");
    }
    for (const auto& terms : plan.terms) {
      for (const auto& [v, c] : terms) {
        (void)c;
        if (v < 0 || static_cast<std::size_t>(v) >= X.rows()) {
          throw InvalidInputError("aggregate: source index out of range");
        }
      }
    }
    Tensor out({X.rows(), X.cols()});
    for (std::size_t u = 0; u < X.rows(); ++u) {
      for (std::size_t j = 0; j < X.cols(); ++j) {
        scratch_.clear();
        for (const auto& [v, c] : plan.terms[u]) {
          scratch_.push_back(c * X(static_cast<std::size_t>(v), j));
        }
        out(u, j) = stable_sum(scratch_);
      }
    }
    ensure_finite(out, "aggregate");
    return record(std::move(out), "aggregate", [is = states.id, plan](Tape& t, int self) {
      const Tensor& d = t.adjoints_[self];
      Tensor& dx = t.adjoints_[is];
      for (std::size_t u = 0; u < d.rows(); ++u) {
        for (const auto& [v, c] : plan.terms[u]) {
          for (std::size_t j = 0; j < d.cols(); ++j) {
            dx(static_cast<std::size_t>(v), j) += c * d(u, j);
          }
        }
      }
    });
  }

  // out[u, :] = sum over v in lists[u] of weights[u, v] * states[v, :],
  // summed per component in value-sorted order.
  Var weighted_aggregate(Var weights, Var states, const std::vector<std::vector<int>>& lists) {
    const Tensor& W = value(weights);
    const Tensor& X = value(states);
    require_matrix(W, "weighted_aggregate");
    require_matrix(X, "weighted_aggregate");
    if (W.rows() != X.rows() || W.cols() != X.rows() || lists.size() != X.rows()) {
      throw InvalidInputError("weighted_aggregate: inconsistent shapes");
    }
    Tensor out({X.rows(), X.cols()});
    for (std::size_t u = 0; u < X.rows(); ++u) {
      for (std::size_t j = 0; j < X.cols(); ++j) {
        scratch_.clear();
        for (int v : lists[u]) {
          scratch_.push_back(W(u, static_cast<std::size_t>(v)) * X(static_cast<std::size_t>(v), j));
        }
        out(u, j) = stable_sum(scratch_);
      }
    }
    ensure_finite(out, "weighted_aggregate");
    return record(std::move(out), "weighted_aggregate",
                  [iw = weights.id, ix = states.id, lists](Tape& t, int self) {
                    const Tensor& d = t.adjoints_[self];
                    const Tensor& W2 = t.nodes_[iw].value;
                    const Tensor& X2 = t.nodes_[ix].value;
                    Tensor& dw = t.adjoints_[iw];
                    Tensor& dx = t.adjoints_[ix];
                    for (std::size_t u = 0; u < d.rows(); ++u) {
                      for (int vi : lists[u]) {
                        auto v = static_cast<std::size_t>(vi);
                        double acc = 0.0;
                        for (std::size_t j = 0; j < d.cols(); ++j) {
                          acc += d(u, j) * X2(v, j);
                          dx(v, j) += W2(u, v) * d(u, j);
                        }
                        dw(u, v) += acc;
                      }
                    }
                  });
  }

  // ---- reductions to a scalar ----

  Var weighted_sum(Var a, Tensor coeffs) {
    const Tensor& A = value(a);
    if (!A.same_shape(coeffs)) throw InvalidInputError("weighted_sum: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) acc += A(i) * coeffs(i);
    Tensor out({1});
    out(0) = acc;
    ensure_finite(out, "weighted_sum");
    return record(std::move(out), "weighted_sum",
                  [ia = a.id, coeffs = std::move(coeffs)](Tape& t, int self) {
                    double d = t.adjoints_[self](0);
                    Tensor& da = t.adjoints_[ia];
                    for (std::size_t i = 0; i < da.size(); ++i) da(i) += d * coeffs(i);
                  });
  }

  // Summed negative log-likelihood of the gold classes under row-wise
  // softmax of the logits; computed via max-subtracted log-sum-exp.
  Var nll(Var logits, const std::vector<int>& classes) {
    const Tensor& Z = value(logits);
    require_matrix(Z, "nll");
    if (classes.size() != Z.rows()) {
      throw InvalidInputError("nll: one gold class required per row");
    }
    std::size_t k = Z.cols();
    for (int c : classes) {
      if (c < 0 || static_cast<std::size_t>(c) >= k) {
        throw InvalidInputError("nll: class index out of range");
      }
    }
    // keep the row-wise probabilities for the backward pass
    Tensor probs({Z.rows(), k});
    double total = 0.0;
    for (std::size_t u = 0; u < Z.rows(); ++u) {
      double mx = Z(u, 0);
      for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, Z(u, j));
      double denom = 0.0;
      for (std::size_t j = 0; j < k; ++j) denom += std::exp(Z(u, j) - mx);
      double lse = mx + std::log(denom);
      total += lse - Z(u, static_cast<std::size_t>(classes[u]));
      for (std::size_t j = 0; j < k; ++j) probs(u, j) = std::exp(Z(u, j) - lse);
    }
    Tensor out({1});
    out(0) = total;
    ensure_finite(out, "nll");
    return record(std::move(out), "nll",
                  [iz = logits.id, classes, probs = std::move(probs)](Tape& t, int self) {
                    double d = t.adjoints_[self](0);
                    Tensor& dz = t.adjoints_[iz];
                    for (std::size_t u = 0; u < probs.rows(); ++u) {
                      for (std::size_t j = 0; j < probs.cols(); ++j) {
                        double onehot = (static_cast<std::size_t>(classes[u]) == j) ? 1.0 : 0.0;
                        dz(u, j) += d * (probs(u, j) - onehot);
                      }
                    }
                  });
  }

 private:
  using BackFn = std::function<void(Tape&, int)>;

  struct Node {
    Tensor value;
    BackFn back;
  };

  const Node& node(Var v) const {
    if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size()) {
      throw InternalError("invalid tape handle");
    }
    return nodes_[static_cast<std::size_t>(v.id)];
  }

  Var push(Tensor value, BackFn back) {
    nodes_.push_back(Node{std::move(value), std::move(back)});
    return Var{static_cast<int>(nodes_.size() - 1)};
  }

  Var record(Tensor value, const char* what, BackFn back) {
    ensure_finite(value, what);
    return push(std::move(value), std::move(back));
  }

  void accumulate(int id, const Tensor& d) {
    Tensor& a = adjoints_[static_cast<std::size_t>(id)];
    for (std::size_t i = 0; i < d.size(); ++i) a(i) += d(i);
  }

  void accumulate_scaled(int id, const Tensor& d, double c) {
    Tensor& a = adjoints_[static_cast<std::size_t>(id)];
    for (std::size_t i = 0; i < d.size(); ++i) a(i) += c * d(i);
  }

  static void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) {
      throw InvalidInputError(std::string(what) + ": shape mismatch " + shape_string(a) +
                              " vs " + shape_string(b));
    }
  }

  std::vector<Node> nodes_;
  std::vector<Tensor> adjoints_;
  std::vector<double> scratch_;
};

// Central-difference gradient estimate of a deterministic loss over a
// parameter list. The verification oracle for the tape.
template <class LossFn>
std::vector<Tensor> finite_diff_grad(LossFn&& loss, std::vector<Tensor> params,
                                     double eps = 1e-5) {
  if (!(eps > 0.0)) throw InvalidInputError("finite_diff_grad: eps must be positive");
  std::vector<Tensor> grads;
  grads.reserve(params.size());
  for (const Tensor& p : params) grads.emplace_back(p.shape());
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t i = 0; i < params[t].size(); ++i) {
      double orig = params[t](i);
      params[t](i) = orig + eps;
      double up = loss(params);
      params[t](i) = orig - eps;
      double down = loss(params);
      params[t](i) = orig;
      grads[t](i) = (up - down) / (2.0 * eps);
    }
  }
  return grads;
}

}  // namespace colgnn
