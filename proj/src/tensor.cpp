#include "mgp/tensor.hpp"

#include <algorithm>
#include <unordered_set>
#include <utility>

namespace mgp {

namespace detail {

void Node::accumulate(const Matrix& g) {
  if (!grad_set) {
    grad = g;
    grad_set = true;
  } else {
    grad += g;
  }
}

Node::~Node() {
  // Flatten the recursive teardown of long parent chains.
  std::vector<NodePtr> stack;
  stack.swap(parents);
  while (!stack.empty()) {
    NodePtr p = std::move(stack.back());
    stack.pop_back();
    if (p && p.use_count() == 1) {
      for (auto& q : p->parents) stack.push_back(std::move(q));
      p->parents.clear();
    }
  }
}

}  // namespace detail

using detail::Node;
using detail::NodePtr;

const NodePtr& node_of(const Tensor& t);

Tensor make_op(Matrix value, std::vector<Tensor> parents,
               std::function<void(Node&)> backward, const char* op_name) {
  if (!value.allFinite()) {
    throw NonFiniteValue(std::string("operation '") + op_name +
                         "' produced non-finite values");
  }
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  for (const auto& p : parents) {
    if (p.requires_grad()) n->requires_grad = true;
  }
  if (n->requires_grad) {
    n->backward = std::move(backward);
    for (auto& p : parents) n->parents.push_back(node_of(p));
  }
  return Tensor(std::move(n));
}

const NodePtr& node_of(const Tensor& t) { return t.node_; }

Tensor Tensor::constant(Matrix v) {
  return make_op(std::move(v), {}, nullptr, "constant");
}

Tensor Tensor::constant(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return constant(std::move(m));
}

Tensor Tensor::parameter(Matrix v) {
  Tensor t = constant(std::move(v));
  t.node_->requires_grad = true;
  return t;
}

Tensor Tensor::parameter(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return parameter(std::move(m));
}

double Tensor::scalar() const {
  if (size() != 1) throw DimensionMismatch("scalar() on non-1x1 tensor");
  return node_->value(0, 0);
}

Matrix& Tensor::leaf_value() {
  if (node_->backward) {
    throw Error("leaf_value() is only valid on leaf tensors");
  }
  return node_->value;
}

namespace {

const Matrix& val(const Tensor& t) { return t.value(); }

bool is_scalar(const Tensor& t) { return t.size() == 1; }

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string(op) + ": shape mismatch (" +
                            std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " +
                            std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()) + ")");
  }
}

// Gradient of a broadcast 1x1 operand is the sum of the elementwise grads.
Matrix reduce_like(const Matrix& g, Index rows, Index cols) {
  if (g.rows() == rows && g.cols() == cols) return g;
  Matrix m(1, 1);
  m(0, 0) = g.sum();
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// arithmetic

Tensor add(const Tensor& a, const Tensor& b) {
  if (!is_scalar(a) && !is_scalar(b)) check_same_shape(a, b, "add");
  Matrix v;
  if (is_scalar(a) && !is_scalar(b)) {
    v = val(b).array() + val(a)(0, 0);
  } else if (is_scalar(b) && !is_scalar(a)) {
    v = val(a).array() + val(b)(0, 0);
  } else {
    v = val(a) + val(b);
  }
  auto pa = node_of(a);
  auto pb = node_of(b);
  return make_op(
      std::move(v), {a, b},
      [pa, pb](Node& self) {
        if (pa->requires_grad)
          pa->accumulate(reduce_like(self.grad, pa->value.rows(), pa->value.cols()));
        if (pb->requires_grad)
          pb->accumulate(reduce_like(self.grad, pb->value.rows(), pb->value.cols()));
      },
      "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
  if (!is_scalar(a) && !is_scalar(b)) check_same_shape(a, b, "sub");
  Matrix v;
  if (is_scalar(a) && !is_scalar(b)) {
    v = (-val(b)).array() + val(a)(0, 0);
  } else if (is_scalar(b) && !is_scalar(a)) {
    v = val(a).array() - val(b)(0, 0);
  } else {
    v = val(a) - val(b);
  }
  auto pa = node_of(a);
  auto pb = node_of(b);
  return make_op(
      std::move(v), {a, b},
      [pa, pb](Node& self) {
        if (pa->requires_grad)
          pa->accumulate(reduce_like(self.grad, pa->value.rows(), pa->value.cols()));
        if (pb->requires_grad)
          pb->accumulate(reduce_like(-self.grad, pb->value.rows(), pb->value.cols()));
      },
      "sub");
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (!is_scalar(a) && !is_scalar(b)) check_same_shape(a, b, "mul");
  Matrix v;
  if (is_scalar(a) && !is_scalar(b)) {
    v = val(b) * val(a)(0, 0);
  } else if (is_scalar(b) && !is_scalar(a)) {
    v = val(a) * val(b)(0, 0);
  } else {
    v = val(a).cwiseProduct(val(b));
  }
  auto pa = node_of(a);
  auto pb = node_of(b);
  return make_op(
      std::move(v), {a, b},
      [pa, pb](Node& self) {
        const Matrix& av = pa->value;
        const Matrix& bv = pb->value;
        if (pa->requires_grad) {
          Matrix ga = (bv.size() == 1) ? Matrix(self.grad * bv(0, 0))
                                       : Matrix(self.grad.cwiseProduct(bv));
          pa->accumulate(reduce_like(ga, av.rows(), av.cols()));
        }
        if (pb->requires_grad) {
          Matrix gb = (av.size() == 1) ? Matrix(self.grad * av(0, 0))
                                       : Matrix(self.grad.cwiseProduct(av));
          pb->accumulate(reduce_like(gb, bv.rows(), bv.cols()));
        }
      },
      "mul");
}

Tensor div(const Tensor& a, const Tensor& b) {
  if (!is_scalar(a) && !is_scalar(b)) check_same_shape(a, b, "div");
  Matrix v;
  if (is_scalar(b) && !is_scalar(a)) {
    v = val(a) / val(b)(0, 0);
  } else if (is_scalar(a) && !is_scalar(b)) {
    v = val(a)(0, 0) * val(b).cwiseInverse();
  } else {
    v = val(a).cwiseQuotient(val(b));
  }
  auto pa = node_of(a);
  auto pb = node_of(b);
  return make_op(
      std::move(v), {a, b},
      [pa, pb](Node& self) {
        const Matrix& av = pa->value;
        const Matrix& bv = pb->value;
        if (pa->requires_grad) {
          Matrix ga = (bv.size() == 1) ? Matrix(self.grad / bv(0, 0))
                                       : Matrix(self.grad.cwiseQuotient(bv));
          pa->accumulate(reduce_like(ga, av.rows(), av.cols()));
        }
        if (pb->requires_grad) {
          // d/db (a/b) = -a / b^2
          Matrix quot;
          if (bv.size() == 1) {
            quot = av / bv(0, 0);
            Matrix gb = -(self.grad.cwiseProduct(quot)) / bv(0, 0);
            pb->accumulate(reduce_like(gb, bv.rows(), bv.cols()));
          } else if (av.size() == 1) {
            Matrix gb = -av(0, 0) *
                        self.grad.cwiseQuotient(bv.cwiseProduct(bv));
            pb->accumulate(reduce_like(gb, bv.rows(), bv.cols()));
          } else {
            quot = av.cwiseQuotient(bv);
            Matrix gb = -self.grad.cwiseProduct(quot).cwiseQuotient(bv);
            pb->accumulate(gb);
          }
        }
      },
      "div");
}

Tensor add(const Tensor& a, double b) {
  Matrix v = val(a).array() + b;
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) { pa->accumulate(self.grad); }, "add_const");
}

Tensor sub(double a, const Tensor& b) {
  Matrix v = a - val(b).array();
  auto pb = node_of(b);
  return make_op(
      std::move(v), {b},
      [pb](Node& self) { pb->accumulate(-self.grad); }, "rsub_const");
}

Tensor mul(const Tensor& a, double b) {
  Matrix v = val(a) * b;
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa, b](Node& self) { pa->accumulate(Matrix(self.grad * b)); },
      "mul_const");
}

Tensor neg(const Tensor& a) { return mul(a, -1.0); }

// ---------------------------------------------------------------------------
// elementwise

Tensor exp(const Tensor& a) {
  Matrix v = val(a).array().exp();
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) {
        pa->accumulate(self.grad.cwiseProduct(self.value));
      },
      "exp");
}

Tensor log(const Tensor& a) {
  Matrix v = val(a).array().log();
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) { pa->accumulate(self.grad.cwiseQuotient(pa->value)); },
      "log");
}

Tensor sqrt(const Tensor& a) {
  Matrix v = val(a).array().sqrt();
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) {
        pa->accumulate(
            Matrix(0.5 * self.grad.cwiseQuotient(self.value)));
      },
      "sqrt");
}

Tensor square(const Tensor& a) {
  Matrix v = val(a).cwiseProduct(val(a));
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) {
        pa->accumulate(Matrix(2.0 * self.grad.cwiseProduct(pa->value)));
      },
      "square");
}

Tensor sigmoid(const Tensor& a) {
  Matrix v = val(a).unaryExpr([](double x) {
    return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
  });
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) {
        Matrix s = self.value;
        pa->accumulate(
            Matrix(self.grad.cwiseProduct(s.cwiseProduct(Matrix(Matrix::Ones(s.rows(), s.cols()) - s)))));
      },
      "sigmoid");
}

Tensor softplus(const Tensor& a) {
  Matrix v = val(a).unaryExpr([](double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  });
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) {
        Matrix s = pa->value.unaryExpr([](double x) {
          return x >= 0 ? 1.0 / (1.0 + std::exp(-x))
                        : std::exp(x) / (1.0 + std::exp(x));
        });
        pa->accumulate(self.grad.cwiseProduct(s));
      },
      "softplus");
}

Tensor relu(const Tensor& a) {
  Matrix v = val(a).cwiseMax(0.0);
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) {
        Matrix mask = (pa->value.array() > 0.0).cast<double>();
        pa->accumulate(self.grad.cwiseProduct(mask));
      },
      "relu");
}

Tensor clamp_min(const Tensor& a, double floor) {
  Matrix v = val(a).cwiseMax(floor);
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa, floor](Node& self) {
        Matrix mask = (pa->value.array() >= floor).cast<double>();
        pa->accumulate(self.grad.cwiseProduct(mask));
      },
      "clamp_min");
}

// ---------------------------------------------------------------------------
// reductions / shape

Tensor sum(const Tensor& a) {
  Matrix v(1, 1);
  v(0, 0) = val(a).sum();
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) {
        pa->accumulate(Matrix(Matrix::Constant(pa->value.rows(),
                                               pa->value.cols(),
                                               self.grad(0, 0))));
      },
      "sum");
}

Tensor rowsum(const Tensor& a) {
  Matrix v = val(a).rowwise().sum();
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) {
        pa->accumulate(
            Matrix(self.grad * Matrix::Ones(1, pa->value.cols())));
      },
      "rowsum");
}

Tensor colsum(const Tensor& a) {
  Matrix v = val(a).colwise().sum();
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) {
        pa->accumulate(
            Matrix(Matrix::Ones(pa->value.rows(), 1) * self.grad));
      },
      "colsum");
}

Tensor transpose(const Tensor& a) {
  Matrix v = val(a).transpose();
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) { pa->accumulate(Matrix(self.grad.transpose())); },
      "transpose");
}

Tensor diag_part(const Tensor& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("diag_part: not square");
  Matrix v = val(a).diagonal();
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) {
        Matrix g = Matrix::Zero(pa->value.rows(), pa->value.cols());
        g.diagonal() = self.grad.col(0);
        pa->accumulate(g);
      },
      "diag_part");
}

Tensor diag_embed(const Tensor& a) {
  if (a.cols() != 1) throw DimensionMismatch("diag_embed: expects n x 1");
  Matrix v = Matrix::Zero(a.rows(), a.rows());
  v.diagonal() = val(a).col(0);
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa](Node& self) { pa->accumulate(Matrix(self.grad.diagonal())); },
      "diag_embed");
}

Tensor lower_triangular(const Tensor& a, bool strict) {
  Matrix v = strict ? Matrix(val(a).triangularView<Eigen::StrictlyLower>())
                    : Matrix(val(a).triangularView<Eigen::Lower>());
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa, strict](Node& self) {
        Matrix g = strict
                       ? Matrix(self.grad.triangularView<Eigen::StrictlyLower>())
                       : Matrix(self.grad.triangularView<Eigen::Lower>());
        pa->accumulate(g);
      },
      "lower_triangular");
}

Tensor cols(const Tensor& a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw DimensionMismatch("cols: block out of range");
  }
  Matrix v = val(a).middleCols(start, count);
  auto pa = node_of(a);
  return make_op(
      std::move(v), {a},
      [pa, start, count](Node& self) {
        Matrix g = Matrix::Zero(pa->value.rows(), pa->value.cols());
        g.middleCols(start, count) = self.grad;
        pa->accumulate(g);
      },
      "cols");
}

Tensor hstack(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionMismatch("hstack: no parts");
  Index rows = parts.front().rows();
  Index total = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw DimensionMismatch("hstack: row mismatch");
    total += p.cols();
  }
  Matrix v(rows, total);
  Index off = 0;
  std::vector<Index> offsets;
  std::vector<NodePtr> nodes;
  for (const auto& p : parts) {
    v.middleCols(off, p.cols()) = val(p);
    offsets.push_back(off);
    nodes.push_back(node_of(p));
    off += p.cols();
  }
  return make_op(
      std::move(v), parts,
      [nodes, offsets](Node& self) {
        for (size_t i = 0; i < nodes.size(); ++i) {
          if (!nodes[i]->requires_grad) continue;
          nodes[i]->accumulate(
              Matrix(self.grad.middleCols(offsets[i], nodes[i]->value.cols())));
        }
      },
      "hstack");
}

Tensor detach(const Tensor& a) { return Tensor::constant(val(a)); }

// ---------------------------------------------------------------------------
// vector broadcasts

Tensor add_rowvec(const Tensor& m, const Tensor& r) {
  if (r.rows() != 1 || r.cols() != m.cols())
    throw DimensionMismatch("add_rowvec: expects 1 x cols(m)");
  Matrix v = val(m).rowwise() + val(r).row(0);
  auto pm = node_of(m);
  auto pr = node_of(r);
  return make_op(
      std::move(v), {m, r},
      [pm, pr](Node& self) {
        if (pm->requires_grad) pm->accumulate(self.grad);
        if (pr->requires_grad)
          pr->accumulate(Matrix(self.grad.colwise().sum()));
      },
      "add_rowvec");
}

Tensor add_colvec(const Tensor& m, const Tensor& c) {
  if (c.cols() != 1 || c.rows() != m.rows())
    throw DimensionMismatch("add_colvec: expects rows(m) x 1");
  Matrix v = val(m).colwise() + val(c).col(0);
  auto pm = node_of(m);
  auto pc = node_of(c);
  return make_op(
      std::move(v), {m, c},
      [pm, pc](Node& self) {
        if (pm->requires_grad) pm->accumulate(self.grad);
        if (pc->requires_grad)
          pc->accumulate(Matrix(self.grad.rowwise().sum()));
      },
      "add_colvec");
}

Tensor mul_rowvec(const Tensor& m, const Tensor& r) {
  if (r.rows() != 1 || r.cols() != m.cols())
    throw DimensionMismatch("mul_rowvec: expects 1 x cols(m)");
  Matrix v = val(m).array().rowwise() * val(r).row(0).array();
  auto pm = node_of(m);
  auto pr = node_of(r);
  return make_op(
      std::move(v), {m, r},
      [pm, pr](Node& self) {
        if (pm->requires_grad) {
          Matrix g = self.grad.array().rowwise() * pr->value.row(0).array();
          pm->accumulate(g);
        }
        if (pr->requires_grad) {
          Matrix g = self.grad.cwiseProduct(pm->value).colwise().sum();
          pr->accumulate(g);
        }
      },
      "mul_rowvec");
}

Tensor mul_colvec(const Tensor& m, const Tensor& c) {
  if (c.cols() != 1 || c.rows() != m.rows())
    throw DimensionMismatch("mul_colvec: expects rows(m) x 1");
  Matrix v = val(m).array().colwise() * val(c).col(0).array();
  auto pm = node_of(m);
  auto pc = node_of(c);
  return make_op(
      std::move(v), {m, c},
      [pm, pc](Node& self) {
        if (pm->requires_grad) {
          Matrix g = self.grad.array().colwise() * pc->value.col(0).array();
          pm->accumulate(g);
        }
        if (pc->requires_grad) {
          Matrix g = self.grad.cwiseProduct(pm->value).rowwise().sum();
          pc->accumulate(g);
        }
      },
      "mul_colvec");
}

// ---------------------------------------------------------------------------
// linear algebra

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matmul: inner dims");
  Matrix v = val(a) * val(b);
  auto pa = node_of(a);
  auto pb = node_of(b);
  return make_op(
      std::move(v), {a, b},
      [pa, pb](Node& self) {
        if (pa->requires_grad)
          pa->accumulate(Matrix(self.grad * pb->value.transpose()));
        if (pb->requires_grad)
          pb->accumulate(Matrix(pa->value.transpose() * self.grad));
      },
      "matmul");
}

Tensor cholesky(const Tensor& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("cholesky: not square");
  const Matrix& av = val(a);
  double scale = std::max(1.0, av.cwiseAbs().maxCoeff());
  if ((av - av.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error("cholesky: input not symmetric within 1e-10");
  }
  Matrix sym = 0.5 * (av + av.transpose());
  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky: matrix not positive definite");
  }
  Matrix l = llt.matrixL();
  if ((l.diagonal().array() <= 0.0).any()) {
    throw NotPositiveDefinite("cholesky: non-positive pivot");
  }
  auto pa = node_of(a);
  return make_op(
      std::move(l), {a},
      [pa](Node& self) {
        const Matrix& l = self.value;
        Matrix lbar = self.grad.triangularView<Eigen::Lower>();
        Matrix phi = (l.transpose() * lbar).eval();
        phi = phi.triangularView<Eigen::Lower>();
        phi.diagonal() *= 0.5;
        // L^-T phi L^-1, then symmetrize.
        Matrix tmp = l.triangularView<Eigen::Lower>().transpose().solve(phi);
        Matrix g =
            l.triangularView<Eigen::Lower>().transpose().solve(tmp.transpose());
        g = 0.5 * (g + Matrix(g.transpose()));
        pa->accumulate(g);
      },
      "cholesky");
}

Tensor tri_solve(const Tensor& l, const Tensor& b, bool transpose_l) {
  if (l.rows() != l.cols()) throw DimensionMismatch("tri_solve: L not square");
  if (l.cols() != b.rows()) throw DimensionMismatch("tri_solve: dims");
  Matrix x = transpose_l
                 ? Matrix(val(l).triangularView<Eigen::Lower>().transpose().solve(val(b)))
                 : Matrix(val(l).triangularView<Eigen::Lower>().solve(val(b)));
  auto pl = node_of(l);
  auto pb = node_of(b);
  return make_op(
      std::move(x), {l, b},
      [pl, pb, transpose_l](Node& self) {
        const Matrix& lv = pl->value;
        const Matrix& x = self.value;
        Matrix bbar =
            transpose_l
                ? Matrix(lv.triangularView<Eigen::Lower>().solve(self.grad))
                : Matrix(lv.triangularView<Eigen::Lower>().transpose().solve(self.grad));
        if (pb->requires_grad) pb->accumulate(bbar);
        if (pl->requires_grad) {
          Matrix lbar = transpose_l ? Matrix(-x * bbar.transpose())
                                    : Matrix(-bbar * x.transpose());
          lbar = lbar.triangularView<Eigen::Lower>();
          pl->accumulate(lbar);
        }
      },
      "tri_solve");
}

CholeskyFactor cholesky_with_jitter(const Tensor& a, double jitter,
                                    double jitter_cap) {
  if (jitter < 0) throw Error("cholesky_with_jitter: jitter must be >= 0");
  const Index n = a.rows();
  double j = jitter;
  while (true) {
    try {
      Tensor shifted =
          (j == 0.0) ? a : add(a, Tensor::constant(Matrix(j * Matrix::Identity(n, n))));
      Tensor l = cholesky(shifted);
      return CholeskyFactor{l, j, n};
    } catch (const NotPositiveDefinite&) {
      double next = (j == 0.0) ? 1e-10 : j * 10.0;
      if (next > jitter_cap || jitter_cap <= 0.0) {
        throw NotPositiveDefinite(
            "cholesky_with_jitter: matrix stayed indefinite at jitter cap " +
            std::to_string(jitter_cap) + " (degenerate kernel matrix)");
      }
      j = next;
    }
  }
}

// ---------------------------------------------------------------------------
// reverse pass

std::vector<Matrix> grad(const Tensor& scalar_output,
                         const std::vector<Tensor>& inputs,
                         bool allow_unused) {
  if (!scalar_output.defined() || scalar_output.size() != 1) {
    throw Error("grad: output must be a defined 1x1 tensor");
  }
  const NodePtr& root = node_of(scalar_output);

  // Post-order over the requires_grad subgraph, iteratively.
  std::vector<Node*> topo;
  std::unordered_set<Node*> visited;
  if (root->requires_grad) {
    std::vector<std::pair<Node*, size_t>> stack;
    stack.emplace_back(root.get(), 0);
    visited.insert(root.get());
    while (!stack.empty()) {
      auto& [node, idx] = stack.back();
      bool descended = false;
      while (idx < node->parents.size()) {
        Node* p = node->parents[idx++].get();
        if (p->requires_grad && !visited.count(p)) {
          visited.insert(p);
          stack.emplace_back(p, 0);
          descended = true;
          break;
        }
      }
      if (!descended && (stack.back().second >= stack.back().first->parents.size())) {
        topo.push_back(stack.back().first);
        stack.pop_back();
      }
    }
  }

  for (Node* n : topo) {
    n->grad_set = false;
    n->grad.resize(0, 0);
  }
  if (root->requires_grad) {
    root->grad = Matrix::Ones(1, 1);
    root->grad_set = true;
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      Node* n = *it;
      if (n->grad_set && n->backward) n->backward(*n);
    }
  }

  std::vector<Matrix> out;
  out.reserve(inputs.size());
  for (const auto& in : inputs) {
    Node* n = node_of(in).get();
    if (!visited.count(n)) {
      if (!allow_unused) {
        throw UntrackedInput("grad: input did not participate in the graph");
      }
      out.push_back(Matrix::Zero(in.rows(), in.cols()));
    } else {
      out.push_back(n->grad_set ? n->grad
                                : Matrix(Matrix::Zero(in.rows(), in.cols())));
    }
  }
  for (Node* n : topo) {
    n->grad_set = false;
    n->grad.resize(0, 0);
  }
  return out;
}

}  // namespace mgp
