#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mgp/errors.hpp"

namespace mgp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace detail {

// One entry of the define-by-run tape. Children hold shared_ptrs to their
// parents, so the graph lives exactly as long as some Tensor refers to it.
struct Node {
  Matrix value;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads self.grad, accumulates into parent grads. Empty for leaves and
  // for subgraphs that do not require gradients.
  std::function<void(Node&)> backward;

  // Scratch used by one backward pass.
  Matrix grad;
  bool grad_set = false;

  void accumulate(const Matrix& g);
  ~Node();
};

using NodePtr = std::shared_ptr<Node>;

}  // namespace detail

/// Dense 2-D tensor of 64-bit reals with optional reverse-mode gradient
/// tracking. Scalars are 1x1, column vectors n x 1. Values are immutable
/// once created; only the optimizer touches leaf storage between steps.
class Tensor {
 public:
  Tensor() = default;

  static Tensor constant(Matrix v);
  static Tensor constant(double v);
  static Tensor parameter(Matrix v);
  static Tensor parameter(double v);

  bool defined() const { return node_ != nullptr; }
  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  Index size() const { return node_->value.size(); }
  std::array<Index, 2> shape() const { return {rows(), cols()}; }
  bool requires_grad() const { return node_ && node_->requires_grad; }

  const Matrix& value() const { return node_->value; }
  double scalar() const;

  // Leaf storage, used by optimizers between tape rebuilds.
  Matrix& leaf_value();

  bool same_node(const Tensor& other) const { return node_ == other.node_; }

 private:
  explicit Tensor(detail::NodePtr n) : node_(std::move(n)) {}
  detail::NodePtr node_;

  friend Tensor make_op(Matrix value, std::vector<Tensor> parents,
                        std::function<void(detail::Node&)> backward,
                        const char* op_name);
  friend std::vector<Matrix> grad(const Tensor&, const std::vector<Tensor>&,
                                  bool);
  friend const detail::NodePtr& node_of(const Tensor& t);
};

// --- arithmetic (shapes must match, or one side may be 1x1 and broadcasts) ---
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, double b);
Tensor sub(double a, const Tensor& b);
Tensor mul(const Tensor& a, double b);
Tensor neg(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator+(const Tensor& a, double b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, double b) { return add(a, -b); }
inline Tensor operator*(const Tensor& a, double b) { return mul(a, b); }
inline Tensor operator*(double a, const Tensor& b) { return mul(b, a); }
inline Tensor operator-(const Tensor& a) { return neg(a); }
inline Tensor operator-(double a, const Tensor& b) { return sub(a, b); }

// --- elementwise ---
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor square(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor clamp_min(const Tensor& a, double floor);

// --- reductions / shape ---
Tensor sum(const Tensor& a);      // 1x1
Tensor rowsum(const Tensor& a);   // n x 1
Tensor colsum(const Tensor& a);   // 1 x m
Tensor transpose(const Tensor& a);
Tensor diag_part(const Tensor& a);              // square -> n x 1
Tensor diag_embed(const Tensor& a);             // n x 1  -> n x n
Tensor lower_triangular(const Tensor& a, bool strict);
Tensor cols(const Tensor& a, Index start, Index count);
Tensor hstack(const std::vector<Tensor>& parts);
Tensor detach(const Tensor& a);

// --- broadcast against vectors ---
Tensor add_rowvec(const Tensor& m, const Tensor& r);  // r: 1 x m
Tensor add_colvec(const Tensor& m, const Tensor& c);  // c: n x 1
Tensor mul_rowvec(const Tensor& m, const Tensor& r);
Tensor mul_colvec(const Tensor& m, const Tensor& c);

// --- linear algebra ---
Tensor matmul(const Tensor& a, const Tensor& b);

// Lower Cholesky factor of a symmetric matrix. Throws NotPositiveDefinite.
Tensor cholesky(const Tensor& a);

// X = L^-1 B (transpose_l=false) or L^-T B (transpose_l=true), L lower.
Tensor tri_solve(const Tensor& l, const Tensor& b, bool transpose_l);

/// Cholesky factor obtained after the jitter escalation policy; jitter is
/// added to the diagonal before factorization and escalated x10 on failure.
struct CholeskyFactor {
  Tensor lower;
  double jitter_used = 0.0;
  Index dim = 0;
};

CholeskyFactor cholesky_with_jitter(const Tensor& a, double jitter,
                                    double jitter_cap);

/// d(output)/d(input) for each input; output must be scalar. When
/// allow_unused is false, an input unreachable from the output raises
/// UntrackedInput; otherwise its gradient is returned as zeros.
std::vector<Matrix> grad(const Tensor& scalar_output,
                         const std::vector<Tensor>& inputs,
                         bool allow_unused = false);

}  // namespace mgp
