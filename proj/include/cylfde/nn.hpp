#pragma once

// The PINN approximator f(t, a): blocks of (affine -> sin -> layer norm)
// followed by an affine head, with hand-written differentiation.
//
// Residuals of both supported PDEs are directional derivatives v . grad f, so
// the forward pass carries one tangent per interior sample alongside the
// primal values (forward mode) and the backward pass propagates adjoints of
// both streams (reverse over forward). Samples are columns; every layer is a
// GEMM over the whole batch.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cylfde/errors.hpp"
#include "cylfde/losses.hpp"
#include "cylfde/problems.hpp"
#include "cylfde/sampling.hpp"

namespace cylfde {

enum class Activation { Sin, Identity };

inline std::string to_string(Activation a) { return a == Activation::Sin ? "sin" : "identity"; }

inline Activation parse_activation(const std::string& s) {
  if (s == "sin") return Activation::Sin;
  if (s == "identity") return Activation::Identity;
  throw ConfigError("unknown activation '" + s + "'");
}

inline constexpr double kLayerNormEps = 1e-5;

struct MlpArch {
  std::size_t input_dim = 1;
  std::size_t width = 64;
  std::size_t blocks = 3;
  Activation activation = Activation::Sin;
  bool layer_norm = true;
  double norm_eps = kLayerNormEps;

  bool operator==(const MlpArch&) const = default;

  void validate() const {
    if (input_dim == 0 || width == 0 || blocks == 0) {
      throw ConfigError("network input_dim, width and blocks must be positive");
    }
    if (!(norm_eps > 0.0)) throw ConfigError("layer-norm epsilon must be positive");
  }

  static MlpArch standard(std::size_t degree, std::size_t width) {
    MlpArch a;
    a.input_dim = degree + 1;
    a.width = width;
    return a;
  }
};

/// One named tensor inside the flat parameter vector (column-major).
struct TensorSlot {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index size() const { return rows * cols; }
};

inline std::vector<TensorSlot> parameter_layout(const MlpArch& arch) {
  std::vector<TensorSlot> out;
  Eigen::Index off = 0;
  const auto add = [&](std::string name, std::size_t r, std::size_t c) {
    TensorSlot s{std::move(name), off, static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)};
    off += s.size();
    out.push_back(std::move(s));
  };
  for (std::size_t b = 0; b < arch.blocks; ++b) {
    const std::string p = "block" + std::to_string(b) + ".";
    add(p + "weight", arch.width, b == 0 ? arch.input_dim : arch.width);
    add(p + "bias", arch.width, 1);
    if (arch.layer_norm) {
      add(p + "norm_gain", arch.width, 1);
      add(p + "norm_bias", arch.width, 1);
    }
  }
  add("head.weight", 1, arch.width);
  add("head.bias", 1, 1);
  return out;
}

template <class S>
class Mlp {
 public:
  using Scalar = S;
  using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;

  /// All parameters zero.
  explicit Mlp(const MlpArch& arch) : arch_(arch), layout_(parameter_layout(arch)) {
    arch_.validate();
    params_ = Vector::Zero(layout_.back().offset + layout_.back().size());
  }

  /// Affine weights and biases uniform in +-1/sqrt(fan_in), unit norm gains,
  /// zero norm shifts.
  static Mlp initialized(const MlpArch& arch, std::uint64_t seed) {
    Mlp net(arch);
    Rng rng(seed);
    double fan_in = 1.0;  // of the weight preceding each bias in the layout
    for (std::size_t i = 0; i < net.layout_.size(); ++i) {
      const TensorSlot& s = net.layout_[i];
      auto t = net.tensor(i);
      if (s.name.ends_with(".weight")) {
        fan_in = static_cast<double>(s.cols);
        const double bound = 1.0 / std::sqrt(fan_in);
        for (Eigen::Index c = 0; c < s.cols; ++c) {
          for (Eigen::Index r = 0; r < s.rows; ++r) t(r, c) = S(rng.uniform(-bound, bound));
        }
      } else if (s.name.ends_with(".bias") && !s.name.ends_with("norm_bias")) {
        const double bound = 1.0 / std::sqrt(fan_in);
        for (Eigen::Index r = 0; r < s.rows; ++r) t(r, 0) = S(rng.uniform(-bound, bound));
      } else if (s.name.ends_with(".norm_gain")) {
        t.setOnes();
      }
    }
    return net;
  }

  const MlpArch& arch() const { return arch_; }
  const std::vector<TensorSlot>& layout() const { return layout_; }
  Eigen::Index num_params() const { return params_.size(); }
  Vector& params() { return params_; }
  const Vector& params() const { return params_; }

  MatrixMap tensor(std::size_t i) {
    const TensorSlot& s = layout_.at(i);
    return MatrixMap(params_.data() + s.offset, s.rows, s.cols);
  }
  ConstMatrixMap tensor(std::size_t i) const {
    const TensorSlot& s = layout_.at(i);
    return ConstMatrixMap(params_.data() + s.offset, s.rows, s.cols);
  }

  std::size_t find(const std::string& name) const {
    for (std::size_t i = 0; i < layout_.size(); ++i) {
      if (layout_[i].name == name) return i;
    }
    throw std::out_of_range("no parameter tensor named '" + name + "'");
  }
  MatrixMap tensor(const std::string& name) { return tensor(find(name)); }
  ConstMatrixMap tensor(const std::string& name) const { return tensor(find(name)); }

  // Slot indices by role.
  std::size_t per_block() const { return arch_.layer_norm ? 4 : 2; }
  std::size_t weight_slot(std::size_t b) const { return b * per_block(); }
  std::size_t bias_slot(std::size_t b) const { return b * per_block() + 1; }
  std::size_t gain_slot(std::size_t b) const { return b * per_block() + 2; }
  std::size_t shift_slot(std::size_t b) const { return b * per_block() + 3; }
  std::size_t head_weight_slot() const { return arch_.blocks * per_block(); }
  std::size_t head_bias_slot() const { return head_weight_slot() + 1; }

  template <class T>
  Mlp<T> cast() const {
    Mlp<T> out(arch_);
    out.params() = params_.template cast<T>();
    return out;
  }

  bool all_finite() const { return params_.allFinite(); }

 private:
  MlpArch arch_;
  std::vector<TensorSlot> layout_;
  Vector params_;
};

/// Cached intermediates of one batched primal + tangent pass. The first
/// `tangents` primal columns carry a tangent each. Buffers are reused when the
/// same object is passed to successive passes of equal shape.
template <class S>
struct DualBatch {
  using Matrix = typename Mlp<S>::Matrix;
  using Row = Eigen::Matrix<S, 1, Eigen::Dynamic>;

  struct Block {
    Matrix x, tx;  // block input and its tangent
    Matrix cz;     // cos(z) (sin activation only)
    Matrix s_t;    // sin(z) on the tangent columns (sin activation only)
    Matrix tz;     // tangent of z
    Matrix d, td;  // centred activations (layer norm only)
    Row r, c;      // 1/sqrt(var + eps); mean(d * td)
  };

  Eigen::Index samples = 0;
  Eigen::Index tangents = 0;
  std::vector<Block> blocks;
  Matrix y, ty;   // output of the last block
  Row out, tout;  // network values and directional derivatives

  // Scratch for the reverse pass.
  Matrix z, ybar, tybar, zbar, tzbar;

  /// Normalized activations of block b (before gain and bias).
  Matrix normalized(std::size_t b) const {
    return (blocks[b].d.array().rowwise() * blocks[b].r.array()).matrix();
  }
};

namespace detail {

template <class M>
void check_block_finite(const M& m, std::size_t block) {
  if (!m.allFinite()) {
    throw NumericError("non-finite activation in block " + std::to_string(block));
  }
}

template <class S>
using ColMap = Eigen::Map<Eigen::Array<S, Eigen::Dynamic, 1>>;

template <class S, class M>
ColMap<S> col(M& m, Eigen::Index j) {
  return ColMap<S>(m.data() + j * m.rows(), m.rows());
}

}  // namespace detail

/// Batched forward pass. `x` holds one sample per column; `tx` holds tangent
/// directions for the first tx.cols() samples (may have zero columns).
template <class S>
void dual_forward(const Mlp<S>& net, const typename Mlp<S>::Matrix& x,
                  const typename Mlp<S>::Matrix& tx, DualBatch<S>& tape) {
  using Array = Eigen::Array<S, Eigen::Dynamic, 1>;
  const MlpArch& arch = net.arch();
  if (x.rows() != static_cast<Eigen::Index>(arch.input_dim)) {
    throw ShapeError("network expects " + std::to_string(arch.input_dim) + " inputs, got " +
                     std::to_string(x.rows()));
  }
  if (tx.cols() > 0 && (tx.rows() != x.rows() || tx.cols() > x.cols())) {
    throw ShapeError("tangent batch does not match the primal batch");
  }
  if (!x.allFinite() || !tx.allFinite()) throw NumericError("non-finite network input");

  const Eigen::Index np = x.cols(), nt = tx.cols();
  const Eigen::Index w = static_cast<Eigen::Index>(arch.width);
  const bool sin_act = arch.activation == Activation::Sin;
  const S eps = S(arch.norm_eps);
  const S inv_w = S(1) / S(w);
  tape.samples = np;
  tape.tangents = nt;
  tape.blocks.resize(arch.blocks);
  tape.blocks[0].x = x;
  tape.blocks[0].tx = tx;
  Array ts(w);

  for (std::size_t b = 0; b < arch.blocks; ++b) {
    auto& blk = tape.blocks[b];
    auto& y = b + 1 < arch.blocks ? tape.blocks[b + 1].x : tape.y;
    auto& ty = b + 1 < arch.blocks ? tape.blocks[b + 1].tx : tape.ty;
    const auto W = net.tensor(net.weight_slot(b));
    const auto bias = net.tensor(net.bias_slot(b)).col(0).array();
    tape.z.noalias() = W * blk.x;
    blk.tz.noalias() = W * blk.tx;
    y.resize(w, np);
    ty.resize(w, nt);
    if (sin_act) {
      blk.cz.resize(w, np);
      blk.s_t.resize(w, nt);
    }
    if (arch.layer_norm) {
      blk.d.resize(w, np);
      blk.td.resize(w, nt);
      blk.r.resize(np);
      blk.c.resize(nt);
    }
    const auto gain = arch.layer_norm ? net.tensor(net.gain_slot(b)).col(0).array()
                                      : net.tensor(net.bias_slot(b)).col(0).array();
    const auto shift = arch.layer_norm ? net.tensor(net.shift_slot(b)).col(0).array()
                                       : net.tensor(net.bias_slot(b)).col(0).array();

    for (Eigen::Index j = 0; j < np; ++j) {
      auto zc = detail::col<S>(tape.z, j);
      zc += bias;
      auto yc = detail::col<S>(y, j);
      const bool tan = j < nt;
      if (sin_act) {
        auto czc = detail::col<S>(blk.cz, j);
        czc = zc.cos();
        zc = zc.sin();
        if (tan) {
          detail::col<S>(blk.s_t, j) = zc;
          ts = czc * detail::col<S>(blk.tz, j);
        }
      } else if (tan) {
        ts = detail::col<S>(blk.tz, j);
      }
      if (!arch.layer_norm) {
        yc = zc;
        if (tan) detail::col<S>(ty, j) = ts;
        continue;
      }
      auto dc = detail::col<S>(blk.d, j);
      dc = zc - zc.sum() * inv_w;
      const S r = S(1) / std::sqrt(dc.square().sum() * inv_w + eps);
      blk.r(j) = r;
      yc = gain * (dc * r) + shift;
      if (tan) {
        auto tdc = detail::col<S>(blk.td, j);
        tdc = ts - ts.sum() * inv_w;
        const S c = (dc * tdc).sum() * inv_w;
        blk.c(j) = c;
        const S tr = -r * r * r * c;
        detail::col<S>(ty, j) = gain * (tdc * r + dc * tr);
      }
    }
    detail::check_block_finite(y, b);
    detail::check_block_finite(ty, b);
  }

  const auto hw = net.tensor(net.head_weight_slot());
  const S hb = net.tensor(net.head_bias_slot())(0, 0);
  tape.out.noalias() = hw * tape.y;
  tape.out.array() += hb;
  tape.tout.noalias() = hw * tape.ty;
  if (!tape.out.allFinite() || !tape.tout.allFinite()) {
    throw NumericError("non-finite network output in the head");
  }
}

template <class S>
DualBatch<S> dual_forward(const Mlp<S>& net, const typename Mlp<S>::Matrix& x,
                          const typename Mlp<S>::Matrix& tx) {
  DualBatch<S> tape;
  dual_forward(net, x, tx, tape);
  return tape;
}

/// Reverse pass for adjoints `g_out` (d L / d out) and `g_tout` (d L / d tout).
/// Accumulates into `param_grad` (if non-null, same layout as the parameters)
/// and writes d L / d x into `x_grad` (if non-null).
template <class S>
void dual_backward(const Mlp<S>& net, DualBatch<S>& tape,
                   const Eigen::Matrix<S, 1, Eigen::Dynamic>& g_out,
                   const Eigen::Matrix<S, 1, Eigen::Dynamic>& g_tout,
                   typename Mlp<S>::Vector* param_grad, typename Mlp<S>::Matrix* x_grad) {
  using Matrix = typename Mlp<S>::Matrix;
  using Array = Eigen::Array<S, Eigen::Dynamic, 1>;
  const MlpArch& arch = net.arch();
  const Eigen::Index np = tape.samples, nt = tape.tangents;
  const Eigen::Index w = static_cast<Eigen::Index>(arch.width);
  if (g_out.cols() != np || g_tout.cols() != nt) {
    throw ShapeError("adjoint sizes do not match the forward batch");
  }
  const bool sin_act = arch.activation == Activation::Sin;
  const S inv_w = S(1) / S(w);
  if (param_grad != nullptr && param_grad->size() != net.num_params()) {
    param_grad->setZero(net.num_params());
  }
  const auto grad_slot = [&](std::size_t i) {
    const TensorSlot& s = net.layout()[i];
    return Eigen::Map<Matrix>(param_grad->data() + s.offset, s.rows, s.cols);
  };

  const auto hw = net.tensor(net.head_weight_slot());
  if (param_grad != nullptr) {
    grad_slot(net.head_weight_slot()).noalias() += g_out * tape.y.transpose();
    grad_slot(net.head_weight_slot()).noalias() += g_tout * tape.ty.transpose();
    grad_slot(net.head_bias_slot())(0, 0) += g_out.sum();
  }
  Matrix& ybar = tape.ybar;
  Matrix& tybar = tape.tybar;
  Matrix& zbar = tape.zbar;
  Matrix& tzbar = tape.tzbar;
  ybar.noalias() = hw.transpose() * g_out;
  tybar.noalias() = hw.transpose() * g_tout;
  Array ggain(w), gshift(w), n(w), tn(w), dbar(w), tdbar(w), tsbar(w);

  for (std::size_t bb = arch.blocks; bb-- > 0;) {
    auto& blk = tape.blocks[bb];
    zbar.resize(w, np);
    tzbar.resize(w, nt);
    ggain.setZero();
    gshift.setZero();
    const auto gain = arch.layer_norm ? net.tensor(net.gain_slot(bb)).col(0).array()
                                      : net.tensor(net.bias_slot(bb)).col(0).array();

    for (Eigen::Index j = 0; j < np; ++j) {
      const bool tan = j < nt;
      auto yb = detail::col<S>(ybar, j);
      auto zb = detail::col<S>(zbar, j);
      if (arch.layer_norm) {
        const auto dc = detail::col<S>(blk.d, j);
        const S r = blk.r(j);
        n = dc * r;
        ggain += yb * n;
        gshift += yb;
        yb *= gain;  // nbar
        dbar = yb * r;
        S rbar = (yb * dc).sum();
        if (tan) {
          const auto tdc = detail::col<S>(blk.td, j);
          auto tyb = detail::col<S>(tybar, j);
          const S c = blk.c(j);
          const S tr = -r * r * r * c;
          tn = tdc * r + dc * tr;
          ggain += tyb * tn;
          tyb *= gain;  // tnbar
          dbar += tyb * tr;
          tdbar = tyb * r;
          rbar += (tyb * tdc).sum();
          const S trbar = (tyb * dc).sum();
          rbar += trbar * (S(-3) * r * r * c);
          const S cbar_w = -r * r * r * trbar * inv_w;
          dbar += tdc * cbar_w;
          tdbar += dc * cbar_w;
          tsbar = tdbar - tdbar.sum() * inv_w;
        }
        dbar += dc * (-r * r * r * rbar * inv_w);
        zb = dbar - dbar.sum() * inv_w;  // sbar
      } else {
        zb = yb;
        if (tan) tsbar = detail::col<S>(tybar, j);
      }
      if (sin_act) {
        const auto czc = detail::col<S>(blk.cz, j);
        zb *= czc;
        if (tan) {
          zb -= detail::col<S>(blk.s_t, j) * detail::col<S>(blk.tz, j) * tsbar;
          detail::col<S>(tzbar, j) = tsbar * czc;
        }
      } else if (tan) {
        detail::col<S>(tzbar, j) = tsbar;
      }
    }

    if (param_grad != nullptr) {
      if (arch.layer_norm) {
        grad_slot(net.gain_slot(bb)).col(0).array() += ggain;
        grad_slot(net.shift_slot(bb)).col(0).array() += gshift;
      }
      auto gW = grad_slot(net.weight_slot(bb));
      gW.noalias() += zbar * blk.x.transpose();
      gW.noalias() += tzbar * blk.tx.transpose();
      grad_slot(net.bias_slot(bb)).col(0) += zbar.rowwise().sum();
    }
    if (bb > 0 || x_grad != nullptr) {
      const auto W = net.tensor(net.weight_slot(bb));
      ybar.noalias() = W.transpose() * zbar;
      tybar.noalias() = W.transpose() * tzbar;
    }
  }
  if (x_grad != nullptr) *x_grad = ybar;
}

/// f(x) for a single input.
template <class S>
S forward(const Mlp<S>& net, std::span<const S> x) {
  using Matrix = typename Mlp<S>::Matrix;
  const Matrix xm = Eigen::Map<const Matrix>(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  return dual_forward(net, xm, Matrix(xm.rows(), 0)).out(0);
}

/// f at every column of x.
template <class S>
Eigen::Matrix<S, 1, Eigen::Dynamic> forward_batch(const Mlp<S>& net,
                                                 const typename Mlp<S>::Matrix& x) {
  using Matrix = typename Mlp<S>::Matrix;
  return dual_forward(net, x, Matrix(x.rows(), 0)).out;
}

/// grad_x f at every column of x (same shape as x).
template <class S>
typename Mlp<S>::Matrix input_gradient_batch(const Mlp<S>& net,
                                             const typename Mlp<S>::Matrix& x) {
  using Matrix = typename Mlp<S>::Matrix;
  using Row = Eigen::Matrix<S, 1, Eigen::Dynamic>;
  auto tape = dual_forward(net, x, Matrix(x.rows(), 0));
  Matrix g;
  dual_backward(net, tape, Row(Row::Ones(x.cols())), Row(0), nullptr, &g);
  return g;
}

template <class S>
std::vector<S> input_gradient(const Mlp<S>& net, std::span<const S> x) {
  using Matrix = typename Mlp<S>::Matrix;
  const Matrix xm = Eigen::Map<const Matrix>(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  const Matrix g = input_gradient_batch(net, xm);
  return std::vector<S>(g.data(), g.data() + g.size());
}

// ---------------------------------------------------------------------------
// PINN loss

struct LossConfig {
  LossKind kind = LossKind::SmoothL1;
  double temperature = kDefaultReweightTemperature;
  bool reweight = true;
  /// Adds loss(f(t, 0), 0) over the batch's t values (identity regularizer).
  bool regularize_zero_input = false;
  double zero_input_weight = 1.0;
  /// Use these (lambda1, lambda2) instead of the softmax weights.
  std::optional<LossWeights> fixed_weights;
};

/// Collocation batch: column j is (t_j, a_j). The boundary batch reuses a_j at
/// t = 0 and the regularizer batch uses (t_j, 0).
struct CollocationBatch {
  Eigen::MatrixXd points;
};

template <class S>
struct LossResult {
  double total = 0.0;
  double residual = 0.0;
  double boundary = 0.0;
  double regularizer = 0.0;
  LossWeights weights;
  typename Mlp<S>::Vector grad;
};

/// Assembled network inputs for a collocation batch.
template <class S>
struct PinnInputs {
  typename Mlp<S>::Matrix x;   // [interior | boundary | regularizer]
  typename Mlp<S>::Matrix tx;  // PDE directions for the interior columns
  Eigen::Matrix<S, 1, Eigen::Dynamic> boundary_target;
  Eigen::Index n = 0;
  bool with_regularizer = false;
};

template <class S>
PinnInputs<S> assemble_pinn_inputs(const CollocationBatch& batch, const PdeProblem& problem,
                                   bool with_regularizer) {
  const Eigen::Index n = batch.points.cols();
  const Eigen::Index dim = static_cast<Eigen::Index>(problem.dim) + 1;
  if (n == 0) throw std::invalid_argument("empty collocation batch");
  if (batch.points.rows() != dim) {
    throw ShapeError("collocation points have " + std::to_string(batch.points.rows()) +
                     " rows, problem needs " + std::to_string(dim));
  }
  PinnInputs<S> in;
  in.n = n;
  in.with_regularizer = with_regularizer;
  in.x.resize(dim, (with_regularizer ? 3 : 2) * n);
  in.tx.resize(dim, n);
  in.boundary_target.resize(n);
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t = batch.points(0, j);
    const std::span<const double> a(batch.points.col(j).data() + 1, problem.dim);
    problem.direction(t, a, v);
    for (Eigen::Index i = 0; i < dim; ++i) {
      in.x(i, j) = S(batch.points(i, j));
      in.x(i, n + j) = i == 0 ? S(0) : S(batch.points(i, j));
      in.tx(i, j) = S(v[static_cast<std::size_t>(i)]);
      if (with_regularizer) in.x(i, 2 * n + j) = i == 0 ? S(t) : S(0);
    }
    in.boundary_target(j) = S(problem.initial(a));
  }
  return in;
}

/// Reweighted PINN loss and its exact gradient with respect to every
/// parameter. The softmax weights are constants for differentiation.
/// `workspace`, when given, holds the pass buffers across calls.
template <class S>
LossResult<S> loss_and_weight_gradient(const Mlp<S>& net, const PinnInputs<S>& in,
                                       const LossConfig& cfg, DualBatch<S>* workspace = nullptr) {
  using Row = Eigen::Matrix<S, 1, Eigen::Dynamic>;
  const Eigen::Index n = in.n;
  DualBatch<S> local;
  DualBatch<S>& tape = workspace != nullptr ? *workspace : local;
  dual_forward(net, in.x, in.tx, tape);

  const Row res = tape.tout;
  const Row bdiff = tape.out.segment(n, n) - in.boundary_target;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(static_cast<double>(res(j))) || !std::isfinite(static_cast<double>(bdiff(j)))) {
      throw NumericError("non-finite loss at sample " + std::to_string(j));
    }
  }

  LossResult<S> out;
  out.residual = static_cast<double>(loss_value(cfg.kind, res));
  out.boundary = static_cast<double>(loss_value(cfg.kind, bdiff));
  if (cfg.fixed_weights) {
    out.weights = *cfg.fixed_weights;
  } else if (cfg.reweight) {
    out.weights = softmax_reweight(out.residual, out.boundary, cfg.temperature);
  } else {
    out.weights = {1.0, 1.0};
  }
  out.total = out.weights.residual * out.residual + out.weights.boundary * out.boundary;

  Row g_out = Row::Zero(tape.samples);
  const Row g_tout = (loss_gradient(cfg.kind, res) * S(out.weights.residual)).matrix().transpose();
  g_out.segment(n, n) = (loss_gradient(cfg.kind, bdiff) * S(out.weights.boundary)).matrix().transpose();
  if (in.with_regularizer && cfg.regularize_zero_input) {
    const Row reg = tape.out.segment(2 * n, n);
    out.regularizer = static_cast<double>(loss_value(cfg.kind, reg));
    out.total += cfg.zero_input_weight * out.regularizer;
    g_out.segment(2 * n, n) =
        (loss_gradient(cfg.kind, reg) * S(cfg.zero_input_weight)).matrix().transpose();
  }
  if (!std::isfinite(out.total)) throw NumericError("non-finite total loss");

  out.grad = Mlp<S>::Vector::Zero(net.num_params());
  dual_backward(net, tape, g_out, g_tout, &out.grad, nullptr);
  return out;
}

template <class S>
LossResult<S> loss_and_weight_gradient(const Mlp<S>& net, const CollocationBatch& batch,
                                       const PdeProblem& problem, const LossConfig& cfg) {
  return loss_and_weight_gradient(
      net, assemble_pinn_inputs<S>(batch, problem, cfg.regularize_zero_input), cfg);
}

}  // namespace cylfde
