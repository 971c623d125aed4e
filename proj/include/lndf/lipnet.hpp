#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lndf/transform.hpp"

namespace lndf {

using Eigen::ArrayXXd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Residual layer x - 2 W T^-1 sigma(W^T x + b) with
/// T_ii = sum_j |(W^T W)_ij exp(q_j - q_i)|. 1-Lipschitz for any finite
/// parameter values. Channels with T_ii = 0 contribute nothing to the
/// residual term, which makes W = 0 the exact identity.
struct SllLayer {
    MatrixXd W; // k x k
    VectorXd b; // k
    VectorXd q; // k
};

/// Parameter-dependent quantities shared by forward and backward passes.
/// exp_q uses shifted logits (q - max q) so the factored form
/// t = exp_nq .* (|G| * exp_q) cannot overflow for sane parameter spreads.
struct SllDerived {
    MatrixXd G;     // W^T W
    VectorXd t;     // T diagonal
    VectorXd inv_t; // 1/t, or 0 where t = 0
    VectorXd exp_q; // exp(q - max q)
    VectorXd exp_nq;
};

SllDerived sll_derive(const SllLayer& layer);

/// Single-vector forward evaluation of one layer (derives T internally).
VectorXd sll_forward(const SllLayer& layer, const VectorXd& x);

/// Intermediates of a batched layer forward, consumed by sll_backward.
/// Valid only for the exact batch and parameter values it was built from.
struct SllCache {
    MatrixXd X;    // layer input, k x B
    ArrayXXd mask; // 1 where pre-activation > 0
    MatrixXd U;    // T^-1 sigma(W^T X + b)
};

/// Batched layer forward; columns are samples.
MatrixXd sll_forward_batch(const SllLayer& layer, const SllDerived& der,
                           const MatrixXd& X, SllCache* cache = nullptr);

struct SllGrads {
    MatrixXd dW;
    VectorXd db;
    VectorXd dq;
};

/// Exact analytic backward through one layer, including the dependence of
/// T on W and q (subgradient 0 at |.| kinks and at ReLU kinks).
/// dY holds dL/d(output) per column; returns dL/d(input) and accumulates
/// parameter gradients summed over the batch.
MatrixXd sll_backward(const SllLayer& layer, const SllDerived& der,
                      const SllCache& cache, const MatrixXd& dY, SllGrads& grads);

/// Affine head x -> w^T x / |w| + b; exactly 1-Lipschitz.
struct AffineHead {
    VectorXd w;
    double b = 0.0;
};

double head_forward(const AffineHead& head, const VectorXd& x);

/// The 1-Lipschitz network: normalization, zero-pad to width k, a stack of
/// SLL layers, and the unit-norm affine head. Immutable during evaluation;
/// call refresh() after mutating parameters.
struct LipNet {
    int input_dim = 3;
    int width = 0;
    std::vector<SllLayer> layers;
    AffineHead head;
    NormalizeTransform norm;

    // refreshed evaluation caches
    std::vector<SllDerived> derived;
    VectorXd head_unit; // w / |w|
    double head_wnorm = 0.0;

    void refresh();
    int depth() const { return static_cast<int>(layers.size()); }

    /// Value at a point in the normalized frame (the training domain D).
    double value(const Vec3& p) const;
    /// Exact input-space gradient in the normalized frame; norm <= 1.
    Vec3 gradient(const Vec3& p) const;
    /// Gradient plus the value from the same forward pass.
    Vec3 value_and_gradient(const Vec3& p, double& val) const;
    /// Value at raw coordinates: applies the stored transform first.
    double value_raw(const Vec3& x) const { return value(norm.apply(x)); }
    /// Gradient w.r.t. raw coordinates (chain rule through the transform).
    Vec3 gradient_raw(const Vec3& x) const { return gradient(norm.apply(x)) * norm.scale; }

    /// Batched value evaluation; bit-identical to per-point value() calls
    /// by construction (it loops them), parallel over points.
    VectorXd value_batch(const MatrixXd& pts) const; // dim x B, normalized frame
    MatrixXd gradient_batch(const MatrixXd& pts) const;
};

/// Forward/backward tape for one training batch.
struct TapeCache {
    std::vector<SllCache> layers;
    MatrixXd head_in; // k x B
    int batch = 0;
};

struct ParamGrads {
    std::vector<SllGrads> layers;
    VectorXd head_dw;
    double head_db = 0.0;
};

/// Batched training forward (GEMM path). pts is dim x B in the normalized
/// frame; pads to width and fills the tape.
VectorXd net_forward_batch(const LipNet& net, const MatrixXd& pts, TapeCache& tape);

/// Backprop of per-sample dL/df through head and all layers; exact analytic
/// parameter gradients summed over the batch.
ParamGrads net_backward_params(const LipNet& net, const TapeCache& tape,
                               const VectorXd& dLdf);

/// W ~ U[-sqrt(1/k), sqrt(1/k)], b = q = 0, head w ~ N(0,1), head b = 0.
/// Deterministic given seed; draw order is layer-major, W row-major.
LipNet net_init(int input_dim, int k, int depth, uint64_t seed);

struct AdamState {
    double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    int64_t t = 0;
    std::vector<SllGrads> m, v; // moment accumulators reuse the grad layout
    VectorXd m_head_w, v_head_w;
    double m_head_b = 0.0, v_head_b = 0.0;

    static AdamState like(const LipNet& net, double lr);
};

/// Standard bias-corrected Adam update, in place. Caller refreshes the net.
void adam_step(AdamState& state, LipNet& net, const ParamGrads& grads);

/// Training metadata carried in the weight file.
struct ModelMeta {
    std::string mode = "signed"; // "signed" | "unsigned"
    double margin = 1e-2;
    double lambda = 100.0;
};

/// LNDF1 container: "LNDF", u32 version, u64 JSON length, JSON metadata,
/// then little-endian f64 payload (per layer W row-major, b, q; head w, b).
void save_lndf(const std::string& path, const LipNet& net, const ModelMeta& meta);
std::pair<LipNet, ModelMeta> load_lndf(const std::string& path);

} // namespace lndf
