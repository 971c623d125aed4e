#include "lndf/lipnet.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "lndf/parallel.hpp"
#include "lndf/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "LNDF1 payload is little-endian; big-endian hosts are unsupported");

namespace lndf {

SllDerived sll_derive(const SllLayer& layer) {
    SllDerived d;
    d.G.noalias() = layer.W.transpose() * layer.W;
    VectorXd qs = layer.q.array() - layer.q.maxCoeff();
    d.exp_q = qs.array().exp();
    d.exp_nq = (-qs.array()).exp();
    d.t = d.exp_nq.cwiseProduct(d.G.cwiseAbs() * d.exp_q);
    d.inv_t = (d.t.array() > 0.0).select(d.t.cwiseInverse(), VectorXd::Zero(d.t.size()));
    return d;
}

VectorXd sll_forward(const SllLayer& layer, const VectorXd& x) {
    const auto k = layer.W.rows();
    if (layer.W.cols() != k || layer.b.size() != k || layer.q.size() != k)
        throw std::invalid_argument("sll_forward: inconsistent layer shapes");
    if (x.size() != k) throw std::invalid_argument("sll_forward: input size does not match layer width");
    if (!layer.W.allFinite() || !layer.b.allFinite() || !layer.q.allFinite())
        throw std::invalid_argument("sll_forward: non-finite layer parameter");
    if (!x.allFinite()) throw std::invalid_argument("sll_forward: non-finite input");
    SllDerived d = sll_derive(layer);
    VectorXd a = (layer.W.transpose() * x + layer.b).cwiseMax(0.0);
    return x - 2.0 * (layer.W * a.cwiseProduct(d.inv_t));
}

MatrixXd sll_forward_batch(const SllLayer& layer, const SllDerived& der,
                           const MatrixXd& X, SllCache* cache) {
    MatrixXd Z = layer.W.transpose() * X;
    Z.colwise() += layer.b;
    ArrayXXd mask = (Z.array() > 0.0).cast<double>();
    MatrixXd U = (Z.array().max(0.0).colwise() * der.inv_t.array()).matrix();
    MatrixXd Y = X - 2.0 * (layer.W * U);
    if (cache) {
        cache->X = X;
        cache->mask = std::move(mask);
        cache->U = std::move(U);
        return Y;
    }
    return Y;
}

MatrixXd sll_backward(const SllLayer& layer, const SllDerived& der,
                      const SllCache& cache, const MatrixXd& dY, SllGrads& grads) {
    const auto k = layer.W.rows();
    if (cache.X.rows() != k || cache.U.rows() != k || cache.mask.rows() != k ||
        cache.X.cols() != dY.cols() || cache.U.cols() != dY.cols())
        throw std::logic_error("sll_backward: cache does not match layer/batch");

    MatrixXd dU = -2.0 * (layer.W.transpose() * dY);

    // t path: dL/dt_i = -inv_t_i * sum_b dU(i,b) U(i,b)
    VectorXd dt = -der.inv_t.cwiseProduct((dU.array() * cache.U.array()).rowwise().sum().matrix());

    MatrixXd dZ = ((dU.array().colwise() * der.inv_t.array()) * cache.mask).matrix();

    grads.db = dZ.rowwise().sum();

    // dG_ij = dt_i sign(G_ij) exp(q_j - q_i), factored through shifted logits
    VectorXd r = dt.cwiseProduct(der.exp_nq);
    MatrixXd dG = (r * der.exp_q.transpose()).cwiseProduct(der.G.array().sign().matrix());

    grads.dW.noalias() = -2.0 * (dY * cache.U.transpose());
    grads.dW.noalias() += cache.X * dZ.transpose();
    grads.dW.noalias() += layer.W * (dG + dG.transpose());

    grads.dq = der.exp_q.cwiseProduct(der.G.cwiseAbs().transpose() * r) - dt.cwiseProduct(der.t);

    MatrixXd dX = dY;
    dX.noalias() += layer.W * dZ;
    return dX;
}

double head_forward(const AffineHead& head, const VectorXd& x) {
    double n = head.w.norm();
    if (!(n > 0.0)) throw std::invalid_argument("head_forward: zero weight vector");
    if (x.size() != head.w.size()) throw std::invalid_argument("head_forward: size mismatch");
    return head.w.dot(x) / n + head.b;
}

void LipNet::refresh() {
    if (input_dim != 2 && input_dim != 3)
        throw std::invalid_argument("LipNet: input_dim must be 2 or 3");
    if (width < input_dim) throw std::invalid_argument("LipNet: width smaller than input_dim");
    head_wnorm = head.w.norm();
    if (!(head_wnorm > 0.0)) throw std::invalid_argument("LipNet: zero head weights");
    if (!head.w.allFinite()) throw std::invalid_argument("LipNet: non-finite head weights");
    head_unit = head.w / head_wnorm;
    derived.clear();
    derived.reserve(layers.size());
    for (const auto& l : layers) {
        if (l.W.rows() != width || l.W.cols() != width || l.b.size() != width || l.q.size() != width)
            throw std::invalid_argument("LipNet: layer shape does not match width");
        if (!l.W.allFinite() || !l.b.allFinite() || !l.q.allFinite())
            throw std::invalid_argument("LipNet: non-finite layer parameter");
        derived.push_back(sll_derive(l));
    }
}

namespace {

struct EvalScratch {
    VectorXd x, z, u;
    MatrixXd masks; // one column per layer, gradient path only
};

EvalScratch& scratch() {
    thread_local EvalScratch s;
    return s;
}

} // namespace

double LipNet::value(const Vec3& p) const {
    auto& s = scratch();
    s.x.setZero(width);
    s.x.head(input_dim) = p.head(input_dim);
    for (size_t l = 0; l < layers.size(); ++l) {
        const auto& L = layers[l];
        const auto& d = derived[l];
        s.z.noalias() = L.W.transpose() * s.x;
        s.z += L.b;
        s.u = s.z.cwiseMax(0.0).cwiseProduct(d.inv_t);
        s.x.noalias() -= 2.0 * (L.W * s.u);
    }
    return head_unit.dot(s.x) + head.b;
}

Vec3 LipNet::gradient(const Vec3& p) const {
    double unused;
    return value_and_gradient(p, unused);
}

Vec3 LipNet::value_and_gradient(const Vec3& p, double& val) const {
    auto& s = scratch();
    const int depth = static_cast<int>(layers.size());
    s.x.setZero(width);
    s.x.head(input_dim) = p.head(input_dim);
    s.masks.resize(width, depth);
    for (int l = 0; l < depth; ++l) {
        const auto& L = layers[l];
        const auto& d = derived[l];
        s.z.noalias() = L.W.transpose() * s.x;
        s.z += L.b;
        s.masks.col(l) = (s.z.array() > 0.0).cast<double>();
        s.u = s.z.cwiseMax(0.0).cwiseProduct(d.inv_t);
        s.x.noalias() -= 2.0 * (L.W * s.u);
    }
    val = head_unit.dot(s.x) + head.b;

    // input-space backward: T does not depend on x, so only the mask path
    s.x = head_unit; // reuse as running dL/d(layer output)
    for (int l = depth - 1; l >= 0; --l) {
        const auto& L = layers[l];
        const auto& d = derived[l];
        s.z.noalias() = -2.0 * (L.W.transpose() * s.x);
        s.u = s.z.cwiseProduct(d.inv_t).cwiseProduct(s.masks.col(l));
        s.x.noalias() += L.W * s.u;
    }
    Vec3 g = Vec3::Zero();
    g.head(input_dim) = s.x.head(input_dim);
    return g;
}

VectorXd LipNet::value_batch(const MatrixXd& pts) const {
    VectorXd out(pts.cols());
    parallel_for(static_cast<size_t>(pts.cols()), [&](size_t i) {
        Vec3 p = Vec3::Zero();
        p.head(input_dim) = pts.col(static_cast<Eigen::Index>(i)).head(input_dim);
        out(static_cast<Eigen::Index>(i)) = value(p);
    });
    return out;
}

MatrixXd LipNet::gradient_batch(const MatrixXd& pts) const {
    MatrixXd out(input_dim, pts.cols());
    parallel_for(static_cast<size_t>(pts.cols()), [&](size_t i) {
        Vec3 p = Vec3::Zero();
        p.head(input_dim) = pts.col(static_cast<Eigen::Index>(i)).head(input_dim);
        out.col(static_cast<Eigen::Index>(i)) = gradient(p).head(input_dim);
    });
    return out;
}

VectorXd net_forward_batch(const LipNet& net, const MatrixXd& pts, TapeCache& tape) {
    const int depth = net.depth();
    tape.layers.resize(depth);
    tape.batch = static_cast<int>(pts.cols());
    MatrixXd X = MatrixXd::Zero(net.width, pts.cols());
    X.topRows(net.input_dim) = pts.topRows(net.input_dim);
    for (int l = 0; l < depth; ++l)
        X = sll_forward_batch(net.layers[l], net.derived[l], X, &tape.layers[l]);
    tape.head_in = std::move(X);
    return (tape.head_in.transpose() * net.head_unit).array() + net.head.b;
}

ParamGrads net_backward_params(const LipNet& net, const TapeCache& tape,
                               const VectorXd& dLdf) {
    if (dLdf.size() != tape.batch)
        throw std::logic_error("net_backward_params: dLdf size does not match tape batch");
    const int depth = net.depth();
    ParamGrads g;
    g.layers.resize(depth);

    VectorXd s = tape.head_in * dLdf;
    g.head_dw = (s - net.head_unit * net.head_unit.dot(s)) / net.head_wnorm;
    g.head_db = dLdf.sum();

    MatrixXd G_up = net.head_unit * dLdf.transpose();
    for (int l = depth - 1; l >= 0; --l)
        G_up = sll_backward(net.layers[l], net.derived[l], tape.layers[l], G_up, g.layers[l]);
    return g;
}

LipNet net_init(int input_dim, int k, int depth, uint64_t seed) {
    if (input_dim != 2 && input_dim != 3)
        throw std::invalid_argument("net_init: input_dim must be 2 or 3");
    if (k < input_dim) throw std::invalid_argument("net_init: k must be >= input_dim");
    if (depth < 0) throw std::invalid_argument("net_init: negative depth");
    Rng rng(seed);
    LipNet net;
    net.input_dim = input_dim;
    net.width = k;
    net.layers.resize(depth);
    const double s = std::sqrt(1.0 / k);
    for (auto& layer : net.layers) {
        layer.W.resize(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) layer.W(i, j) = rng.uniform(-s, s);
        layer.b = VectorXd::Zero(k);
        layer.q = VectorXd::Zero(k);
    }
    net.head.w.resize(k);
    for (int i = 0; i < k; ++i) net.head.w(i) = rng.normal();
    net.head.b = 0.0;
    net.refresh();
    return net;
}

AdamState AdamState::like(const LipNet& net, double lr_) {
    AdamState st;
    st.lr = lr_;
    st.m.resize(net.depth());
    st.v.resize(net.depth());
    for (int l = 0; l < net.depth(); ++l) {
        for (auto* g : {&st.m[l], &st.v[l]}) {
            g->dW = MatrixXd::Zero(net.width, net.width);
            g->db = VectorXd::Zero(net.width);
            g->dq = VectorXd::Zero(net.width);
        }
    }
    st.m_head_w = VectorXd::Zero(net.width);
    st.v_head_w = VectorXd::Zero(net.width);
    return st;
}

namespace {

template <typename P, typename G>
void adam_update(const AdamState& st, double bc1, double bc2, P&& param, const G& grad,
                 P&& m, P&& v) {
    if (param.rows() != grad.rows() || param.cols() != grad.cols())
        throw std::invalid_argument("adam_step: gradient shape mismatch");
    m = st.beta1 * m + (1.0 - st.beta1) * grad;
    v = (st.beta2 * v.array() + (1.0 - st.beta2) * grad.array().square()).matrix();
    param.array() -= st.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + st.eps);
}

} // namespace

void adam_step(AdamState& st, LipNet& net, const ParamGrads& grads) {
    if (static_cast<int>(grads.layers.size()) != net.depth())
        throw std::invalid_argument("adam_step: layer count mismatch");
    st.t += 1;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
    for (int l = 0; l < net.depth(); ++l) {
        adam_update(st, bc1, bc2, net.layers[l].W, grads.layers[l].dW, st.m[l].dW, st.v[l].dW);
        adam_update(st, bc1, bc2, net.layers[l].b, grads.layers[l].db, st.m[l].db, st.v[l].db);
        adam_update(st, bc1, bc2, net.layers[l].q, grads.layers[l].dq, st.m[l].dq, st.v[l].dq);
    }
    adam_update(st, bc1, bc2, net.head.w, grads.head_dw, st.m_head_w, st.v_head_w);
    st.m_head_b = st.beta1 * st.m_head_b + (1.0 - st.beta1) * grads.head_db;
    st.v_head_b = st.beta2 * st.v_head_b + (1.0 - st.beta2) * grads.head_db * grads.head_db;
    net.head.b -= st.lr * (st.m_head_b / bc1) / (std::sqrt(st.v_head_b / bc2) + st.eps);
}

// ---------------------------------------------------------------------------
// LNDF1 weight file

namespace {

constexpr char kMagic[4] = {'L', 'N', 'D', 'F'};
constexpr uint32_t kVersion = 1;

void put_doubles(std::vector<double>& out, const MatrixXd& m, bool row_major) {
    if (row_major) {
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    } else {
        out.insert(out.end(), m.data(), m.data() + m.size());
    }
}

} // namespace

void save_lndf(const std::string& path, const LipNet& net, const ModelMeta& meta) {
    nlohmann::json j;
    j["input_dim"] = net.input_dim;
    j["k"] = net.width;
    j["depth"] = net.depth();
    j["mode"] = meta.mode;
    j["margin"] = meta.margin;
    j["lambda"] = meta.lambda;
    std::vector<double> center(net.norm.center.data(), net.norm.center.data() + net.input_dim);
    j["norm"] = {{"center", center}, {"scale", net.norm.scale}};
    const std::string js = j.dump();

    std::vector<double> payload;
    payload.reserve(static_cast<size_t>(net.depth()) * (net.width * net.width + 2 * net.width) +
                    net.width + 1);
    for (const auto& l : net.layers) {
        put_doubles(payload, l.W, true);
        put_doubles(payload, l.b, false);
        put_doubles(payload, l.q, false);
    }
    put_doubles(payload, net.head.w, false);
    payload.push_back(net.head.b);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, 4);
    uint32_t ver = kVersion;
    uint64_t len = js.size();
    out.write(reinterpret_cast<const char*>(&ver), sizeof ver);
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(js.data(), static_cast<std::streamsize>(js.size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<LipNet, ModelMeta> load_lndf(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    uint32_t ver = 0;
    uint64_t len = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&ver), sizeof ver);
    in.read(reinterpret_cast<char*>(&len), sizeof len);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error(path + ": not an LNDF file (bad magic)");
    if (ver != kVersion)
        throw std::runtime_error(path + ": unsupported LNDF version " + std::to_string(ver));
    std::string js(len, '\0');
    in.read(js.data(), static_cast<std::streamsize>(len));
    if (!in) throw std::runtime_error(path + ": truncated metadata");

    nlohmann::json j = nlohmann::json::parse(js);
    LipNet net;
    ModelMeta meta;
    net.input_dim = j.at("input_dim").get<int>();
    net.width = j.at("k").get<int>();
    const int depth = j.at("depth").get<int>();
    meta.mode = j.at("mode").get<std::string>();
    meta.margin = j.at("margin").get<double>();
    meta.lambda = j.at("lambda").get<double>();
    if (meta.mode != "signed" && meta.mode != "unsigned")
        throw std::runtime_error(path + ": bad mode '" + meta.mode + "'");
    auto center = j.at("norm").at("center").get<std::vector<double>>();
    if (static_cast<int>(center.size()) != net.input_dim)
        throw std::runtime_error(path + ": norm center length does not match input_dim");
    net.norm.center = Vec3::Zero();
    for (size_t i = 0; i < center.size(); ++i) net.norm.center[static_cast<int>(i)] = center[i];
    net.norm.scale = j.at("norm").at("scale").get<double>();
    if (net.width < 1 || depth < 0 || net.width < net.input_dim)
        throw std::runtime_error(path + ": inconsistent metadata dimensions");

    const int k = net.width;
    const size_t expected = static_cast<size_t>(depth) * (static_cast<size_t>(k) * k + 2 * k) + k + 1;
    std::vector<double> payload(expected);
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(expected * sizeof(double)));
    if (static_cast<size_t>(in.gcount()) != expected * sizeof(double))
        throw std::runtime_error(path + ": payload shorter than metadata promises");
    if (in.peek() != std::ifstream::traits_type::eof())
        throw std::runtime_error(path + ": trailing bytes after payload");

    size_t off = 0;
    net.layers.resize(depth);
    for (auto& l : net.layers) {
        l.W.resize(k, k);
        for (int i = 0; i < k; ++i)
            for (int jj = 0; jj < k; ++jj) l.W(i, jj) = payload[off++];
        l.b = Eigen::Map<VectorXd>(payload.data() + off, k);
        off += k;
        l.q = Eigen::Map<VectorXd>(payload.data() + off, k);
        off += k;
    }
    net.head.w = Eigen::Map<VectorXd>(payload.data() + off, k);
    off += k;
    net.head.b = payload[off++];
    net.refresh();
    return {std::move(net), meta};
}

} // namespace lndf
