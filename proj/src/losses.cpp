#include "lndf/losses.hpp"

#include <stdexcept>

namespace lndf {

namespace {

void check_batch(const VectorXd& f, const VectorXd& y) {
    if (f.size() == 0) throw std::invalid_argument("loss: empty batch");
    if (f.size() != y.size()) throw std::invalid_argument("loss: |f| != |y|");
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y(i) != 1.0 && y(i) != -1.0)
            throw std::invalid_argument("loss: label outside {-1,+1}");
}

} // namespace

double kr_loss(const VectorXd& f, const VectorXd& y, VectorXd* dLdf) {
    check_batch(f, y);
    const double n = static_cast<double>(f.size());
    if (dLdf) *dLdf = -y / n;
    return -y.cwiseProduct(f).sum() / n;
}

double hinge_loss(const VectorXd& f, const VectorXd& y, double margin, VectorXd* dLdf) {
    check_batch(f, y);
    if (!(margin > 0.0)) throw std::invalid_argument("hinge_loss: margin must be > 0");
    const double n = static_cast<double>(f.size());
    VectorXd viol = (margin - y.cwiseProduct(f).array()).matrix();
    if (dLdf) *dLdf = (viol.array() > 0.0).select(-y / n, VectorXd::Zero(y.size()));
    return viol.cwiseMax(0.0).sum() / n;
}

LossReport hkr_loss(const VectorXd& f, const VectorXd& y, const HkrConfig& cfg) {
    if (!(cfg.margin > 0.0) || !(cfg.lambda > 0.0))
        throw std::invalid_argument("hkr_loss: margin and lambda must be > 0");
    LossReport r;
    VectorXd d_kr, d_hinge;
    r.kr = kr_loss(f, y, &d_kr);
    r.hinge = hinge_loss(f, y, cfg.margin, &d_hinge);
    r.total = r.kr + cfg.lambda * r.hinge;
    r.dLdf = d_kr + cfg.lambda * d_hinge;
    return r;
}

double fit_loss(const VectorXd& f, const VectorXd& s_true, VectorXd* dLdf) {
    if (f.size() == 0) throw std::invalid_argument("fit_loss: empty batch");
    if (f.size() != s_true.size()) throw std::invalid_argument("fit_loss: size mismatch");
    const double n = static_cast<double>(f.size());
    VectorXd diff = f - s_true;
    if (dLdf) *dLdf = 2.0 * diff / n;
    return diff.squaredNorm() / n;
}

} // namespace lndf
