#pragma once

#include <Eigen/Dense>

namespace lndf {

using Eigen::VectorXd;

/// hKR hyperparameters: hinge margin m and hinge weight lambda.
struct HkrConfig {
    double margin = 1e-2;
    double lambda = 100.0;
};

struct LossReport {
    double kr = 0.0;
    double hinge = 0.0;
    double total = 0.0;  // kr + lambda * hinge
    VectorXd dLdf;       // per-sample derivative of total
};

/// Kantorovitch-Rubinstein term: mean of -y_i f_i. Labels must be in {-1,+1}.
double kr_loss(const VectorXd& f, const VectorXd& y, VectorXd* dLdf = nullptr);

/// Hinge term with margin m: mean of max(0, m - y_i f_i); subgradient 0 at
/// the kink.
double hinge_loss(const VectorXd& f, const VectorXd& y, double margin,
                  VectorXd* dLdf = nullptr);

LossReport hkr_loss(const VectorXd& f, const VectorXd& y, const HkrConfig& cfg);

/// Supervised least-squares fitting loss: mean of (f_i - s_i)^2.
double fit_loss(const VectorXd& f, const VectorXd& s_true, VectorXd* dLdf = nullptr);

} // namespace lndf
