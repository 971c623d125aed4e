#include "lndf/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lndf/losses.hpp"
#include "lndf/rng.hpp"

namespace lndf {

namespace {

std::string mode_name(FieldMode m) { return m == FieldMode::Signed ? "signed" : "unsigned"; }

[[noreturn]] void nan_abort(int epoch, int batch, const LipNet& net) {
    double wmax = 0.0;
    for (const auto& l : net.layers) wmax = std::max(wmax, l.W.cwiseAbs().maxCoeff());
    std::ostringstream msg;
    msg << "training diverged: non-finite loss at epoch " << epoch << ", batch " << batch
        << " (max |W| = " << wmax << ", head |w| = " << net.head.w.norm() << ")";
    throw std::runtime_error(msg.str());
}

} // namespace

std::pair<LipNet, TrainLog> train(const LabeledDataset& ds, const NormalizeTransform& norm,
                                  const TrainConfig& cfg, const EpochHook& hook) {
    if (ds.size() == 0) throw std::invalid_argument("train: empty dataset");
    if (cfg.epochs < 0 || cfg.batch_per_class < 1)
        throw std::invalid_argument("train: bad epochs/batch size");
    if (cfg.loss == TrainConfig::Loss::Fit && !ds.has_s_true())
        throw std::invalid_argument("train: fit loss requires ground-truth distances");

    std::vector<int> neg, pos;
    for (Eigen::Index i = 0; i < ds.size(); ++i)
        (ds.labels(i) < 0 ? neg : pos).push_back(static_cast<int>(i));
    const bool hkr = cfg.loss == TrainConfig::Loss::Hkr;
    if (hkr && neg.size() != pos.size())
        throw std::invalid_argument("train: hKR requires a label-balanced dataset");

    LipNet net = net_init(ds.dim, cfg.width, cfg.depth, cfg.seed);
    net.norm = norm;
    AdamState adam = AdamState::like(net, cfg.lr);
    HkrConfig hcfg{cfg.margin, cfg.lambda};
    Rng shuffle_rng(cfg.seed ^ 0x7f4a7c15ull);

    std::vector<int> all(ds.size());
    std::iota(all.begin(), all.end(), 0);

    TrainLog log;
    TapeCache tape;
    MatrixXd batch_pts;
    VectorXd batch_y, batch_s;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        double sum_kr = 0.0, sum_hinge = 0.0, sum_total = 0.0;
        int64_t samples = 0, wrong = 0;

        auto run_batch = [&](const std::vector<int>& idx, int batch_no) {
            const int b = static_cast<int>(idx.size());
            batch_pts.resize(ds.dim, b);
            batch_y.resize(b);
            if (ds.has_s_true()) batch_s.resize(b);
            for (int i = 0; i < b; ++i) {
                batch_pts.col(i) = ds.points.col(idx[i]);
                batch_y(i) = ds.labels(idx[i]);
                if (ds.has_s_true()) batch_s(i) = ds.s_true(idx[i]);
            }
            VectorXd f = net_forward_batch(net, batch_pts, tape);
            VectorXd dLdf;
            double kr = 0.0, hinge = 0.0, total = 0.0;
            if (hkr) {
                LossReport r = hkr_loss(f, batch_y, hcfg);
                kr = r.kr;
                hinge = r.hinge;
                total = r.total;
                dLdf = std::move(r.dLdf);
            } else {
                total = fit_loss(f, batch_s, &dLdf);
            }
            if (!std::isfinite(total)) nan_abort(epoch, batch_no, net);
            ParamGrads g = net_backward_params(net, tape, dLdf);
            adam_step(adam, net, g);
            net.refresh();

            sum_kr += kr * b;
            sum_hinge += hinge * b;
            sum_total += total * b;
            samples += b;
            for (int i = 0; i < b; ++i)
                if (batch_y(i) * f(i) < 0.0) ++wrong;
        };

        if (hkr) {
            shuffle_rng.shuffle(neg);
            shuffle_rng.shuffle(pos);
            const int n = static_cast<int>(neg.size());
            const int b = cfg.batch_per_class;
            int batch_no = 0;
            for (int lo = 0; lo < n; lo += b, ++batch_no) {
                int hi = std::min(n, lo + b);
                std::vector<int> idx;
                idx.reserve(2 * (hi - lo));
                for (int i = lo; i < hi; ++i) idx.push_back(neg[i]);
                for (int i = lo; i < hi; ++i) idx.push_back(pos[i]);
                run_batch(idx, batch_no);
            }
        } else {
            shuffle_rng.shuffle(all);
            const int n = static_cast<int>(all.size());
            const int b = 2 * cfg.batch_per_class;
            int batch_no = 0;
            for (int lo = 0; lo < n; lo += b, ++batch_no) {
                int hi = std::min(n, lo + b);
                run_batch(std::vector<int>(all.begin() + lo, all.begin() + hi), batch_no);
            }
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.kr = sum_kr / samples;
        rec.hinge = sum_hinge / samples;
        rec.total = sum_total / samples;
        rec.misclass = static_cast<double>(wrong) / static_cast<double>(samples);
        rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        log.epochs.push_back(rec);

        if (cfg.checkpoint_every > 0 && !cfg.checkpoint_prefix.empty() &&
            (epoch + 1) % cfg.checkpoint_every == 0) {
            ModelMeta meta{mode_name(ds.mode), cfg.margin, cfg.lambda};
            save_lndf(cfg.checkpoint_prefix + "_e" + std::to_string(epoch + 1) + ".lndf", net,
                      meta);
        }
        if (hook) hook(net, rec);
    }
    return {std::move(net), std::move(log)};
}

TrainConfig load_train_config_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    TrainConfig cfg;
    for (const auto& [key, val] : j.items()) {
        if (key == "depth") cfg.depth = val.get<int>();
        else if (key == "k") cfg.width = val.get<int>();
        else if (key == "margin") cfg.margin = val.get<double>();
        else if (key == "lambda") cfg.lambda = val.get<double>();
        else if (key == "loss") {
            auto s = val.get<std::string>();
            if (s == "hkr") cfg.loss = TrainConfig::Loss::Hkr;
            else if (s == "fit") cfg.loss = TrainConfig::Loss::Fit;
            else throw std::runtime_error(path + ": loss must be 'hkr' or 'fit'");
        }
        else if (key == "epochs") cfg.epochs = val.get<int>();
        else if (key == "batch_per_class") cfg.batch_per_class = val.get<int>();
        else if (key == "lr") cfg.lr = val.get<double>();
        else if (key == "seed") cfg.seed = val.get<uint64_t>();
        else if (key == "checkpoint_every") cfg.checkpoint_every = val.get<int>();
        else if (key == "checkpoint_prefix") cfg.checkpoint_prefix = val.get<std::string>();
        else throw std::runtime_error(path + ": unknown config key '" + key + "'");
    }
    return cfg;
}

void write_train_log_csv(const std::string& path, const TrainLog& log) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "epoch,kr,hinge,total,misclass,wall_s\n";
    char buf[160];
    for (const auto& r : log.epochs) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.3f\n", r.epoch, r.kr, r.hinge,
                      r.total, r.misclass, r.wall_s);
        out << buf;
    }
}

} // namespace lndf
