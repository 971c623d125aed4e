#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lndf/geometry.hpp"
#include "lndf/lipnet.hpp"

namespace lndf {

struct TrainConfig {
    int depth = 20;
    int width = 128;
    double margin = 1e-2;
    double lambda = 100.0;
    enum class Loss { Hkr, Fit } loss = Loss::Hkr;
    int epochs = 1000;
    int batch_per_class = 512; // fit mode uses 2x this per batch
    double lr = 1e-3;
    uint64_t seed = 0;
    int checkpoint_every = 0;        // epochs between checkpoints, 0 = off
    std::string checkpoint_prefix;   // files written as <prefix>_e<N>.lndf
};

struct EpochRecord {
    int epoch = 0;
    double kr = 0.0;
    double hinge = 0.0;
    double total = 0.0;
    double misclass = 0.0; // fraction of training samples with y*f < 0
    double wall_s = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
};

using EpochHook = std::function<void(const LipNet&, const EpochRecord&)>;

/// Shuffled mini-batch optimization of the hKR (or fitting) loss with Adam.
/// hKR batches draw equal counts per label. Deterministic given (dataset,
/// cfg); the returned net embeds the given normalization transform.
std::pair<LipNet, TrainLog> train(const LabeledDataset& ds, const NormalizeTransform& norm,
                                  const TrainConfig& cfg, const EpochHook& hook = {});

TrainConfig load_train_config_json(const std::string& path);
void write_train_log_csv(const std::string& path, const TrainLog& log);

} // namespace lndf
