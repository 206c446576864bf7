#pragma once

#include <map>
#include <memory>

#include "hoistream/loss.hpp"
#include "hoistream/schedule.hpp"

namespace hoistream {

// One canonicalized training window.
struct TrainItem {
    Eigen::MatrixXd h, o, c;      // W x width targets
    Eigen::MatrixXd ego;          // W x 54
    Eigen::VectorXd descriptor;   // class_count + 64 (zeros when motion-only)
    bool motion_only = false;
    std::shared_ptr<const ObjectTemplate> tpl;
};

struct TrainConfig {
    double lr = 1e-4;
    double weight_decay = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double ramp_mix = 0.5;
    int threads = 2;
};

struct AdamState {
    long step = 0;
    std::map<std::string, Eigen::MatrixXd> m, v;
};

struct StepResult {
    double loss = 0;
    LossBreakdown terms;  // batch means
};

// Samples a timestamp grid per item, forward-diffuses each modality, runs
// the denoiser, accumulates gradients in item order, and applies one
// decoupled-weight-decay adaptive-moment update. Per-item randomness is
// derived from `rng` up front, so results do not depend on thread count.
// Throws NonFiniteLoss (before touching parameters) on a non-finite loss.
StepResult train_step(DenoiserParams& params, const std::vector<TrainItem>& batch,
                      const Skeleton& skel, const NoiseSchedule& schedule,
                      const LossWeights& weights, const TrainConfig& cfg, Rng& rng,
                      AdamState& opt);

}  // namespace hoistream
