#pragma once

#include <string>

#include "hoistream/guidance.hpp"
#include "hoistream/loss.hpp"
#include "hoistream/schedule.hpp"
#include "hoistream/train.hpp"

namespace hoistream {

// Whole-run configuration, loadable from a single JSON file. The HOI_SEED
// environment variable overrides the seed.
struct RunConfig {
    std::string schedule_kind = "linear";
    int T = 100;
    int W = 60;
    double ramp_mix = 0.5;

    int d_model = 128;
    int n_heads = 4;
    int n_blocks = 4;
    int ff_mult = 4;

    LossWeights loss;
    GuidanceConfig guidance;
    int context_frames = 10;
    uint64_t seed = 1;
    double fps = 30;

    int batch = 16;
    int steps = 2000;
    double lr = 1e-4;
    double weight_decay = 1e-4;
    int threads = 2;

    bool no_guidance = false;
    bool no_contact_modality = false;
    bool no_canonicalization = false;
    bool no_aux_loss = false;

    int object_class_count = 33;
    int object_vertices = 256;

    void validate() const;
    // ablation flags folded in
    LossWeights effective_loss() const;
    GuidanceConfig effective_guidance() const;

    DenoiserConfig denoiser_config() const;
    TrainConfig train_config() const;
    NoiseSchedule noise_schedule() const;
};

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path_or_empty);  // defaults when empty

// FNV-1a 64 of the canonical JSON dump, as hex.
std::string config_hash(const RunConfig& cfg);

}  // namespace hoistream
