#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "hoistream/guidance.hpp"
#include "hoistream/model.hpp"
#include "hoistream/seq.hpp"

namespace hoistream {

// Streaming inference: a ring of W in-flight frames whose diffusion
// timestamps ramp from clean at the head to pure noise at the tail. Every
// tick denoises the window once, moves each slot one rung down the ramp,
// emits the frame that reached zero, and re-anchors the head-centric
// coordinates on the emitted head pose. The first K slots hold fully
// denoised frames kept as context.

struct ObservedFrame {
    std::optional<HumanFrame> human;
    std::optional<ObjectFrame> object;
    std::optional<ContactVector> contact;
};

struct ConveyorConfig {
    int W = 60;
    int K = 10;  // context frames, < W
    NoiseSchedule schedule;
    GuidanceConfig guidance;
    bool has_object = true;
    bool canonicalize = true;  // false runs in world coordinates
    std::shared_ptr<const ObjectTemplate> tpl;  // required when has_object
    Eigen::VectorXd descriptor;                 // class_count + 64; zeros when motion-only
    uint64_t seed = 0;
};

// What the denoiser sees each tick.
struct ConveyorWindow {
    Eigen::MatrixXd h, o, c;  // m x width, canonical
    std::vector<int> t_h, t_o, t_c;
    Eigen::MatrixXd ego;  // m x 54, canonical
    std::vector<int> positions;
    std::vector<long> frame_index;  // -1 for warmup placeholders
    Eigen::VectorXd descriptor;
    Anchor anchor;
};

struct DenoisePrediction {
    Eigen::MatrixXd h0, o0, c0;
};

using DenoiseFn = std::function<DenoisePrediction(const ConveyorWindow&)>;

// Denoiser backed by trained parameters.
DenoiseFn model_denoise_fn(std::shared_ptr<const DenoiserParams> params);

struct EmittedFrame {
    long index = 0;
    HumanFrame human;
    std::optional<ObjectFrame> object;
    std::optional<ContactVector> contact;
};

struct ConveyorSlot {
    long frame_index = -1;  // -1: warmup placeholder
    bool emitted = false;
    Eigen::RowVectorXd h, o, c;  // canonical noisy rows
    EgoFrame ego_world;          // world-frame conditioning (re-anchor source)
    bool has_ego = false;
    ObservedFrame observed_world;  // world-frame observations, emitted verbatim
    bool obs_h = false, obs_o = false, obs_c = false;
};

struct ConveyorState {
    ConveyorConfig cfg;
    const Skeleton* skel = nullptr;
    Anchor anchor;
    std::deque<ConveyorSlot> slots;
    std::vector<int> ladder;  // slot position -> timestamp
    bool tail_claimed = false;
    long pushed = 0;
    long emitted_count = 0;
    Rng rng;

    int timestamp(int position, bool observed) const {
        return observed ? 0 : ladder[position];
    }
};

// All W slots filled with pure noise on the ramp (context region at 0).
ConveyorState conveyor_init(const Se3& anchor_head_pose, const ConveyorConfig& cfg,
                            const Skeleton& skel);

// Claim the tail slot for the next frame: world-frame ego conditioning and
// optional world-frame observations (observed modalities run at timestamp 0
// and pass through to the output verbatim). Throws BufferNotReady when no
// tick has freed the tail since the last push.
void conveyor_push(ConveyorState& state, const EgoFrame& ego_world,
                   const std::optional<ObservedFrame>& observed = std::nullopt);

// One denoise/jump cycle; returns the newly completed frame, if any.
std::optional<EmittedFrame> conveyor_tick(ConveyorState& state, const DenoiseFn& denoise);

// Canonical window currently seen by the denoiser (e.g. for inspection).
ConveyorWindow conveyor_window(const ConveyorState& state);

struct OfflineStream {
    std::vector<EgoFrame> ego_world;  // N world-frame conditioning frames
    std::vector<std::optional<ObservedFrame>> observed;  // empty or size N
    Se3 first_head_pose;  // world head pose of frame 0 (anchor source)
    double fps = 30;
};

// Push/tick over the whole stream, then drain with a frozen tail.
InteractionSequence run_offline(const OfflineStream& stream, const Skeleton& skel,
                                const ConveyorConfig& cfg, const DenoiseFn& denoise);

}  // namespace hoistream
