#pragma once

#include <map>
#include <memory>

#include "hoistream/seq.hpp"
#include "hoistream/train.hpp"

namespace hoistream {

// Draws W-frame training windows uniformly from a corpus, canonicalizes
// each by its own first-frame head anchor, and attaches ego conditioning.
class WindowSampler {
public:
    WindowSampler(std::vector<InteractionSequence> seqs, const Skeleton& skel, int W,
                  bool canonicalize = true);

    TrainItem window_at(int seq_index, int start) const;
    TrainItem sample(Rng& rng) const;
    std::vector<TrainItem> batch(Rng& rng, int n) const;

    int sequence_count() const { return static_cast<int>(seqs_.size()); }
    const InteractionSequence& sequence(int i) const { return seqs_[i]; }

private:
    std::vector<InteractionSequence> seqs_;
    const Skeleton& skel_;
    int W_;
    bool canonicalize_;
    std::map<std::pair<int, int>, std::shared_ptr<const ObjectTemplate>> tpl_cache_;
};

// World ego stream + anchor source for offline sampling from a reference
// sequence.
struct EgoSource {
    std::vector<EgoFrame> ego_world;
    Se3 first_head_pose;
    double fps = 30;
};

EgoSource ego_source(const Skeleton& skel, const InteractionSequence& seq);

}  // namespace hoistream
