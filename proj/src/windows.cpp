#include "hoistream/windows.hpp"

#include "hoistream/descriptor.hpp"
#include "hoistream/encode.hpp"

namespace hoistream {

WindowSampler::WindowSampler(std::vector<InteractionSequence> seqs, const Skeleton& skel, int W,
                             bool canonicalize)
    : seqs_(std::move(seqs)), skel_(skel), W_(W), canonicalize_(canonicalize) {
    if (seqs_.empty()) throw InvalidConfig("window sampler needs at least one sequence");
    for (const auto& s : seqs_) {
        if (s.size() < W_) throw SequenceTooShort("sequence shorter than the window");
        if (s.has_object()) {
            const auto key = std::make_pair(*s.object_class, s.object_vertex_count.value_or(256));
            if (!tpl_cache_.count(key)) {
                tpl_cache_[key] = std::make_shared<const ObjectTemplate>(
                    make_object_template(key.first, key.second));
            }
        }
    }
}

TrainItem WindowSampler::window_at(int seq_index, int start) const {
    const InteractionSequence& seq = seqs_.at(seq_index);
    if (start < 0 || start + W_ > seq.size()) throw InvalidConfig("window start out of range");

    std::vector<HumanFrame> frames(W_);
    for (int i = 0; i < W_; ++i) frames[i] = seq.frames[start + i].human;

    Anchor anchor = Anchor::identity();
    if (canonicalize_) {
        const FkResult w0 = fk_full(skel_, frames[0]);
        const int hj = skel_.index_of("head");
        anchor = gravity_align(se3_from_parts(w0.rot[hj], w0.pos[hj]));
    }

    TrainItem item;
    item.h.resize(W_, kHumanDim);
    item.o = Eigen::MatrixXd::Zero(W_, kObjectDim);
    item.c = Eigen::MatrixXd::Zero(W_, kContactDim);
    item.motion_only = !seq.has_object();

    for (int i = 0; i < W_; ++i) {
        HumanFrame canon = frames[i];
        canon.root = canonicalize(anchor, canon.root);
        item.h.row(i) = encode_human_row(canon);

        const auto& f = seq.frames[start + i];
        if (f.object) {
            ObjectFrame of = *f.object;
            of.pose = canonicalize(anchor, of.pose);
            item.o.row(i) = encode_object_row(of);
        }
        if (f.contact) {
            item.c.row(i) = encode_contact_row(*f.contact);
        } else {
            // geometric foot labels gate the foot-skating loss even for
            // motion-only data
            const auto foot = foot_contacts(skel_, frames[i], 0.05);
            for (int k = 0; k < kNumFootLabels; ++k) item.c(i, kNumBodyPoints + k) = foot[k];
        }
    }

    const auto ego = ego_condition(skel_, frames, anchor, 1.0 / seq.fps);
    item.ego.resize(W_, kEgoDim);
    for (int i = 0; i < W_; ++i) {
        const auto flat = ego[i].flatten();
        for (int k = 0; k < kEgoDim; ++k) item.ego(i, k) = flat[k];
    }

    if (seq.has_object()) {
        const auto key = std::make_pair(*seq.object_class, seq.object_vertex_count.value_or(256));
        item.tpl = tpl_cache_.at(key);
        item.descriptor = object_descriptor(*item.tpl).flat();
    } else {
        item.descriptor = Eigen::VectorXd::Zero(33 + kObjectGeomDim);
    }
    return item;
}

TrainItem WindowSampler::sample(Rng& rng) const {
    const int si = rng.uniform_int(0, static_cast<int>(seqs_.size()) - 1);
    const int start = rng.uniform_int(0, seqs_[si].size() - W_);
    return window_at(si, start);
}

std::vector<TrainItem> WindowSampler::batch(Rng& rng, int n) const {
    std::vector<TrainItem> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(sample(rng));
    return out;
}

EgoSource ego_source(const Skeleton& skel, const InteractionSequence& seq) {
    EgoSource src;
    src.fps = seq.fps;
    std::vector<HumanFrame> frames;
    frames.reserve(seq.frames.size());
    for (const auto& f : seq.frames) frames.push_back(f.human);
    src.ego_world = ego_world(skel, frames, 1.0 / seq.fps);
    const FkResult w0 = fk_full(skel, frames[0]);
    const int hj = skel.index_of("head");
    src.first_head_pose = se3_from_parts(w0.rot[hj], w0.pos[hj]);
    return src;
}

}  // namespace hoistream
