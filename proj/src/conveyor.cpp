#include "hoistream/conveyor.hpp"

#include <cmath>

#include "hoistream/encode.hpp"

namespace hoistream {

namespace {

Eigen::RowVectorXd noise_row(Rng& rng, int width) {
    Eigen::RowVectorXd row(width);
    for (int i = 0; i < width; ++i) row(i) = rng.normal();
    return row;
}

ConveyorSlot fresh_slot(Rng& rng) {
    ConveyorSlot s;
    s.h = noise_row(rng, kHumanDim);
    s.o = noise_row(rng, kObjectDim);
    s.c = noise_row(rng, kContactDim);
    return s;
}

Se3 head_world_pose(const Skeleton& skel, const HumanFrame& f) {
    const FkResult world = fk_full(skel, f);
    const int h = skel.index_of("head");
    return se3_from_parts(world.rot[h], world.pos[h]);
}

void write_observed_rows(ConveyorSlot& slot, const Anchor& anchor) {
    if (slot.obs_h) {
        HumanFrame canon = *slot.observed_world.human;
        canon.root = canonicalize(anchor, canon.root);
        slot.h = encode_human_row(canon);
    }
    if (slot.obs_o) {
        ObjectFrame canon = *slot.observed_world.object;
        canon.pose = canonicalize(anchor, canon.pose);
        slot.o = encode_object_row(canon);
    }
    if (slot.obs_c) {
        slot.c = encode_contact_row(*slot.observed_world.contact);
    }
}

}  // namespace

DenoiseFn model_denoise_fn(std::shared_ptr<const DenoiserParams> params) {
    return [params](const ConveyorWindow& w) {
        DenoiseInput in;
        in.h = w.h;
        in.o = w.o;
        in.c = w.c;
        in.t_h = w.t_h;
        in.t_o = w.t_o;
        in.t_c = w.t_c;
        in.ego = w.ego;
        in.descriptor = w.descriptor;
        in.positions = w.positions;
        const DenoisePredict out = denoise_predict(*params, in);
        return DenoisePrediction{out.h0, out.o0, out.c0};
    };
}

ConveyorState conveyor_init(const Se3& anchor_head_pose, const ConveyorConfig& cfg,
                            const Skeleton& skel) {
    if (cfg.K < 0 || cfg.K >= cfg.W) throw InvalidContextCount("need 0 <= K < W");
    if (cfg.schedule.T < 1) throw InvalidT("conveyor needs a schedule with T >= 1");
    if (cfg.has_object && !cfg.tpl) throw InvalidConfig("has_object requires a template");

    ConveyorState s;
    s.cfg = cfg;
    s.skel = &skel;
    s.rng = Rng(cfg.seed);
    s.anchor = cfg.canonicalize ? gravity_align(anchor_head_pose) : Anchor::identity();

    s.ladder.assign(cfg.W, 0);
    const std::vector<int> ramp = ramp_grid(cfg.W - cfg.K, cfg.schedule.T, 0);
    for (int j = cfg.K; j < cfg.W; ++j) s.ladder[j] = ramp[j - cfg.K];

    for (int j = 0; j < cfg.W; ++j) {
        ConveyorSlot slot = fresh_slot(s.rng);
        // the context region starts as spent placeholders
        slot.emitted = j < cfg.K;
        s.slots.push_back(std::move(slot));
    }
    s.tail_claimed = false;
    return s;
}

void conveyor_push(ConveyorState& s, const EgoFrame& ego_world,
                   const std::optional<ObservedFrame>& observed) {
    if (s.slots.empty()) throw BufferNotReady("conveyor is drained");
    if (s.tail_claimed) throw BufferNotReady("tail already holds an unprocessed frame");
    ConveyorSlot& tail = s.slots.back();
    tail.frame_index = s.pushed++;
    tail.ego_world = ego_world;
    tail.has_ego = true;
    if (observed) {
        tail.observed_world = *observed;
        tail.obs_h = observed->human.has_value();
        tail.obs_o = observed->object.has_value() && s.cfg.has_object;
        tail.obs_c = observed->contact.has_value() && s.cfg.has_object;
        write_observed_rows(tail, s.anchor);
    }
    s.tail_claimed = true;
}

ConveyorWindow conveyor_window(const ConveyorState& s) {
    const int m = static_cast<int>(s.slots.size());
    ConveyorWindow w;
    w.h.resize(m, kHumanDim);
    w.o.resize(m, kObjectDim);
    w.c.resize(m, kContactDim);
    w.ego = Eigen::MatrixXd::Zero(m, kEgoDim);
    w.t_h.resize(m);
    w.t_o.resize(m);
    w.t_c.resize(m);
    w.positions.resize(m);
    w.frame_index.resize(m);
    const Se3 inv_anchor = se3_inverse(s.anchor.transform);
    for (int j = 0; j < m; ++j) {
        const ConveyorSlot& slot = s.slots[j];
        w.h.row(j) = slot.h;
        w.o.row(j) = slot.o;
        w.c.row(j) = slot.c;
        if (slot.has_ego) {
            const auto flat = ego_apply(inv_anchor, slot.ego_world).flatten();
            for (int i = 0; i < kEgoDim; ++i) w.ego(j, i) = flat[i];
        }
        w.t_h[j] = s.timestamp(j, slot.obs_h);
        w.t_o[j] = s.timestamp(j, slot.obs_o);
        w.t_c[j] = s.timestamp(j, slot.obs_c);
        w.positions[j] = j;
        w.frame_index[j] = slot.frame_index;
    }
    w.descriptor = s.cfg.descriptor;
    w.anchor = s.anchor;
    return w;
}

std::optional<EmittedFrame> conveyor_tick(ConveyorState& s, const DenoiseFn& denoise) {
    if (s.slots.empty()) return std::nullopt;
    const int m = static_cast<int>(s.slots.size());
    const bool had_claimed_tail = s.tail_claimed;

    const ConveyorWindow w = conveyor_window(s);
    DenoisePrediction pred = denoise(w);
    if (pred.h0.rows() != m || pred.o0.rows() != m || pred.c0.rows() != m) {
        throw ShapeMismatch("denoiser returned wrong window size");
    }

    if (s.cfg.guidance.enabled && s.cfg.has_object && s.cfg.tpl) {
        // skip frames that are already fully denoised
        std::vector<uint8_t> active(m, 0);
        bool any = false;
        for (int j = 0; j < m; ++j) {
            active[j] = (w.t_h[j] > 0 || w.t_o[j] > 0 || w.t_c[j] > 0) ? 1 : 0;
            any = any || active[j];
        }
        if (any) {
            const GuidedCorrection gc = guided_correction(
                ModalityTensor{Modality::human, pred.h0}, ModalityTensor{Modality::object, pred.o0},
                ModalityTensor{Modality::contact, pred.c0}, *s.skel, *s.cfg.tpl, s.anchor,
                s.cfg.guidance, &active);
            pred.h0 = gc.h0.data;
            pred.o0 = gc.o0.data;
        }
    }

    // one rung down the ladder; draws are fixed-order for determinism
    const Eigen::MatrixXd eps_h = [&] { Eigen::MatrixXd e(m, kHumanDim); for (int j = 0; j < m; ++j) e.row(j) = noise_row(s.rng, kHumanDim); return e; }();
    const Eigen::MatrixXd eps_o = [&] { Eigen::MatrixXd e(m, kObjectDim); for (int j = 0; j < m; ++j) e.row(j) = noise_row(s.rng, kObjectDim); return e; }();
    const Eigen::MatrixXd eps_c = [&] { Eigen::MatrixXd e(m, kContactDim); for (int j = 0; j < m; ++j) e.row(j) = noise_row(s.rng, kContactDim); return e; }();

    for (int j = 0; j < m; ++j) {
        ConveyorSlot& slot = s.slots[j];
        const int down = j == 0 ? 0 : s.ladder[j - 1];
        auto mix = [&](Eigen::RowVectorXd& row, const Eigen::MatrixXd& z0, int cur, int to,
                       const Eigen::MatrixXd& eps) {
            if (cur == 0) return;  // observed or context: keep the value
            if (to == 0) {
                row = z0.row(j);
            } else {
                const double ab = s.cfg.schedule.alpha_bar[to];
                row = std::sqrt(ab) * z0.row(j) + std::sqrt(1.0 - ab) * eps.row(j);
            }
        };
        mix(slot.h, pred.h0, w.t_h[j], slot.obs_h ? 0 : down, eps_h);
        mix(slot.o, pred.o0, w.t_o[j], slot.obs_o ? 0 : down, eps_o);
        mix(slot.c, pred.c0, w.t_c[j], slot.obs_c ? 0 : down, eps_c);
    }

    // the first unemitted slot that has just reached zero
    std::optional<EmittedFrame> out;
    for (int j = 0; j < m && j <= s.cfg.K; ++j) {
        ConveyorSlot& slot = s.slots[j];
        if (slot.emitted) continue;
        const int down = j == 0 ? 0 : s.ladder[j - 1];
        if (down != 0) break;
        slot.emitted = true;
        if (slot.frame_index >= 0) {
            EmittedFrame e;
            e.index = slot.frame_index;
            e.human =
                slot.obs_h ? *slot.observed_world.human : decode_human_row(slot.h);
            if (!slot.obs_h) e.human.root = decanonicalize(s.anchor, e.human.root);
            if (s.cfg.has_object) {
                ObjectFrame of = slot.obs_o ? *slot.observed_world.object
                                            : decode_object_row(slot.o);
                if (!slot.obs_o) of.pose = decanonicalize(s.anchor, of.pose);
                e.object = of;
                e.contact = slot.obs_c ? *slot.observed_world.contact
                                       : decode_contact_row(slot.c);
            }
            s.emitted_count += 1;
            out = e;

            if (s.cfg.canonicalize) {
                // re-anchor on the emitted head pose
                try {
                    const Anchor next = gravity_align(head_world_pose(*s.skel, e.human));
                    const Se3 move = se3_compose(se3_inverse(next.transform), s.anchor.transform);
                    for (ConveyorSlot& other : s.slots) {
                        try {
                            HumanFrame hf = decode_human_row(other.h);
                            hf.root = se3_compose(move, hf.root);
                            other.h = encode_human_row(hf);
                            ObjectFrame of = decode_object_row(other.o);
                            of.pose = se3_compose(move, of.pose);
                            other.o = encode_object_row(of);
                        } catch (const DegenerateRotation&) {
                            // leave a degenerate noise row untouched
                        }
                    }
                    s.anchor = next;
                    for (ConveyorSlot& other : s.slots) write_observed_rows(other, s.anchor);
                } catch (const DegenerateHeading&) {
                    // keep the previous anchor
                }
            }
        }
        break;
    }

    // drop context frames beyond K and open the tail
    int leading = 0;
    while (leading < static_cast<int>(s.slots.size()) && s.slots[leading].emitted) ++leading;
    while (leading > s.cfg.K && !s.slots.empty()) {
        s.slots.pop_front();
        --leading;
    }
    if (had_claimed_tail && static_cast<int>(s.slots.size()) < s.cfg.W) {
        s.slots.push_back(fresh_slot(s.rng));
        s.tail_claimed = false;
    }
    return out;
}

InteractionSequence run_offline(const OfflineStream& stream, const Skeleton& skel,
                                const ConveyorConfig& cfg, const DenoiseFn& denoise) {
    const long N = static_cast<long>(stream.ego_world.size());
    if (N < cfg.W) throw SequenceTooShort("run_offline needs at least W frames");
    if (!stream.observed.empty() && static_cast<long>(stream.observed.size()) != N) {
        throw ShapeMismatch("observed stream length differs from ego stream");
    }

    ConveyorState state = conveyor_init(stream.first_head_pose, cfg, skel);
    std::vector<std::optional<EmittedFrame>> got(N);
    auto record = [&](const std::optional<EmittedFrame>& e) {
        if (e) got[e->index] = e;
    };
    for (long i = 0; i < N; ++i) {
        conveyor_push(state, stream.ego_world[i],
                      stream.observed.empty() ? std::nullopt : stream.observed[i]);
        record(conveyor_tick(state, denoise));
    }
    long safety = N + 2L * cfg.W + 8;
    while (state.emitted_count < N && safety-- > 0) {
        record(conveyor_tick(state, denoise));
    }
    if (state.emitted_count < N) throw Error("conveyor failed to drain");

    InteractionSequence out;
    out.fps = stream.fps;
    if (cfg.has_object && cfg.tpl) {
        out.object_class = cfg.tpl->class_id;
        out.object_vertex_count = static_cast<int>(cfg.tpl->vertices.size());
    }
    out.frames.resize(N);
    for (long i = 0; i < N; ++i) {
        if (!got[i]) throw Error("conveyor missed a frame");
        out.frames[i].human = got[i]->human;
        out.frames[i].object = got[i]->object;
        out.frames[i].contact = got[i]->contact;
    }
    return out;
}

}  // namespace hoistream
