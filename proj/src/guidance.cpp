#include "hoistream/guidance.hpp"

#include <limits>

#include "hoistream/fkgraph.hpp"

namespace hoistream {

namespace {

using ad::Tensor;
using Eigen::MatrixXd;

}  // namespace

GuidedCorrection guided_correction(const ModalityTensor& h0, const ModalityTensor& o0,
                                   const ModalityTensor& c0, const Skeleton& skel,
                                   const ObjectTemplate& tpl, const Anchor& anchor,
                                   const GuidanceConfig& cfg,
                                   const std::vector<uint8_t>* frame_mask) {
    GuidedCorrection out{h0, o0, 0.0, false};
    const int W = h0.frames();
    if (o0.frames() != W || c0.frames() != W) throw ShapeMismatch("guided_correction: frame counts differ");
    if (frame_mask && static_cast<int>(frame_mask->size()) != W) {
        throw ShapeMismatch("guided_correction: frame mask size");
    }

    auto frame_on = [&](int t) { return frame_mask == nullptr || (*frame_mask)[t] != 0; };

    // active gates from the binarized contact prediction
    std::vector<std::pair<int, Eigen::VectorXd>> body_gates;  // (point index, W gate)
    for (int k = 0; k < kNumBodyPoints; ++k) {
        Eigen::VectorXd gate = Eigen::VectorXd::Zero(W);
        bool any = false;
        for (int t = 0; t < W; ++t) {
            if (frame_on(t) && c0.data(t, k) > 0.5) {
                gate[t] = 1.0;
                any = true;
            }
        }
        if (any) body_gates.push_back({k, std::move(gate)});
    }
    MatrixXd foot_gate = MatrixXd::Zero(W, kNumFootLabels);
    bool any_foot = false;
    for (int t = 0; t < W; ++t) {
        for (int k = 0; k < kNumFootLabels; ++k) {
            if (frame_on(t) && c0.data(t, kNumBodyPoints + k) > 0.5) {
                foot_gate(t, k) = 1.0;
                any_foot = true;
            }
        }
    }
    if (body_gates.empty() && !any_foot) return out;  // nothing to correct

    Tensor h_leaf = ad::param(h0.data);
    Tensor o_leaf = ad::param(o0.data);

    const FkGraph fkg = fk_rows(skel, h_leaf, &anchor);

    Tensor loss = ad::constant(MatrixXd::Zero(1, 1));
    if (!body_gates.empty()) {
        MatrixXd verts(tpl.vertices.size(), 3);
        for (size_t i = 0; i < tpl.vertices.size(); ++i) {
            verts.row(static_cast<Eigen::Index>(i)) = tpl.vertices[i].transpose();
        }
        const ObjectGraph og = object_rows(o_leaf, &anchor);
        const Tensor posed = ad::pose_points_rows(og.rot, og.trans, verts);
        for (const auto& [k, gate] : body_gates) {
            const auto& bp = skel.body_points[k];
            const int j = bp.joint;
            const int par = skel.joints[j].parent < 0 ? j : skel.joints[j].parent;
            Tensor point = ad::add(ad::scale(fkg.pos[j], 1.0 - bp.frac),
                                   ad::scale(fkg.pos[par], bp.frac));
            if (bp.offset.norm() > 0) {
                const Tensor off = ad::constant(bp.offset.transpose().replicate(W, 1));
                point = ad::add(point, ad::rotapply_rows(fkg.rot[j], off));
            }
            const Tensor dist = ad::point_min_dist_rows(point, posed);  // W x 1
            loss = ad::add(loss, ad::sum(ad::mul(dist, ad::constant(MatrixXd(gate)))));
        }
    }
    if (any_foot) {
        const auto feet = skel.foot_joints();
        std::vector<Tensor> heights;
        for (int k = 0; k < kNumFootLabels; ++k) {
            heights.push_back(ad::slice_cols(fkg.pos[feet[k]], 2, 1));
        }
        const Tensor h = ad::abs(ad::concat_cols(heights));  // W x 4 world heights
        loss = ad::add(loss, ad::sum(ad::mul(h, ad::constant(foot_gate))));
    }

    out.loss_before = loss.val()(0, 0);
    ad::GradStore gs = ad::backward(loss);
    out.h0.data -= cfg.scale * gs.get(h_leaf);
    out.o0.data -= cfg.scale * gs.get(o_leaf);
    out.applied = true;
    return out;
}

double guidance_loss(const Skeleton& skel, const std::vector<HumanFrame>& human,
                     const ObjectTemplate* tpl, const std::vector<ObjectFrame>* object,
                     const std::vector<ContactVector>& contacts, double) {
    if (contacts.size() != human.size()) throw ShapeMismatch("guidance_loss: length mismatch");
    const auto feet = skel.foot_joints();
    double total = 0;
    for (size_t t = 0; t < human.size(); ++t) {
        const FkResult world = fk_full(skel, human[t]);
        if (tpl != nullptr && object != nullptr) {
            const auto pts = body_points(skel, world);
            const auto verts = object_vertices(*tpl, (*object)[t]);
            for (int k = 0; k < kNumBodyPoints; ++k) {
                if (!contacts[t].body[k]) continue;
                double best = std::numeric_limits<double>::infinity();
                for (const auto& v : verts) best = std::min(best, (pts[k] - v).norm());
                total += best;
            }
        }
        for (int k = 0; k < kNumFootLabels; ++k) {
            if (contacts[t].foot[k]) total += std::abs(world.pos[feet[k]].z());
        }
    }
    return total;
}

}  // namespace hoistream
