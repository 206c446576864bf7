#include "hoistream/loss.hpp"

namespace hoistream {

namespace {

using ad::Tensor;
using Eigen::MatrixXd;

Tensor per_frame_norm_mean(const Tensor& diff) {
    return ad::mean(ad::group_norms(diff, diff.cols()));
}

}  // namespace

LossGraph loss_total(const DenoiseOutput& pred, const MatrixXd& h_target,
                     const MatrixXd& o_target, const MatrixXd& c_target, const Skeleton& skel,
                     const ObjectTemplate* tpl, const LossWeights& w, bool motion_only) {
    const int W = static_cast<int>(h_target.rows());
    if (pred.h0.rows() != W || pred.h0.cols() != kHumanDim ||
        pred.o0.rows() != W || pred.o0.cols() != kObjectDim ||
        pred.c0.rows() != W || pred.c0.cols() != kContactDim ||
        o_target.rows() != W || c_target.rows() != W) {
        throw ShapeMismatch("loss_total: prediction/target shapes differ");
    }
    const Tensor zero = ad::constant(MatrixXd::Zero(1, 1));

    // human data term: pose norm + root norm, per frame
    const Tensor h_diff = ad::sub(pred.h0, ad::constant(h_target));
    const Tensor l_h_n = ad::add(per_frame_norm_mean(ad::slice_cols(h_diff, 9, kHumanDim - 9)),
                                 per_frame_norm_mean(ad::slice_cols(h_diff, 0, 9)));

    Tensor l_o_n = zero;
    Tensor l_i_n = zero;
    Tensor l_o_v = zero;
    if (!motion_only) {
        l_o_n = per_frame_norm_mean(ad::sub(pred.o0, ad::constant(o_target)));
        l_i_n = per_frame_norm_mean(ad::sub(pred.c0, ad::constant(c_target)));
        if (tpl != nullptr && w.l_o_v != 0) {
            MatrixXd verts(tpl->vertices.size(), 3);
            for (size_t i = 0; i < tpl->vertices.size(); ++i) {
                verts.row(static_cast<Eigen::Index>(i)) = tpl->vertices[i].transpose();
            }
            const ObjectGraph pg = object_rows(pred.o0);
            const Tensor posed_pred = ad::pose_points_rows(pg.rot, pg.trans, verts);
            const ObjectGraph tg = object_rows(ad::constant(o_target));
            const Tensor posed_gt = ad::pose_points_rows(tg.rot, tg.trans, verts);
            l_o_v = ad::mean(ad::group_norms(ad::sub(posed_pred, posed_gt), 3));
        }
    }

    Tensor l_h_j = zero;
    Tensor l_h_s = zero;
    if (w.l_h_j != 0 || w.l_h_s != 0) {
        const FkGraph pred_fk = fk_rows(skel, pred.h0);
        if (w.l_h_j != 0) {
            const FkGraph gt_fk = fk_rows(skel, ad::constant(h_target));
            const Tensor diff = ad::sub(fk_joints_concat(pred_fk), fk_joints_concat(gt_fk));
            l_h_j = ad::mean(ad::group_norms(diff, 3));
        }
        if (w.l_h_s != 0 && W > 1) {
            const auto feet = skel.foot_joints();
            std::vector<Tensor> foot_pos;
            for (int k = 0; k < kNumFootLabels; ++k) foot_pos.push_back(pred_fk.pos[feet[k]]);
            const Tensor fp = ad::concat_cols(foot_pos);  // W x 12
            const Tensor vel = ad::sub(ad::slice_rows(fp, 1, W - 1), ad::slice_rows(fp, 0, W - 1));
            // gate with the ground-truth foot labels of the later frame
            MatrixXd gate(W - 1, 3 * kNumFootLabels);
            for (int t = 1; t < W; ++t) {
                for (int k = 0; k < kNumFootLabels; ++k) {
                    const double lbl = c_target(t, kNumBodyPoints + k) > 0.5 ? 1.0 : 0.0;
                    gate.block(t - 1, 3 * k, 1, 3).setConstant(lbl);
                }
            }
            l_h_s = ad::mean(ad::group_norms(ad::mul(vel, ad::constant(gate)),
                                             3 * kNumFootLabels));
        }
    }

    LossGraph out;
    out.values.h_n = l_h_n.val()(0, 0);
    out.values.o_n = l_o_n.val()(0, 0);
    out.values.i_n = l_i_n.val()(0, 0);
    out.values.o_v = l_o_v.val()(0, 0);
    out.values.h_j = l_h_j.val()(0, 0);
    out.values.h_s = l_h_s.val()(0, 0);

    out.total = ad::add(
        ad::add(ad::add(ad::scale(l_h_n, w.l_h_n), ad::scale(l_o_n, w.l_o_n)),
                ad::add(ad::scale(l_i_n, w.l_i_n), ad::scale(l_o_v, w.l_o_v))),
        ad::add(ad::scale(l_h_j, w.l_h_j), ad::scale(l_h_s, w.l_h_s)));
    out.values.total = out.total.val()(0, 0);
    return out;
}

}  // namespace hoistream
