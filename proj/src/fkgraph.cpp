#include "hoistream/fkgraph.hpp"

namespace hoistream {

namespace {

using ad::Tensor;

Tensor anchor_rot_rows(const Anchor& a, int W) {
    const Mat3 r = rot6_to_matrix(a.transform.rot);
    Eigen::RowVectorXd row(9);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) row(3 * j + i) = r(i, j);
    return ad::constant(row.replicate(W, 1));
}

Tensor anchor_trans_rows(const Anchor& a, int W) {
    return ad::constant(a.transform.trans.transpose().replicate(W, 1));
}

}  // namespace

FkGraph fk_rows(const Skeleton& skel, const ad::Tensor& h_rows, const Anchor* anchor) {
    if (h_rows.cols() != kHumanDim) throw ShapeMismatch("fk_rows: expects W x 135 human rows");
    const int W = h_rows.rows();

    Tensor root_rot = ad::rows_gram_schmidt(ad::slice_cols(h_rows, 0, 6));
    Tensor root_trans = ad::slice_cols(h_rows, 6, 3);
    if (anchor != nullptr) {
        const Tensor ar = anchor_rot_rows(*anchor, W);
        root_rot = ad::rotmul_rows(ar, root_rot);
        root_trans = ad::add(ad::rotapply_rows(ar, root_trans), anchor_trans_rows(*anchor, W));
    }

    FkGraph g;
    g.pos.resize(skel.joints.size());
    g.rot.resize(skel.joints.size());
    g.pos[0] = root_trans;
    g.rot[0] = root_rot;
    for (size_t j = 1; j < skel.joints.size(); ++j) {
        const int p = skel.joints[j].parent;
        const Tensor offset =
            ad::constant(skel.joints[j].offset.transpose().replicate(W, 1));
        g.pos[j] = ad::add(ad::rotapply_rows(g.rot[p], offset), g.pos[p]);
        const Tensor local =
            ad::rows_gram_schmidt(ad::slice_cols(h_rows, 9 + 6 * static_cast<int>(j - 1), 6));
        g.rot[j] = ad::rotmul_rows(g.rot[p], local);
    }
    return g;
}

ad::Tensor fk_joints_concat(const FkGraph& g) {
    return ad::concat_cols(g.pos);
}

ObjectGraph object_rows(const ad::Tensor& o_rows, const Anchor* anchor) {
    if (o_rows.cols() != kObjectDim) throw ShapeMismatch("object_rows: expects W x 9 object rows");
    const int W = o_rows.rows();
    ObjectGraph g;
    g.rot = ad::rows_gram_schmidt(ad::slice_cols(o_rows, 0, 6));
    g.trans = ad::slice_cols(o_rows, 6, 3);
    if (anchor != nullptr) {
        const Tensor ar = anchor_rot_rows(*anchor, W);
        g.rot = ad::rotmul_rows(ar, g.rot);
        g.trans = ad::add(ad::rotapply_rows(ar, g.trans), anchor_trans_rows(*anchor, W));
    }
    return g;
}

}  // namespace hoistream
