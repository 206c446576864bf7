#include "hoistream/encode.hpp"

namespace hoistream {

Eigen::RowVectorXd encode_human_row(const HumanFrame& f) {
    Eigen::RowVectorXd row(kHumanDim);
    for (int i = 0; i < 6; ++i) row(i) = f.root.rot.a[i];
    row.segment(6, 3) = f.root.trans.transpose();
    for (int j = 0; j < 21; ++j) {
        for (int i = 0; i < 6; ++i) row(9 + 6 * j + i) = f.joint_rot[j].a[i];
    }
    return row;
}

HumanFrame decode_human_row(const Eigen::RowVectorXd& row) {
    if (row.size() != kHumanDim) throw ShapeMismatch("decode_human_row: wrong width");
    HumanFrame f;
    for (int i = 0; i < 6; ++i) f.root.rot.a[i] = row(i);
    f.root.trans = Vec3(row(6), row(7), row(8));
    for (int j = 0; j < 21; ++j) {
        for (int i = 0; i < 6; ++i) f.joint_rot[j].a[i] = row(9 + 6 * j + i);
    }
    return f;
}

Eigen::RowVectorXd encode_object_row(const ObjectFrame& f) {
    Eigen::RowVectorXd row(kObjectDim);
    for (int i = 0; i < 6; ++i) row(i) = f.pose.rot.a[i];
    row.segment(6, 3) = f.pose.trans.transpose();
    return row;
}

ObjectFrame decode_object_row(const Eigen::RowVectorXd& row) {
    if (row.size() != kObjectDim) throw ShapeMismatch("decode_object_row: wrong width");
    ObjectFrame f;
    for (int i = 0; i < 6; ++i) f.pose.rot.a[i] = row(i);
    f.pose.trans = Vec3(row(6), row(7), row(8));
    return f;
}

Eigen::RowVectorXd encode_contact_row(const ContactVector& c) {
    Eigen::RowVectorXd row(kContactDim);
    for (int k = 0; k < kNumBodyPoints; ++k) row(k) = c.body[k];
    for (int k = 0; k < kNumFootLabels; ++k) row(kNumBodyPoints + k) = c.foot[k];
    return row;
}

ContactVector decode_contact_row(const Eigen::RowVectorXd& row, double threshold) {
    if (row.size() != kContactDim) throw ShapeMismatch("decode_contact_row: wrong width");
    ContactVector c;
    for (int k = 0; k < kNumBodyPoints; ++k) c.body[k] = row(k) > threshold ? 1 : 0;
    for (int k = 0; k < kNumFootLabels; ++k) c.foot[k] = row(kNumBodyPoints + k) > threshold ? 1 : 0;
    return c;
}

}  // namespace hoistream
