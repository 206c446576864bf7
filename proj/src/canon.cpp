#include "hoistream/canon.hpp"

#include <cmath>

namespace hoistream {

std::array<double, kEgoDim> EgoFrame::flatten() const {
    std::array<double, kEgoDim> v{};
    int k = 0;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 6; ++i) v[k++] = rot[j].a[i];
    for (int i = 0; i < 18; ++i) v[k++] = rot_vel[i];
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) v[k++] = xyz[j][i];
    for (int i = 0; i < 9; ++i) v[k++] = vel[i];
    return v;
}

EgoFrame EgoFrame::unflatten(const std::array<double, kEgoDim>& v) {
    EgoFrame e;
    int k = 0;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 6; ++i) e.rot[j].a[i] = v[k++];
    for (int i = 0; i < 18; ++i) e.rot_vel[i] = v[k++];
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) e.xyz[j][i] = v[k++];
    for (int i = 0; i < 9; ++i) e.vel[i] = v[k++];
    return e;
}

Anchor gravity_align(const Se3& head) {
    const Mat3 r = rot6_to_matrix(head.rot);
    Vec3 forward = r.col(0);
    forward.z() = 0.0;
    const double n = forward.norm();
    if (n <= 1e-6) throw DegenerateHeading("head forward axis parallel to gravity");
    forward /= n;
    Mat3 m;
    m.col(0) = forward;
    m.col(1) = Vec3(-forward.y(), forward.x(), 0.0);  // up x forward
    m.col(2) = Vec3(0, 0, 1);
    return Anchor{Se3{matrix_to_rot6(m), head.trans}};
}

Se3 canonicalize(const Anchor& anchor, const Se3& pose) {
    return se3_compose(se3_inverse(anchor.transform), pose);
}

Se3 decanonicalize(const Anchor& anchor, const Se3& pose) {
    return se3_compose(anchor.transform, pose);
}

namespace {

const std::array<double, 6> kIdentityRot6 = Rot6::identity().a;

std::array<int, 3> ego_joints(const Skeleton& skel) {
    return {skel.index_of("head"), skel.index_of("left_wrist"), skel.index_of("right_wrist")};
}

}  // namespace

std::vector<EgoFrame> ego_world(const Skeleton& skel, const std::vector<HumanFrame>& seq,
                                double dt) {
    if (seq.size() < 2) throw SequenceTooShort("ego conditioning needs at least 2 frames");
    if (dt <= 0) throw InvalidConfig("dt must be positive");
    const auto joints = ego_joints(skel);

    std::vector<std::array<Mat3, 3>> rots(seq.size());
    std::vector<EgoFrame> out(seq.size());
    for (size_t t = 0; t < seq.size(); ++t) {
        const FkResult world = fk_full(skel, seq[t]);
        for (int j = 0; j < 3; ++j) {
            rots[t][j] = world.rot[joints[j]];
            out[t].rot[j] = matrix_to_rot6(rots[t][j]);
            out[t].xyz[j] = world.pos[joints[j]];
        }
    }
    for (size_t t = 1; t < seq.size(); ++t) {
        for (int j = 0; j < 3; ++j) {
            const Vec3 v = (out[t].xyz[j] - out[t - 1].xyz[j]) / dt;
            for (int i = 0; i < 3; ++i) out[t].vel[3 * j + i] = v[i];
            const Rot6 rel = matrix_to_rot6(rots[t - 1][j].transpose() * rots[t][j]);
            for (int i = 0; i < 6; ++i) {
                out[t].rot_vel[6 * j + i] = (rel.a[i] - kIdentityRot6[i]) / dt;
            }
        }
    }
    out[0].vel = out[1].vel;
    out[0].rot_vel = out[1].rot_vel;
    return out;
}

EgoFrame ego_apply(const Se3& m, const EgoFrame& e) {
    const Mat3 rm = rot6_to_matrix(m.rot);
    EgoFrame out = e;
    for (int j = 0; j < 3; ++j) {
        out.rot[j] = matrix_to_rot6(rm * rot6_to_matrix(e.rot[j]));
        out.xyz[j] = rm * e.xyz[j] + m.trans;
        const Vec3 v = rm * Vec3(e.vel[3 * j], e.vel[3 * j + 1], e.vel[3 * j + 2]);
        for (int i = 0; i < 3; ++i) out.vel[3 * j + i] = v[i];
    }
    // rot_vel encodes frame-to-frame relative rotations; unchanged by a
    // common re-expression of both frames.
    return out;
}

std::vector<EgoFrame> ego_condition(const Skeleton& skel, const std::vector<HumanFrame>& seq,
                                    const Anchor& anchor, double dt) {
    auto frames = ego_world(skel, seq, dt);
    const Se3 inv = se3_inverse(anchor.transform);
    for (EgoFrame& e : frames) e = ego_apply(inv, e);
    return frames;
}

}  // namespace hoistream
