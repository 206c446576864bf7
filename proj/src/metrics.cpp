#include "hoistream/metrics.hpp"

#include <cmath>

namespace hoistream {

namespace {

void check_same_length(size_t a, size_t b, const char* what) {
    if (a != b) throw ShapeMismatch(std::string(what) + ": sequence lengths differ");
}

}  // namespace

double mpjpe(const JointSeq& pred, const JointSeq& gt) {
    check_same_length(pred.size(), gt.size(), "mpjpe");
    if (pred.empty()) throw ShapeMismatch("mpjpe: empty sequences");
    double acc = 0;
    size_t n = 0;
    for (size_t t = 0; t < pred.size(); ++t) {
        check_same_length(pred[t].size(), gt[t].size(), "mpjpe");
        for (size_t j = 0; j < pred[t].size(); ++j) {
            acc += (pred[t][j] - gt[t][j]).norm();
            ++n;
        }
    }
    return acc / double(n) * 1000.0;
}

double mpjve(const JointSeq& pred, const JointSeq& gt) {
    check_same_length(pred.size(), gt.size(), "mpjve");
    if (pred.size() < 2) throw SequenceTooShort("mpjve needs at least 2 frames");
    double acc = 0;
    size_t n = 0;
    for (size_t t = 1; t < pred.size(); ++t) {
        for (size_t j = 0; j < pred[t].size(); ++j) {
            const Vec3 vp = pred[t][j] - pred[t - 1][j];
            const Vec3 vg = gt[t][j] - gt[t - 1][j];
            acc += (vp - vg).norm();
            ++n;
        }
    }
    return acc / double(n) * 1000.0;
}

double fc(const Skeleton& skel, const JointSeq& joints, double dist_thresh,
          double height_thresh) {
    if (joints.empty()) return 0;
    const auto feet = skel.foot_joints();
    long grounded = 0;
    for (const auto& frame : joints) {
        const bool ok = frame[feet[0]].z() <= dist_thresh || frame[feet[1]].z() <= dist_thresh ||
                        frame[feet[2]].z() <= height_thresh || frame[feet[3]].z() <= height_thresh;
        grounded += ok ? 1 : 0;
    }
    return double(grounded) / double(joints.size());
}

double e_v2v(const std::vector<ObjectFrame>& pred, const std::vector<ObjectFrame>& gt,
             const ObjectTemplate& tpl) {
    check_same_length(pred.size(), gt.size(), "e_v2v");
    double acc = 0;
    size_t n = 0;
    for (size_t t = 0; t < pred.size(); ++t) {
        const auto vp = object_vertices(tpl, pred[t]);
        const auto vg = object_vertices(tpl, gt[t]);
        for (size_t i = 0; i < vp.size(); ++i) {
            acc += (vp[i] - vg[i]).norm();
            ++n;
        }
    }
    return acc / double(n) * 100.0;
}

double e_c(const std::vector<ObjectFrame>& pred, const std::vector<ObjectFrame>& gt,
           const ObjectTemplate& tpl) {
    check_same_length(pred.size(), gt.size(), "e_c");
    double acc = 0;
    for (size_t t = 0; t < pred.size(); ++t) {
        Vec3 cp = Vec3::Zero(), cg = Vec3::Zero();
        for (const auto& v : object_vertices(tpl, pred[t])) cp += v;
        for (const auto& v : object_vertices(tpl, gt[t])) cg += v;
        acc += (cp - cg).norm() / double(tpl.vertices.size());
    }
    return acc / double(pred.size()) * 100.0;
}

double rot_diff(const std::vector<ObjectFrame>& pred, const std::vector<ObjectFrame>& gt) {
    check_same_length(pred.size(), gt.size(), "rot_diff");
    double acc = 0;
    for (size_t t = 0; t < pred.size(); ++t) {
        acc += geodesic_angle_deg(rot6_to_matrix(pred[t].pose.rot), rot6_to_matrix(gt[t].pose.rot));
    }
    return acc / double(pred.size());
}

double q_diff(const std::vector<ObjectFrame>& pred, const std::vector<ObjectFrame>& gt) {
    check_same_length(pred.size(), gt.size(), "q_diff");
    double acc = 0;
    for (size_t t = 0; t < pred.size(); ++t) {
        const Quat a = matrix_to_quat(rot6_to_matrix(pred[t].pose.rot));
        const Quat b = matrix_to_quat(rot6_to_matrix(gt[t].pose.rot));
        const double plus = std::abs(a.w - b.w) + std::abs(a.x - b.x) + std::abs(a.y - b.y) +
                            std::abs(a.z - b.z);
        const double minus = std::abs(a.w + b.w) + std::abs(a.x + b.x) + std::abs(a.y + b.y) +
                             std::abs(a.z + b.z);
        acc += std::min(plus, minus);  // quaternion double cover
    }
    return acc / double(pred.size());
}

JointSeq joints_of(const Skeleton& skel, const InteractionSequence& seq) {
    JointSeq out;
    out.reserve(seq.frames.size());
    for (const auto& f : seq.frames) out.push_back(fk(skel, f.human));
    return out;
}

MetricsReport evaluate_sequences(const Skeleton& skel, const InteractionSequence& pred,
                                 const InteractionSequence& gt) {
    if (pred.size() != gt.size()) throw ShapeMismatch("evaluate: sequence lengths differ");
    MetricsReport r;
    const JointSeq jp = joints_of(skel, pred);
    const JointSeq jg = joints_of(skel, gt);
    r.mpjpe = mpjpe(jp, jg);
    r.mpjve = mpjve(jp, jg);
    r.fc = fc(skel, jp);
    if (pred.has_object() && gt.has_object()) {
        const ObjectTemplate tpl = make_object_template(
            *gt.object_class, gt.object_vertex_count.value_or(256));
        std::vector<ObjectFrame> op, og;
        for (const auto& f : pred.frames) op.push_back(*f.object);
        for (const auto& f : gt.frames) og.push_back(*f.object);
        r.e_v2v = e_v2v(op, og, tpl);
        r.e_c = e_c(op, og, tpl);
        r.rot_diff = rot_diff(op, og);
        r.q_diff = q_diff(op, og);
        r.has_object = true;
    }
    return r;
}

}  // namespace hoistream
