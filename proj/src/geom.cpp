#include "hoistream/geom.hpp"

#include <cmath>

namespace hoistream {

namespace {
constexpr double kDegenerate = 1e-8;
}

Mat3 rot6_to_matrix(const Rot6& r) {
    Vec3 c0 = r.col0();
    Vec3 c1 = r.col1();
    const double n0 = c0.norm();
    if (n0 <= kDegenerate || c1.norm() <= kDegenerate) {
        throw DegenerateRotation("rot6 column near zero");
    }
    c0 /= n0;
    c1 -= c0.dot(c1) * c0;
    const double n1 = c1.norm();
    if (n1 <= kDegenerate) {
        throw DegenerateRotation("rot6 columns near parallel");
    }
    c1 /= n1;
    Mat3 m;
    m.col(0) = c0;
    m.col(1) = c1;
    m.col(2) = c0.cross(c1);
    return m;
}

Rot6 matrix_to_rot6(const Mat3& m) {
    Rot6 r;
    r.a = {m(0, 0), m(1, 0), m(2, 0), m(0, 1), m(1, 1), m(2, 1)};
    return r;
}

Quat matrix_to_quat(const Mat3& m) {
    Eigen::Quaterniond q(m);
    q.normalize();
    Quat out{q.w(), q.x(), q.y(), q.z()};
    if (out.w < 0) {
        out.w = -out.w;
        out.x = -out.x;
        out.y = -out.y;
        out.z = -out.z;
    }
    return out;
}

Mat3 quat_to_matrix(const Quat& q) {
    return Eigen::Quaterniond(q.w, q.x, q.y, q.z).normalized().toRotationMatrix();
}

double geodesic_angle_deg(const Mat3& a, const Mat3& b) {
    const double c = ((a.transpose() * b).trace() - 1.0) / 2.0;
    return std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI;
}

bool is_rotation(const Mat3& m, double tol) {
    const Mat3 gram = m.transpose() * m;
    if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(m.determinant() - 1.0) <= tol;
}

Se3 se3_from_parts(const Mat3& r, const Vec3& t) {
    return Se3{matrix_to_rot6(r), t};
}

Mat3 se3_rotation(const Se3& a) { return rot6_to_matrix(a.rot); }

Se3 se3_compose(const Se3& a, const Se3& b) {
    const Mat3 ra = rot6_to_matrix(a.rot);
    const Mat3 rb = rot6_to_matrix(b.rot);
    return Se3{matrix_to_rot6(ra * rb), ra * b.trans + a.trans};
}

Se3 se3_inverse(const Se3& a) {
    const Mat3 rt = rot6_to_matrix(a.rot).transpose();
    return Se3{matrix_to_rot6(rt), -(rt * a.trans)};
}

Vec3 se3_apply(const Se3& a, const Vec3& p) {
    return rot6_to_matrix(a.rot) * p + a.trans;
}

std::vector<Vec3> se3_apply(const Se3& a, const std::vector<Vec3>& pts) {
    const Mat3 r = rot6_to_matrix(a.rot);
    std::vector<Vec3> out;
    out.reserve(pts.size());
    for (const Vec3& p : pts) out.push_back(r * p + a.trans);
    return out;
}

}  // namespace hoistream
