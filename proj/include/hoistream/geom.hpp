#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "hoistream/errors.hpp"

namespace hoistream {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Continuous 6D rotation encoding: the first two columns of a rotation
// matrix, stored column-major [c0, c1].
struct Rot6 {
    std::array<double, 6> a{1, 0, 0, 0, 1, 0};

    static Rot6 identity() { return {}; }
    Vec3 col0() const { return {a[0], a[1], a[2]}; }
    Vec3 col1() const { return {a[3], a[4], a[5]}; }
};

// Unit quaternion, canonical sign w >= 0.
struct Quat {
    double w = 1, x = 0, y = 0, z = 0;
};

// Rigid transform: 6D rotation + translation in meters.
struct Se3 {
    Rot6 rot;
    Vec3 trans{0, 0, 0};

    static Se3 identity() { return {}; }
};

// Gram-Schmidt recovery of the full matrix. Throws DegenerateRotation when
// a column is near zero or the columns are near parallel (threshold 1e-8).
Mat3 rot6_to_matrix(const Rot6& r);

Rot6 matrix_to_rot6(const Mat3& m);
Quat matrix_to_quat(const Mat3& m);
Mat3 quat_to_matrix(const Quat& q);

// Angle between two rotations in degrees, in [0, 180].
double geodesic_angle_deg(const Mat3& a, const Mat3& b);

bool is_rotation(const Mat3& m, double tol = 1e-9);

Se3 se3_from_parts(const Mat3& r, const Vec3& t);
Mat3 se3_rotation(const Se3& a);
Se3 se3_compose(const Se3& a, const Se3& b);
Se3 se3_inverse(const Se3& a);
Vec3 se3_apply(const Se3& a, const Vec3& p);
std::vector<Vec3> se3_apply(const Se3& a, const std::vector<Vec3>& pts);

}  // namespace hoistream
