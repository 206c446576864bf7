#pragma once

#include <vector>

#include "hoistream/autodiff.hpp"
#include "hoistream/body.hpp"
#include "hoistream/canon.hpp"
#include "hoistream/diffusion.hpp"

namespace hoistream {

// Differentiable forward kinematics over a whole window at once: joint j
// holds a (W x 3) position tensor and a (W x 9) column-major rotation
// tensor. An optional anchor pre-composes every root pose (canonical ->
// world decode inside the graph).
struct FkGraph {
    std::vector<ad::Tensor> pos;  // kNumJoints tensors, W x 3
    std::vector<ad::Tensor> rot;  // kNumJoints tensors, W x 9
};

FkGraph fk_rows(const Skeleton& skel, const ad::Tensor& h_rows,
                const Anchor* anchor = nullptr);

// W x 66 matrix of all joint positions.
ad::Tensor fk_joints_concat(const FkGraph& g);

// Object pose rows (W x 9) decoded to rotation (W x 9) + translation
// (W x 3), optionally decanonicalized by the anchor.
struct ObjectGraph {
    ad::Tensor rot;    // W x 9
    ad::Tensor trans;  // W x 3
};

ObjectGraph object_rows(const ad::Tensor& o_rows, const Anchor* anchor = nullptr);

}  // namespace hoistream
