#pragma once

#include <Eigen/Dense>

#include "hoistream/body.hpp"

namespace hoistream {

inline constexpr int kObjectGeomDim = 64;

// Global object conditioning: class one-hot plus a fixed-size geometric
// summary of the canonical vertices (second moments, covariance spectrum,
// bounding box, radial histogram).
struct ObjectDescriptor {
    Eigen::VectorXd one_hot;  // class_count
    Eigen::VectorXd geom;     // kObjectGeomDim

    Eigen::VectorXd flat() const;
};

ObjectDescriptor object_descriptor(const ObjectTemplate& tpl);

}  // namespace hoistream
