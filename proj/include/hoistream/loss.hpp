#pragma once

#include "hoistream/fkgraph.hpp"
#include "hoistream/model.hpp"

namespace hoistream {

struct LossWeights {
    double l_h_n = 1.0;
    double l_o_n = 1.0;
    double l_i_n = 1.0;
    double l_o_v = 0.1;
    double l_h_j = 0.1;
    double l_h_s = 0.05;
};

struct LossBreakdown {
    double h_n = 0, o_n = 0, i_n = 0, o_v = 0, h_j = 0, h_s = 0;
    double total = 0;
};

struct LossGraph {
    ad::Tensor total;  // 1x1, differentiable
    LossBreakdown values;
};

// Six-term training loss over one window. Targets are plain matrices in
// the same row encodings as the predictions; the ground-truth foot labels
// gating the foot-skating term come from the last 4 contact columns.
// motion_only drops the object and contact terms.
LossGraph loss_total(const DenoiseOutput& pred, const Eigen::MatrixXd& h_target,
                     const Eigen::MatrixXd& o_target, const Eigen::MatrixXd& c_target,
                     const Skeleton& skel, const ObjectTemplate* tpl, const LossWeights& w,
                     bool motion_only);

}  // namespace hoistream
