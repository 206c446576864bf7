#pragma once

#include <vector>

#include "hoistream/seq.hpp"

namespace hoistream {

struct MetricsReport {
    double mpjpe = 0;     // mm
    double mpjve = 0;     // mm per frame
    double fc = 0;        // fraction of grounded frames
    double e_v2v = 0;     // cm
    double e_c = 0;       // cm
    double rot_diff = 0;  // degrees
    double q_diff = 0;    // unitless L1
    bool has_object = false;
};

using JointSeq = std::vector<std::vector<Vec3>>;  // frames x joints

double mpjpe(const JointSeq& pred, const JointSeq& gt);
double mpjve(const JointSeq& pred, const JointSeq& gt);

// fraction of frames with any ankle within dist_thresh of the floor or any
// foot within height_thresh
double fc(const Skeleton& skel, const JointSeq& joints, double dist_thresh = 0.10,
          double height_thresh = 0.05);

double e_v2v(const std::vector<ObjectFrame>& pred, const std::vector<ObjectFrame>& gt,
             const ObjectTemplate& tpl);
double e_c(const std::vector<ObjectFrame>& pred, const std::vector<ObjectFrame>& gt,
           const ObjectTemplate& tpl);
double rot_diff(const std::vector<ObjectFrame>& pred, const std::vector<ObjectFrame>& gt);
double q_diff(const std::vector<ObjectFrame>& pred, const std::vector<ObjectFrame>& gt);

JointSeq joints_of(const Skeleton& skel, const InteractionSequence& seq);

MetricsReport evaluate_sequences(const Skeleton& skel, const InteractionSequence& pred,
                                 const InteractionSequence& gt);

}  // namespace hoistream
