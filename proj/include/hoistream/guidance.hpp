#pragma once

#include <optional>
#include <vector>

#include "hoistream/canon.hpp"
#include "hoistream/diffusion.hpp"

namespace hoistream {

struct GuidanceConfig {
    bool enabled = true;
    double scale = 1e-2;  // gradient step size
    double tau_c = 0.05;
    double tau_f = 0.05;
};

struct GuidedCorrection {
    ModalityTensor h0, o0;
    double loss_before = 0;  // L_guide at the uncorrected prediction
    bool applied = false;
};

// One gradient step pulling predicted human/object geometry toward the
// predicted contact labels: active body contacts minimize point-to-object
// distance, active foot labels minimize world foot height. Contacts are
// binarized at 0.5 and never modified. Rows are canonical; the anchor maps
// them to world coordinates inside the differentiated graph. frame_mask,
// when given, restricts the loss to the flagged frames.
GuidedCorrection guided_correction(const ModalityTensor& h0, const ModalityTensor& o0,
                                   const ModalityTensor& c0, const Skeleton& skel,
                                   const ObjectTemplate& tpl, const Anchor& anchor,
                                   const GuidanceConfig& cfg,
                                   const std::vector<uint8_t>* frame_mask = nullptr);

// The same objective evaluated on decoded world-frame sequences (used to
// score final outputs).
double guidance_loss(const Skeleton& skel, const std::vector<HumanFrame>& human,
                     const ObjectTemplate* tpl, const std::vector<ObjectFrame>* object,
                     const std::vector<ContactVector>& contacts, double tau_unused = 0);

}  // namespace hoistream
