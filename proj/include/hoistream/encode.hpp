#pragma once

#include <Eigen/Dense>

#include "hoistream/body.hpp"
#include "hoistream/diffusion.hpp"

namespace hoistream {

// Row encodings shared by training windows and the conveyor.
// human: [root rot6 (6), root trans (3), 21 x joint rot6] = 135
// object: [rot6 (6), trans (3)] = 9
// contact: [64 body, 4 foot] = 68 (reals; binarize at 0.5)

Eigen::RowVectorXd encode_human_row(const HumanFrame& f);
HumanFrame decode_human_row(const Eigen::RowVectorXd& row);

Eigen::RowVectorXd encode_object_row(const ObjectFrame& f);
ObjectFrame decode_object_row(const Eigen::RowVectorXd& row);

Eigen::RowVectorXd encode_contact_row(const ContactVector& c);
ContactVector decode_contact_row(const Eigen::RowVectorXd& row, double threshold = 0.5);

}  // namespace hoistream
