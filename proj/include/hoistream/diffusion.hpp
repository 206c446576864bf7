#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hoistream/schedule.hpp"

namespace hoistream {

enum class Modality { human, object, contact };

inline constexpr int kHumanDim = 9 + 21 * 6;  // root (rot6 + trans) + 21 joint rot6
inline constexpr int kObjectDim = 9;          // rot6 + trans
// contact width is kContactDim (68), defined with the body module

int modality_width(Modality m);

// W x D block of per-frame values for one modality. Contacts are carried
// as real-valued relaxations of {0,1} while diffused.
struct ModalityTensor {
    Modality tag = Modality::human;
    Eigen::MatrixXd data;

    int frames() const { return static_cast<int>(data.rows()); }
    void check(const char* where) const;
};

ModalityTensor make_modality(Modality tag, int W);

// z_t = sqrt(abar_t) z_0 + sqrt(1 - abar_t) eps, per frame; t = 0 rows are
// returned exactly as z_0.
ModalityTensor forward_diffuse(const ModalityTensor& z0, const std::vector<int>& t,
                               const Eigen::MatrixXd& eps, const NoiseSchedule& s);

// Jump from a predicted clean sample to an arbitrary target timestep; the
// same mixing formula, so t_to = 0 returns z0_hat exactly (no noise).
ModalityTensor reverse_jump(const ModalityTensor& z0_hat, const std::vector<int>& t_to,
                            const Eigen::MatrixXd& eps, const NoiseSchedule& s);

}  // namespace hoistream
