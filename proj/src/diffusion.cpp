#include "hoistream/diffusion.hpp"

#include <cmath>

#include "hoistream/body.hpp"

namespace hoistream {

int modality_width(Modality m) {
    switch (m) {
        case Modality::human: return kHumanDim;
        case Modality::object: return kObjectDim;
        case Modality::contact: return kContactDim;
    }
    return 0;
}

void ModalityTensor::check(const char* where) const {
    if (data.cols() != modality_width(tag)) {
        throw ShapeMismatch(std::string(where) + ": modality width mismatch");
    }
    if (!data.allFinite()) {
        throw ShapeMismatch(std::string(where) + ": non-finite modality values");
    }
}

ModalityTensor make_modality(Modality tag, int W) {
    ModalityTensor m;
    m.tag = tag;
    m.data = Eigen::MatrixXd::Zero(W, modality_width(tag));
    return m;
}

namespace {

ModalityTensor mix_rows(const ModalityTensor& z, const std::vector<int>& t,
                        const Eigen::MatrixXd& eps, const NoiseSchedule& s, const char* where) {
    if (eps.rows() != z.data.rows() || eps.cols() != z.data.cols()) {
        throw ShapeMismatch(std::string(where) + ": noise shape mismatch");
    }
    if (static_cast<int>(t.size()) != z.frames()) {
        throw ShapeMismatch(std::string(where) + ": timestamp count mismatch");
    }
    ModalityTensor out = z;
    for (int i = 0; i < z.frames(); ++i) {
        if (t[i] < 0 || t[i] > s.T) throw ShapeMismatch(std::string(where) + ": timestep out of range");
        if (t[i] == 0) continue;  // exact pass-through, no noise
        const double ab = s.alpha_bar[t[i]];
        out.data.row(i) = std::sqrt(ab) * z.data.row(i) + std::sqrt(1.0 - ab) * eps.row(i);
    }
    return out;
}

}  // namespace

ModalityTensor forward_diffuse(const ModalityTensor& z0, const std::vector<int>& t,
                               const Eigen::MatrixXd& eps, const NoiseSchedule& s) {
    return mix_rows(z0, t, eps, s, "forward_diffuse");
}

ModalityTensor reverse_jump(const ModalityTensor& z0_hat, const std::vector<int>& t_to,
                            const Eigen::MatrixXd& eps, const NoiseSchedule& s) {
    return mix_rows(z0_hat, t_to, eps, s, "reverse_jump");
}

}  // namespace hoistream
