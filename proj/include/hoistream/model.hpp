#pragma once

#include <map>
#include <string>
#include <vector>

#include "hoistream/autodiff.hpp"
#include "hoistream/descriptor.hpp"
#include "hoistream/diffusion.hpp"
#include "hoistream/rng.hpp"

namespace hoistream {

// Transformer denoiser over one token per frame per modality plus one
// global conditioning token. Every token carries its own diffusion
// timestamp, which also drives per-token adaptive scale/shift in each
// block.
struct DenoiserConfig {
    int d_model = 128;
    int n_heads = 4;
    int n_blocks = 4;
    int ff_mult = 4;
    int W = 60;   // maximum window (frame position table size)
    int T = 100;  // timestep table size
    int class_count = 33;
    bool contact_modality = true;

    int descriptor_dim() const { return class_count + kObjectGeomDim; }
    void validate() const;
};

struct DenoiserParams {
    DenoiserConfig cfg;
    std::map<std::string, ad::Tensor> tensors;

    static DenoiserParams init(const DenoiserConfig& cfg, Rng& rng);

    ad::Tensor& at(const std::string& name);
    const ad::Tensor& at(const std::string& name) const;
    long parameter_count() const;
};

struct DenoiseInput {
    Eigen::MatrixXd h, o, c;  // m x width noisy values
    std::vector<int> t_h, t_o, t_c;
    Eigen::MatrixXd ego;            // m x 54
    Eigen::VectorXd descriptor;     // class_count + 64
    std::vector<int> positions;     // m slot positions in [0, W); empty = iota

    int frames() const { return static_cast<int>(h.rows()); }
    void validate(const DenoiserConfig& cfg) const;
};

struct TokenBatch {
    ad::Tensor tokens;  // (n_tok, d)
    ad::Tensor cond;    // (n_tok, d): per-token timestamp conditioning
    int m = 0;          // frames in the window
};

TokenBatch build_tokens(const DenoiserParams& params, const DenoiseInput& in);

struct DenoiseOutput {
    ad::Tensor h0, o0, c0;
};

DenoiseOutput denoise_forward(const DenoiserParams& params, const DenoiseInput& in);

struct DenoisePredict {
    Eigen::MatrixXd h0, o0, c0;
};

// Inference-mode forward (no tape).
DenoisePredict denoise_predict(const DenoiserParams& params, const DenoiseInput& in);

}  // namespace hoistream
