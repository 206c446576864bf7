#include "hoistream/model.hpp"

#include <cmath>

#include "hoistream/body.hpp"
#include "hoistream/canon.hpp"

namespace hoistream {

namespace {

using ad::Tensor;
using Eigen::MatrixXd;

MatrixXd xavier(Rng& rng, int in, int out) {
    const double s = std::sqrt(6.0 / (in + out));
    MatrixXd m(in, out);
    for (int i = 0; i < in; ++i)
        for (int j = 0; j < out; ++j) m(i, j) = s * (2 * rng.uniform() - 1);
    return m;
}

MatrixXd gaussian(Rng& rng, int r, int c, double std) {
    MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = std * rng.normal();
    return m;
}

}  // namespace

void DenoiserConfig::validate() const {
    if (d_model < 1 || n_heads < 1 || d_model % n_heads != 0) {
        throw InvalidConfig("d_model must be a positive multiple of n_heads");
    }
    if (n_blocks < 1 || ff_mult < 1 || W < 1 || T < 1 || class_count < 1) {
        throw InvalidConfig("denoiser dimensions must be positive");
    }
}

DenoiserParams DenoiserParams::init(const DenoiserConfig& cfg, Rng& rng) {
    cfg.validate();
    DenoiserParams p;
    p.cfg = cfg;
    const int d = cfg.d_model;
    auto w = [&](const std::string& name, MatrixXd v) {
        p.tensors.emplace(name, ad::param(std::move(v)));
    };

    w("embed.h.w", xavier(rng, kHumanDim, d));
    w("embed.h.b", MatrixXd::Zero(1, d));
    w("embed.o.w", xavier(rng, kObjectDim, d));
    w("embed.o.b", MatrixXd::Zero(1, d));
    w("embed.c.w", xavier(rng, kContactDim, d));
    w("embed.c.b", MatrixXd::Zero(1, d));
    w("embed.ego.w", xavier(rng, 54, d));
    w("embed.ego.b", MatrixXd::Zero(1, d));
    w("embed.od.w", xavier(rng, cfg.descriptor_dim(), d));
    w("embed.od.b", MatrixXd::Zero(1, d));

    w("emb.time", gaussian(rng, cfg.T + 1, d, 0.02));
    w("emb.frame", gaussian(rng, cfg.W, d, 0.02));
    w("emb.modality", gaussian(rng, 3, d, 0.02));

    for (int b = 0; b < cfg.n_blocks; ++b) {
        const std::string pre = "block" + std::to_string(b) + ".";
        w(pre + "attn.qkv.w", xavier(rng, d, 3 * d));
        w(pre + "attn.qkv.b", MatrixXd::Zero(1, 3 * d));
        w(pre + "attn.out.w", xavier(rng, d, d));
        w(pre + "attn.out.b", MatrixXd::Zero(1, d));
        w(pre + "mlp.fc1.w", xavier(rng, d, cfg.ff_mult * d));
        w(pre + "mlp.fc1.b", MatrixXd::Zero(1, cfg.ff_mult * d));
        w(pre + "mlp.fc2.w", xavier(rng, cfg.ff_mult * d, d));
        w(pre + "mlp.fc2.b", MatrixXd::Zero(1, d));
        // adaptive scale/shift starts at identity modulation
        w(pre + "mod.w", MatrixXd::Zero(d, 4 * d));
        w(pre + "mod.b", MatrixXd::Zero(1, 4 * d));
    }

    // output heads start at zero
    w("head.h.w", MatrixXd::Zero(d, kHumanDim));
    w("head.h.b", MatrixXd::Zero(1, kHumanDim));
    w("head.o.w", MatrixXd::Zero(d, kObjectDim));
    w("head.o.b", MatrixXd::Zero(1, kObjectDim));
    w("head.c.w", MatrixXd::Zero(d, kContactDim));
    w("head.c.b", MatrixXd::Zero(1, kContactDim));
    return p;
}

ad::Tensor& DenoiserParams::at(const std::string& name) {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw InvalidConfig("unknown parameter: " + name);
    return it->second;
}

const ad::Tensor& DenoiserParams::at(const std::string& name) const {
    auto it = tensors.find(name);
    if (it == tensors.end()) throw InvalidConfig("unknown parameter: " + name);
    return it->second;
}

long DenoiserParams::parameter_count() const {
    long n = 0;
    for (const auto& [name, t] : tensors) n += t.val().size();
    return n;
}

void DenoiseInput::validate(const DenoiserConfig& cfg) const {
    const int m = frames();
    if (m < 1 || m > cfg.W) throw WidthMismatch("window size out of [1, W]");
    if (o.rows() != m || c.rows() != m || ego.rows() != m) {
        throw WidthMismatch("modality row counts differ");
    }
    if (h.cols() != kHumanDim || o.cols() != kObjectDim || c.cols() != kContactDim ||
        ego.cols() != kEgoDim) {
        throw WidthMismatch("modality widths are wrong");
    }
    if (static_cast<int>(t_h.size()) != m || static_cast<int>(t_o.size()) != m ||
        static_cast<int>(t_c.size()) != m) {
        throw WidthMismatch("timestamp rows differ from window size");
    }
    if (descriptor.size() != cfg.descriptor_dim()) {
        throw WidthMismatch("descriptor size mismatch");
    }
    if (!positions.empty() && static_cast<int>(positions.size()) != m) {
        throw WidthMismatch("positions size mismatch");
    }
    for (int t : t_h) if (t < 0 || t > cfg.T) throw WidthMismatch("t_h out of range");
    for (int t : t_o) if (t < 0 || t > cfg.T) throw WidthMismatch("t_o out of range");
    for (int t : t_c) if (t < 0 || t > cfg.T) throw WidthMismatch("t_c out of range");
}

namespace {

Tensor modality_tokens(const DenoiserParams& p, const MatrixXd& values, const char* embed,
                       const std::vector<int>& t, int modality_row, const Tensor& pos_emb,
                       const Tensor& ego_proj) {
    Tensor tok = ad::add(ad::matmul(ad::constant(values), p.at(std::string("embed.") + embed + ".w")),
                         p.at(std::string("embed.") + embed + ".b"));
    tok = ad::add(tok, ad::gather_rows(p.at("emb.time"), t));
    tok = ad::add(tok, pos_emb);
    tok = ad::add(tok, ad::slice_rows(p.at("emb.modality"), modality_row, 1));
    return ad::add(tok, ego_proj);
}

Tensor attention(const DenoiserParams& p, const std::string& pre, const Tensor& x) {
    const int d = p.cfg.d_model;
    const int H = p.cfg.n_heads;
    const int dh = d / H;
    Tensor qkv = ad::add(ad::matmul(x, p.at(pre + "attn.qkv.w")), p.at(pre + "attn.qkv.b"));
    std::vector<Tensor> heads;
    heads.reserve(H);
    for (int h = 0; h < H; ++h) {
        Tensor q = ad::slice_cols(qkv, h * dh, dh);
        Tensor k = ad::slice_cols(qkv, d + h * dh, dh);
        Tensor v = ad::slice_cols(qkv, 2 * d + h * dh, dh);
        Tensor scores = ad::scale(ad::matmul(q, k, false, true), 1.0 / std::sqrt(double(dh)));
        heads.push_back(ad::matmul(ad::softmax(scores), v));
    }
    Tensor cat = ad::concat_cols(heads);
    return ad::add(ad::matmul(cat, p.at(pre + "attn.out.w")), p.at(pre + "attn.out.b"));
}

Tensor modulate(const Tensor& x_norm, const Tensor& shift, const Tensor& scl) {
    return ad::add(ad::mul(x_norm, ad::add_const(scl, 1.0)), shift);
}

}  // namespace

TokenBatch build_tokens(const DenoiserParams& p, const DenoiseInput& in) {
    in.validate(p.cfg);
    const int m = in.frames();
    std::vector<int> pos = in.positions;
    if (pos.empty()) {
        pos.resize(m);
        for (int i = 0; i < m; ++i) pos[i] = i;
    }

    Tensor pos_emb = ad::gather_rows(p.at("emb.frame"), pos);
    Tensor ego_proj = ad::add(ad::matmul(ad::constant(in.ego), p.at("embed.ego.w")),
                              p.at("embed.ego.b"));

    Tensor global = ad::add(
        ad::matmul(ad::constant(in.descriptor.transpose()), p.at("embed.od.w")),
        p.at("embed.od.b"));

    std::vector<Tensor> parts{global};
    std::vector<int> cond_t{0};  // the global token is conditioned as clean
    parts.push_back(modality_tokens(p, in.h, "h", in.t_h, 0, pos_emb, ego_proj));
    cond_t.insert(cond_t.end(), in.t_h.begin(), in.t_h.end());
    parts.push_back(modality_tokens(p, in.o, "o", in.t_o, 1, pos_emb, ego_proj));
    cond_t.insert(cond_t.end(), in.t_o.begin(), in.t_o.end());
    if (p.cfg.contact_modality) {
        parts.push_back(modality_tokens(p, in.c, "c", in.t_c, 2, pos_emb, ego_proj));
        cond_t.insert(cond_t.end(), in.t_c.begin(), in.t_c.end());
    }

    TokenBatch out;
    out.tokens = ad::concat_rows(parts);
    out.cond = ad::gather_rows(p.at("emb.time"), cond_t);
    out.m = m;
    return out;
}

DenoiseOutput denoise_forward(const DenoiserParams& p, const DenoiseInput& in) {
    const TokenBatch tb = build_tokens(p, in);
    const int d = p.cfg.d_model;
    const int m = tb.m;

    Tensor cond_act = ad::gelu(tb.cond);
    Tensor x = tb.tokens;
    for (int b = 0; b < p.cfg.n_blocks; ++b) {
        const std::string pre = "block" + std::to_string(b) + ".";
        Tensor mod = ad::add(ad::matmul(cond_act, p.at(pre + "mod.w")), p.at(pre + "mod.b"));
        Tensor shift_a = ad::slice_cols(mod, 0, d);
        Tensor scale_a = ad::slice_cols(mod, d, d);
        Tensor shift_m = ad::slice_cols(mod, 2 * d, d);
        Tensor scale_m = ad::slice_cols(mod, 3 * d, d);

        x = ad::add(x, attention(p, pre, modulate(ad::layer_norm(x), shift_a, scale_a)));
        Tensor hidden = ad::gelu(ad::add(
            ad::matmul(modulate(ad::layer_norm(x), shift_m, scale_m), p.at(pre + "mlp.fc1.w")),
            p.at(pre + "mlp.fc1.b")));
        Tensor ffn = ad::add(ad::matmul(hidden, p.at(pre + "mlp.fc2.w")), p.at(pre + "mlp.fc2.b"));
        x = ad::add(x, ffn);
    }
    x = ad::layer_norm(x);

    DenoiseOutput out;
    out.h0 = ad::add(ad::matmul(ad::slice_rows(x, 1, m), p.at("head.h.w")), p.at("head.h.b"));
    out.o0 = ad::add(ad::matmul(ad::slice_rows(x, 1 + m, m), p.at("head.o.w")), p.at("head.o.b"));
    if (p.cfg.contact_modality) {
        out.c0 = ad::add(ad::matmul(ad::slice_rows(x, 1 + 2 * m, m), p.at("head.c.w")),
                         p.at("head.c.b"));
    } else {
        out.c0 = ad::constant(MatrixXd::Zero(m, kContactDim));
    }
    return out;
}

DenoisePredict denoise_predict(const DenoiserParams& p, const DenoiseInput& in) {
    ad::NoGradGuard guard;
    const DenoiseOutput out = denoise_forward(p, in);
    return DenoisePredict{out.h0.val(), out.o0.val(), out.c0.val()};
}

}  // namespace hoistream
