#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hoistream/loss.hpp"
#include "hoistream/model.hpp"

using namespace hoistream;

namespace {

Eigen::MatrixXd randn(Rng& rng, int r, int c, double s = 1.0) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = s * rng.normal();
    return m;
}

DenoiserConfig tiny_config() {
    DenoiserConfig cfg;
    cfg.d_model = 16;
    cfg.n_heads = 2;
    cfg.n_blocks = 2;
    cfg.ff_mult = 2;
    cfg.W = 4;
    cfg.T = 8;
    return cfg;
}

DenoiseInput random_input(Rng& rng, const DenoiserConfig& cfg, int m) {
    DenoiseInput in;
    in.h = randn(rng, m, kHumanDim);
    in.o = randn(rng, m, kObjectDim);
    in.c = randn(rng, m, kContactDim);
    in.ego = randn(rng, m, 54);
    in.descriptor = Eigen::VectorXd::Zero(cfg.descriptor_dim());
    in.descriptor[3] = 1.0;
    for (int i = 0; i < kObjectGeomDim; ++i) in.descriptor[cfg.class_count + i] = rng.normal();
    in.t_h.assign(m, 0);
    in.t_o.assign(m, 0);
    in.t_c.assign(m, 0);
    for (int i = 0; i < m; ++i) {
        in.t_h[i] = rng.uniform_int(0, cfg.T);
        in.t_o[i] = rng.uniform_int(0, cfg.T);
        in.t_c[i] = rng.uniform_int(0, cfg.T);
    }
    return in;
}

}  // namespace

TEST_CASE("token layout: count, locality, and the global conditioning token") {
    Rng rng(201);
    const DenoiserConfig cfg = tiny_config();
    DenoiserParams params = DenoiserParams::init(cfg, rng);
    const int m = 4;
    DenoiseInput in = random_input(rng, cfg, m);

    const TokenBatch tb = build_tokens(params, in);
    CHECK(tb.tokens.rows() == 3 * m + 1);
    CHECK(tb.tokens.cols() == cfg.d_model);
    CHECK(tb.cond.rows() == 3 * m + 1);

    // changing t_h[3] only moves the h_3 token (and its conditioning row)
    DenoiseInput in2 = in;
    in2.t_h[3] = (in.t_h[3] + 1) % (cfg.T + 1);
    const TokenBatch tb2 = build_tokens(params, in2);
    for (int r = 0; r < tb.tokens.rows(); ++r) {
        const bool differs = (tb.tokens.val().row(r) - tb2.tokens.val().row(r)).norm() > 0;
        CHECK(differs == (r == 1 + 3));
    }

    // permuting the one-hot class changes only the global token
    DenoiseInput in3 = in;
    in3.descriptor[3] = 0.0;
    in3.descriptor[7] = 1.0;
    const TokenBatch tb3 = build_tokens(params, in3);
    for (int r = 0; r < tb.tokens.rows(); ++r) {
        const bool differs = (tb.tokens.val().row(r) - tb3.tokens.val().row(r)).norm() > 0;
        CHECK(differs == (r == 0));
    }
}

TEST_CASE("denoise_forward output shapes and zero heads") {
    Rng rng(202);
    const DenoiserConfig cfg = tiny_config();
    DenoiserParams params = DenoiserParams::init(cfg, rng);
    const int m = 3;
    DenoiseInput in = random_input(rng, cfg, m);

    const DenoiseOutput out = denoise_forward(params, in);
    CHECK(out.h0.rows() == m);
    CHECK(out.h0.cols() == 135);
    CHECK(out.o0.cols() == 9);
    CHECK(out.c0.cols() == 68);

    // heads are zero-initialized: outputs are exactly zero whatever the input
    CHECK(out.h0.val().cwiseAbs().maxCoeff() == 0);
    CHECK(out.o0.val().cwiseAbs().maxCoeff() == 0);
    CHECK(out.c0.val().cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("same-valued tokens with embeddings zeroed produce identical outputs") {
    Rng rng(203);
    const DenoiserConfig cfg = tiny_config();
    DenoiserParams params = DenoiserParams::init(cfg, rng);
    params.at("emb.time").mutable_val().setZero();
    params.at("emb.frame").mutable_val().setZero();
    params.at("emb.modality").mutable_val().setZero();
    // make the heads nontrivial
    params.at("head.h.w").mutable_val() = randn(rng, cfg.d_model, kHumanDim, 0.3);

    const int m = 4;
    DenoiseInput in = random_input(rng, cfg, m);
    // identical frame values everywhere
    for (int r = 1; r < m; ++r) {
        in.h.row(r) = in.h.row(0);
        in.o.row(r) = in.o.row(0);
        in.c.row(r) = in.c.row(0);
        in.ego.row(r) = in.ego.row(0);
    }
    const DenoiseOutput out = denoise_forward(params, in);
    for (int r = 1; r < m; ++r) {
        CHECK((out.h0.val().row(r) - out.h0.val().row(0)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("windows narrower than W and contact-free variant") {
    Rng rng(204);
    DenoiserConfig cfg = tiny_config();
    DenoiserParams params = DenoiserParams::init(cfg, rng);
    DenoiseInput in = random_input(rng, cfg, 2);
    in.positions = {1, 3};
    const DenoiseOutput out = denoise_forward(params, in);
    CHECK(out.h0.rows() == 2);

    cfg.contact_modality = false;
    DenoiserParams params2 = DenoiserParams::init(cfg, rng);
    const TokenBatch tb = build_tokens(params2, in);
    CHECK(tb.tokens.rows() == 2 * 2 + 1);
    const DenoiseOutput out2 = denoise_forward(params2, in);
    CHECK(out2.c0.val().cwiseAbs().maxCoeff() == 0);

    DenoiseInput bad = random_input(rng, cfg, 2);
    bad.t_h = {0};
    CHECK_THROWS_AS(denoise_forward(params, bad), WidthMismatch);
}

TEST_CASE("full denoiser gradient check on a sampled parameter subset") {
    Rng rng(205);
    DenoiserConfig cfg = tiny_config();
    cfg.n_blocks = 1;
    DenoiserParams params = DenoiserParams::init(cfg, rng);
    // nonzero heads so gradients reach every layer
    params.at("head.h.w").mutable_val() = randn(rng, cfg.d_model, kHumanDim, 0.2);
    params.at("head.o.w").mutable_val() = randn(rng, cfg.d_model, kObjectDim, 0.2);
    params.at("head.c.w").mutable_val() = randn(rng, cfg.d_model, kContactDim, 0.2);
    params.at("block0.mod.w").mutable_val() = randn(rng, cfg.d_model, 4 * cfg.d_model, 0.1);

    const int m = 3;
    const DenoiseInput in = random_input(rng, cfg, m);
    const Eigen::MatrixXd probe_h = randn(rng, m, kHumanDim);
    const Eigen::MatrixXd probe_o = randn(rng, m, kObjectDim);
    const Eigen::MatrixXd probe_c = randn(rng, m, kContactDim);

    auto scalar_loss = [&]() {
        const DenoiseOutput out = denoise_forward(params, in);
        using ad::Tensor;
        Tensor s = ad::sum(ad::mul(out.h0, ad::constant(probe_h)));
        s = ad::add(s, ad::sum(ad::mul(out.o0, ad::constant(probe_o))));
        s = ad::add(s, ad::sum(ad::mul(out.c0, ad::constant(probe_c))));
        return s;
    };

    ad::Tensor loss = scalar_loss();
    ad::GradStore gs = ad::backward(loss);

    const double h = 1e-5;
    int checked = 0;
    for (auto& [name, t] : params.tensors) {
        const Eigen::MatrixXd analytic = gs.get(t);
        for (int trial = 0; trial < 4; ++trial) {
            const int i = rng.uniform_int(0, t.rows() - 1);
            const int j = rng.uniform_int(0, t.cols() - 1);
            const double keep = t.val()(i, j);
            t.mutable_val()(i, j) = keep + h;
            const double up = scalar_loss().val()(0, 0);
            t.mutable_val()(i, j) = keep - h;
            const double dn = scalar_loss().val()(0, 0);
            t.mutable_val()(i, j) = keep;
            const double numeric = (up - dn) / (2 * h);
            CHECK(std::abs(analytic(i, j) - numeric) <=
                  1e-4 * std::max(1.0, std::abs(numeric)));
            ++checked;
        }
    }
    CHECK(checked >= 100);
}
