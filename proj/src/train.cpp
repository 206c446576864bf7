#include "hoistream/train.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace hoistream {

namespace {

using Eigen::MatrixXd;

MatrixXd randn(Rng& rng, Eigen::Index r, Eigen::Index c) {
    MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

struct ItemResult {
    std::map<std::string, MatrixXd> grads;
    LossBreakdown terms;
    bool finite = true;
};

ItemResult eval_item(const DenoiserParams& params, const TrainItem& item, const Skeleton& skel,
                     const NoiseSchedule& schedule, const LossWeights& weights,
                     const TrainConfig& cfg, uint64_t seed) {
    Rng rng(seed);
    const int W = static_cast<int>(item.h.rows());
    const int T = schedule.T;

    TimestampGrid grid = sample_training_grid(rng, W, T, cfg.ramp_mix);

    const MatrixXd eps_h = randn(rng, W, kHumanDim);
    const MatrixXd eps_o = randn(rng, W, kObjectDim);
    const MatrixXd eps_c = randn(rng, W, kContactDim);

    DenoiseInput in;
    ModalityTensor zh{Modality::human, item.h};
    in.h = forward_diffuse(zh, grid.t_h, eps_h, schedule).data;
    if (item.motion_only) {
        // no object data: those tokens are pure noise at t = T
        std::fill(grid.t_o.begin(), grid.t_o.end(), T);
        std::fill(grid.t_c.begin(), grid.t_c.end(), T);
        in.o = eps_o;
        in.c = eps_c;
    } else {
        ModalityTensor zo{Modality::object, item.o};
        ModalityTensor zc{Modality::contact, item.c};
        in.o = forward_diffuse(zo, grid.t_o, eps_o, schedule).data;
        in.c = forward_diffuse(zc, grid.t_c, eps_c, schedule).data;
    }
    in.t_h = grid.t_h;
    in.t_o = grid.t_o;
    in.t_c = grid.t_c;
    in.ego = item.ego;
    in.descriptor = item.descriptor;

    const DenoiseOutput out = denoise_forward(params, in);
    const LossGraph loss = loss_total(out, item.h, item.o, item.c, skel, item.tpl.get(),
                                      weights, item.motion_only);
    ItemResult res;
    res.terms = loss.values;
    if (!std::isfinite(loss.values.total)) {
        res.finite = false;
        return res;
    }
    ad::GradStore gs = ad::backward(loss.total);
    for (const auto& [name, t] : params.tensors) {
        const MatrixXd* g = gs.find(t);
        if (g != nullptr) res.grads.emplace(name, *g);
    }
    return res;
}

}  // namespace

StepResult train_step(DenoiserParams& params, const std::vector<TrainItem>& batch,
                      const Skeleton& skel, const NoiseSchedule& schedule,
                      const LossWeights& weights, const TrainConfig& cfg, Rng& rng,
                      AdamState& opt) {
    if (batch.empty()) throw InvalidConfig("train_step: empty batch");
    const int B = static_cast<int>(batch.size());

    std::vector<uint64_t> seeds(B);
    for (auto& s : seeds) s = rng.raw();

    std::vector<ItemResult> results(B);
    const int n_threads = std::max(1, std::min(cfg.threads, B));
    if (n_threads == 1) {
        for (int i = 0; i < B; ++i) {
            results[i] = eval_item(params, batch[i], skel, schedule, weights, cfg, seeds[i]);
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&]() {
                int i;
                while ((i = next.fetch_add(1)) < B) {
                    results[i] = eval_item(params, batch[i], skel, schedule, weights, cfg, seeds[i]);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    StepResult out;
    for (const auto& r : results) {
        if (!r.finite) throw NonFiniteLoss("train_step: non-finite loss");
        out.loss += r.terms.total / B;
        out.terms.h_n += r.terms.h_n / B;
        out.terms.o_n += r.terms.o_n / B;
        out.terms.i_n += r.terms.i_n / B;
        out.terms.o_v += r.terms.o_v / B;
        out.terms.h_j += r.terms.h_j / B;
        out.terms.h_s += r.terms.h_s / B;
    }
    out.terms.total = out.loss;

    // batch-mean gradients, reduced in item order
    std::map<std::string, MatrixXd> grad;
    for (const auto& [name, t] : params.tensors) {
        grad.emplace(name, MatrixXd::Zero(t.rows(), t.cols()));
    }
    for (const auto& r : results) {
        for (const auto& [name, g] : r.grads) grad.at(name) += g;
    }

    opt.step += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, double(opt.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, double(opt.step));
    for (auto& [name, t] : params.tensors) {
        MatrixXd g = grad.at(name) / B;
        auto mit = opt.m.find(name);
        if (mit == opt.m.end()) {
            mit = opt.m.emplace(name, MatrixXd::Zero(t.rows(), t.cols())).first;
            opt.v.emplace(name, MatrixXd::Zero(t.rows(), t.cols()));
        }
        MatrixXd& m = mit->second;
        MatrixXd& v = opt.v.at(name);
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
        const MatrixXd mhat = m / c1;
        MatrixXd denom = (v / c2).cwiseSqrt();
        denom.array() += cfg.adam_eps;
        t.mutable_val() -= cfg.lr * (mhat.cwiseQuotient(denom) + cfg.weight_decay * t.val());
    }
    return out;
}

}  // namespace hoistream
