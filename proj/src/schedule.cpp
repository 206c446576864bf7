#include "hoistream/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace hoistream {

ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "linear") return ScheduleKind::linear;
    if (s == "cosine") return ScheduleKind::cosine;
    throw InvalidConfig("unknown schedule kind: " + s);
}

std::string to_string(ScheduleKind k) {
    return k == ScheduleKind::linear ? "linear" : "cosine";
}

NoiseSchedule make_schedule(ScheduleKind kind, int T) {
    if (T < 1) throw InvalidT("schedule needs T >= 1");
    NoiseSchedule s;
    s.T = T;
    s.beta.assign(T + 1, 0.0);
    s.alpha.assign(T + 1, 1.0);
    s.alpha_bar.assign(T + 1, 1.0);
    if (kind == ScheduleKind::linear) {
        const double b0 = 1e-4, b1 = 0.02;
        for (int t = 1; t <= T; ++t) {
            s.beta[t] = T == 1 ? b0 : b0 + (b1 - b0) * (t - 1) / double(T - 1);
        }
    } else {
        const double eps = 0.008;
        auto f = [&](double t) {
            const double x = (t / T + eps) / (1 + eps) * M_PI / 2.0;
            return std::cos(x) * std::cos(x);
        };
        double prev = 1.0;
        for (int t = 1; t <= T; ++t) {
            const double ab = f(double(t)) / f(0.0);
            s.beta[t] = std::clamp(1.0 - ab / prev, 1e-8, 0.999);
            prev = ab;
        }
    }
    for (int t = 1; t <= T; ++t) {
        s.alpha[t] = 1.0 - s.beta[t];
        s.alpha_bar[t] = s.alpha_bar[t - 1] * s.alpha[t];
    }
    return s;
}

void TimestampGrid::check_widths() const {
    if (t_o.size() != t_h.size() || t_c.size() != t_h.size()) {
        throw WidthMismatch("timestamp grid rows differ in width");
    }
}

int ramp_step_quantum(int W, int T) {
    return std::max(1, static_cast<int>(std::lround(double(T) / W)));
}

std::vector<int> ramp_grid(int W, int T, int phase) {
    if (W < 1 || T < 1) throw InvalidT("ramp_grid needs W >= 1 and T >= 1");
    const int q = ramp_step_quantum(W, T);
    std::vector<int> out(W);
    for (int i = 0; i < W; ++i) {
        const long long v = static_cast<long long>((i + 1)) * T / W - static_cast<long long>(phase) * q;
        out[i] = static_cast<int>(std::clamp<long long>(v, 0, T));
    }
    return out;
}

TimestampGrid sample_training_grid(Rng& rng, int W, int T, double ramp_mix) {
    if (W < 1) throw InvalidT("grid needs W >= 1");
    if (ramp_mix < 0 || ramp_mix > 1) throw InvalidConfig("ramp_mix out of [0, 1]");
    TimestampGrid g;
    if (T >= 1 && rng.uniform() < ramp_mix) {
        const int q = ramp_step_quantum(W, T);
        const int phase = q > 1 ? rng.uniform_int(0, q - 1) : 0;
        g.t_h = ramp_grid(W, T, phase);
        g.t_o = g.t_h;
        g.t_c = g.t_h;
        return g;
    }
    g.t_h.resize(W);
    g.t_o.resize(W);
    g.t_c.resize(W);
    for (auto* row : {&g.t_h, &g.t_o, &g.t_c}) {
        for (int i = 0; i < W; ++i) (*row)[i] = rng.uniform_int(0, T);
    }
    return g;
}

TimestampGrid apply_observation_mask(const TimestampGrid& grid, const ObservationMask& mask) {
    grid.check_widths();
    const size_t W = grid.t_h.size();
    if (mask.h_obs.size() != W || mask.o_obs.size() != W || mask.c_obs.size() != W) {
        throw WidthMismatch("observation mask width differs from grid width");
    }
    TimestampGrid out = grid;
    for (size_t i = 0; i < W; ++i) {
        if (mask.h_obs[i]) out.t_h[i] = 0;
        if (mask.o_obs[i]) out.t_o[i] = 0;
        if (mask.c_obs[i]) out.t_c[i] = 0;
    }
    return out;
}

}  // namespace hoistream
