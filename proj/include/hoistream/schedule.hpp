#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hoistream/errors.hpp"
#include "hoistream/rng.hpp"

namespace hoistream {

// DDPM beta/alpha tables, indexed 0..T with the t=0 row meaning "clean"
// (beta[0] = 0, alpha_bar[0] = 1).
struct NoiseSchedule {
    int T = 0;
    std::vector<double> beta;       // size T+1
    std::vector<double> alpha;      // size T+1
    std::vector<double> alpha_bar;  // size T+1, strictly decreasing
};

enum class ScheduleKind { linear, cosine };

ScheduleKind schedule_kind_from_string(const std::string& s);
std::string to_string(ScheduleKind k);

NoiseSchedule make_schedule(ScheduleKind kind, int T);

// Per-frame, per-modality diffusion timestamps for a window of width W.
struct TimestampGrid {
    std::vector<int> t_h, t_o, t_c;

    int width() const { return static_cast<int>(t_h.size()); }
    void check_widths() const;
};

struct ObservationMask {
    std::vector<uint8_t> h_obs, o_obs, c_obs;

    static ObservationMask none(int W) {
        return {std::vector<uint8_t>(W, 0), std::vector<uint8_t>(W, 0), std::vector<uint8_t>(W, 0)};
    }
};

int ramp_step_quantum(int W, int T);

// Conveyor ramp: timestamps grow toward the tail of the window, reaching T
// at the last slot when phase = 0. Nondecreasing, clamped to [0, T].
std::vector<int> ramp_grid(int W, int T, int phase);

// Training-time grid: iid uniform timestamps with probability 1-ramp_mix,
// otherwise the conveyor ramp with a random phase shared by all three
// modalities.
TimestampGrid sample_training_grid(Rng& rng, int W, int T, double ramp_mix);

TimestampGrid apply_observation_mask(const TimestampGrid& grid, const ObservationMask& mask);

}  // namespace hoistream
