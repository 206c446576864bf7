#pragma once

#include <string>

#include "hoistream/train.hpp"

namespace hoistream {

// ckpt/1: magic + JSON header (config echo, tensor table, step, seed)
// followed by raw little-endian float64 blocks for parameters and the two
// optimizer moment sets. Lossless, so resuming continues bitwise.
void save_checkpoint(const std::string& path, const DenoiserParams& params,
                     const AdamState& opt, long train_step, uint64_t base_seed,
                     const std::string& config_echo_json);

struct LoadedCheckpoint {
    DenoiserParams params;
    AdamState opt;
    long train_step = 0;
    uint64_t base_seed = 0;
    std::string config_echo;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace hoistream
