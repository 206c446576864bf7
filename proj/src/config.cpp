#include "hoistream/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>

namespace hoistream {

using nlohmann::json;

void RunConfig::validate() const {
    if (T < 1 || W < 1) throw InvalidConfig("T and W must be >= 1");
    if (ramp_mix < 0 || ramp_mix > 1) throw InvalidConfig("ramp_mix out of [0, 1]");
    if (context_frames < 0 || context_frames >= W) throw InvalidConfig("need 0 <= K < W");
    if (batch < 1 || steps < 0 || threads < 1) throw InvalidConfig("bad training sizes");
    if (fps <= 0) throw InvalidConfig("fps must be positive");
    if (guidance.scale <= 0) throw InvalidConfig("guidance scale must be positive");
    denoiser_config().validate();
    schedule_kind_from_string(schedule_kind);
}

LossWeights RunConfig::effective_loss() const {
    LossWeights w = loss;
    if (no_aux_loss) {
        w.l_o_v = 0;
        w.l_h_j = 0;
        w.l_h_s = 0;
    }
    if (no_contact_modality) w.l_i_n = 0;
    return w;
}

GuidanceConfig RunConfig::effective_guidance() const {
    GuidanceConfig g = guidance;
    if (no_guidance || no_contact_modality) g.enabled = false;
    return g;
}

DenoiserConfig RunConfig::denoiser_config() const {
    DenoiserConfig c;
    c.d_model = d_model;
    c.n_heads = n_heads;
    c.n_blocks = n_blocks;
    c.ff_mult = ff_mult;
    c.W = W;
    c.T = T;
    c.class_count = object_class_count;
    c.contact_modality = !no_contact_modality;
    return c;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig t;
    t.lr = lr;
    t.weight_decay = weight_decay;
    t.ramp_mix = ramp_mix;
    t.threads = threads;
    return t;
}

NoiseSchedule RunConfig::noise_schedule() const {
    return make_schedule(schedule_kind_from_string(schedule_kind), T);
}

std::string config_to_json(const RunConfig& c) {
    json j;
    j["schedule"] = {{"kind", c.schedule_kind}, {"T", c.T}};
    j["W"] = c.W;
    j["ramp_mix"] = c.ramp_mix;
    j["model"] = {{"d_model", c.d_model},
                  {"n_heads", c.n_heads},
                  {"n_blocks", c.n_blocks},
                  {"ff_mult", c.ff_mult}};
    j["loss"] = {{"l_h_n", c.loss.l_h_n}, {"l_o_n", c.loss.l_o_n}, {"l_i_n", c.loss.l_i_n},
                 {"l_o_v", c.loss.l_o_v}, {"l_h_j", c.loss.l_h_j}, {"l_h_s", c.loss.l_h_s}};
    j["guidance"] = {{"enabled", c.guidance.enabled},
                     {"scale", c.guidance.scale},
                     {"tau_c", c.guidance.tau_c},
                     {"tau_f", c.guidance.tau_f}};
    j["context_frames"] = c.context_frames;
    j["seed"] = c.seed;
    j["fps"] = c.fps;
    j["train"] = {{"batch", c.batch},
                  {"steps", c.steps},
                  {"lr", c.lr},
                  {"weight_decay", c.weight_decay},
                  {"threads", c.threads}};
    j["ablation"] = {{"no_guidance", c.no_guidance},
                     {"no_contact_modality", c.no_contact_modality},
                     {"no_canonicalization", c.no_canonicalization},
                     {"no_aux_loss", c.no_aux_loss}};
    j["object"] = {{"class_count", c.object_class_count}, {"vertices", c.object_vertices}};
    return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw FormatError("config is not valid json");
    RunConfig c;
    try {
        if (j.contains("schedule")) {
            c.schedule_kind = j["schedule"].value("kind", c.schedule_kind);
            c.T = j["schedule"].value("T", c.T);
        }
        c.W = j.value("W", c.W);
        c.ramp_mix = j.value("ramp_mix", c.ramp_mix);
        if (j.contains("model")) {
            const auto& m = j["model"];
            c.d_model = m.value("d_model", c.d_model);
            c.n_heads = m.value("n_heads", c.n_heads);
            c.n_blocks = m.value("n_blocks", c.n_blocks);
            c.ff_mult = m.value("ff_mult", c.ff_mult);
        }
        if (j.contains("loss")) {
            const auto& l = j["loss"];
            c.loss.l_h_n = l.value("l_h_n", c.loss.l_h_n);
            c.loss.l_o_n = l.value("l_o_n", c.loss.l_o_n);
            c.loss.l_i_n = l.value("l_i_n", c.loss.l_i_n);
            c.loss.l_o_v = l.value("l_o_v", c.loss.l_o_v);
            c.loss.l_h_j = l.value("l_h_j", c.loss.l_h_j);
            c.loss.l_h_s = l.value("l_h_s", c.loss.l_h_s);
        }
        if (j.contains("guidance")) {
            const auto& g = j["guidance"];
            c.guidance.enabled = g.value("enabled", c.guidance.enabled);
            c.guidance.scale = g.value("scale", c.guidance.scale);
            c.guidance.tau_c = g.value("tau_c", c.guidance.tau_c);
            c.guidance.tau_f = g.value("tau_f", c.guidance.tau_f);
        }
        c.context_frames = j.value("context_frames", c.context_frames);
        c.seed = j.value("seed", c.seed);
        c.fps = j.value("fps", c.fps);
        if (j.contains("train")) {
            const auto& t = j["train"];
            c.batch = t.value("batch", c.batch);
            c.steps = t.value("steps", c.steps);
            c.lr = t.value("lr", c.lr);
            c.weight_decay = t.value("weight_decay", c.weight_decay);
            c.threads = t.value("threads", c.threads);
        }
        if (j.contains("ablation")) {
            const auto& a = j["ablation"];
            c.no_guidance = a.value("no_guidance", c.no_guidance);
            c.no_contact_modality = a.value("no_contact_modality", c.no_contact_modality);
            c.no_canonicalization = a.value("no_canonicalization", c.no_canonicalization);
            c.no_aux_loss = a.value("no_aux_loss", c.no_aux_loss);
        }
        if (j.contains("object")) {
            c.object_class_count = j["object"].value("class_count", c.object_class_count);
            c.object_vertices = j["object"].value("vertices", c.object_vertices);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad config: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path_or_empty) {
    RunConfig c;
    if (!path_or_empty.empty()) {
        std::ifstream in(path_or_empty);
        if (!in) throw IoError("cannot open config: " + path_or_empty);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        c = config_from_json(text);
    }
    if (const char* env = std::getenv("HOI_SEED")) {
        c.seed = std::strtoull(env, nullptr, 10);
    }
    c.validate();
    return c;
}

std::string config_hash(const RunConfig& cfg) {
    const std::string dump = config_to_json(cfg);
    uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hoistream
