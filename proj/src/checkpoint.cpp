#include "hoistream/checkpoint.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>

namespace hoistream {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'H', 'O', 'I', 'C', 'K', 'P', 'T', '1'};

void write_block(std::ofstream& out, const Eigen::MatrixXd& m) {
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd read_block(std::ifstream& in, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!in) throw FormatError("checkpoint truncated while reading tensor data");
    return m;
}

json model_cfg_to_json(const DenoiserConfig& c) {
    return json{{"d_model", c.d_model},   {"n_heads", c.n_heads},
                {"n_blocks", c.n_blocks}, {"ff_mult", c.ff_mult},
                {"W", c.W},               {"T", c.T},
                {"class_count", c.class_count},
                {"contact_modality", c.contact_modality}};
}

DenoiserConfig model_cfg_from_json(const json& j) {
    DenoiserConfig c;
    c.d_model = j.at("d_model").get<int>();
    c.n_heads = j.at("n_heads").get<int>();
    c.n_blocks = j.at("n_blocks").get<int>();
    c.ff_mult = j.at("ff_mult").get<int>();
    c.W = j.at("W").get<int>();
    c.T = j.at("T").get<int>();
    c.class_count = j.at("class_count").get<int>();
    c.contact_modality = j.at("contact_modality").get<bool>();
    return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const DenoiserParams& params,
                     const AdamState& opt, long train_step, uint64_t base_seed,
                     const std::string& config_echo_json) {
    json header;
    header["format"] = "ckpt/1";
    header["step"] = train_step;
    header["base_seed"] = base_seed;
    header["opt_step"] = opt.step;
    header["dtype"] = "f8";
    header["model"] = model_cfg_to_json(params.cfg);
    if (!config_echo_json.empty()) {
        header["config"] = json::parse(config_echo_json, nullptr, false);
    }
    json tensors = json::array();
    for (const auto& [name, t] : params.tensors) {
        tensors.push_back({{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
    }
    header["tensors"] = tensors;
    const std::string head = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open checkpoint for write: " + path);
    out.write(kMagic, sizeof(kMagic));
    const uint64_t len = head.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (const auto& [name, t] : params.tensors) write_block(out, t.val());
    for (const auto& [name, t] : params.tensors) {
        auto it = opt.m.find(name);
        write_block(out, it != opt.m.end() ? it->second
                                           : Eigen::MatrixXd::Zero(t.rows(), t.cols()));
    }
    for (const auto& [name, t] : params.tensors) {
        auto it = opt.v.find(name);
        write_block(out, it != opt.v.end() ? it->second
                                           : Eigen::MatrixXd::Zero(t.rows(), t.cols()));
    }
    if (!out) throw IoError("checkpoint write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("not a ckpt/1 checkpoint: " + path);
    }
    uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string head(len, '\0');
    in.read(head.data(), static_cast<std::streamsize>(len));
    if (!in) throw FormatError("checkpoint header truncated");

    json header = json::parse(head, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "ckpt/1") {
        throw FormatError("unsupported checkpoint format version (want ckpt/1)");
    }

    LoadedCheckpoint out;
    out.train_step = header.at("step").get<long>();
    out.base_seed = header.at("base_seed").get<uint64_t>();
    out.params.cfg = model_cfg_from_json(header.at("model"));
    out.opt.step = header.at("opt_step").get<long>();
    if (header.contains("config") && !header["config"].is_discarded()) {
        out.config_echo = header["config"].dump();
    }

    std::vector<std::pair<std::string, std::pair<Eigen::Index, Eigen::Index>>> table;
    for (const auto& e : header.at("tensors")) {
        table.push_back({e.at("name").get<std::string>(),
                         {e.at("rows").get<Eigen::Index>(), e.at("cols").get<Eigen::Index>()}});
    }
    for (const auto& [name, shape] : table) {
        out.params.tensors.emplace(name, ad::param(read_block(in, shape.first, shape.second)));
    }
    for (const auto& [name, shape] : table) {
        out.opt.m.emplace(name, read_block(in, shape.first, shape.second));
    }
    for (const auto& [name, shape] : table) {
        out.opt.v.emplace(name, read_block(in, shape.first, shape.second));
    }
    return out;
}

}  // namespace hoistream
