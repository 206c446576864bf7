#include "hoistream/seq.hpp"

#include <json.hpp>

#include <fstream>

namespace hoistream {

using nlohmann::json;

void InteractionSequence::validate() const {
    if (frames.size() < 2) throw FormatError("sequence needs at least 2 frames");
    if (fps <= 0) throw FormatError("fps must be positive");
    const bool want = has_object();
    for (const auto& f : frames) {
        if (f.object.has_value() != want || f.contact.has_value() != want) {
            throw FormatError("object/contact must be present for all frames or none");
        }
    }
}

namespace {

json rot6_to_json(const Rot6& r) {
    return json::array({r.a[0], r.a[1], r.a[2], r.a[3], r.a[4], r.a[5]});
}

Rot6 rot6_from_json(const json& j) {
    if (!j.is_array() || j.size() != 6) throw FormatError("expected 6 rotation values");
    Rot6 r;
    for (int i = 0; i < 6; ++i) r.a[i] = j[i].get<double>();
    return r;
}

json se3_to_json(const Se3& s) {
    return json{{"r", rot6_to_json(s.rot)},
                {"t", json::array({s.trans.x(), s.trans.y(), s.trans.z()})}};
}

Se3 se3_from_json(const json& j) {
    Se3 s;
    s.rot = rot6_from_json(j.at("r"));
    const auto& t = j.at("t");
    if (!t.is_array() || t.size() != 3) throw FormatError("expected a 3-vector translation");
    s.trans = Vec3(t[0].get<double>(), t[1].get<double>(), t[2].get<double>());
    return s;
}

json frame_to_json(const SequenceFrame& f) {
    json pose = json::array();
    for (const auto& r : f.human.joint_rot) pose.push_back(rot6_to_json(r));
    json out;
    out["human"] = json{{"root", se3_to_json(f.human.root)}, {"pose", pose}};
    if (f.object) out["object"] = se3_to_json(f.object->pose);
    if (f.contact) {
        json body = json::array();
        for (auto b : f.contact->body) body.push_back(int(b));
        json foot = json::array();
        for (auto b : f.contact->foot) foot.push_back(int(b));
        out["contact"] = json{{"body", body}, {"foot", foot}};
    }
    return out;
}

SequenceFrame frame_from_json(const json& j) {
    SequenceFrame f;
    const auto& human = j.at("human");
    f.human.root = se3_from_json(human.at("root"));
    const auto& pose = human.at("pose");
    if (!pose.is_array() || pose.size() != 21) throw FormatError("expected 21 joint rotations");
    for (int k = 0; k < 21; ++k) f.human.joint_rot[k] = rot6_from_json(pose[k]);
    if (j.contains("object")) {
        ObjectFrame of;
        of.pose = se3_from_json(j.at("object"));
        f.object = of;
    }
    if (j.contains("contact")) {
        ContactVector cv;
        const auto& body = j.at("contact").at("body");
        const auto& foot = j.at("contact").at("foot");
        if (body.size() != kNumBodyPoints || foot.size() != kNumFootLabels) {
            throw FormatError("contact vector has wrong length");
        }
        for (int k = 0; k < kNumBodyPoints; ++k) cv.body[k] = body[k].get<int>() ? 1 : 0;
        for (int k = 0; k < kNumFootLabels; ++k) cv.foot[k] = foot[k].get<int>() ? 1 : 0;
        f.contact = cv;
    }
    return f;
}

}  // namespace

void write_sequence(const InteractionSequence& seq, const std::string& path) {
    seq.validate();
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for write: " + path);
    json header;
    header["format"] = "seq/1";
    header["fps"] = seq.fps;
    header["skeleton"] = seq.skeleton_ref;
    header["object_class"] = seq.object_class ? json(*seq.object_class) : json(nullptr);
    header["V"] = seq.object_vertex_count ? json(*seq.object_vertex_count) : json(nullptr);
    out << header.dump() << "\n";
    for (const auto& f : seq.frames) out << frame_to_json(f).dump() << "\n";
    if (!out) throw IoError("write failed: " + path);
}

InteractionSequence read_sequence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty sequence file: " + path);
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded()) throw FormatError("bad sequence header: " + path);
    if (header.value("format", "") != "seq/1") {
        throw FormatError("unsupported sequence format version (want seq/1): " + path);
    }
    InteractionSequence seq;
    try {
        seq.fps = header.at("fps").get<double>();
        seq.skeleton_ref = header.at("skeleton").get<std::string>();
        if (!header.at("object_class").is_null()) {
            seq.object_class = header["object_class"].get<int>();
        }
        if (!header.at("V").is_null()) seq.object_vertex_count = header["V"].get<int>();
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line);  // throws on truncation
            seq.frames.push_back(frame_from_json(j));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad sequence data: ") + e.what());
    }
    seq.validate();
    return seq;
}

}  // namespace hoistream
