#include "hoistream/body.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "hoistream/rng.hpp"

namespace hoistream {

using nlohmann::json;

int Skeleton::index_of(const std::string& name) const {
    for (size_t i = 0; i < joints.size(); ++i) {
        if (joints[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

std::array<int, kNumFootLabels> Skeleton::foot_joints() const {
    return {index_of("left_ankle"), index_of("right_ankle"),
            index_of("left_foot"), index_of("right_foot")};
}

void Skeleton::validate() const {
    if (joints.size() != kNumJoints) throw InvalidConfig("skeleton must have 22 joints");
    if (joints[0].parent != -1) throw InvalidConfig("joint 0 must be the root");
    for (size_t i = 1; i < joints.size(); ++i) {
        // parents precede children, which rules out cycles
        if (joints[i].parent < 0 || joints[i].parent >= static_cast<int>(i)) {
            throw InvalidConfig("joint parents must precede their children");
        }
    }
    for (const char* name : {"head", "left_wrist", "right_wrist", "left_ankle",
                             "right_ankle", "left_foot", "right_foot"}) {
        if (index_of(name) < 0) throw InvalidConfig(std::string("missing joint: ") + name);
    }
    if (body_points.size() != kNumBodyPoints) throw InvalidConfig("skeleton must have 64 body points");
    for (const auto& bp : body_points) {
        if (bp.joint < 0 || bp.joint >= kNumJoints) throw InvalidConfig("body point joint out of range");
        if (bp.frac < 0 || bp.frac > 1) throw InvalidConfig("body point frac out of [0,1]");
    }
}

Skeleton default_skeleton() {
    Skeleton s;
    auto add = [&s](const std::string& name, int parent, double x, double y, double z) {
        s.joints.push_back({name, parent, Vec3(x, y, z)});
    };
    // z-up, x-forward; identity pose is a T-pose with the pelvis at ~0.95 m
    add("pelvis", -1, 0, 0, 0);
    add("left_hip", 0, 0, 0.09, -0.07);
    add("right_hip", 0, 0, -0.09, -0.07);
    add("spine1", 0, 0, 0, 0.11);
    add("left_knee", 1, 0, 0, -0.41);
    add("right_knee", 2, 0, 0, -0.41);
    add("spine2", 3, 0, 0, 0.12);
    add("left_ankle", 4, 0, 0, -0.43);
    add("right_ankle", 5, 0, 0, -0.43);
    add("spine3", 6, 0, 0, 0.13);
    add("left_foot", 7, 0.13, 0, -0.035);
    add("right_foot", 8, 0.13, 0, -0.035);
    add("neck", 9, 0, 0, 0.14);
    add("left_collar", 9, 0, 0.05, 0.10);
    add("right_collar", 9, 0, -0.05, 0.10);
    add("head", 12, 0, 0, 0.10);
    add("left_shoulder", 13, 0, 0.12, 0);
    add("right_shoulder", 14, 0, -0.12, 0);
    add("left_elbow", 16, 0, 0.26, 0);
    add("right_elbow", 17, 0, -0.26, 0);
    add("left_wrist", 18, 0, 0.25, 0);
    add("right_wrist", 19, 0, -0.25, 0);

    // 64 anchors: one pinned to each wrist, the rest spread over the bones
    // proportionally to bone length with small fixed radial offsets.
    s.body_points.push_back({s.index_of("left_wrist"), 0.0, Vec3(0, 0, 0)});
    s.body_points.push_back({s.index_of("right_wrist"), 0.0, Vec3(0, 0, 0)});

    std::vector<double> lengths(kNumJoints, 0.0);
    double total = 0.0;
    for (int j = 1; j < kNumJoints; ++j) {
        lengths[j] = s.joints[j].offset.norm();
        total += lengths[j];
    }
    const int remaining = kNumBodyPoints - 2;
    std::vector<int> quota(kNumJoints, 0);
    int assigned = 0;
    std::vector<std::pair<double, int>> rema;
    for (int j = 1; j < kNumJoints; ++j) {
        const double share = remaining * lengths[j] / total;
        quota[j] = static_cast<int>(share);
        assigned += quota[j];
        rema.push_back({share - quota[j], j});
    }
    std::sort(rema.begin(), rema.end(), [](auto& a, auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (int k = 0; k < remaining - assigned; ++k) quota[rema[k].second] += 1;

    const Vec3 radials[4] = {Vec3(0.03, 0, 0), Vec3(0, 0.03, 0), Vec3(-0.03, 0, 0), Vec3(0, -0.03, 0)};
    int radial = 0;
    for (int j = 1; j < kNumJoints; ++j) {
        for (int k = 0; k < quota[j]; ++k) {
            const double frac = (k + 1.0) / (quota[j] + 1.0);
            s.body_points.push_back({j, frac, radials[radial++ % 4]});
        }
    }
    s.validate();
    return s;
}

ObjectTemplate make_object_template(int class_id, int vertex_count, int class_count) {
    if (class_id < 0 || class_id >= class_count) throw InvalidConfig("object class out of range");
    if (vertex_count < 4) throw InvalidConfig("object needs at least 4 vertices");
    ObjectTemplate tpl;
    tpl.class_id = class_id;
    tpl.class_count = class_count;

    // class-dependent box extents; points sampled on the surface
    Rng rng(mix64(0x0b7ec7u, static_cast<uint64_t>(class_id)));
    const double ex = 0.08 + 0.010 * (class_id % 7);
    const double ey = 0.06 + 0.012 * ((class_id / 7) % 5);
    const double ez = 0.10 + 0.015 * (class_id % 5);
    tpl.vertices.reserve(vertex_count);
    for (int i = 0; i < vertex_count; ++i) {
        Vec3 p(ex * (2 * rng.uniform() - 1), ey * (2 * rng.uniform() - 1), ez * (2 * rng.uniform() - 1));
        const int face = rng.uniform_int(0, 5);
        if (face == 0) p.x() = ex;
        else if (face == 1) p.x() = -ex;
        else if (face == 2) p.y() = ey;
        else if (face == 3) p.y() = -ey;
        else if (face == 4) p.z() = ez;
        else p.z() = -ez;
        tpl.vertices.push_back(p);
    }
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& v : tpl.vertices) centroid += v;
    centroid /= vertex_count;
    for (Vec3& v : tpl.vertices) v -= centroid;
    return tpl;
}

FkResult fk_full(const Skeleton& skel, const HumanFrame& f) {
    FkResult out;
    out.pos.resize(skel.joints.size());
    out.rot.resize(skel.joints.size());
    out.pos[0] = f.root.trans;
    out.rot[0] = rot6_to_matrix(f.root.rot);
    for (size_t j = 1; j < skel.joints.size(); ++j) {
        const int p = skel.joints[j].parent;
        out.pos[j] = out.rot[p] * skel.joints[j].offset + out.pos[p];
        out.rot[j] = out.rot[p] * rot6_to_matrix(f.joint_rot[j - 1]);
    }
    return out;
}

std::vector<Vec3> fk(const Skeleton& skel, const HumanFrame& f) {
    return fk_full(skel, f).pos;
}

std::vector<Vec3> body_points(const Skeleton& skel, const FkResult& world) {
    std::vector<Vec3> out;
    out.reserve(skel.body_points.size());
    for (const auto& bp : skel.body_points) {
        const int j = bp.joint;
        const int p = skel.joints[j].parent < 0 ? j : skel.joints[j].parent;
        const Vec3 base = (1.0 - bp.frac) * world.pos[j] + bp.frac * world.pos[p];
        out.push_back(base + world.rot[j] * bp.offset);
    }
    return out;
}

std::vector<Vec3> body_points(const Skeleton& skel, const HumanFrame& f) {
    return body_points(skel, fk_full(skel, f));
}

std::vector<Vec3> object_vertices(const ObjectTemplate& tpl, const ObjectFrame& f) {
    return se3_apply(f.pose, tpl.vertices);
}

std::array<uint8_t, kNumFootLabels> foot_contacts(const Skeleton& skel, const HumanFrame& hf,
                                                  double tau_f) {
    const auto world = fk(skel, hf);
    const auto feet = skel.foot_joints();
    std::array<uint8_t, kNumFootLabels> out{};
    for (int k = 0; k < kNumFootLabels; ++k) {
        out[k] = world[feet[k]].z() <= tau_f ? 1 : 0;
    }
    return out;
}

ContactVector compute_contacts(const Skeleton& skel, const HumanFrame& hf,
                               const ObjectTemplate& tpl, const ObjectFrame& of,
                               const ContactConfig& cfg) {
    ContactVector out;
    const FkResult world = fk_full(skel, hf);
    const auto points = body_points(skel, world);
    const auto verts = object_vertices(tpl, of);
    const double tau2 = cfg.tau_c * cfg.tau_c;
    for (size_t i = 0; i < points.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3& v : verts) {
            best = std::min(best, (points[i] - v).squaredNorm());
        }
        out.body[i] = best <= tau2 ? 1 : 0;
    }
    const auto feet = skel.foot_joints();
    for (int k = 0; k < kNumFootLabels; ++k) {
        out.foot[k] = world.pos[feet[k]].z() <= cfg.tau_f ? 1 : 0;
    }
    return out;
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

std::string skeleton_to_json(const Skeleton& skel) {
    json doc;
    doc["format"] = "skeleton/1";
    doc["joints"] = json::array();
    for (const auto& j : skel.joints) {
        json e;
        e["name"] = j.name;
        if (j.parent < 0) e["parent"] = nullptr;
        else e["parent"] = j.parent;
        e["offset"] = vec3_to_json(j.offset);
        doc["joints"].push_back(e);
    }
    doc["body_points"] = json::array();
    for (const auto& bp : skel.body_points) {
        json e;
        e["joint"] = bp.joint;
        e["frac"] = bp.frac;
        e["offset"] = vec3_to_json(bp.offset);
        doc["body_points"].push_back(e);
    }
    return doc.dump(2);
}

Skeleton skeleton_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad skeleton json: ") + e.what());
    }
    if (!doc.contains("format") || doc["format"] != "skeleton/1") {
        throw FormatError("unsupported skeleton format version (want skeleton/1)");
    }
    Skeleton s;
    try {
        for (const auto& e : doc.at("joints")) {
            Skeleton::Joint j;
            j.name = e.at("name").get<std::string>();
            j.parent = e.at("parent").is_null() ? -1 : e.at("parent").get<int>();
            j.offset = vec3_from_json(e.at("offset"));
            s.joints.push_back(j);
        }
        for (const auto& e : doc.at("body_points")) {
            Skeleton::BodyPoint bp;
            bp.joint = e.at("joint").get<int>();
            bp.frac = e.at("frac").get<double>();
            bp.offset = vec3_from_json(e.at("offset"));
            s.body_points.push_back(bp);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad skeleton json: ") + e.what());
    }
    s.validate();
    return s;
}

void save_skeleton(const Skeleton& skel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for write: " + path);
    out << skeleton_to_json(skel) << "\n";
    if (!out) throw IoError("write failed: " + path);
}

Skeleton load_skeleton(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return skeleton_from_json(text);
}

}  // namespace hoistream
