#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hoistream/geom.hpp"

namespace hoistream {

inline constexpr int kNumJoints = 22;       // root + 21 articulated
inline constexpr int kNumBodyPoints = 64;   // contact anchors on the body
inline constexpr int kNumFootLabels = 4;    // l/r ankle, l/r foot
inline constexpr int kContactDim = kNumBodyPoints + kNumFootLabels;

// Articulated humanoid. Joint 0 is the root; offsets are bone vectors in
// the parent frame. Body points anchor the contact map: each interpolates
// between its joint and that joint's parent (frac 0 = at the joint) and
// adds a radial offset rotated by the joint's world orientation.
struct Skeleton {
    struct Joint {
        std::string name;
        int parent = -1;  // -1 for the root
        Vec3 offset{0, 0, 0};
    };
    struct BodyPoint {
        int joint = 0;
        double frac = 0;
        Vec3 offset{0, 0, 0};
    };

    std::vector<Joint> joints;
    std::vector<BodyPoint> body_points;

    int index_of(const std::string& name) const;
    // order: left_ankle, right_ankle, left_foot, right_foot
    std::array<int, kNumFootLabels> foot_joints() const;
    void validate() const;
};

Skeleton default_skeleton();

// Single frame of human motion: global root transform + 21 local joint
// rotations (joint_rot[i] drives skeleton joint i+1).
struct HumanFrame {
    Se3 root;
    std::array<Rot6, 21> joint_rot;
};

struct ObjectTemplate {
    int class_id = 0;
    int class_count = 33;
    std::vector<Vec3> vertices;  // canonical frame, centroid at origin
};

// Deterministic procedural template for a class id.
ObjectTemplate make_object_template(int class_id, int vertex_count = 256, int class_count = 33);

struct ObjectFrame {
    Se3 pose;
};

struct ContactVector {
    std::array<uint8_t, kNumBodyPoints> body{};
    std::array<uint8_t, kNumFootLabels> foot{};
};

struct ContactConfig {
    double tau_c = 0.05;  // human-object distance threshold, meters
    double tau_f = 0.05;  // foot-floor height threshold, meters
};

struct FkResult {
    std::vector<Vec3> pos;  // 22 world joint positions
    std::vector<Mat3> rot;  // 22 world joint orientations
};

FkResult fk_full(const Skeleton& skel, const HumanFrame& f);
std::vector<Vec3> fk(const Skeleton& skel, const HumanFrame& f);

std::vector<Vec3> body_points(const Skeleton& skel, const HumanFrame& f);
std::vector<Vec3> body_points(const Skeleton& skel, const FkResult& world);

std::vector<Vec3> object_vertices(const ObjectTemplate& tpl, const ObjectFrame& f);

ContactVector compute_contacts(const Skeleton& skel, const HumanFrame& hf,
                               const ObjectTemplate& tpl, const ObjectFrame& of,
                               const ContactConfig& cfg);

// Foot-floor labels alone; defined for motion-only sequences as well.
std::array<uint8_t, kNumFootLabels> foot_contacts(const Skeleton& skel, const HumanFrame& hf,
                                                  double tau_f);

// skeleton/1 JSON document
std::string skeleton_to_json(const Skeleton& skel);
Skeleton skeleton_from_json(const std::string& text);
void save_skeleton(const Skeleton& skel, const std::string& path);
Skeleton load_skeleton(const std::string& path);

}  // namespace hoistream
