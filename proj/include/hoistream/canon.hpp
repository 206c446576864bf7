#pragma once

#include <array>
#include <vector>

#include "hoistream/body.hpp"
#include "hoistream/geom.hpp"

namespace hoistream {

inline constexpr int kEgoDim = 54;

// Gravity-aligned head pose of a window's first frame; all canonical poses
// are expressed relative to it. Its height axis is the world up axis.
struct Anchor {
    Se3 transform;

    static Anchor identity() { return {Se3::identity()}; }
};

// Per-frame three-point conditioning: head, left wrist, right wrist.
// Flattened layout: [rot 18, rot_vel 18, xyz 9, vel 9].
struct EgoFrame {
    std::array<Rot6, 3> rot;
    std::array<double, 18> rot_vel{};
    std::array<Vec3, 3> xyz;
    std::array<double, 9> vel{};

    std::array<double, kEgoDim> flatten() const;
    static EgoFrame unflatten(const std::array<double, kEgoDim>& v);
};

// Yaw-only rotation extracted from the head's forward (x) axis projected
// to the horizontal plane; translation preserved. Throws DegenerateHeading
// when the head looks straight up or down.
Anchor gravity_align(const Se3& head);

Se3 canonicalize(const Anchor& anchor, const Se3& pose);
Se3 decanonicalize(const Anchor& anchor, const Se3& pose);

// World-frame three-point stream for a human sequence; velocities are
// finite differences with frame 0 copying frame 1.
std::vector<EgoFrame> ego_world(const Skeleton& skel, const std::vector<HumanFrame>& seq,
                                double dt);

// Re-express an ego frame by a rigid transform m: poses compose, linear
// quantities rotate, relative rotational velocities are unchanged.
EgoFrame ego_apply(const Se3& m, const EgoFrame& e);

std::vector<EgoFrame> ego_condition(const Skeleton& skel, const std::vector<HumanFrame>& seq,
                                    const Anchor& anchor, double dt);

}  // namespace hoistream
