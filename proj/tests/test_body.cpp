#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>

#include "hoistream/body.hpp"
#include "hoistream/rng.hpp"

using namespace hoistream;

namespace {

Rot6 random_rot6(Rng& rng) {
    Rot6 r;
    for (int i = 0; i < 6; ++i) r.a[i] = rng.normal();
    return matrix_to_rot6(rot6_to_matrix(r));
}

HumanFrame random_frame(Rng& rng) {
    HumanFrame f;
    f.root.rot = random_rot6(rng);
    f.root.trans = Vec3(rng.normal(), rng.normal(), 0.95 + 0.1 * rng.normal());
    for (auto& jr : f.joint_rot) jr = random_rot6(rng);
    return f;
}

HumanFrame identity_frame() {
    HumanFrame f;
    f.root.trans = Vec3(0, 0, 0.95);
    for (auto& jr : f.joint_rot) jr = Rot6::identity();
    return f;
}

// Independent FK oracle: explicit 4x4 homogeneous matrix chains.
std::vector<Vec3> fk_oracle(const Skeleton& skel, const HumanFrame& f) {
    using Mat4 = Eigen::Matrix4d;
    auto homog = [](const Mat3& r, const Vec3& t) {
        Mat4 m = Mat4::Identity();
        m.block<3, 3>(0, 0) = r;
        m.block<3, 1>(0, 3) = t;
        return m;
    };
    std::vector<Mat4> world(skel.joints.size());
    world[0] = homog(rot6_to_matrix(f.root.rot), f.root.trans);
    for (size_t j = 1; j < skel.joints.size(); ++j) {
        const Mat4 local =
            homog(rot6_to_matrix(f.joint_rot[j - 1]), skel.joints[j].offset);
        world[j] = world[skel.joints[j].parent] * local;
    }
    std::vector<Vec3> out;
    for (const auto& m : world) out.push_back(m.block<3, 1>(0, 3));
    return out;
}

}  // namespace

TEST_CASE("default skeleton is valid and standing feet touch the floor") {
    const Skeleton s = default_skeleton();
    s.validate();
    CHECK(s.joints.size() == 22);
    CHECK(s.body_points.size() == 64);

    const auto pos = fk(s, identity_frame());
    const auto feet = s.foot_joints();
    for (int k = 0; k < 4; ++k) {
        CHECK(pos[feet[k]].z() <= 0.05);
        CHECK(pos[feet[k]].z() >= -0.01);
    }
    // head roughly at standing height
    CHECK(pos[s.index_of("head")].z() > 1.3);
}

TEST_CASE("fk identity pose accumulates offsets; root translation shifts all joints") {
    const Skeleton s = default_skeleton();
    HumanFrame f = identity_frame();
    const auto base = fk(s, f);
    for (size_t j = 1; j < s.joints.size(); ++j) {
        const Vec3 expect = base[s.joints[j].parent] + s.joints[j].offset;
        CHECK((base[j] - expect).norm() < 1e-15);
    }

    const Vec3 t(0.3, -0.6, 0.2);
    f.root.trans += t;
    const auto moved = fk(s, f);
    for (size_t j = 0; j < base.size(); ++j) {
        CHECK((moved[j] - base[j] - t).norm() < 1e-12);
    }
}

TEST_CASE("fk matches brute-force homogeneous-matrix oracle") {
    const Skeleton s = default_skeleton();
    Rng rng(23);
    for (int i = 0; i < 50; ++i) {
        const HumanFrame f = random_frame(rng);
        const auto fast = fk(s, f);
        const auto slow = fk_oracle(s, f);
        for (size_t j = 0; j < fast.size(); ++j) {
            CHECK((fast[j] - slow[j]).norm() < 1e-9);
        }
    }
}

TEST_CASE("fk equivariance under root pre-composition") {
    const Skeleton s = default_skeleton();
    Rng rng(29);
    for (int i = 0; i < 20; ++i) {
        const HumanFrame f = random_frame(rng);
        Se3 g;
        g.rot = random_rot6(rng);
        g.trans = Vec3(rng.normal(), rng.normal(), rng.normal());

        HumanFrame moved = f;
        moved.root = se3_compose(g, f.root);

        const auto a = fk(s, moved);
        const auto b = fk(s, f);
        for (size_t j = 0; j < a.size(); ++j) {
            CHECK((a[j] - se3_apply(g, b[j])).norm() < 1e-9);
        }
        const auto pa = body_points(s, moved);
        const auto pb = body_points(s, f);
        for (size_t k = 0; k < pa.size(); ++k) {
            CHECK((pa[k] - se3_apply(g, pb[k])).norm() < 1e-9);
        }
    }
}

TEST_CASE("body points: frac 0 sits on its joint, frac 0.5 at bone midpoint") {
    Skeleton s = default_skeleton();
    s.body_points[0] = {s.index_of("left_wrist"), 0.0, Vec3(0, 0, 0)};
    s.body_points[1] = {s.index_of("left_wrist"), 0.5, Vec3(0, 0, 0)};
    const HumanFrame f = identity_frame();
    const auto pos = fk(s, f);
    const auto pts = body_points(s, f);
    const int wrist = s.index_of("left_wrist");
    const int elbow = s.joints[wrist].parent;
    CHECK((pts[0] - pos[wrist]).norm() < 1e-15);
    CHECK((pts[1] - 0.5 * (pos[wrist] + pos[elbow])).norm() < 1e-12);

    // deterministic
    const auto again = body_points(s, f);
    for (size_t k = 0; k < pts.size(); ++k) CHECK((pts[k] - again[k]).norm() == 0);
}

TEST_CASE("object template and vertices") {
    const ObjectTemplate tpl = make_object_template(5, 64);
    CHECK(tpl.vertices.size() == 64);
    Vec3 centroid = Vec3::Zero();
    for (const auto& v : tpl.vertices) centroid += v;
    CHECK((centroid / 64.0).norm() < 1e-6);

    ObjectFrame f;
    const auto ident = object_vertices(tpl, f);
    for (size_t i = 0; i < ident.size(); ++i) CHECK((ident[i] - tpl.vertices[i]).norm() == 0);

    f.pose.trans = Vec3(1, 2, 3);
    const auto moved = object_vertices(tpl, f);
    for (size_t i = 0; i < moved.size(); ++i) {
        CHECK((moved[i] - tpl.vertices[i] - Vec3(1, 2, 3)).norm() < 1e-12);
    }

    // 90 degree yaw on a simple tetrahedron, hand-rotated: (x, y) -> (-y, x)
    ObjectTemplate tet;
    tet.class_id = 0;
    tet.vertices = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0)};
    ObjectFrame yaw;
    yaw.pose.rot = Rot6{{0, 1, 0, -1, 0, 0}};
    const auto r = object_vertices(tet, yaw);
    CHECK((r[0] - Vec3(0, 1, 0)).norm() < 1e-15);
    CHECK((r[2] - Vec3(-1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("compute_contacts basic cases") {
    const Skeleton s = default_skeleton();
    const ObjectTemplate tpl = make_object_template(2, 64);
    const ContactConfig cfg;

    HumanFrame hf = identity_frame();
    ObjectFrame far_away;
    far_away.pose.trans = Vec3(10, 0, 1);
    const ContactVector far = compute_contacts(s, hf, tpl, far_away, cfg);
    for (auto b : far.body) CHECK(b == 0);
    for (auto ft : far.foot) CHECK(ft == 1);  // standing on the floor

    // place the object centroid at a body point: that label must fire
    const auto pts = body_points(s, hf);
    ObjectFrame at_point;
    at_point.pose.trans = pts[0] - tpl.vertices[0];
    const ContactVector hit = compute_contacts(s, hf, tpl, at_point, cfg);
    CHECK(hit.body[0] == 1);
}

TEST_CASE("compute_contacts equals exhaustive pairwise oracle") {
    const Skeleton s = default_skeleton();
    const ObjectTemplate tpl = make_object_template(11, 96);
    const ContactConfig cfg{0.08, 0.06};
    Rng rng(31);
    for (int it = 0; it < 100; ++it) {
        const HumanFrame hf = random_frame(rng);
        ObjectFrame of;
        of.pose.rot = random_rot6(rng);
        of.pose.trans = Vec3(0.5 * rng.normal(), 0.5 * rng.normal(), 0.9 + 0.3 * rng.normal());

        const ContactVector fast = compute_contacts(s, hf, tpl, of, cfg);

        const auto pts = body_points(s, hf);
        const auto verts = object_vertices(tpl, of);
        for (size_t i = 0; i < pts.size(); ++i) {
            double best = 1e300;
            for (const auto& v : verts) best = std::min(best, (pts[i] - v).norm());
            CHECK(int(fast.body[i]) == int(best <= cfg.tau_c));
        }
        const auto joints = fk(s, hf);
        const auto feet = s.foot_joints();
        for (int k = 0; k < 4; ++k) {
            CHECK(int(fast.foot[k]) == int(joints[feet[k]].z() <= cfg.tau_f));
        }
    }
}

TEST_CASE("contacts invariant under floor-preserving rigid motion of both bodies") {
    const Skeleton s = default_skeleton();
    const ObjectTemplate tpl = make_object_template(3, 64);
    const ContactConfig cfg;
    Rng rng(37);
    for (int it = 0; it < 20; ++it) {
        const HumanFrame hf = random_frame(rng);
        ObjectFrame of;
        of.pose.rot = random_rot6(rng);
        of.pose.trans = Vec3(rng.normal(), rng.normal(), 1.0);

        // yaw + horizontal translation
        const double a = rng.uniform() * 2 * M_PI;
        Se3 g;
        Mat3 yaw;
        yaw << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
        g.rot = matrix_to_rot6(yaw);
        g.trans = Vec3(rng.normal(), rng.normal(), 0);

        HumanFrame hf2 = hf;
        hf2.root = se3_compose(g, hf.root);
        ObjectFrame of2;
        of2.pose = se3_compose(g, of.pose);

        const ContactVector c1 = compute_contacts(s, hf, tpl, of, cfg);
        const ContactVector c2 = compute_contacts(s, hf2, tpl, of2, cfg);
        CHECK(c1.body == c2.body);
        CHECK(c1.foot == c2.foot);
    }
}

TEST_CASE("skeleton json round trip and version check") {
    const Skeleton s = default_skeleton();
    const std::string text = skeleton_to_json(s);
    const Skeleton back = skeleton_from_json(text);
    CHECK(back.joints.size() == s.joints.size());
    for (size_t j = 0; j < s.joints.size(); ++j) {
        CHECK(back.joints[j].name == s.joints[j].name);
        CHECK(back.joints[j].parent == s.joints[j].parent);
        CHECK((back.joints[j].offset - s.joints[j].offset).norm() == 0);
    }
    for (size_t k = 0; k < s.body_points.size(); ++k) {
        CHECK(back.body_points[k].joint == s.body_points[k].joint);
        CHECK(back.body_points[k].frac == s.body_points[k].frac);
        CHECK((back.body_points[k].offset - s.body_points[k].offset).norm() == 0);
    }

    CHECK_THROWS_AS(skeleton_from_json("{\"format\":\"skeleton/0\"}"), FormatError);
    CHECK_THROWS_AS(skeleton_from_json("not json"), FormatError);
    CHECK_THROWS_AS(load_skeleton("/nonexistent/skeleton.json"), IoError);

    const auto tmp = std::filesystem::temp_directory_path() / "hoistream_skel_test.json";
    save_skeleton(s, tmp.string());
    const Skeleton loaded = load_skeleton(tmp.string());
    CHECK(loaded.joints.size() == 22);
    std::filesystem::remove(tmp);
}
