#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hoistream/canon.hpp"
#include "hoistream/rng.hpp"

using namespace hoistream;

namespace {

Rot6 random_rot6(Rng& rng) {
    Rot6 r;
    for (int i = 0; i < 6; ++i) r.a[i] = rng.normal();
    return matrix_to_rot6(rot6_to_matrix(r));
}

Mat3 yaw(double a) {
    Mat3 m;
    m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return m;
}

Mat3 pitch(double a) {  // about y
    Mat3 m;
    m << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
    return m;
}

Se3 random_yaw_translation(Rng& rng) {
    Se3 g;
    g.rot = matrix_to_rot6(yaw(rng.uniform() * 2 * M_PI));
    g.trans = Vec3(rng.normal(), rng.normal(), rng.normal());
    return g;
}

std::vector<HumanFrame> random_motion(Rng& rng, int n) {
    std::vector<HumanFrame> seq(n);
    HumanFrame f;
    f.root.rot = matrix_to_rot6(yaw(rng.uniform()));
    f.root.trans = Vec3(0, 0, 0.95);
    for (auto& jr : f.joint_rot) jr = Rot6::identity();
    for (int t = 0; t < n; ++t) {
        f.root.trans += Vec3(0.02 * rng.normal(), 0.02 * rng.normal(), 0.01 * rng.normal());
        f.root.rot = matrix_to_rot6(yaw(0.05 * rng.normal()) * rot6_to_matrix(f.root.rot));
        for (auto& jr : f.joint_rot) {
            const Vec3 axis = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
            const Mat3 wiggle = Eigen::AngleAxisd(0.05 * rng.normal(), axis).toRotationMatrix();
            jr = matrix_to_rot6(rot6_to_matrix(jr) * wiggle);
        }
        seq[t] = f;
    }
    return seq;
}

}  // namespace

TEST_CASE("gravity_align") {
    // upright head with pure yaw is already aligned
    Se3 head;
    head.rot = matrix_to_rot6(yaw(30 * M_PI / 180));
    head.trans = Vec3(1, 2, 1.6);
    const Anchor a = gravity_align(head);
    CHECK((rot6_to_matrix(a.transform.rot) - yaw(30 * M_PI / 180)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.transform.trans - head.trans).norm() == 0);

    // pitched 45 degrees down after a 90 degree yaw: alignment keeps the yaw
    Se3 head2;
    head2.rot = matrix_to_rot6(yaw(M_PI / 2) * pitch(45 * M_PI / 180));
    head2.trans = Vec3(-3, 0.5, 1.55);
    const Anchor a2 = gravity_align(head2);
    CHECK((rot6_to_matrix(a2.transform.rot) - yaw(M_PI / 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a2.transform.trans - head2.trans).norm() == 0);

    // third column is exactly world up
    CHECK(rot6_to_matrix(a2.transform.rot).col(2) == Vec3(0, 0, 1));

    // straight down is degenerate
    Se3 down;
    down.rot = matrix_to_rot6(pitch(M_PI / 2));
    CHECK_THROWS_AS(gravity_align(down), DegenerateHeading);
}

TEST_CASE("canonicalize/decanonicalize inverse pair") {
    Rng rng(41);
    for (int i = 0; i < 5000; ++i) {
        Anchor anchor = gravity_align(Se3{random_rot6(rng), Vec3(rng.normal(), rng.normal(), rng.normal())});
        Se3 pose{random_rot6(rng), Vec3(rng.normal(), rng.normal(), rng.normal())};

        const Se3 canon = canonicalize(anchor, pose);
        const Se3 back = decanonicalize(anchor, canon);
        CHECK((rot6_to_matrix(back.rot) - rot6_to_matrix(pose.rot)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((back.trans - pose.trans).norm() < 1e-9);

        // anchor's own source pose canonicalizes to identity
        const Se3 self = canonicalize(anchor, anchor.transform);
        CHECK((rot6_to_matrix(self.rot) - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(self.trans.norm() < 1e-12);
    }
}

TEST_CASE("canonical pose invariant to world yaw+translation applied to anchor source and pose") {
    Rng rng(43);
    for (int i = 0; i < 300; ++i) {
        const Se3 head{random_rot6(rng), Vec3(rng.normal(), rng.normal(), 1.6)};
        const Se3 pose{random_rot6(rng), Vec3(rng.normal(), rng.normal(), rng.normal())};
        const Se3 g = random_yaw_translation(rng);

        const Se3 c1 = canonicalize(gravity_align(head), pose);
        const Se3 c2 = canonicalize(gravity_align(se3_compose(g, head)), se3_compose(g, pose));
        CHECK((rot6_to_matrix(c1.rot) - rot6_to_matrix(c2.rot)).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((c1.trans - c2.trans).norm() < 1e-9);
    }
}

TEST_CASE("ego_condition shapes and static case") {
    const Skeleton s = default_skeleton();
    std::vector<HumanFrame> seq(5);
    for (auto& f : seq) {
        f.root.trans = Vec3(0, 0, 0.95);
        for (auto& jr : f.joint_rot) jr = Rot6::identity();
    }
    const Anchor anchor = gravity_align(Se3{Rot6::identity(), fk(s, seq[0])[s.index_of("head")]});
    const auto ego = ego_condition(s, seq, anchor, 1.0 / 30);
    CHECK(ego.size() == 5);
    for (const auto& e : ego) {
        const auto flat = e.flatten();
        CHECK(flat.size() == 54);
        for (double v : e.vel) CHECK(v == 0);
        for (double v : e.rot_vel) CHECK(v == 0);
    }
    CHECK_THROWS_AS(ego_condition(s, {seq[0]}, anchor, 1.0 / 30), SequenceTooShort);
}

TEST_CASE("ego velocity of constant-velocity head is constant") {
    const Skeleton s = default_skeleton();
    const double dt = 1.0 / 30;
    std::vector<HumanFrame> seq(10);
    for (int t = 0; t < 10; ++t) {
        seq[t].root.trans = Vec3(1.0 * t * dt, 0, 0.95);  // +x at 1 m/s
        for (auto& jr : seq[t].joint_rot) jr = Rot6::identity();
    }
    const auto headpos = fk(s, seq[0])[s.index_of("head")];
    const Anchor anchor = gravity_align(Se3{Rot6::identity(), headpos});
    const auto ego = ego_condition(s, seq, anchor, dt);
    for (const auto& e : ego) {
        CHECK(e.vel[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(e.vel[1]) < 1e-9);
        CHECK(std::abs(e.vel[2]) < 1e-9);
    }
}

TEST_CASE("ego velocities match an independent finite-difference oracle") {
    const Skeleton s = default_skeleton();
    Rng rng(47);
    const double dt = 1.0 / 30;
    const auto seq = random_motion(rng, 12);
    const Anchor anchor =
        gravity_align(Se3{seq[0].root.rot, fk(s, seq[0])[s.index_of("head")]});
    const auto ego = ego_condition(s, seq, anchor, dt);

    // oracle: canonical positions recomputed per frame, then differenced
    const std::array<int, 3> joints{s.index_of("head"), s.index_of("left_wrist"),
                                    s.index_of("right_wrist")};
    std::vector<std::array<Vec3, 3>> canon_pos(seq.size());
    for (size_t t = 0; t < seq.size(); ++t) {
        const auto pos = fk(s, seq[t]);
        for (int j = 0; j < 3; ++j) {
            canon_pos[t][j] = se3_apply(se3_inverse(anchor.transform), pos[joints[j]]);
        }
    }
    for (size_t t = 0; t < seq.size(); ++t) {
        for (int j = 0; j < 3; ++j) {
            CHECK((ego[t].xyz[j] - canon_pos[t][j]).norm() < 1e-9);
            const size_t tt = t == 0 ? 1 : t;
            const Vec3 v = (canon_pos[tt][j] - canon_pos[tt - 1][j]) / dt;
            for (int i = 0; i < 3; ++i) {
                CHECK(ego[t].vel[3 * j + i] == doctest::Approx(v[i]).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("ego conditioning invariant to world yaw+translation of the whole sequence") {
    const Skeleton s = default_skeleton();
    Rng rng(53);
    for (int it = 0; it < 20; ++it) {
        const auto seq = random_motion(rng, 8);
        const Se3 g = random_yaw_translation(rng);
        std::vector<HumanFrame> moved = seq;
        for (auto& f : moved) f.root = se3_compose(g, f.root);

        auto anchor_of = [&](const std::vector<HumanFrame>& q) {
            const FkResult w = fk_full(s, q[0]);
            const int h = s.index_of("head");
            return gravity_align(se3_from_parts(w.rot[h], w.pos[h]));
        };
        const auto e1 = ego_condition(s, seq, anchor_of(seq), 1.0 / 30);
        const auto e2 = ego_condition(s, moved, anchor_of(moved), 1.0 / 30);
        for (size_t t = 0; t < e1.size(); ++t) {
            const auto f1 = e1[t].flatten();
            const auto f2 = e2[t].flatten();
            for (int k = 0; k < kEgoDim; ++k) {
                CHECK(f1[k] == doctest::Approx(f2[k]).epsilon(1e-9).scale(1.0));
            }
        }
    }
}

TEST_CASE("ego_apply recanonicalization consistency") {
    // moving the anchor is the same as canonicalizing from scratch
    const Skeleton s = default_skeleton();
    Rng rng(59);
    const auto seq = random_motion(rng, 6);
    const auto world = ego_world(s, seq, 1.0 / 30);

    const Anchor a1 = gravity_align(Se3{seq[0].root.rot, Vec3(0.3, -0.2, 1.6)});
    const Anchor a2 = gravity_align(Se3{seq[3].root.rot, Vec3(-1.0, 0.7, 1.5)});

    for (const auto& w : world) {
        const EgoFrame direct = ego_apply(se3_inverse(a2.transform), w);
        const EgoFrame via_a1 = ego_apply(
            se3_compose(se3_inverse(a2.transform), a1.transform),
            ego_apply(se3_inverse(a1.transform), w));
        const auto fd = direct.flatten();
        const auto fv = via_a1.flatten();
        for (int k = 0; k < kEgoDim; ++k) {
            CHECK(fd[k] == doctest::Approx(fv[k]).epsilon(1e-9).scale(1.0));
        }
    }
}
