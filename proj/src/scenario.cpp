#include "hoistream/scenario.hpp"

#include <cmath>

#include "hoistream/rng.hpp"

namespace hoistream {

Scenario scenario_from_string(const std::string& s) {
    if (s == "carry") return Scenario::carry;
    if (s == "push") return Scenario::push;
    if (s == "place") return Scenario::place;
    if (s == "idle-walk") return Scenario::idle_walk;
    throw InvalidConfig("unknown scenario: " + s);
}

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::carry: return "carry";
        case Scenario::push: return "push";
        case Scenario::place: return "place";
        case Scenario::idle_walk: return "idle-walk";
    }
    return "carry";
}

namespace {

double smoothstep(double x) {
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3 - 2 * x);
}

Rot6 axis_angle(const Vec3& axis, double angle) {
    return matrix_to_rot6(Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
}

Rot6 yaw_rot(double a) { return axis_angle(Vec3(0, 0, 1), a); }

struct ArmPose {
    double shoulder = 0;  // about z: swing forward/back
    double elbow = 0;
};

}  // namespace

InteractionSequence gen_scenario(const ScenarioConfig& cfg) {
    if (cfg.frames < std::max(2, cfg.min_frames)) {
        throw InvalidConfig("scenario too short for the configured window");
    }
    if (cfg.fps <= 0 || cfg.speed <= 0) throw InvalidConfig("fps and speed must be positive");
    const bool with_object = cfg.scenario != Scenario::idle_walk;
    if (with_object && (cfg.object_class < 0 || cfg.object_class >= 33)) {
        throw InvalidConfig("object class out of range");
    }

    Rng rng(cfg.seed);
    const Skeleton skel = default_skeleton();
    const double dt = 1.0 / cfg.fps;
    const int N = cfg.frames;
    const double total = N * dt;

    const double stand = with_object ? std::min(1.0, total / 4) : std::min(0.5, total / 4);
    const double walk0 = stand;
    const double walk1 = total - stand;

    // heading noise: a few slow sinusoids
    struct Turn { double a, f, p; };
    std::vector<Turn> turns;
    for (int k = 0; k < 3; ++k) {
        turns.push_back({cfg.turn_rate * (0.3 + 0.7 * rng.uniform()),
                         0.05 + 0.25 * rng.uniform(), 2 * M_PI * rng.uniform()});
    }
    double heading = 2 * M_PI * rng.uniform();
    Vec3 root_xy(2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 0);

    const double stride = 0.7;
    const double leg_amp = 0.22;
    const double arm_amp = 0.18;
    double phase = 0;

    // carry timing
    const double t_pick = with_object ? stand : 0;
    const double t_release = [&] {
        switch (cfg.scenario) {
            case Scenario::place: return std::max(t_pick + 0.5, total * 0.55);
            case Scenario::carry:
            case Scenario::push: return total - stand;
            default: return total;
        }
    }();
    const int f_pick = std::clamp(int(std::lround(t_pick * cfg.fps)), 0, N - 1);
    const int f_release = std::clamp(int(std::lround(t_release * cfg.fps)), f_pick, N - 1);
    const double reach_time = 0.4;

    const int j_lhip = skel.index_of("left_hip"), j_rhip = skel.index_of("right_hip");
    const int j_lknee = skel.index_of("left_knee"), j_rknee = skel.index_of("right_knee");
    const int j_lsho = skel.index_of("left_shoulder"), j_rsho = skel.index_of("right_shoulder");
    const int j_lelb = skel.index_of("left_elbow"), j_relb = skel.index_of("right_elbow");
    const int j_rwrist = skel.index_of("right_wrist");

    // carrying-arm hold pose: right arm forward, slightly bent
    const ArmPose hold{0.9, 0.35};

    std::vector<HumanFrame> human(N);
    for (int i = 0; i < N; ++i) {
        const double t = i * dt;
        // speed profile with 0.4 s smooth ramps inside the walk window
        double sp = 0;
        if (t > walk0 && t < walk1 && walk1 > walk0 + 0.2) {
            sp = cfg.speed * smoothstep((t - walk0) / 0.4) * smoothstep((walk1 - t) / 0.4);
        }
        if (i > 0) {
            double omega = 0;
            for (const auto& tr : turns) omega += tr.a * std::sin(2 * M_PI * tr.f * t + tr.p);
            heading += omega * (sp / cfg.speed) * dt;
            root_xy += Vec3(std::cos(heading), std::sin(heading), 0) * sp * dt;
            phase += 2 * M_PI * sp * dt / stride;
        }
        const double moving = sp / cfg.speed;

        HumanFrame f;
        f.root.rot = yaw_rot(heading);
        f.root.trans = Vec3(root_xy.x(), root_xy.y(), 0.95 + 0.015 * std::sin(2 * phase) * moving);
        for (auto& jr : f.joint_rot) jr = Rot6::identity();
        auto set_local = [&](int joint, const Rot6& r) { f.joint_rot[joint - 1] = r; };

        // marching gait: only forward swings, so the stance leg stays planted
        const double swing_l = leg_amp * std::max(0.0, std::sin(phase)) * moving;
        const double swing_r = leg_amp * std::max(0.0, std::sin(phase + M_PI)) * moving;
        set_local(j_lhip, axis_angle(Vec3(0, 1, 0), swing_l));
        set_local(j_rhip, axis_angle(Vec3(0, 1, 0), swing_r));
        set_local(j_lknee, axis_angle(Vec3(0, 1, 0), 0.6 * swing_l));
        set_local(j_rknee, axis_angle(Vec3(0, 1, 0), 0.6 * swing_r));

        // arm swing, counter-phased to the legs
        ArmPose left{arm_amp * std::sin(phase + M_PI) * moving, 0.1};
        ArmPose right{-arm_amp * std::sin(phase) * moving, -0.1};
        if (with_object) {
            // blend the carrying arm into the hold pose around the pick,
            // and back out after the release
            double blend = 0;
            if (t >= t_pick - reach_time && i <= f_release) {
                blend = smoothstep((t - (t_pick - reach_time)) / reach_time);
            } else if (i > f_release) {
                blend = 1.0 - smoothstep((t - t_release) / reach_time);
            }
            right.shoulder = (1 - blend) * right.shoulder + blend * -hold.shoulder;
            right.elbow = (1 - blend) * right.elbow + blend * -hold.elbow;
        }
        set_local(j_lsho, axis_angle(Vec3(0, 0, 1), left.shoulder));
        set_local(j_lelb, axis_angle(Vec3(0, 0, 1), left.elbow));
        set_local(j_rsho, axis_angle(Vec3(0, 0, 1), right.shoulder));
        set_local(j_relb, axis_angle(Vec3(0, 0, 1), right.elbow));
        human[i] = f;
    }

    InteractionSequence seq;
    seq.fps = cfg.fps;
    seq.frames.resize(N);
    for (int i = 0; i < N; ++i) seq.frames[i].human = human[i];

    if (with_object) {
        const ObjectTemplate tpl = make_object_template(cfg.object_class, cfg.object_vertices);
        seq.object_class = cfg.object_class;
        seq.object_vertex_count = cfg.object_vertices;

        // rigid attachment: canonical vertex 0 lands 2 cm in front of the
        // wrist joint, which keeps the wrist anchor inside tau_c
        Se3 attach;
        if (cfg.scenario == Scenario::push) {
            attach.rot = yaw_rot(0.3);
        } else {
            attach.rot = axis_angle(Vec3(0.3, 1, 0.2), 0.4);
        }
        attach.trans = Vec3(0.02, 0, 0) - rot6_to_matrix(attach.rot) * tpl.vertices[0];

        auto wrist_pose = [&](int i) {
            const FkResult w = fk_full(skel, human[i]);
            return se3_from_parts(w.rot[j_rwrist], w.pos[j_rwrist]);
        };
        const Se3 rest_before = se3_compose(wrist_pose(f_pick), attach);
        const Se3 rest_after = se3_compose(wrist_pose(f_release), attach);
        for (int i = 0; i < N; ++i) {
            ObjectFrame of;
            if (i < f_pick) of.pose = rest_before;
            else if (i <= f_release) of.pose = se3_compose(wrist_pose(i), attach);
            else of.pose = rest_after;
            seq.frames[i].object = of;
        }
        const ContactConfig ccfg{cfg.tau_c, cfg.tau_f};
        for (int i = 0; i < N; ++i) {
            seq.frames[i].contact =
                compute_contacts(skel, human[i], tpl, *seq.frames[i].object, ccfg);
        }
    }
    seq.validate();
    return seq;
}

}  // namespace hoistream
