#pragma once

#include "hoistream/seq.hpp"

namespace hoistream {

enum class Scenario { carry, push, place, idle_walk };

Scenario scenario_from_string(const std::string& s);
std::string to_string(Scenario s);

struct ScenarioConfig {
    Scenario scenario = Scenario::carry;
    int frames = 120;
    int object_class = 0;
    int object_vertices = 256;
    double fps = 30;
    double speed = 0.9;       // walk speed, m/s
    double turn_rate = 0.35;  // max heading rate while walking, rad/s
    double tau_c = 0.05;
    double tau_f = 0.05;
    int min_frames = 60;  // window-size guard
    uint64_t seed = 0;
};

// Scripted human-object scenarios on the z=0 floor: a smooth wandering
// root trajectory with cyclic limb motion; for object scenarios a reach
// phase brings a wrist to the object, the carry phase rigidly attaches the
// object to the wrist, and the release leaves it in place. Contacts are
// computed from the generated geometry, so they are consistent with it by
// construction.
InteractionSequence gen_scenario(const ScenarioConfig& cfg);

}  // namespace hoistream
