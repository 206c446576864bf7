#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hoistream/body.hpp"

namespace hoistream {

struct SequenceFrame {
    HumanFrame human;
    std::optional<ObjectFrame> object;
    std::optional<ContactVector> contact;
};

// World-frame interaction record; object/contact are present for every
// frame or for none (motion-only).
struct InteractionSequence {
    double fps = 30;
    std::string skeleton_ref = "default22";
    std::optional<int> object_class;
    std::optional<int> object_vertex_count;
    std::vector<SequenceFrame> frames;

    bool has_object() const { return object_class.has_value(); }
    int size() const { return static_cast<int>(frames.size()); }
    void validate() const;
};

// seq/1 JSON-Lines: one header object, then one object per frame.
void write_sequence(const InteractionSequence& seq, const std::string& path);
InteractionSequence read_sequence(const std::string& path);

}  // namespace hoistream
