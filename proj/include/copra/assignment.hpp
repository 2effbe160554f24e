#pragma once

#include <map>
#include <set>
#include <string>

#include "copra/error.hpp"

namespace copra {

// user -> dense community label; labels are contiguous integers ordered by
// descending community size. Optional display names attached afterwards.
struct CommunityAssignment {
    std::map<std::string, int> labels;
    int community_count = 0;
    std::map<int, std::string> names;

    std::string display_name(int label) const {
        auto it = names.find(label);
        return it != names.end() ? it->second : std::to_string(label);
    }
};

// Attaches human labels to community numbers. Unnamed communities keep their
// numeric label; duplicate names are rejected.
inline CommunityAssignment label_assignment(const CommunityAssignment& assignment,
                                            const std::map<int, std::string>& name_map) {
    CommunityAssignment out = assignment;
    std::set<std::string> seen;
    for (const auto& [label, name] : name_map) {
        if (!seen.insert(name).second)
            throw Error("duplicate community name '" + name + "'");
        if (label < 0 || label >= assignment.community_count)
            throw Error("community name map references unknown label " + std::to_string(label));
        out.names[label] = name;
    }
    return out;
}

// per-user coordination score in [0, 1]
using CoordinationScores = std::map<std::string, double>;

}  // namespace copra
