#pragma once

#include <vector>

#include "rbc/rbc.hpp"

namespace rbc::testing {

inline std::vector<Comm> world_comms(Fabric& fabric, CommMode mode = CommMode::TagScoped) {
    std::vector<Comm> out;
    for (int r = 0; r < fabric.size(); ++r)
        out.push_back(create_from_world(fabric, BaseRank(r), mode));
    return out;
}

} // namespace rbc::testing
