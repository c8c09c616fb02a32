#pragma once

#include <vector>

#include "mmeq/core.hpp"

namespace mmeq::graph {

// Bipartite like-graph: edge (agent i, good j) iff u[i][j] = 1.
struct LikeGraph {
    int n = 0;
    std::vector<std::vector<int>> liked;     // per agent, liked goods ascending
    std::vector<std::vector<int>> liked_by;  // per good, liking agents ascending

    static LikeGraph from_utilities(const UtilityMatrix& u);
    bool has_edge(int agent, int good) const;
};

// agent -> matched good (or -1), plus the reverse map. Deterministic: Kuhn's
// augmenting paths in ascending agent index, adjacency in ascending good index.
struct Matching {
    std::vector<int> good_of_agent;
    std::vector<int> agent_of_good;
    int size = 0;
};

Matching max_matching(const LikeGraph& g);
// Restriction masks: only agents/goods with a true mask participate.
Matching max_matching(const LikeGraph& g, const std::vector<char>& agent_mask,
                      const std::vector<char>& good_mask);

// The vertex-cover split both solvers start from:
//   G1 u A2 is a minimum vertex cover minimizing |A2| among minimum covers;
//   A1 agents have all liked goods inside G1;
//   A2 matches into G2 (strict expansion |N(S) n G2| > |S| for S inside A2);
//   Hall holds on the G1 side: |N(S) n A1| >= |S| for S inside G1.
struct CoverPartition {
    std::vector<int> A1, A2; // agent split
    std::vector<int> G1, G2; // good split
    std::vector<char> in_A2, in_G1;
};

// Computed as a minimum cut with agent vertices weighted 1 + 1/(n+1): any
// minimum-weight cover is then lexicographically minimum in (size, #agents),
// and the canonical minimal cut side makes the choice deterministic.
CoverPartition min_vertex_cover_min_agents(const LikeGraph& g);

} // namespace mmeq::graph
