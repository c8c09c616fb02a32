#include "mmeq/bipartite.hpp"

#include <algorithm>

#include "mmeq/error.hpp"
#include "mmeq/flow.hpp"

namespace mmeq::graph {

LikeGraph LikeGraph::from_utilities(const UtilityMatrix& u) {
    const int n = static_cast<int>(u.size());
    LikeGraph g;
    g.n = n;
    g.liked.assign(n, {});
    g.liked_by.assign(n, {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (u[i][j] == Rational(1)) {
                g.liked[i].push_back(j);
                g.liked_by[j].push_back(i);
            }
    return g;
}

bool LikeGraph::has_edge(int agent, int good) const {
    return std::binary_search(liked[agent].begin(), liked[agent].end(), good);
}

namespace {

bool try_augment(const LikeGraph& g, int agent, const std::vector<char>& good_mask,
                 std::vector<int>& good_of_agent, std::vector<int>& agent_of_good,
                 std::vector<char>& visited) {
    for (int j : g.liked[agent]) {
        if (!good_mask[j] || visited[j]) continue;
        visited[j] = 1;
        if (agent_of_good[j] < 0 ||
            try_augment(g, agent_of_good[j], good_mask, good_of_agent, agent_of_good, visited)) {
            good_of_agent[agent] = j;
            agent_of_good[j] = agent;
            return true;
        }
    }
    return false;
}

} // namespace

Matching max_matching(const LikeGraph& g, const std::vector<char>& agent_mask,
                      const std::vector<char>& good_mask) {
    Matching m;
    m.good_of_agent.assign(g.n, -1);
    m.agent_of_good.assign(g.n, -1);
    std::vector<char> visited(g.n, 0);
    for (int i = 0; i < g.n; ++i) {
        if (!agent_mask[i]) continue;
        std::fill(visited.begin(), visited.end(), 0);
        if (try_augment(g, i, good_mask, m.good_of_agent, m.agent_of_good, visited)) ++m.size;
    }
    return m;
}

Matching max_matching(const LikeGraph& g) {
    std::vector<char> all(g.n, 1);
    return max_matching(g, all, all);
}

CoverPartition min_vertex_cover_min_agents(const LikeGraph& g) {
    const int n = g.n;
    // Nodes: 0 = source, 1..n agents, n+1..2n goods, 2n+1 = sink.
    const int S = 0, T = 2 * n + 1;
    auto agent_node = [&](int i) { return 1 + i; };
    auto good_node = [&](int j) { return 1 + n + j; };

    // Cutting an agent costs 1 + 1/(n+1), a good costs 1. Since n/(n+1) < 1,
    // every minimum-weight cut is a minimum-size cover with the fewest agents.
    FlowSolver<Rational> solver(2 * n + 2);
    const Rational agent_weight(static_cast<long>(n) + 2, static_cast<long>(n) + 1);
    for (int i = 0; i < n; ++i) solver.add_arc(S, agent_node(i), agent_weight);
    for (int j = 0; j < n; ++j) solver.add_arc(good_node(j), T, Rational(1));
    for (int i = 0; i < n; ++i)
        for (int j : g.liked[i]) solver.add_infinite_arc(agent_node(i), good_node(j));
    solver.solve(S, T);
    std::vector<char> side = solver.min_cut_source_side_minimal(S);

    CoverPartition out;
    out.in_A2.assign(n, 0);
    out.in_G1.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        if (side[agent_node(i)]) out.A1.push_back(i);
        else { out.A2.push_back(i); out.in_A2[i] = 1; }
    }
    for (int j = 0; j < n; ++j) {
        if (side[good_node(j)]) { out.G1.push_back(j); out.in_G1[j] = 1; }
        else out.G2.push_back(j);
    }

    // Certify the cut really is a cover of the expected size (Koenig).
    for (int i : out.A1)
        for (int j : g.liked[i])
            internal_check(out.in_G1[j], "min-agent cover misses an edge");
    const Matching m = max_matching(g);
    internal_check(static_cast<int>(out.G1.size() + out.A2.size()) == m.size,
                   "cover size differs from maximum matching size");
    return out;
}

} // namespace mmeq::graph
