#include "mmeq/flow.hpp"

namespace mmeq::graph {

namespace {

FlowSolver<Rational> build_solver(const FlowNetwork& net) {
    internal_check(net.node_count >= 2, "network needs at least source and sink");
    internal_check(net.source != net.sink, "source equals sink");
    for (const auto& a : net.arcs) {
        internal_check(0 <= a.from && a.from < net.node_count, "arc endpoint out of range");
        internal_check(0 <= a.to && a.to < net.node_count, "arc endpoint out of range");
        internal_check(a.to != net.source, "source has an in-arc");
        internal_check(a.from != net.sink, "sink has an out-arc");
        internal_check(a.infinite || a.cap.sign() >= 0, "negative capacity");
    }
    FlowSolver<Rational> solver(net.node_count);
    for (const auto& a : net.arcs) {
        if (a.infinite)
            solver.add_infinite_arc(a.from, a.to);
        else
            solver.add_arc(a.from, a.to, a.cap);
    }
    return solver;
}

} // namespace

MaxFlowResult max_flow(const FlowNetwork& net) {
    FlowSolver<Rational> solver = build_solver(net);
    solver.solve(net.source, net.sink);
    MaxFlowResult out;
    out.value = solver.value();
    out.arc_flow.resize(net.arcs.size());
    for (std::size_t i = 0; i < net.arcs.size(); ++i) out.arc_flow[i] = solver.flow_on(i);
    return out;
}

std::pair<std::vector<int>, std::vector<int>> min_cut_partition(const FlowNetwork& net) {
    FlowSolver<Rational> solver = build_solver(net);
    solver.solve(net.source, net.sink);
    std::vector<char> in_side = solver.min_cut_source_side_minimal(net.source);
    std::pair<std::vector<int>, std::vector<int>> out;
    for (int v = 0; v < net.node_count; ++v)
        (in_side[v] ? out.first : out.second).push_back(v);
    return out;
}

} // namespace mmeq::graph
