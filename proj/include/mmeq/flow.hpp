#pragma once

#include <utility>
#include <vector>

#include "mmeq/error.hpp"
#include "mmeq/rational.hpp"

namespace mmeq::graph {

// Dinic max flow over an ordered additive capacity type (Rational for
// allocation networks, EtaRational for parametric cuts just right of a
// breakpoint). Determinism: adjacency is scanned in insertion order and
// augmenting paths are found by the usual level/iterator discipline, so
// identical inputs always yield identical flows.
//
// "Infinite" capacity is an explicit per-arc marker, never a big sentinel
// value — exact arithmetic forbids magnitude guessing.
template <class Cap>
class FlowSolver {
public:
    explicit FlowSolver(int node_count)
        : adj_(node_count), level_(node_count), it_(node_count) {}

    int node_count() const { return static_cast<int>(adj_.size()); }

    int add_arc(int from, int to, Cap cap) {
        internal_check(!(cap < Cap()), "negative arc capacity");
        return push_arc(from, to, std::move(cap), false);
    }

    int add_infinite_arc(int from, int to) { return push_arc(from, to, Cap(), true); }

    void solve(int s, int t) {
        internal_check(s != t, "source equals sink");
        value_ = Cap();
        while (bfs(s, t)) {
            std::fill(it_.begin(), it_.end(), 0);
            for (;;) {
                Cap pushed = dfs(s, t, nullptr);
                if (!(Cap() < pushed)) break;
                value_ += pushed;
            }
        }
    }

    const Cap& value() const { return value_; }

    // Net flow along the arc (reads the paired reverse arc's residual, which
    // is exact for finite and infinite arcs alike).
    const Cap& flow_on(int arc_id) const {
        const ArcRef& ref = arc_refs_[arc_id];
        const ArcRec& fwd = adj_[ref.node][ref.index];
        return adj_[fwd.to][fwd.rev].res;
    }

    // Canonical minimal min-cut source side: nodes reachable from s in the
    // residual graph after a maximum flow.
    std::vector<char> min_cut_source_side_minimal(int s) const {
        std::vector<char> in_side(adj_.size(), 0);
        std::vector<int> stack{s};
        in_side[s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const ArcRec& e : adj_[v])
                if (!in_side[e.to] && (e.inf || Cap() < e.res)) {
                    in_side[e.to] = 1;
                    stack.push_back(e.to);
                }
        }
        return in_side;
    }

    // Maximal min-cut source side: complement of the nodes that can still
    // reach t in the residual graph. Used where ties must resolve to the
    // largest tight set.
    std::vector<char> min_cut_source_side_maximal(int t) const {
        std::vector<char> reaches_t(adj_.size(), 0);
        std::vector<int> stack{t};
        reaches_t[t] = 1;
        while (!stack.empty()) {
            int w = stack.back();
            stack.pop_back();
            // An arc x->w sits in adj_[x]; its paired reverse lives in adj_[w],
            // so scanning adj_[w] and testing each entry's reverse finds all
            // residual in-arcs of w.
            for (const ArcRec& back : adj_[w]) {
                const ArcRec& into_w = adj_[back.to][back.rev];
                if (!reaches_t[back.to] && (into_w.inf || Cap() < into_w.res)) {
                    reaches_t[back.to] = 1;
                    stack.push_back(back.to);
                }
            }
        }
        std::vector<char> in_side(adj_.size(), 0);
        for (std::size_t v = 0; v < adj_.size(); ++v) in_side[v] = !reaches_t[v];
        return in_side;
    }

private:
    struct ArcRec {
        int to;
        int rev;  // index of the paired arc in adj_[to]
        bool inf; // infinite capacity marker; res unused for capacity if set
        Cap res;  // remaining capacity (finite arcs) / pushed flow (reverse arcs)
    };
    struct ArcRef {
        int node;
        int index;
    };

    int push_arc(int from, int to, Cap cap, bool inf) {
        internal_check(from != to, "self-loop arc");
        adj_[from].push_back(ArcRec{to, static_cast<int>(adj_[to].size()), inf, std::move(cap)});
        adj_[to].push_back(ArcRec{from, static_cast<int>(adj_[from].size()) - 1, false, Cap()});
        arc_refs_.push_back(ArcRef{from, static_cast<int>(adj_[from].size()) - 1});
        return static_cast<int>(arc_refs_.size()) - 1;
    }

    bool has_residual(const ArcRec& e) const { return e.inf || Cap() < e.res; }

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::vector<int> queue{s};
        level_[s] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            int v = queue[head];
            for (const ArcRec& e : adj_[v])
                if (level_[e.to] < 0 && has_residual(e)) {
                    level_[e.to] = level_[v] + 1;
                    queue.push_back(e.to);
                }
        }
        return level_[t] >= 0;
    }

    // limit == nullptr means "no finite arc seen yet". Every network built by
    // this library has finite source arcs, so an all-infinite s-t path is an
    // internal error, not a modelling case.
    Cap dfs(int v, int t, const Cap* limit) {
        if (v == t) {
            internal_check(limit != nullptr, "unbounded augmenting path");
            return *limit;
        }
        for (int& i = it_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
            ArcRec& e = adj_[v][i];
            if (level_[e.to] != level_[v] + 1 || !has_residual(e)) continue;
            Cap tightened;
            const Cap* next = limit;
            if (!e.inf) {
                tightened = (limit != nullptr && *limit < e.res) ? *limit : e.res;
                next = &tightened;
            }
            Cap got = dfs(e.to, t, next);
            if (Cap() < got) {
                if (!e.inf) e.res -= got;
                adj_[e.to][e.rev].res += got;
                return got;
            }
        }
        level_[v] = -1;
        return Cap();
    }

    std::vector<std::vector<ArcRec>> adj_;
    std::vector<ArcRef> arc_refs_;
    std::vector<int> level_;
    std::vector<int> it_;
    Cap value_;
};

// Plain-data network for the public max-flow / min-cut operations.
struct FlowNetwork {
    struct Arc {
        int from = 0;
        int to = 0;
        Rational cap;         // ignored when infinite
        bool infinite = false;
    };
    int node_count = 0;
    int source = 0;
    int sink = 0;
    std::vector<Arc> arcs;
};

struct MaxFlowResult {
    Rational value;
    std::vector<Rational> arc_flow; // aligned with FlowNetwork::arcs
};

// Exact maximum flow. Validates the network invariants (capacities >= 0,
// source has no in-arcs, sink no out-arcs).
MaxFlowResult max_flow(const FlowNetwork& net);

// The canonical minimal min cut: (source side, sink side) node lists, both
// sorted ascending; cut capacity equals the max-flow value exactly.
std::pair<std::vector<int>, std::vector<int>> min_cut_partition(const FlowNetwork& net);

} // namespace mmeq::graph
