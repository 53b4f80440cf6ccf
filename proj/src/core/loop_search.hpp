#pragma once

// Shared machinery for the serial and OpenMP cycle enumerators.

#include "cldforge/diagram.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace cldforge::detail {

// Vertices renumbered by ascending normalized name, so a cycle found from its
// lowest-ranked vertex is already in canonical rotation.
struct RankedGraph {
    std::vector<std::size_t> variable_of_rank;
    std::vector<std::vector<std::size_t>> successors;  // ranks, ascending
};

RankedGraph rank_graph(const CausalLoopDiagram& diagram);

using RankCycle = std::vector<std::size_t>;

// Johnson's circuit search restricted to vertices with rank >= start: emits
// every simple cycle whose lowest rank is start. Stops early once `emit`
// returns false.
template <class Emit>
void cycles_from_start(const RankedGraph& graph, std::size_t start, Emit&& emit);

// Sorts by (length, rank sequence) and materializes FeedbackLoops.
std::vector<FeedbackLoop> finalize_loops(const CausalLoopDiagram& diagram,
                                         const RankedGraph& graph,
                                         std::vector<RankCycle> cycles);

[[noreturn]] void throw_too_many_loops(std::size_t max_loops);

template <class Emit>
void cycles_from_start(const RankedGraph& graph, std::size_t start, Emit&& emit) {
    const std::size_t n = graph.successors.size();
    std::vector<char> blocked(n, 0);
    std::vector<std::vector<std::size_t>> blocked_by(n);
    RankCycle stack;
    bool stop = false;

    auto unblock = [&](std::size_t v, auto& self) -> void {
        blocked[v] = 0;
        auto waiting = std::move(blocked_by[v]);
        blocked_by[v].clear();
        for (std::size_t w : waiting)
            if (blocked[w]) self(w, self);
    };

    auto circuit = [&](std::size_t v, auto& self) -> bool {
        bool found = false;
        stack.push_back(v);
        blocked[v] = 1;
        for (std::size_t w : graph.successors[v]) {
            if (stop) break;
            if (w < start) continue;
            if (w == start) {
                found = true;
                if (!emit(stack)) stop = true;
            } else if (!blocked[w] && self(w, self)) {
                found = true;
            }
        }
        if (found) {
            unblock(v, unblock);
        } else {
            for (std::size_t w : graph.successors[v]) {
                if (w < start) continue;
                auto& list = blocked_by[w];
                if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
            }
        }
        stack.pop_back();
        return found;
    };

    circuit(start, circuit);
}

} // namespace cldforge::detail
