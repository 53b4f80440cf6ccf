#include "cldforge/loops.hpp"

#include "loop_search.hpp"

#include <algorithm>
#include <numeric>

namespace cldforge {
namespace detail {

RankedGraph rank_graph(const CausalLoopDiagram& diagram) {
    const auto& vars = diagram.variables();
    RankedGraph graph;
    graph.variable_of_rank.resize(vars.size());
    std::iota(graph.variable_of_rank.begin(), graph.variable_of_rank.end(), std::size_t{0});
    std::sort(graph.variable_of_rank.begin(), graph.variable_of_rank.end(),
              [&](std::size_t a, std::size_t b) { return vars[a].normalized() < vars[b].normalized(); });

    std::vector<std::size_t> rank_of(vars.size());
    for (std::size_t r = 0; r < vars.size(); ++r) rank_of[graph.variable_of_rank[r]] = r;

    graph.successors.assign(vars.size(), {});
    for (const auto& link : diagram.links()) {
        auto from = rank_of[*diagram.index_of(link.source.normalized())];
        auto to = rank_of[*diagram.index_of(link.target.normalized())];
        graph.successors[from].push_back(to);
    }
    for (auto& succ : graph.successors) std::sort(succ.begin(), succ.end());
    return graph;
}

std::vector<FeedbackLoop> finalize_loops(const CausalLoopDiagram& diagram,
                                         const RankedGraph& graph,
                                         std::vector<RankCycle> cycles) {
    std::sort(cycles.begin(), cycles.end(), [](const RankCycle& a, const RankCycle& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });

    const auto& vars = diagram.variables();
    std::vector<FeedbackLoop> loops;
    loops.reserve(cycles.size());
    for (const auto& cycle : cycles) {
        FeedbackLoop loop;
        std::size_t negatives = 0;
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            const auto& from = vars[graph.variable_of_rank[cycle[i]]];
            const auto& to = vars[graph.variable_of_rank[cycle[(i + 1) % cycle.size()]]];
            const Link* link = diagram.find_link(from.normalized(), to.normalized());
            loop.links.push_back(*link);
            if (link->polarity == Polarity::Negative) ++negatives;
        }
        loop.kind = negatives % 2 == 0 ? LoopKind::Reinforcing : LoopKind::Balancing;
        loops.push_back(std::move(loop));
    }
    return loops;
}

void throw_too_many_loops(std::size_t max_loops) {
    throw TooManyLoops("diagram has more than " + std::to_string(max_loops) + " feedback loops");
}

} // namespace detail

std::vector<FeedbackLoop> enumerate_loops_serial(const CausalLoopDiagram& diagram,
                                                 std::size_t max_loops) {
    const auto graph = detail::rank_graph(diagram);
    std::vector<detail::RankCycle> cycles;
    bool overflow = false;
    for (std::size_t start = 0; start < graph.successors.size() && !overflow; ++start) {
        detail::cycles_from_start(graph, start, [&](const detail::RankCycle& cycle) {
            if (cycles.size() == max_loops) {
                overflow = true;
                return false;
            }
            cycles.push_back(cycle);
            return true;
        });
    }
    if (overflow) detail::throw_too_many_loops(max_loops);
    return detail::finalize_loops(diagram, graph, std::move(cycles));
}

} // namespace cldforge
