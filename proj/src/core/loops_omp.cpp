#include "cldforge/loops.hpp"

#include "loop_search.hpp"

#include <atomic>

namespace cldforge {

std::vector<FeedbackLoop> enumerate_loops(const CausalLoopDiagram& diagram, std::size_t max_loops) {
    const auto graph = detail::rank_graph(diagram);
    const auto n = static_cast<long>(graph.successors.size());

    std::vector<std::vector<detail::RankCycle>> per_start(graph.successors.size());
    std::atomic<std::size_t> found{0};
    std::atomic<bool> overflow{false};

#pragma omp parallel for schedule(dynamic, 1)
    for (long start = 0; start < n; ++start) {
        if (overflow.load(std::memory_order_relaxed)) continue;
        auto& out = per_start[static_cast<std::size_t>(start)];
        detail::cycles_from_start(graph, static_cast<std::size_t>(start),
                                  [&](const detail::RankCycle& cycle) {
                                      if (found.fetch_add(1, std::memory_order_relaxed) >= max_loops) {
                                          overflow.store(true, std::memory_order_relaxed);
                                          return false;
                                      }
                                      out.push_back(cycle);
                                      return !overflow.load(std::memory_order_relaxed);
                                  });
    }
    if (overflow) detail::throw_too_many_loops(max_loops);

    std::vector<detail::RankCycle> cycles;
    for (auto& bucket : per_start)
        for (auto& cycle : bucket) cycles.push_back(std::move(cycle));
    return detail::finalize_loops(diagram, graph, std::move(cycles));
}

} // namespace cldforge
