#pragma once

#include "cldforge/diagram.hpp"

#include <cstddef>
#include <vector>

namespace cldforge {

inline constexpr std::size_t kDefaultMaxLoops = 10'000;

// Every simple cycle exactly once, rotated to start at the lexicographically
// smallest normalized name, sorted by (length, member names). Throws
// TooManyLoops once more than max_loops cycles exist.
//
// Start vertices are searched in parallel (OpenMP); the result is identical
// to enumerate_loops_serial.
std::vector<FeedbackLoop> enumerate_loops(const CausalLoopDiagram& diagram,
                                          std::size_t max_loops = kDefaultMaxLoops);

// Single-threaded reference for enumerate_loops.
std::vector<FeedbackLoop> enumerate_loops_serial(const CausalLoopDiagram& diagram,
                                                 std::size_t max_loops = kDefaultMaxLoops);

} // namespace cldforge
