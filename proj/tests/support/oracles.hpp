#pragma once

// Independent reference computations used to check the library.

#include "cldforge/diagram.hpp"

#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oracle {

// Cycle as normalized member names, rotated to start at the smallest name.
using Cycle = std::vector<std::string>;

// Every simple cycle found by exhaustive DFS from every vertex, with its kind
// from the product of link signs.
std::map<Cycle, cldforge::LoopKind> all_cycles(const cldforge::CausalLoopDiagram& diagram);

// Full-matrix Levenshtein over code points decoded with the standard library.
std::size_t levenshtein(std::string_view a, std::string_view b);
double similarity(std::string_view a, std::string_view b);

struct Assignment {
    double total = 0.0;
    std::vector<std::pair<std::string, std::string>> pairs;  // normalized (generated, truth)
};

// Best total similarity over every partial one-to-one assignment of pairs
// with similarity >= threshold.
Assignment best_assignment(const std::vector<std::string>& generated, const std::vector<std::string>& truth,
                           double threshold);

struct LinkCounts {
    std::size_t strict = 0;
    std::size_t lenient = 0;
    std::size_t generated = 0;
    std::size_t truth = 0;
};

// Compares every generated link with every truth link under the node mapping.
LinkCounts pairwise_link_counts(const cldforge::CausalLoopDiagram& generated,
                                const cldforge::CausalLoopDiagram& truth,
                                const std::vector<std::pair<std::string, std::string>>& mapping);

struct RandomDiagramOptions {
    std::size_t max_variables = 8;
    std::size_t max_links = 20;
    bool self_loops = true;
    bool messy_names = false;  // mixed case, padding and non-ASCII letters
};

cldforge::CausalLoopDiagram random_diagram(std::mt19937& rng, const RandomDiagramOptions& options);

// Same variables and links in a shuffled link order.
cldforge::CausalLoopDiagram shuffled(const cldforge::CausalLoopDiagram& diagram, std::mt19937& rng);

} // namespace oracle
