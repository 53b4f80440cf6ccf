#include "cldforge/evaluator.hpp"

#include <algorithm>
#include <limits>

namespace cldforge {

namespace {

using Matrix = std::vector<std::vector<double>>;

// Hungarian algorithm on the zero-padded square matrix, maximizing total
// weight. Returns column per row (or -1) and the achieved total.
std::pair<std::vector<int>, double> max_weight_assignment(const Matrix& w, std::size_t rows, std::size_t cols) {
    const std::size_t n = std::max(rows, cols);
    std::vector<int> row_to_col(rows, -1);
    if (n == 0) return {row_to_col, 0.0};

    auto cost = [&](std::size_t i, std::size_t j) { return (i < rows && j < cols) ? -w[i][j] : 0.0; };
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            std::size_t i0 = p[j0], j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    double total = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        std::size_t i = p[j] - 1;
        if (i < rows && j - 1 < cols && w[i][j - 1] > 0.0) {
            row_to_col[i] = static_cast<int>(j - 1);
            total += w[i][j - 1];
        }
    }
    return {row_to_col, total};
}

std::vector<VariableName> sorted_variables(const CausalLoopDiagram& d) {
    auto vars = d.variables();
    std::sort(vars.begin(), vars.end(),
              [](const VariableName& a, const VariableName& b) { return a.normalized() < b.normalized(); });
    return vars;
}

} // namespace

double NodeMatching::total_similarity() const {
    double total = 0.0;
    for (const auto& pair : pairs) total += pair.similarity;
    return total;
}

NodeMatching match_nodes(const CausalLoopDiagram& generated, const CausalLoopDiagram& truth, double threshold) {
    const auto gen = sorted_variables(generated);
    const auto tru = sorted_variables(truth);
    const std::size_t rows = gen.size(), cols = tru.size();

    Matrix sim(rows, std::vector<double>(cols, 0.0));
    Matrix weight(rows, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            sim[i][j] = name_similarity(gen[i].normalized(), tru[j].normalized());
            if (sim[i][j] >= threshold && sim[i][j] > 0.0) weight[i][j] = sim[i][j];
        }

    const double best = max_weight_assignment(weight, rows, cols).second;
    const double eps = 1e-9 * std::max(1.0, best);

    // Walk candidate pairs in lexicographic order, fixing each one that still
    // admits an optimal completion and forbidding the rest.
    std::vector<int> fixed_col(rows, -1);
    std::vector<char> col_taken(cols, 0);
    double fixed_total = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (weight[i][j] <= 0.0 || col_taken[j] || fixed_col[i] >= 0) continue;
            Matrix rest = weight;
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c)
                    if (r <= i || col_taken[c] || c == j) rest[r][c] = 0.0;
            double achievable = fixed_total + weight[i][j] + max_weight_assignment(rest, rows, cols).second;
            if (achievable >= best - eps) {
                fixed_col[i] = static_cast<int>(j);
                col_taken[j] = 1;
                fixed_total += weight[i][j];
            } else {
                weight[i][j] = 0.0;
            }
        }
    }

    NodeMatching out;
    for (std::size_t i = 0; i < rows; ++i) {
        if (fixed_col[i] >= 0)
            out.pairs.push_back({gen[i], tru[static_cast<std::size_t>(fixed_col[i])],
                                 sim[i][static_cast<std::size_t>(fixed_col[i])]});
        else
            out.unmatched_generated.push_back(gen[i]);
    }
    for (std::size_t j = 0; j < cols; ++j)
        if (!col_taken[j]) out.unmatched_truth.push_back(tru[j]);
    return out;
}

} // namespace cldforge
