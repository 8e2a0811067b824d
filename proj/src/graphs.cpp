#include "c2m/graphs.hpp"

#include <cmath>
#include <map>

namespace c2m {

ClusterGraph build_graph(const PointSet& points, const Labeling& y) {
    validate_labeling(y, points.n());
    const std::size_t n = points.n();
    ClusterGraph g{points.matrix(), Matrix(n, n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (y[i] == y[j]) g.adjacency(i, j) = g.adjacency(j, i) = 1.0;
    return g;
}

NormalizedAdjacency normalize(const ClusterGraph& g) {
    const std::size_t n = g.nodes();
    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 1.0;  // self loop
        for (double v : g.adjacency.row(i)) deg += v;
        inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = g.adjacency(i, j) + (i == j ? 1.0 : 0.0);
            if (a != 0.0) out(i, j) = inv_sqrt_deg[i] * a * inv_sqrt_deg[j];
        }
    }
    return {std::move(out)};
}

std::size_t edge_count(const ClusterGraph& g) {
    std::size_t e = 0;
    for (double v : g.adjacency.data())
        if (v != 0.0) ++e;
    return e;
}

std::vector<std::vector<std::size_t>> cliques(const ClusterGraph& g) {
    const std::size_t n = g.nodes();
    std::vector<int> seen(n, 0);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i]) continue;
        std::vector<std::size_t> members{i};
        for (std::size_t j = i + 1; j < n; ++j)
            if (g.adjacency(i, j) != 0.0) members.push_back(j);
        for (std::size_t a : members) {
            if (seen[a]) throw ValidationError("adjacency is not a union of cliques");
            seen[a] = 1;
            std::size_t degree = 0;
            for (double v : g.adjacency.row(a))
                if (v != 0.0) ++degree;
            if (degree + 1 != members.size() || g.adjacency(a, a) != 0.0)
                throw ValidationError("adjacency is not a union of cliques");
            for (std::size_t b : members)
                if (a != b && g.adjacency(a, b) == 0.0)
                    throw ValidationError("adjacency is not a union of cliques");
        }
        out.push_back(std::move(members));
    }
    return out;
}

std::vector<std::vector<std::size_t>> groups_of(const Labeling& y) {
    std::map<Label, std::size_t> slot;
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto [it, inserted] = slot.try_emplace(y[i], out.size());
        if (inserted) out.emplace_back();
        out[it->second].push_back(i);
    }
    return out;
}

}  // namespace c2m
