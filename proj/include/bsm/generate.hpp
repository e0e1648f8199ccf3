#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "bsm/hardness.hpp"
#include "bsm/instance.hpp"

namespace bsm {

struct InstanceShape {
    int min_people = 1;
    int max_people = 7;
    double density = 1.0; // probability that a man-woman pair is acceptable
};

/// Random instance with independent uniform preference orders over the
/// acceptable pairs. The two sides may differ in size.
inline Instance random_instance(std::mt19937_64& rng, const InstanceShape& shape = {})
{
    std::uniform_int_distribution<int> size(shape.min_people, shape.max_people);
    std::bernoulli_distribution keep(shape.density);
    const int men = size(rng);
    const int women = size(rng);
    std::vector<std::vector<int>> men_lists(men), women_lists(women);
    for (int m = 0; m < men; ++m)
        for (int w = 0; w < women; ++w)
            if (keep(rng)) {
                men_lists[m].push_back(w);
                women_lists[w].push_back(m);
            }
    InstanceBuilder b;
    for (int m = 0; m < men; ++m)
        b.add_man("m" + std::to_string(m + 1));
    for (int w = 0; w < women; ++w)
        b.add_woman("w" + std::to_string(w + 1));
    for (int m = 0; m < men; ++m) {
        std::shuffle(men_lists[m].begin(), men_lists[m].end(), rng);
        for (std::size_t i = 0; i < men_lists[m].size(); ++i)
            b.set_rank(Side::man, m, men_lists[m][i], static_cast<Rank>(i) + 1);
    }
    for (int w = 0; w < women; ++w) {
        std::shuffle(women_lists[w].begin(), women_lists[w].end(), rng);
        for (std::size_t i = 0; i < women_lists[w].size(); ++i)
            b.set_rank(Side::woman, w, women_lists[w][i], static_cast<Rank>(i) + 1);
    }
    return b.build();
}

/// Random simple graph on n vertices with m edges. With `plant_triangle` the
/// first three edges form a triangle on random vertices; otherwise edges that
/// would close a triangle are rejected (m must then be feasible).
inline Graph random_graph(std::mt19937_64& rng, int n, int m, bool plant_triangle)
{
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    std::vector<std::pair<int, int>> edges;
    auto add = [&](int u, int v) {
        adj[u][v] = adj[v][u] = true;
        edges.emplace_back(std::min(u, v), std::max(u, v));
    };
    if (plant_triangle) {
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        add(perm[0], perm[1]);
        add(perm[1], perm[2]);
        add(perm[0], perm[2]);
    }
    std::vector<std::pair<int, int>> pool;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            pool.emplace_back(u, v);
    std::shuffle(pool.begin(), pool.end(), rng);
    for (auto [u, v] : pool) {
        if (static_cast<int>(edges.size()) >= m)
            break;
        if (adj[u][v])
            continue;
        if (!plant_triangle) {
            bool closes = false;
            for (int x = 0; x < n && !closes; ++x)
                closes = adj[u][x] && adj[v][x];
            if (closes)
                continue;
        }
        add(u, v);
    }
    std::shuffle(edges.begin(), edges.end(), rng);
    GraphBuilder b;
    for (int v = 0; v < n; ++v)
        b.vertex("v" + std::to_string(v + 1));
    for (auto [u, v] : edges)
        b.edge(u, v);
    return b.build();
}

} // namespace bsm
