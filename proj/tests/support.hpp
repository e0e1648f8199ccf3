#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bsm/bsm.hpp"

namespace bsm::testing {

// Two men, two women, opposite first choices: both optima differ everywhere.
inline const char* two_by_two_text = "men: m1 m2\n"
                                     "women: w1 w2\n"
                                     "m1: w1 w2\n"
                                     "m2: w2 w1\n"
                                     "w1: m2 m1\n"
                                     "w2: m1 m2\n"
                                     "k: 4\n";

inline Instance two_by_two() { return parse_instance(two_by_two_text); }

// Everyone ranks the partner with the same index first.
inline Instance mutual_first(int n)
{
    InstanceBuilder b;
    for (int i = 0; i < n; ++i)
        b.add_man("m" + std::to_string(i + 1));
    for (int i = 0; i < n; ++i)
        b.add_woman("w" + std::to_string(i + 1));
    for (int m = 0; m < n; ++m) {
        Rank r = 1;
        b.set_rank(Side::man, m, m, r++);
        for (int w = 0; w < n; ++w)
            if (w != m)
                b.set_rank(Side::man, m, w, r++);
    }
    for (int w = 0; w < n; ++w) {
        Rank r = 1;
        b.set_rank(Side::woman, w, w, r++);
        for (int m = 0; m < n; ++m)
            if (m != w)
                b.set_rank(Side::woman, w, m, r++);
    }
    return b.build();
}

inline Matching by_names(const Instance& inst, std::vector<std::pair<std::string, std::string>> pairs)
{
    Matching mu(inst);
    for (const auto& [m, w] : pairs)
        mu.match(*inst.find(Side::man, m), *inst.find(Side::woman, w));
    return mu;
}

// Seeded corpus: alternating complete and partial lists, at most `max_people`
// per side.
inline std::vector<Instance> corpus(std::uint64_t seed, int count, int max_people = 7)
{
    std::mt19937_64 rng(seed);
    std::vector<Instance> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        InstanceShape shape;
        shape.max_people = max_people;
        shape.density = (i % 2 == 0) ? 1.0 : 0.5 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng);
        out.push_back(random_instance(rng, shape));
    }
    return out;
}

inline Graph triangle_plus_two_edges()
{
    GraphBuilder b;
    for (int i = 0; i < 7; ++i)
        b.vertex("v" + std::to_string(i + 1));
    b.edge(0, 1);
    b.edge(1, 2);
    b.edge(0, 2);
    b.edge(3, 4);
    b.edge(5, 6);
    return b.build();
}

// Every assignment of the given men to strictly worse women, repeats
// allowed, with total rank increase at most r.
inline std::vector<BranchCertificate> brute_certificates(const Instance& inst, const Matching& mm,
                                                         const std::vector<int>& men, Cost r)
{
    std::vector<BranchCertificate> out;
    BranchCertificate cur;
    auto go = [&](auto&& self, std::size_t i) -> void {
        if (i == men.size()) {
            if (cur.cost <= r)
                out.push_back(cur);
            return;
        }
        const int m = men[i];
        const Rank base = inst.man_rank(m, mm.wife(m));
        for (const auto& e : inst.prefs(Side::man, m)) {
            if (e.rank <= base)
                continue;
            cur.pairs.emplace_back(m, e.partner);
            cur.cost += e.rank - base;
            self(self, i + 1);
            cur.cost -= e.rank - base;
            cur.pairs.pop_back();
        }
    };
    go(go, 0);
    return out;
}

inline std::vector<BranchCertificate> sorted(std::vector<BranchCertificate> v)
{
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.pairs < b.pairs; });
    return v;
}

} // namespace bsm::testing
