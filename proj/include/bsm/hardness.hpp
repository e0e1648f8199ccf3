#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bsm/error.hpp"
#include "bsm/gs.hpp"
#include "bsm/instance.hpp"
#include "bsm/io.hpp"
#include "bsm/oracle.hpp"

namespace bsm {

/// Simple undirected graph; vertex and edge order are fixed at construction.
struct Graph {
    std::vector<std::string> vertices;
    std::vector<std::pair<int, int>> edges; // first < second

    std::size_t degree(int v) const
    {
        return static_cast<std::size_t>(
            std::count_if(edges.begin(), edges.end(), [v](auto e) { return e.first == v || e.second == v; }));
    }

    bool adjacent(int u, int v) const
    {
        auto key = std::minmax(u, v);
        return std::find(edges.begin(), edges.end(), std::make_pair(key.first, key.second)) != edges.end();
    }
};

class GraphBuilder {
public:
    int vertex(std::string_view name)
    {
        auto [it, fresh] = index_.emplace(std::string(name), static_cast<int>(g_.vertices.size()));
        if (fresh)
            g_.vertices.emplace_back(name);
        return it->second;
    }

    void edge(int u, int v)
    {
        if (u == v)
            throw ValidationError("self-loop on '" + g_.vertices[u] + "'");
        auto e = std::minmax(u, v);
        if (std::find(g_.edges.begin(), g_.edges.end(), std::make_pair(e.first, e.second)) != g_.edges.end())
            throw ValidationError("duplicate edge " + g_.vertices[e.first] + " " + g_.vertices[e.second]);
        g_.edges.emplace_back(e.first, e.second);
    }

    Graph build() const { return g_; }

private:
    Graph g_;
    std::map<std::string, int> index_;
};

/// One `u v` edge per line; a lone token declares an isolated vertex.
/// Vertices are ordered by first appearance.
inline Graph parse_graph(std::string_view text)
{
    GraphBuilder b;
    for (auto [number, line] : detail::content_lines(text)) {
        auto tok = detail::tokens(line);
        if (tok.size() == 1) {
            b.vertex(tok[0]);
        } else if (tok.size() == 2) {
            const int u = b.vertex(tok[0]);
            const int v = b.vertex(tok[1]);
            b.edge(u, v);
        } else {
            throw ParseError("line " + std::to_string(number) + ": expected 'u v'");
        }
    }
    return b.build();
}

/// Every vertex on its own line first, so parsing restores the vertex order.
inline std::string serialize(const Graph& g)
{
    std::string out;
    for (const auto& v : g.vertices)
        out += v + "\n";
    for (auto [u, v] : g.edges)
        out += g.vertices[u] + " " + g.vertices[v] + "\n";
    return out;
}

/// A k-clique as sorted vertex indices (the lexicographically first), or none.
inline std::optional<std::vector<int>> clique_bruteforce(const Graph& g, int k)
{
    const int n = static_cast<int>(g.vertices.size());
    if (k <= 0)
        return std::vector<int>{};
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (auto [u, v] : g.edges)
        adj[u][v] = adj[v][u] = true;
    std::vector<int> chosen;
    auto extend = [&](auto&& self, int from) -> bool {
        if (static_cast<int>(chosen.size()) == k)
            return true;
        for (int v = from; v < n; ++v) {
            if (n - v < k - static_cast<int>(chosen.size()))
                return false;
            if (!std::all_of(chosen.begin(), chosen.end(), [&](int u) { return adj[u][v]; }))
                continue;
            chosen.push_back(v);
            if (self(self, v + 1))
                return true;
            chosen.pop_back();
        }
        return false;
    };
    if (extend(extend, 0))
        return chosen;
    return std::nullopt;
}

/// Index layout of the reduced instance. Men and women share it: vertex
/// pairs (v order, superscript 1 then 2), edge pairs likewise, the dummies,
/// then the special person.
struct ReductionLayout {
    int nv = 0;
    int ne = 0;
    Cost delta = 0;

    int vertex(int v, int i) const { return 2 * v + (i - 1); }
    int edge(int e, int i) const { return 2 * nv + 2 * e + (i - 1); }
    int dummy(Cost i) const { return 2 * nv + 2 * ne + static_cast<int>(i) - 1; } // i is 1-based
    int star() const { return 2 * nv + 2 * ne + static_cast<int>(delta); }
    int size() const { return star() + 1; }
};

struct ReductionArtifact {
    Graph graph;
    int k = 0;
    Instance inst;
    Cost delta = 0;
    Cost k_hat = 0;
    Cost t = 0;
    bool fallback = false;
    std::optional<bool> fallback_answer; // clique answer the trivial instance encodes
    ReductionLayout layout;
    // Person names per vertex / edge: {m1, m2, w1, w2}.
    std::vector<std::array<std::string, 4>> vertex_people;
    std::vector<std::array<std::string, 4>> edge_people;
};

inline Cost reduction_delta(Cost nv, Cost ne, Cost k)
{
    return 2 * (nv + ne + nv * ne + nv * ne * ne) - k * (4 + 4 * k + 2 * ne + (k - 1) * nv * ne);
}

inline Cost reduction_parameter(Cost k) { return 6 * (k + k * (k - 1) / 2); }

namespace detail {

inline std::string vname(char side, int i, int v) { return std::string(1, side) + "v" + std::to_string(i) + "_" + std::to_string(v + 1); }
inline std::string ename(char side, int i, int e) { return std::string(1, side) + "e" + std::to_string(i) + "_" + std::to_string(e + 1); }

} // namespace detail

/// Builds the Above-Max instance for (g, k). Below the size threshold, or when
/// delta is too small for the dummies the lists refer to, a trivial instance
/// with the clique answer is emitted instead.
inline ReductionArtifact reduce_clique(const Graph& g, int k)
{
    if (k < 1)
        throw ValidationError("clique size must be at least 1");
    ReductionArtifact art;
    art.graph = g;
    art.k = k;
    const Cost nv = static_cast<Cost>(g.vertices.size());
    const Cost ne = static_cast<Cost>(g.edges.size());
    art.delta = reduction_delta(nv, ne, k);
    const Cost selected = k + static_cast<Cost>(k) * (k - 1) / 2;

    // The lists name the first two dummy women and the first |V||E| dummy men.
    if (art.delta < std::max<Cost>(2, nv * ne) || nv <= selected) {
        art.fallback = true;
        art.fallback_answer = clique_bruteforce(g, k).has_value();
        InstanceBuilder b;
        if (!*art.fallback_answer) {
            const int m = b.add_man("m");
            const int w = b.add_woman("w");
            b.set_pair(m, w, 1, 1);
        }
        b.set_target(0);
        art.inst = b.build();
        art.k_hat = 0;
        const auto o = optima(art.inst);
        art.t = art.k_hat - std::max(o.om, o.ow);
        return art;
    }

    ReductionLayout L{static_cast<int>(nv), static_cast<int>(ne), art.delta};
    art.layout = L;
    const int nve = static_cast<int>(nv * ne);

    InstanceBuilder b;
    for (char side : {'m', 'w'}) {
        const Side s = side == 'm' ? Side::man : Side::woman;
        for (int v = 0; v < nv; ++v)
            for (int i = 1; i <= 2; ++i)
                b.add_person(s, detail::vname(side, i, v));
        for (int e = 0; e < ne; ++e)
            for (int i = 1; i <= 2; ++i)
                b.add_person(s, detail::ename(side, i, e));
        for (Cost i = 1; i <= art.delta; ++i)
            b.add_person(s, std::string(1, side) + "d_" + std::to_string(i));
        b.add_person(s, side == 'm' ? "mstar" : "wstar");
    }
    for (int v = 0; v < nv; ++v)
        art.vertex_people.push_back({detail::vname('m', 1, v), detail::vname('m', 2, v), detail::vname('w', 1, v),
                                     detail::vname('w', 2, v)});
    for (int e = 0; e < ne; ++e)
        art.edge_people.push_back({detail::ename('m', 1, e), detail::ename('m', 2, e), detail::ename('w', 1, e),
                                   detail::ename('w', 2, e)});

    auto man = [&](int m, int w, Rank r) { b.set_rank(Side::man, m, w, r); };
    auto woman = [&](int w, int m, Rank r) { b.set_rank(Side::woman, w, m, r); };
    const Rank E = static_cast<Rank>(ne);
    const Rank V = static_cast<Rank>(nv);

    // Vertex men. Both use the first two dummy women.
    for (int v = 0; v < nv; ++v) {
        for (int i = 1; i <= 2; ++i) {
            const int m = L.vertex(v, i);
            man(m, L.vertex(v, i), 1);
            man(m, L.dummy(1), 2);
            man(m, L.dummy(2), 3);
            man(m, L.vertex(v, 3 - i), 4);
        }
    }
    // Edge men.
    for (int e = 0; e < ne; ++e) {
        auto [u, v] = g.edges[e];
        for (int i = 1; i <= 2; ++i) {
            const int m = L.edge(e, i);
            man(m, L.edge(e, i), 1);
            man(m, L.vertex(u, i), 2);
            man(m, L.vertex(v, i), 3);
            man(m, L.edge(e, 3 - i), 4);
        }
    }
    // Vertex women: incident edge men keep slot j+1 (1-based j); the free
    // slots in 2..|E|+1 go to the first |E|-deg(v) dummy men in order.
    std::vector<std::vector<int>> dummy_vertex_women(nve + 1);
    for (int v = 0; v < nv; ++v) {
        for (int i = 1; i <= 2; ++i) {
            const int w = L.vertex(v, i);
            woman(w, L.vertex(v, 3 - i), 1);
            int next_dummy = 1;
            for (int e = 0; e < ne; ++e) {
                auto [a, c] = g.edges[e];
                if (a == v || c == v) {
                    woman(w, L.edge(e, i), e + 2);
                } else {
                    woman(w, L.dummy(next_dummy), e + 2);
                    dummy_vertex_women[next_dummy].push_back(w);
                    ++next_dummy;
                }
            }
            woman(w, L.vertex(v, i), E + 2);
        }
    }
    // Edge women.
    for (int e = 0; e < ne; ++e) {
        for (int i = 1; i <= 2; ++i) {
            const int w = L.edge(e, i);
            woman(w, L.edge(e, 3 - i), 1);
            for (int d = 1; d <= nve; ++d)
                woman(w, L.dummy(d), d + 1);
            woman(w, L.edge(e, i), V * E + 2);
        }
    }
    // Dummy men; the vertex-woman tail follows the canonical woman order,
    // which is the order the loop above produced.
    for (Cost d = 1; d <= art.delta; ++d) {
        const int m = L.dummy(d);
        man(m, L.dummy(d), 1);
        if (d > nve)
            continue;
        for (int e = 0; e < ne; ++e) {
            man(m, L.edge(e, 1), e + 2);
            man(m, L.edge(e, 2), E + e + 2);
        }
        auto& tail = dummy_vertex_women[d];
        std::sort(tail.begin(), tail.end());
        for (std::size_t f = 0; f < tail.size(); ++f)
            man(m, tail[f], 2 * E + static_cast<Rank>(f) + 2);
    }
    // Dummy women.
    for (Cost d = 1; d <= art.delta; ++d) {
        const int w = L.dummy(d);
        woman(w, L.dummy(d), 1);
        woman(w, L.star(), 2);
        if (d <= 2) {
            for (int v = 0; v < nv; ++v) {
                woman(w, L.vertex(v, 1), v + 3);
                woman(w, L.vertex(v, 2), V + v + 3);
            }
        }
    }
    for (Cost d = 1; d <= art.delta; ++d)
        man(L.star(), L.dummy(d), static_cast<Rank>(d));
    man(L.star(), L.star(), static_cast<Rank>(art.delta) + 1);
    woman(L.star(), L.star(), 1);

    art.k_hat = L.size() + art.delta + reduction_parameter(k);
    art.t = reduction_parameter(k);
    b.set_target(art.k_hat);
    b.set_functional(true);
    art.inst = b.build();
    return art;
}

/// The candidate matching for vertex set U and edge set S: the two people of
/// each selected element trade partners, everybody else takes the same-index
/// partner. Dummies and the special pair are matched to each other.
inline Matching candidate_matching(const ReductionArtifact& art, const std::vector<bool>& in_u,
                                   const std::vector<bool>& in_s)
{
    if (art.fallback)
        throw std::logic_error("candidate matchings need a full reduction");
    const auto& L = art.layout;
    Matching mu(art.inst);
    for (int v = 0; v < L.nv; ++v)
        for (int i = 1; i <= 2; ++i)
            mu.match(L.vertex(v, i), L.vertex(v, in_u[v] ? 3 - i : i));
    for (int e = 0; e < L.ne; ++e)
        for (int i = 1; i <= 2; ++i)
            mu.match(L.edge(e, i), L.edge(e, in_s[e] ? 3 - i : i));
    for (Cost d = 1; d <= L.delta; ++d)
        mu.match(L.dummy(d), L.dummy(d));
    mu.match(L.star(), L.star());
    return mu;
}

inline Matching closed_form_man_optimal(const ReductionArtifact& art)
{
    return candidate_matching(art, std::vector<bool>(art.layout.nv, false), std::vector<bool>(art.layout.ne, false));
}

inline Matching closed_form_woman_optimal(const ReductionArtifact& art)
{
    return candidate_matching(art, std::vector<bool>(art.layout.nv, true), std::vector<bool>(art.layout.ne, true));
}

/// The matching built from a k-clique U: U's vertex pairs and the pairs of
/// every edge inside U are swapped.
inline Matching witness_matching(const ReductionArtifact& art, const std::vector<int>& clique)
{
    const auto& g = art.graph;
    std::vector<bool> in_u(g.vertices.size(), false);
    for (int v : clique) {
        if (v < 0 || v >= static_cast<int>(g.vertices.size()) || in_u[v])
            throw NotAClique("vertex index out of range or repeated");
        in_u[v] = true;
    }
    if (static_cast<int>(clique.size()) != art.k)
        throw NotAClique("expected " + std::to_string(art.k) + " vertices, got " + std::to_string(clique.size()));
    for (std::size_t a = 0; a < clique.size(); ++a)
        for (std::size_t c = a + 1; c < clique.size(); ++c)
            if (!g.adjacent(clique[a], clique[c]))
                throw NotAClique(g.vertices[clique[a]] + " and " + g.vertices[clique[c]] + " are not adjacent");
    std::vector<bool> in_s(g.edges.size(), false);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        in_s[e] = in_u[g.edges[e].first] && in_u[g.edges[e].second];
    return candidate_matching(art, in_u, in_s);
}

/// Stable members of the (U, S) candidate family, kept compact as bit masks.
struct StructuredCandidate {
    std::uint64_t vertices = 0;
    std::uint64_t edges = 0;
    Objectives obj;
};

struct StructuredSet {
    std::vector<StructuredCandidate> stable;
    std::optional<Cost> bal_opt;
    std::uint64_t candidates = 0;
    bool has_man_optimal = false;   // (U, S) = (empty, empty) is stable and equals deferred acceptance
    bool has_woman_optimal = false; // (U, S) = (V, E) likewise
};

inline constexpr std::uint64_t structured_limit = 1'000'000;

inline std::vector<bool> mask_bits(std::uint64_t mask, int n)
{
    std::vector<bool> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = (mask >> i) & 1U;
    return out;
}

/// Runs every candidate of the family through a blocking-pair check. Men
/// whose partner and better-ranked women are the same in every candidate are
/// checked once; the rest are rescanned per candidate.
inline StructuredSet structured_enumerate(const ReductionArtifact& art)
{
    if (art.fallback)
        throw std::logic_error("structured enumeration needs a full reduction");
    const auto& L = art.layout;
    const int bits = L.nv + L.ne;
    if (bits >= 63 || (std::uint64_t{1} << bits) > structured_limit)
        throw TooLarge("2^" + std::to_string(bits) + " candidates exceed the structured enumeration bound");
    const Instance& inst = art.inst;

    Matching mu = closed_form_man_optimal(art);
    std::vector<bool> moving_woman(inst.num_women(), false);
    std::vector<int> moving_men;
    for (int v = 0; v < L.nv; ++v)
        for (int i = 1; i <= 2; ++i) {
            moving_men.push_back(L.vertex(v, i));
            moving_woman[L.vertex(v, i)] = true;
        }
    for (int e = 0; e < L.ne; ++e)
        for (int i = 1; i <= 2; ++i) {
            moving_men.push_back(L.edge(e, i));
            moving_woman[L.edge(e, i)] = true;
        }
    std::vector<bool> is_moving_man(inst.num_men(), false);
    for (int m : moving_men)
        is_moving_man[m] = true;

    std::vector<int> rescan = moving_men;
    bool fixed_part_blocks = false;
    Cost fixed_men_cost = 0, fixed_women_cost = 0;
    for (int m = 0; m < static_cast<int>(inst.num_men()); ++m) {
        if (is_moving_man[m])
            continue;
        const int w = mu.wife(m);
        fixed_men_cost += inst.man_rank(m, w);
        fixed_women_cost += inst.woman_rank(w, m);
        bool touches_moving = false;
        for (const auto& e : inst.prefs(Side::man, m)) {
            if (e.rank >= inst.man_rank(m, w))
                break;
            touches_moving = touches_moving || moving_woman[e.partner];
        }
        if (touches_moving)
            rescan.push_back(m);
        else if (detail::man_blocks(inst, mu, m))
            fixed_part_blocks = true;
    }

    StructuredSet out;
    const auto man_opt = man_optimal(inst);
    const auto woman_opt = woman_optimal(inst);
    const std::uint64_t vfull = (std::uint64_t{1} << L.nv) - 1;
    const std::uint64_t efull = (std::uint64_t{1} << L.ne) - 1;
    for (std::uint64_t vm = 0; vm <= vfull; ++vm) {
        for (std::uint64_t em = 0; em <= efull; ++em) {
            ++out.candidates;
            for (int m : moving_men)
                mu.unmatch_man(m);
            for (int v = 0; v < L.nv; ++v) {
                const bool sw = (vm >> v) & 1U;
                for (int i = 1; i <= 2; ++i)
                    mu.match(L.vertex(v, i), L.vertex(v, sw ? 3 - i : i));
            }
            for (int e = 0; e < L.ne; ++e) {
                const bool sw = (em >> e) & 1U;
                for (int i = 1; i <= 2; ++i)
                    mu.match(L.edge(e, i), L.edge(e, sw ? 3 - i : i));
            }
            if (fixed_part_blocks)
                continue;
            bool stable = true;
            for (int m : rescan)
                if (detail::man_blocks(inst, mu, m)) {
                    stable = false;
                    break;
                }
            if (!stable)
                continue;
            Objectives o;
            o.men_cost = fixed_men_cost;
            o.women_cost = fixed_women_cost;
            for (int m : moving_men) {
                o.men_cost += inst.man_rank(m, mu.wife(m));
                o.women_cost += inst.woman_rank(mu.wife(m), m);
            }
            o.balance = std::max(o.men_cost, o.women_cost);
            o.egalitarian = o.men_cost + o.women_cost;
            o.sex_equal = o.men_cost - o.women_cost;
            out.stable.push_back({vm, em, o});
            if (!out.bal_opt || o.balance < *out.bal_opt)
                out.bal_opt = o.balance;
            if (vm == 0 && em == 0 && mu == man_opt)
                out.has_man_optimal = true;
            if (vm == vfull && em == efull && mu == woman_opt)
                out.has_woman_optimal = true;
        }
    }
    return out;
}

inline Matching materialize(const ReductionArtifact& art, const StructuredCandidate& c)
{
    return candidate_matching(art, mask_bits(c.vertices, art.layout.nv), mask_bits(c.edges, art.layout.ne));
}

inline StableSet to_stable_set(const ReductionArtifact& art, const StructuredSet& s)
{
    StableSet out;
    for (const auto& c : s.stable)
        out.matchings.push_back(materialize(art, c));
    out.bal_opt = s.bal_opt;
    return out;
}

struct ReductionReport {
    std::string graph_summary;
    int k = 0;
    bool clique = false;
    std::optional<std::vector<int>> clique_vertices;
    bool fallback = false;
    bool reduction_answer = false;
    bool agree = false;
    Cost delta = 0;
    Cost k_hat = 0;
    Cost t = 0;
    // Only meaningful without fallback.
    Cost om = 0;
    Cost ow = 0;
    bool optima_match_closed_form = false;
    bool om_ow_as_predicted = false; // O_M = |M| + delta and O_W = |W|
    bool t_as_predicted = false;     // k_hat - max{O_M, O_W} = 6(k + k(k-1)/2)
    bool family_has_optima = false;
    bool witness_ok = false;         // stable with both sums equal to k_hat; vacuous without a clique
    std::size_t stable_count = 0;
    std::optional<Cost> bal_opt;
};

/// Compares the clique answer with the answer of the reduced instance and
/// checks the closed-form quantities along the way.
inline ReductionReport verify_reduction(const Graph& g, int k)
{
    ReductionReport rep;
    rep.k = k;
    rep.graph_summary = std::to_string(g.vertices.size()) + " vertices, " + std::to_string(g.edges.size()) + " edges";
    rep.clique_vertices = clique_bruteforce(g, k);
    rep.clique = rep.clique_vertices.has_value();
    const auto art = reduce_clique(g, k);
    rep.fallback = art.fallback;
    rep.delta = art.delta;
    rep.k_hat = art.k_hat;
    rep.t = art.t;
    if (art.fallback) {
        rep.reduction_answer = decide_above_max(art.inst, art.k_hat).answer;
        rep.agree = rep.reduction_answer == rep.clique;
        return rep;
    }

    const auto o = optima(art.inst);
    rep.om = o.om;
    rep.ow = o.ow;
    const Cost size = art.layout.size();
    rep.optima_match_closed_form =
        o.man_optimal == closed_form_man_optimal(art) && o.woman_optimal == closed_form_woman_optimal(art);
    rep.om_ow_as_predicted = o.om == size + art.delta && o.ow == size;
    rep.t_as_predicted = art.k_hat - std::max(o.om, o.ow) == reduction_parameter(k);

    const auto fam = structured_enumerate(art);
    rep.family_has_optima = fam.has_man_optimal && fam.has_woman_optimal;
    rep.stable_count = fam.stable.size();
    rep.bal_opt = fam.bal_opt;
    rep.reduction_answer = fam.bal_opt && *fam.bal_opt <= art.k_hat;

    rep.witness_ok = true;
    if (rep.clique) {
        const auto mu = witness_matching(art, *rep.clique_vertices);
        const auto obj = objectives(art.inst, mu);
        rep.witness_ok = is_stable(art.inst, mu) && obj.men_cost == art.k_hat && obj.women_cost == art.k_hat;
    }
    rep.agree = rep.reduction_answer == rep.clique && rep.optima_match_closed_form && rep.om_ow_as_predicted &&
                rep.t_as_predicted && rep.family_has_optima && rep.witness_ok;
    return rep;
}

} // namespace bsm
