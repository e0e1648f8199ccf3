#pragma once

#include <algorithm>
#include <deque>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "bsm/instance.hpp"

namespace bsm {

/// Deferred acceptance with `proposers` proposing. Free proposers are
/// processed first-in first-out starting from `order` (canonical order when
/// empty). The result is the proposer-optimal stable matching whatever the
/// order; only rank order matters, so gaps in rank images are harmless.
inline Matching deferred_acceptance(const Instance& inst, Side proposers, std::span<const int> order = {})
{
    const Side receivers = opposite(proposers);
    const int n = static_cast<int>(inst.size(proposers));
    Matching mu(inst);
    std::vector<std::size_t> next(n, 0);
    std::deque<int> free;
    if (order.empty()) {
        for (int p = 0; p < n; ++p)
            free.push_back(p);
    } else {
        free.assign(order.begin(), order.end());
    }

    auto engage = [&](int p, int r) {
        if (proposers == Side::man)
            mu.match(p, r);
        else
            mu.match(r, p);
    };

    while (!free.empty()) {
        const int p = free.front();
        free.pop_front();
        const auto list = inst.prefs(proposers, p);
        while (next[p] < list.size()) {
            const int r = list[next[p]++].partner;
            const int current = mu.partner(receivers, r);
            if (current == Matching::none) {
                engage(p, r);
                break;
            }
            if (inst.rank(receivers, r, p) < inst.rank(receivers, r, current)) {
                engage(p, r);
                free.push_back(current);
                break;
            }
        }
    }
    return mu;
}

inline Matching man_optimal(const Instance& inst) { return deferred_acceptance(inst, Side::man); }
inline Matching woman_optimal(const Instance& inst) { return deferred_acceptance(inst, Side::woman); }

namespace detail {

// Calls visit(m, w) for each blocking pair, in man order then preference
// order; stops early when visit returns false.
template <class Visit>
void scan_blocking(const Instance& inst, const Matching& mu, Visit&& visit)
{
    for (int m = 0; m < static_cast<int>(inst.num_men()); ++m) {
        const int wife = mu.wife(m);
        const Rank current = wife == Matching::none ? 0 : inst.man_rank(m, wife);
        for (const auto& e : inst.prefs(Side::man, m)) {
            if (wife != Matching::none && e.rank >= current)
                break;
            const int husband = mu.husband(e.partner);
            if (husband == Matching::none ||
                inst.woman_rank(e.partner, m) < inst.woman_rank(e.partner, husband)) {
                if (!visit(m, e.partner))
                    return;
            }
        }
    }
}

// True when man m forms a blocking pair with some woman.
inline bool man_blocks(const Instance& inst, const Matching& mu, int m)
{
    const int wife = mu.wife(m);
    const Rank current = wife == Matching::none ? 0 : inst.man_rank(m, wife);
    for (const auto& e : inst.prefs(Side::man, m)) {
        if (wife != Matching::none && e.rank >= current)
            return false;
        const int husband = mu.husband(e.partner);
        if (husband == Matching::none || inst.woman_rank(e.partner, m) < inst.woman_rank(e.partner, husband))
            return true;
    }
    return false;
}

} // namespace detail

/// Every acceptable pair outside `mu` whose members both prefer each other
/// to their current situation. Empty exactly when `mu` is stable.
inline std::vector<std::pair<int, int>> blocking_pairs(const Instance& inst, const Matching& mu)
{
    validate(inst, mu);
    std::vector<std::pair<int, int>> out;
    detail::scan_blocking(inst, mu, [&](int m, int w) {
        out.emplace_back(m, w);
        return true;
    });
    return out;
}

/// Stability test for a matching already known to fit the instance.
inline bool is_stable_unchecked(const Instance& inst, const Matching& mu)
{
    bool stable = true;
    detail::scan_blocking(inst, mu, [&](int, int) { return stable = false; });
    return stable;
}

inline bool is_stable(const Instance& inst, const Matching& mu)
{
    validate(inst, mu);
    return is_stable_unchecked(inst, mu);
}

struct Objectives {
    Cost men_cost = 0;
    Cost women_cost = 0;
    Cost balance = 0;     // max of the two sides
    Cost egalitarian = 0; // sum of the two sides
    Cost sex_equal = 0;   // men minus women

    friend bool operator==(const Objectives&, const Objectives&) = default;
};

/// Raw rank sums; unmatched people contribute nothing.
inline Objectives objectives(const Instance& inst, const Matching& mu)
{
    Objectives o;
    for (auto [m, w] : mu.pairs()) {
        o.men_cost += inst.man_rank(m, w);
        o.women_cost += inst.woman_rank(w, m);
    }
    o.balance = std::max(o.men_cost, o.women_cost);
    o.egalitarian = o.men_cost + o.women_cost;
    o.sex_equal = o.men_cost - o.women_cost;
    return o;
}

inline Cost balance(const Instance& inst, const Matching& mu) { return objectives(inst, mu).balance; }

struct Optima {
    Matching man_optimal;
    Matching woman_optimal;
    Cost om = 0; // men's rank sum in the man-optimal matching
    Cost ow = 0; // women's rank sum in the woman-optimal matching
};

inline Optima optima(const Instance& inst)
{
    Optima o;
    o.man_optimal = man_optimal(inst);
    o.woman_optimal = woman_optimal(inst);
    o.om = objectives(inst, o.man_optimal).men_cost;
    o.ow = objectives(inst, o.woman_optimal).women_cost;
    return o;
}

} // namespace bsm
