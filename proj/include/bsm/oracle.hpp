#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bsm/error.hpp"
#include "bsm/gs.hpp"
#include "bsm/instance.hpp"

namespace bsm {

inline constexpr std::size_t default_oracle_bound = 9;

/// All stable matchings of an instance, with the minimum balance among them.
struct StableSet {
    std::vector<Matching> matchings;
    std::optional<Cost> bal_opt;
};

namespace detail {

// Depth-first search over men in canonical order. Each man takes a free
// acceptable woman or stays single. A pair (m, w) is judged as soon as m is
// decided and w is final, meaning she is matched or every man on her list is
// decided; a blocking judged pair prunes the subtree.
class StableEnumerator {
public:
    explicit StableEnumerator(const Instance& inst)
        : inst_(inst), n_(static_cast<int>(inst.num_men())), mu_(inst), last_suitor_(inst.num_women(), -1)
    {
        for (int w = 0; w < static_cast<int>(inst.num_women()); ++w)
            for (const auto& e : inst.prefs(Side::woman, w))
                last_suitor_[w] = std::max(last_suitor_[w], e.partner);
    }

    std::vector<Matching> run()
    {
        out_.clear();
        descend(0);
        return std::move(out_);
    }

private:
    void descend(int man)
    {
        if (man == n_) {
            out_.push_back(mu_);
            return;
        }
        for (const auto& e : inst_.prefs(Side::man, man)) {
            if (mu_.husband(e.partner) != Matching::none)
                continue;
            mu_.match(man, e.partner);
            if (consistent(man))
                descend(man + 1);
            mu_.unmatch_man(man);
        }
        if (consistent(man))
            descend(man + 1);
    }

    bool consistent(int decided_upto) const
    {
        for (int m = 0; m <= decided_upto; ++m) {
            const int wife = mu_.wife(m);
            const Rank current = wife == Matching::none ? 0 : inst_.man_rank(m, wife);
            for (const auto& e : inst_.prefs(Side::man, m)) {
                if (wife != Matching::none && e.rank >= current)
                    break;
                const int w = e.partner;
                const int husband = mu_.husband(w);
                if (husband == Matching::none) {
                    if (last_suitor_[w] <= decided_upto)
                        return false;
                } else if (inst_.woman_rank(w, m) < inst_.woman_rank(w, husband)) {
                    return false;
                }
            }
        }
        return true;
    }

    const Instance& inst_;
    int n_;
    Matching mu_;
    std::vector<int> last_suitor_;
    std::vector<Matching> out_;
};

} // namespace detail

/// Exhaustive enumeration of the stable matchings. Exponential; refuses
/// instances with more than `max_men` men.
inline StableSet enumerate_stable(const Instance& inst, std::size_t max_men = default_oracle_bound)
{
    if (inst.num_men() > max_men)
        throw TooLarge("oracle bound exceeded: " + std::to_string(inst.num_men()) + " men > " +
                       std::to_string(max_men));
    StableSet set;
    set.matchings = detail::StableEnumerator(inst).run();
    for (const auto& mu : set.matchings) {
        Cost b = balance(inst, mu);
        if (!set.bal_opt || b < *set.bal_opt)
            set.bal_opt = b;
    }
    return set;
}

/// Exhaustive enumeration that uses the classical structure instead of plain
/// search: people unmatched by the man-optimal matching stay single, people
/// with the same partner in both optima keep that partner, and every other
/// man is tried only with women ranked between his two optimal partners that
/// also rank him between theirs. Scales to large instances with few sad
/// people; `max_leaves` bounds the number of complete assignments tested.
inline StableSet enumerate_stable_sandwich(const Instance& inst, std::uint64_t max_leaves = 1'000'000)
{
    const auto o = optima(inst);
    const auto& mm = o.man_optimal;
    const auto& mw = o.woman_optimal;
    Matching mu(inst);
    std::vector<int> sad;
    std::vector<std::vector<int>> options;
    for (int m = 0; m < static_cast<int>(inst.num_men()); ++m) {
        const int best = mm.wife(m);
        if (best == Matching::none)
            continue;
        if (best == mw.wife(m)) {
            mu.match(m, best);
            continue;
        }
        sad.push_back(m);
        options.emplace_back();
        const Rank lo = inst.man_rank(m, best);
        const Rank hi = inst.man_rank(m, mw.wife(m));
        for (const auto& e : inst.prefs(Side::man, m)) {
            const int w = e.partner;
            if (e.rank < lo || e.rank > hi || mm.husband(w) == mw.husband(w) || mm.husband(w) == Matching::none)
                continue;
            const Rank r = inst.woman_rank(w, m);
            if (r >= inst.woman_rank(w, mw.husband(w)) && r <= inst.woman_rank(w, mm.husband(w)))
                options.back().push_back(w);
        }
    }

    // A man is decided once his partner (or lack of one) is final.
    std::vector<bool> decided(inst.num_men(), true);
    for (int m : sad)
        decided[m] = false;

    // Blocking pairs through the newly placed man m and woman w whose other
    // member is already final.
    auto blocked = [&](int m, int w) {
        const Rank mine = inst.man_rank(m, w);
        for (const auto& e : inst.prefs(Side::man, m)) {
            if (e.rank >= mine)
                break;
            const int h = mu.husband(e.partner);
            if (h != Matching::none && inst.woman_rank(e.partner, m) < inst.woman_rank(e.partner, h))
                return true;
        }
        const Rank hers = inst.woman_rank(w, m);
        for (const auto& e : inst.prefs(Side::woman, w)) {
            if (e.rank >= hers)
                break;
            const int other = e.partner;
            if (!decided[other])
                continue;
            const int wife = mu.wife(other);
            if (wife == Matching::none || inst.man_rank(other, w) < inst.man_rank(other, wife))
                return true;
        }
        return false;
    };

    StableSet set;
    std::uint64_t leaves = 0;
    auto descend = [&](auto&& self, std::size_t i) -> void {
        if (i == sad.size()) {
            if (++leaves > max_leaves)
                throw TooLarge("sandwich enumeration exceeded " + std::to_string(max_leaves) + " leaves");
            if (is_stable_unchecked(inst, mu))
                set.matchings.push_back(mu);
            return;
        }
        const int m = sad[i];
        decided[m] = true;
        for (int w : options[i]) {
            if (mu.husband(w) != Matching::none)
                continue;
            mu.match(m, w);
            if (!blocked(m, w))
                self(self, i + 1);
            mu.unmatch_man(m);
        }
        decided[m] = false;
    };
    descend(descend, 0);
    for (const auto& m : set.matchings) {
        Cost b = balance(inst, m);
        if (!set.bal_opt || b < *set.bal_opt)
            set.bal_opt = b;
    }
    return set;
}

/// Answer of a Balanced Stable Marriage decision together with its
/// parameter value.
struct Decision {
    bool answer = false;
    Cost t = 0;
    std::optional<Matching> witness; // a balance-minimizing stable matching when answer is true
};

namespace detail {

inline Decision decide(const Instance& inst, const StableSet& set, Cost k, bool above_max)
{
    // The man-optimal matching minimizes every man's rank at once, so its rank
    // sum is the smallest men's sum over all stable matchings (same for women).
    Cost om = 0, ow = 0;
    const Matching* best = nullptr;
    Cost best_balance = 0;
    bool first = true;
    for (const auto& mu : set.matchings) {
        auto o = objectives(inst, mu);
        if (first || o.men_cost < om)
            om = o.men_cost;
        if (first || o.women_cost < ow)
            ow = o.women_cost;
        if (first || o.balance < best_balance) {
            best_balance = o.balance;
            best = &mu;
        }
        first = false;
    }
    Decision d;
    d.t = k - (above_max ? std::max(om, ow) : std::min(om, ow));
    d.answer = best != nullptr && best_balance <= k;
    if (d.answer)
        d.witness = *best;
    return d;
}

} // namespace detail

/// Is Bal <= k? Parameter t = k - min{O_M, O_W}.
inline Decision decide_above_min(const Instance& inst, const StableSet& set, Cost k)
{
    return detail::decide(inst, set, k, false);
}

inline Decision decide_above_min(const Instance& inst, Cost k, std::size_t max_men = default_oracle_bound)
{
    return decide_above_min(inst, enumerate_stable(inst, max_men), k);
}

/// Is Bal <= k? Parameter t = k - max{O_M, O_W}.
inline Decision decide_above_max(const Instance& inst, const StableSet& set, Cost k)
{
    return detail::decide(inst, set, k, true);
}

inline Decision decide_above_max(const Instance& inst, Cost k, std::size_t max_men = default_oracle_bound)
{
    return decide_above_max(inst, enumerate_stable(inst, max_men), k);
}

} // namespace bsm
