#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bsm/gs.hpp"
#include "bsm/instance.hpp"

namespace bsm {

/// Functional instance plus target, with the optima and the sad/happy split
/// recomputed on every construction.
struct KernelState {
    Instance inst;
    Cost k = 0;
    Optima cached;
    std::vector<int> sad_men;
    std::vector<int> sad_women;
    std::vector<std::pair<int, int>> happy_pairs; // (m, w) with mu_M(m) = mu_W(m) = w

    Cost t() const { return k - std::min(cached.om, cached.ow); }

    static KernelState make(Instance inst, Cost k)
    {
        KernelState st;
        st.inst = std::move(inst);
        st.k = k;
        st.cached = optima(st.inst);
        const auto& mm = st.cached.man_optimal;
        const auto& mw = st.cached.woman_optimal;
        for (int m = 0; m < static_cast<int>(st.inst.num_men()); ++m) {
            if (mm.wife(m) != mw.wife(m))
                st.sad_men.push_back(m);
            else if (mm.wife(m) != Matching::none)
                st.happy_pairs.emplace_back(m, mm.wife(m));
        }
        for (int w = 0; w < static_cast<int>(st.inst.num_women()); ++w)
            if (mm.husband(w) != mw.husband(w))
                st.sad_women.push_back(w);
        return st;
    }
};

/// A rule fired and produced `next`. `affected` names the people it touched.
struct RuleApplication {
    KernelState next;
    std::vector<std::string> affected;
};

enum class Verdict { proceed, yes, no };

// Rule 1.
inline Verdict rr1_bound_check(const KernelState& st)
{
    return st.k < std::max(st.cached.om, st.cached.ow) ? Verdict::no : Verdict::proceed;
}

// Rule 2. Drops (a, worst(a)) for the first person whose worst partner lies
// beyond the partner that person gets in the optimum of the other side.
inline std::optional<RuleApplication> rr2_clean_suffix(const KernelState& st)
{
    const auto& inst = st.inst;
    for (Side s : {Side::man, Side::woman}) {
        // A man's suffix is measured against mu_W, a woman's against mu_M.
        const Matching& ref = s == Side::man ? st.cached.woman_optimal : st.cached.man_optimal;
        for (int a = 0; a < static_cast<int>(inst.size(s)); ++a) {
            const auto list = inst.prefs(s, a);
            const int mate = ref.partner(s, a);
            if (list.empty() || mate == Matching::none)
                continue;
            const Entry worst = list.back();
            if (worst.rank <= inst.rank(s, a, mate))
                continue;
            InstanceBuilder b(inst);
            if (s == Side::man)
                b.erase_pair(a, worst.partner);
            else
                b.erase_pair(worst.partner, a);
            return RuleApplication{KernelState::make(b.build(), st.k),
                                   {inst.name(s, a), inst.name(opposite(s), worst.partner)}};
        }
    }
    return std::nullopt;
}

// Rule 3.
inline std::optional<RuleApplication> rr3_restrict_to_matched(const KernelState& st)
{
    const auto& inst = st.inst;
    InstanceBuilder b(inst);
    std::vector<std::string> gone;
    for (Side s : {Side::man, Side::woman})
        for (int a = 0; a < static_cast<int>(inst.size(s)); ++a)
            if (st.cached.man_optimal.partner(s, a) == Matching::none) {
                b.remove_person(s, a);
                gone.push_back(inst.name(s, a));
            }
    if (gone.empty())
        return std::nullopt;
    return RuleApplication{KernelState::make(b.build(), st.k), std::move(gone)};
}

// Rule 4.
inline Verdict rr4_bound_sad(const KernelState& st)
{
    const Cost cap = 2 * st.t();
    if (static_cast<Cost>(st.sad_men.size()) > cap || static_cast<Cost>(st.sad_women.size()) > cap)
        return Verdict::no;
    return Verdict::proceed;
}

// Rule 5. With nobody sad the man-optimal matching is the only stable one.
inline Verdict rr5_no_sad(const KernelState& st)
{
    if (!st.sad_men.empty() || !st.sad_women.empty())
        return Verdict::proceed;
    return balance(st.inst, st.cached.man_optimal) <= st.k ? Verdict::yes : Verdict::no;
}

// Rule 6. The removed pair's two ranks are charged to the first sad man and
// the first sad woman so every balance is preserved.
inline std::optional<RuleApplication> rr6_remove_happy_pair(const KernelState& st)
{
    if (st.happy_pairs.empty())
        return std::nullopt;
    if (st.sad_men.empty() || st.sad_women.empty())
        throw std::logic_error("happy pair removal needs a sad man and a sad woman");
    const auto& inst = st.inst;
    const auto [mh, wh] = st.happy_pairs.front();
    const int ms = st.sad_men.front();
    const int ws = st.sad_women.front();
    InstanceBuilder b(inst);
    b.shift_ranks(Side::man, ms, inst.man_rank(mh, wh));
    b.shift_ranks(Side::woman, ws, inst.woman_rank(wh, mh));
    b.remove_person(Side::man, mh);
    b.remove_person(Side::woman, wh);
    return RuleApplication{KernelState::make(b.build(), st.k),
                           {inst.man_name(mh), inst.woman_name(wh), inst.man_name(ms), inst.woman_name(ws)}};
}

// Rule 7. Pairs too far below the respective optimum can never sit in a
// matching of balance at most k.
inline std::optional<RuleApplication> rr7_truncate(const KernelState& st)
{
    const auto& inst = st.inst;
    const auto& mm = st.cached.man_optimal;
    const auto& mw = st.cached.woman_optimal;
    for (int m = 0; m < static_cast<int>(inst.num_men()); ++m) {
        for (const auto& e : inst.prefs(Side::man, m)) {
            const int w = e.partner;
            const bool men_side =
                mm.wife(m) != Matching::none && e.rank > (st.k - st.cached.om) + inst.man_rank(m, mm.wife(m));
            const bool women_side = mw.husband(w) != Matching::none &&
                                    inst.woman_rank(w, m) > (st.k - st.cached.ow) + inst.woman_rank(w, mw.husband(w));
            if (!men_side && !women_side)
                continue;
            InstanceBuilder b(inst);
            b.erase_pair(m, w);
            return RuleApplication{KernelState::make(b.build(), st.k), {inst.man_name(m), inst.woman_name(w)}};
        }
    }
    return std::nullopt;
}

// Rule 8.
inline std::optional<RuleApplication> rr8_shrink(const KernelState& st)
{
    const auto& inst = st.inst;
    const auto& mm = st.cached.man_optimal;
    const auto& mw = st.cached.woman_optimal;
    std::optional<int> man, woman;
    for (int m = 0; m < static_cast<int>(inst.num_men()) && !man; ++m)
        if (mm.wife(m) != Matching::none && inst.man_rank(m, mm.wife(m)) > 1)
            man = m;
    for (int w = 0; w < static_cast<int>(inst.num_women()) && !woman; ++w)
        if (mw.husband(w) != Matching::none && inst.woman_rank(w, mw.husband(w)) > 1)
            woman = w;
    if (!man || !woman)
        return std::nullopt;
    InstanceBuilder b(inst);
    b.shift_ranks(Side::man, *man, -1);
    b.shift_ranks(Side::woman, *woman, -1);
    return RuleApplication{KernelState::make(b.build(), st.k - 1), {inst.man_name(*man), inst.woman_name(*woman)}};
}

struct TraceStep {
    int rule = 0;     // 1..8 for the functional rules, 9 dummy insertion, 10 gap fill
    std::string name;
    std::vector<std::string> affected;
    Cost k_before = 0;
    Cost k_after = 0;
    Cost t_before = 0;
    Cost t_after = 0;
};

inline const char* rule_name(int rule)
{
    static const char* names[] = {"",         "bound",    "clean_suffix", "restrict_to_matched",
                                  "bound_sad", "no_sad",  "remove_happy_pair", "truncate",
                                  "shrink",   "add_dummies", "fill_gap"};
    return rule >= 1 && rule <= 10 ? names[rule] : "?";
}

inline Cost parameter(const Instance& inst, Cost k)
{
    const auto o = optima(inst);
    return k - std::min(o.om, o.ow);
}

/// Result of the gap-filling stage.
struct FilledKernel {
    Instance inst; // functional form, gap free
    Cost k = 0;
    std::vector<std::string> dummy_men;
    std::vector<std::string> dummy_women;
};

namespace detail {

inline std::string fresh_name(const Instance& inst, const std::set<std::string>& taken, std::string base)
{
    while (inst.find(base) || taken.count(base))
        base = "_" + base;
    return base;
}

} // namespace detail

/// Adds t mutually first-ranked dummy pairs (k grows by t), then plugs each
/// gap with an unused dummy of the other side. Men before women, people in
/// canonical order, gaps upward; the lowest-index free dummy is taken and the
/// person goes to the tail of its list. Steps are appended to `trace` if given.
inline FilledKernel fill_gaps(const Instance& functional, Cost k, Cost t, std::vector<TraceStep>* trace = nullptr,
                              const Instance* avoid_names = nullptr)
{
    FilledKernel out;
    out.k = k;
    if (t <= 0) {
        out.inst = functional;
        return out;
    }

    InstanceBuilder b(functional);
    const int men0 = static_cast<int>(functional.num_men());
    const int women0 = static_cast<int>(functional.num_women());
    std::set<std::string> taken;
    const Instance& names = avoid_names ? *avoid_names : functional;
    std::vector<int> xs, ys;
    for (Cost i = 1; i <= t; ++i) {
        auto xn = detail::fresh_name(names, taken, "x" + std::to_string(i));
        taken.insert(xn);
        auto yn = detail::fresh_name(names, taken, "y" + std::to_string(i));
        taken.insert(yn);
        xs.push_back(b.add_man(xn));
        ys.push_back(b.add_woman(yn));
        b.set_pair(xs.back(), ys.back(), 1, 1);
        out.dummy_men.push_back(xn);
        out.dummy_women.push_back(yn);
    }
    out.k = k + t;

    auto record = [&](int rule, std::vector<std::string> affected, Cost k_before, Cost t_before) -> Cost {
        Cost t_after = parameter(b.build(), out.k);
        if (trace)
            trace->push_back(TraceStep{rule, rule_name(rule), std::move(affected), k_before, out.k, t_before, t_after});
        return t_after;
    };

    Cost t_now = record(9, std::vector<std::string>(out.dummy_men.begin(), out.dummy_men.end()), k, t);

    auto fill_side = [&](Side s, int count, const std::vector<int>& dummies) {
        const Side other = opposite(s);
        for (int a = 0; a < count; ++a) {
            for (;;) {
                std::set<Rank> image;
                for (const auto& [partner, r] : b.ranks(s, a))
                    image.insert(r);
                if (image.empty())
                    break;
                Rank gap = 0;
                for (Rank j = 1; j < *image.rbegin(); ++j)
                    if (!image.count(j)) {
                        gap = j;
                        break;
                    }
                if (gap == 0)
                    break;
                auto free = std::find_if(dummies.begin(), dummies.end(),
                                         [&](int d) { return !b.rank(s, a, d).has_value(); });
                if (free == dummies.end())
                    throw std::logic_error("dummy supply exhausted while filling gaps");
                const Rank tail = b.max_rank(other, *free) + 1;
                b.set_rank(s, a, *free, gap);
                b.set_rank(other, *free, a, tail);
                const Cost k_before = out.k;
                t_now = record(10, {b.name(s, a), b.name(other, *free)}, k_before, t_now);
            }
        }
    };
    fill_side(Side::man, men0, ys);
    fill_side(Side::woman, women0, xs);

    b.set_functional(true);
    out.inst = b.build();
    return out;
}

enum class KernelOutcome { reduced, trivial_yes, trivial_no };

inline const char* to_string(KernelOutcome o)
{
    switch (o) {
    case KernelOutcome::reduced: return "reduced";
    case KernelOutcome::trivial_yes: return "trivial_yes";
    case KernelOutcome::trivial_no: return "trivial_no";
    }
    return "?";
}

struct KernelResult {
    KernelOutcome outcome = KernelOutcome::reduced;
    Cost t_input = 0;

    // Valid when outcome == reduced.
    Instance kernel; // list form
    Cost k = 0;
    std::vector<std::string> dummy_men;
    std::vector<std::string> dummy_women;

    // State after rules 1-8; for trivial outcomes, the state they fired on.
    Instance functional_kernel;
    Cost functional_k = 0;

    // Happy pairs removed by rule 6, by name, in removal order.
    std::vector<std::pair<std::string, std::string>> removed_pairs;

    // For trivial_yes: a stable matching of the input of balance at most k.
    std::optional<Matching> resolved;

    std::vector<TraceStep> trace;
};

/// Maps a matching of a reduced instance back to the input: dummy pairs are
/// dropped and the happy pairs removed along the way are restored.
inline Matching lift_matching(const Instance& input, const Instance& reduced, const Matching& mu,
                              const KernelResult& res)
{
    std::set<std::string> dummies(res.dummy_men.begin(), res.dummy_men.end());
    dummies.insert(res.dummy_women.begin(), res.dummy_women.end());
    Matching out(input);
    auto put = [&](const std::string& mn, const std::string& wn) {
        auto m = input.find(Side::man, mn);
        auto w = input.find(Side::woman, wn);
        if (!m || !w || !input.acceptable(*m, *w))
            throw InvalidMatching("cannot lift pair (" + mn + ", " + wn + ")");
        out.match(*m, *w);
    };
    for (auto [m, w] : mu.pairs()) {
        const auto& mn = reduced.man_name(m);
        const auto& wn = reduced.woman_name(w);
        if (dummies.count(mn) || dummies.count(wn))
            continue;
        put(mn, wn);
    }
    for (const auto& [mn, wn] : res.removed_pairs)
        put(mn, wn);
    return out;
}

/// The full kernelization: functional view, rules 1-8 to exhaustion
/// restarting from rule 1 after every change, gap filling, list view.
inline KernelResult kernelize(const Instance& input, Cost k)
{
    KernelResult res;
    KernelState st = KernelState::make(to_functional(input), k);
    res.t_input = st.t();

    auto log = [&](int rule, std::vector<std::string> affected, const KernelState& before, const KernelState& after) {
        res.trace.push_back(TraceStep{rule, rule_name(rule), std::move(affected), before.k, after.k, before.t(), after.t()});
    };
    auto finish = [&](KernelOutcome o, int rule) {
        log(rule, {}, st, st);
        res.outcome = o;
        res.functional_kernel = st.inst;
        res.functional_k = st.k;
        res.k = st.k;
        if (o == KernelOutcome::trivial_yes)
            res.resolved = lift_matching(input, st.inst, st.cached.man_optimal, res);
        return res;
    };
    auto advance = [&](int rule, std::optional<RuleApplication>&& app) {
        if (!app)
            return false;
        log(rule, std::move(app->affected), st, app->next);
        st = std::move(app->next);
        return true;
    };

    for (;;) {
        if (rr1_bound_check(st) == Verdict::no)
            return finish(KernelOutcome::trivial_no, 1);
        if (advance(2, rr2_clean_suffix(st)))
            continue;
        if (advance(3, rr3_restrict_to_matched(st)))
            continue;
        if (rr4_bound_sad(st) == Verdict::no)
            return finish(KernelOutcome::trivial_no, 4);
        if (auto v = rr5_no_sad(st); v != Verdict::proceed)
            return finish(v == Verdict::yes ? KernelOutcome::trivial_yes : KernelOutcome::trivial_no, 5);
        if (!st.happy_pairs.empty()) {
            const auto [mh, wh] = st.happy_pairs.front();
            res.removed_pairs.emplace_back(st.inst.man_name(mh), st.inst.woman_name(wh));
        }
        if (advance(6, rr6_remove_happy_pair(st)))
            continue;
        if (advance(7, rr7_truncate(st)))
            continue;
        if (advance(8, rr8_shrink(st)))
            continue;
        break;
    }

    res.functional_kernel = st.inst;
    res.functional_k = st.k;
    auto filled = fill_gaps(st.inst, st.k, st.t(), &res.trace, &input);
    res.dummy_men = std::move(filled.dummy_men);
    res.dummy_women = std::move(filled.dummy_women);
    res.kernel = functional_to_lists(filled.inst);
    res.k = filled.k;
    res.kernel = [&] {
        InstanceBuilder b(res.kernel);
        b.set_target(res.k);
        return b.build();
    }();
    return res;
}

} // namespace bsm
