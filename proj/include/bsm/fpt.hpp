#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bsm/gs.hpp"
#include "bsm/instance.hpp"
#include "bsm/kernel.hpp"

namespace bsm {

/// One woman strictly worse than the man-optimal partner for each man of M',
/// with the total rank increase bounded by r.
struct BranchCertificate {
    std::vector<std::pair<int, int>> pairs; // in M' order
    Cost cost = 0;

    friend bool operator==(const BranchCertificate&, const BranchCertificate&) = default;
};

struct SolveStats {
    std::uint64_t subsets_tried = 0;
    std::uint64_t branch_nodes = 0;
    std::uint64_t max_nodes_per_subset = 0;
    Cost r = 0;
    std::size_t sad_men = 0;
};

namespace detail {

// Bounded search tree over M'. Each call is one node. The next man may take
// one of his `budget` most preferred women below his man-optimal partner, as
// long as the rank increase fits the budget. visit(cert) returns true to stop.
class Brancher {
public:
    using Visit = std::function<bool(const BranchCertificate&)>;

    Brancher(const Instance& inst, const Matching& man_opt, std::span<const int> men, Visit visit)
        : inst_(inst), man_opt_(man_opt), men_(men), visit_(std::move(visit))
    {
    }

    bool run(Cost r)
    {
        cert_.pairs.clear();
        cert_.cost = 0;
        return step(0, r);
    }

    std::uint64_t nodes() const noexcept { return nodes_; }

private:
    bool step(std::size_t i, Cost budget)
    {
        ++nodes_;
        if (budget < 0)
            return false;
        if (i == men_.size())
            return visit_(cert_);
        const int m = men_[i];
        const int base_wife = man_opt_.wife(m);
        const Rank base = inst_.man_rank(m, base_wife);
        Cost taken = 0;
        for (const auto& e : inst_.prefs(Side::man, m)) {
            if (e.rank <= base)
                continue;
            if (taken == budget)
                break;
            ++taken;
            const Cost offset = e.rank - base;
            if (offset > budget)
                break;
            cert_.pairs.emplace_back(m, e.partner);
            cert_.cost += offset;
            const bool stop = step(i + 1, budget - offset);
            cert_.cost -= offset;
            cert_.pairs.pop_back();
            if (stop)
                return true;
        }
        return false;
    }

    const Instance& inst_;
    const Matching& man_opt_;
    std::span<const int> men_;
    Visit visit_;
    BranchCertificate cert_;
    std::uint64_t nodes_ = 0;
};

} // namespace detail

inline std::vector<BranchCertificate> enumerate_certificates(const Instance& inst, const Matching& man_opt,
                                                             std::span<const int> men, Cost r,
                                                             std::uint64_t* nodes = nullptr)
{
    std::vector<BranchCertificate> out;
    if (r < 0)
        return out;
    detail::Brancher br(inst, man_opt, men, [&](const BranchCertificate& c) {
        out.push_back(c);
        return false;
    });
    br.run(r);
    if (nodes)
        *nodes = br.nodes();
    return out;
}

inline std::vector<BranchCertificate> enumerate_certificates(const Instance& inst, std::span<const int> men, Cost r)
{
    return enumerate_certificates(inst, man_optimal(inst), men, r);
}

/// Completes a certificate with the man-optimal partner of every other man and
/// keeps it only if it is a valid stable matching of balance at most k. In a
/// kernel the men outside M_S are exactly the happy ones.
inline std::optional<Matching> assemble_and_check(const Instance& inst, Cost k, const Matching& man_opt,
                                                  const BranchCertificate& cert)
{
    Matching mu(inst);
    std::vector<bool> chosen(inst.num_men(), false);
    for (auto [m, w] : cert.pairs) {
        if (chosen[m] || mu.husband(w) != Matching::none || !inst.acceptable(m, w) || w == man_opt.wife(m))
            return std::nullopt;
        chosen[m] = true;
        mu.match(m, w);
    }
    for (int m = 0; m < static_cast<int>(inst.num_men()); ++m) {
        if (chosen[m])
            continue;
        const int w = man_opt.wife(m);
        if (w == Matching::none)
            continue;
        if (mu.husband(w) != Matching::none)
            return std::nullopt;
        mu.match(m, w);
    }
    if (!is_stable_unchecked(inst, mu) || balance(inst, mu) > k)
        return std::nullopt;
    return mu;
}

inline std::optional<Matching> assemble_and_check(const Instance& inst, Cost k, const BranchCertificate& cert)
{
    return assemble_and_check(inst, k, man_optimal(inst), cert);
}

struct SolveResult {
    bool answer = false;
    std::optional<Matching> witness; // stable in the input, balance at most k
    Cost t = 0;                      // parameter of the input
    KernelOutcome kernel_outcome = KernelOutcome::reduced;
    SolveStats stats;
};

/// Decides Bal <= k: kernelize, then try every subset M' of the sad men
/// (smallest first, lexicographic within a size) with the branching search.
/// Certificates are checked as they are produced.
inline SolveResult solve_above_min(const Instance& input, Cost k)
{
    SolveResult out;
    const auto kr = kernelize(input, k);
    out.t = kr.t_input;
    out.kernel_outcome = kr.outcome;
    if (kr.outcome == KernelOutcome::trivial_no)
        return out;
    if (kr.outcome == KernelOutcome::trivial_yes) {
        out.answer = true;
        out.witness = kr.resolved;
        return out;
    }

    const Instance& kernel = kr.kernel;
    const auto opt = optima(kernel);
    std::vector<int> sad;
    for (int m = 0; m < static_cast<int>(kernel.num_men()); ++m)
        if (opt.man_optimal.wife(m) != opt.woman_optimal.wife(m))
            sad.push_back(m);
    out.stats.sad_men = sad.size();
    out.stats.r = kr.k - opt.om;
    if (out.stats.r < 0)
        return out;

    std::optional<Matching> found;
    std::vector<int> subset;
    for (std::size_t size = 0; size <= sad.size() && !found; ++size) {
        // Lexicographic combinations of `size` positions in `sad`.
        std::vector<std::size_t> pos(size);
        for (std::size_t i = 0; i < size; ++i)
            pos[i] = i;
        for (;;) {
            subset.clear();
            for (auto p : pos)
                subset.push_back(sad[p]);
            ++out.stats.subsets_tried;
            detail::Brancher br(kernel, opt.man_optimal, subset, [&](const BranchCertificate& c) {
                found = assemble_and_check(kernel, kr.k, opt.man_optimal, c);
                return found.has_value();
            });
            br.run(out.stats.r);
            out.stats.branch_nodes += br.nodes();
            out.stats.max_nodes_per_subset = std::max(out.stats.max_nodes_per_subset, br.nodes());
            if (found)
                break;
            std::size_t i = size;
            while (i > 0 && pos[i - 1] == sad.size() - size + i - 1)
                --i;
            if (i == 0)
                break;
            ++pos[i - 1];
            for (std::size_t j = i; j < size; ++j)
                pos[j] = pos[j - 1] + 1;
        }
    }
    if (found) {
        out.answer = true;
        out.witness = lift_matching(input, kernel, *found, kr);
    }
    return out;
}

/// Smallest k with a Yes answer, found by bisection between the lower bound
/// max{O_M, O_W} and the balance of the man-optimal matching.
struct Minimum {
    Cost bal = 0;
    Matching witness;
    std::size_t decisions = 0;
};

inline Minimum minimize_balance(const Instance& inst)
{
    const auto o = optima(inst);
    Cost lo = std::max(o.om, o.ow);
    Cost hi = balance(inst, o.man_optimal);
    Minimum best{hi, o.man_optimal, 0};
    while (lo < hi) {
        const Cost mid = lo + (hi - lo) / 2;
        auto r = solve_above_min(inst, mid);
        ++best.decisions;
        if (r.answer) {
            hi = mid;
            best.bal = balance(inst, *r.witness);
            best.witness = *r.witness;
            hi = std::min(hi, best.bal);
        } else {
            lo = mid + 1;
        }
    }
    best.bal = lo;
    if (balance(inst, best.witness) != lo) {
        auto r = solve_above_min(inst, lo);
        ++best.decisions;
        best.witness = *r.witness;
    }
    return best;
}

} // namespace bsm
