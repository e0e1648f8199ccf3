#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bsm/error.hpp"

namespace bsm {

enum class Side : std::uint8_t { man = 0, woman = 1 };

constexpr Side opposite(Side s) noexcept
{
    return s == Side::man ? Side::woman : Side::man;
}

constexpr std::string_view to_string(Side s) noexcept
{
    return s == Side::man ? "man" : "woman";
}

using Rank = int;
using Cost = long long;

/// A person as named in input files.
struct PersonId {
    Side side = Side::man;
    std::string name;

    friend bool operator==(const PersonId&, const PersonId&) = default;
};

/// One acceptable partner together with the rank (preference value) given to it.
struct Entry {
    int partner = 0;
    Rank rank = 0;

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// A stable marriage instance in either list form or functional form.
///
/// People are addressed by their index within their side; the index order is
/// the canonical order (input order) used for every tie-free "arbitrary"
/// choice downstream. Each person carries an injective rank function over
/// their acceptable partners. When every rank image is {1,...,|A(a)|} the
/// instance is `contiguous()` and the ranks are list positions.
///
/// Instances are immutable once built; use InstanceBuilder to derive edited
/// copies.
class Instance {
public:
    Instance() = default;

    std::size_t size(Side s) const noexcept { return people_[idx(s)].size(); }
    std::size_t num_men() const noexcept { return size(Side::man); }
    std::size_t num_women() const noexcept { return size(Side::woman); }

    const std::string& name(Side s, int person) const { return people_[idx(s)].at(person).name; }
    const std::string& man_name(int m) const { return name(Side::man, m); }
    const std::string& woman_name(int w) const { return name(Side::woman, w); }

    /// Acceptable partners in increasing rank (most preferred first).
    std::span<const Entry> prefs(Side s, int person) const
    {
        return people_[idx(s)][person].by_rank;
    }

    /// Rank that `person` gives `partner`, or 0 if the pair is not acceptable.
    Rank rank(Side s, int person, int partner) const
    {
        const auto& list = people_[idx(s)][person].by_partner;
        auto it = std::lower_bound(list.begin(), list.end(), partner,
                                   [](const Entry& e, int p) { return e.partner < p; });
        return (it != list.end() && it->partner == partner) ? it->rank : 0;
    }

    Rank man_rank(int m, int w) const { return rank(Side::man, m, w); }
    Rank woman_rank(int w, int m) const { return rank(Side::woman, w, m); }
    bool acceptable(int m, int w) const { return man_rank(m, w) != 0; }

    /// Largest rank value used by `person` (0 for an empty list).
    Rank max_rank(Side s, int person) const
    {
        const auto& list = people_[idx(s)][person].by_rank;
        return list.empty() ? 0 : list.back().rank;
    }

    std::size_t num_pairs() const noexcept
    {
        std::size_t n = 0;
        for (const auto& p : people_[0])
            n += p.by_rank.size();
        return n;
    }

    std::optional<std::pair<Side, int>> find(std::string_view name) const
    {
        auto it = index_.find(std::string(name));
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    std::optional<int> find(Side s, std::string_view name) const
    {
        auto hit = find(name);
        if (!hit || hit->first != s)
            return std::nullopt;
        return hit->second;
    }

    const std::optional<Cost>& target() const noexcept { return target_; }

    /// Every rank image is {1,...,|A(a)|}.
    bool contiguous() const noexcept { return contiguous_; }

    /// Flagged as a functional (rank-function) instance. Always true when not contiguous.
    bool functional() const noexcept { return functional_; }

    /// First hole in the rank image of `person`, if any.
    std::optional<Rank> first_gap(Side s, int person) const
    {
        Rank expect = 1;
        for (const auto& e : prefs(s, person)) {
            if (e.rank != expect)
                return expect;
            ++expect;
        }
        return std::nullopt;
    }

    friend bool operator==(const Instance& a, const Instance& b)
    {
        return a.people_ == b.people_ && a.target_ == b.target_ && a.functional_ == b.functional_;
    }

private:
    friend class InstanceBuilder;

    struct Person {
        std::string name;
        std::vector<Entry> by_rank;
        std::vector<Entry> by_partner;

        friend bool operator==(const Person& a, const Person& b)
        {
            return a.name == b.name && a.by_rank == b.by_rank;
        }
    };

    static constexpr std::size_t idx(Side s) noexcept { return static_cast<std::size_t>(s); }

    std::array<std::vector<Person>, 2> people_;
    std::unordered_map<std::string, std::pair<Side, int>> index_;
    std::optional<Cost> target_;
    bool contiguous_ = true;
    bool functional_ = false;
};

/// Mutable draft of an Instance. Removed people (and every entry pointing at
/// them) disappear at build(); surviving people keep their relative order.
class InstanceBuilder {
public:
    InstanceBuilder() = default;

    explicit InstanceBuilder(const Instance& inst)
    {
        for (Side s : {Side::man, Side::woman}) {
            for (int p = 0; p < static_cast<int>(inst.size(s)); ++p) {
                add_person(s, inst.name(s, p));
                for (const auto& e : inst.prefs(s, p))
                    drafts_[idx(s)].back().ranks.emplace(e.partner, e.rank);
            }
        }
        target_ = inst.target();
        functional_ = inst.functional();
    }

    int add_person(Side s, std::string name)
    {
        drafts_[idx(s)].push_back(Draft{std::move(name), {}, false});
        return static_cast<int>(drafts_[idx(s)].size()) - 1;
    }
    int add_man(std::string name) { return add_person(Side::man, std::move(name)); }
    int add_woman(std::string name) { return add_person(Side::woman, std::move(name)); }

    std::size_t size(Side s) const noexcept { return drafts_[idx(s)].size(); }
    const std::string& name(Side s, int p) const { return drafts_[idx(s)].at(p).name; }
    bool removed(Side s, int p) const { return drafts_[idx(s)].at(p).removed; }

    /// One-directional rank assignment; build() checks that the reverse exists.
    void set_rank(Side s, int person, int partner, Rank r)
    {
        drafts_[idx(s)].at(person).ranks[partner] = r;
    }

    void set_pair(int man, int woman, Rank man_rank, Rank woman_rank)
    {
        set_rank(Side::man, man, woman, man_rank);
        set_rank(Side::woman, woman, man, woman_rank);
    }

    void erase_pair(int man, int woman)
    {
        drafts_[0].at(man).ranks.erase(woman);
        drafts_[1].at(woman).ranks.erase(man);
    }

    std::optional<Rank> rank(Side s, int person, int partner) const
    {
        const auto& r = drafts_[idx(s)].at(person).ranks;
        auto it = r.find(partner);
        if (it == r.end())
            return std::nullopt;
        return it->second;
    }

    /// Partners of `person` keyed by partner index.
    const std::map<int, Rank>& ranks(Side s, int person) const { return drafts_[idx(s)].at(person).ranks; }

    Rank max_rank(Side s, int person) const
    {
        Rank best = 0;
        for (const auto& [partner, r] : ranks(s, person))
            if (!removed(opposite(s), partner))
                best = std::max(best, r);
        return best;
    }

    void shift_ranks(Side s, int person, Rank delta)
    {
        for (auto& [partner, r] : drafts_[idx(s)].at(person).ranks)
            r += delta;
    }

    void remove_person(Side s, int person) { drafts_[idx(s)].at(person).removed = true; }

    void set_target(std::optional<Cost> k) { target_ = k; }
    void set_functional(bool f) { functional_ = f; }

    Instance build() const
    {
        Instance inst;
        std::array<std::vector<int>, 2> remap;
        for (Side s : {Side::man, Side::woman}) {
            auto& map = remap[idx(s)];
            map.assign(size(s), -1);
            int next = 0;
            for (std::size_t p = 0; p < size(s); ++p)
                if (!drafts_[idx(s)][p].removed)
                    map[p] = next++;
        }

        for (Side s : {Side::man, Side::woman}) {
            const Side other = opposite(s);
            for (std::size_t p = 0; p < size(s); ++p) {
                const auto& d = drafts_[idx(s)][p];
                if (d.removed)
                    continue;
                if (d.name.empty())
                    throw ValidationError("empty person name");
                const int id = remap[idx(s)][p];
                if (!inst.index_.emplace(d.name, std::make_pair(s, id)).second)
                    throw ValidationError("duplicate person name '" + d.name + "'");

                Instance::Person person{d.name, {}, {}};
                for (const auto& [partner, r] : d.ranks) {
                    if (partner < 0 || static_cast<std::size_t>(partner) >= size(other))
                        throw ValidationError("'" + d.name + "' ranks an unknown person");
                    if (drafts_[idx(other)][partner].removed)
                        continue;
                    if (r < 1)
                        throw ValidationError("'" + d.name + "' uses non-positive rank " + std::to_string(r));
                    const auto& back = drafts_[idx(other)][partner].ranks;
                    if (back.find(static_cast<int>(p)) == back.end())
                        throw ValidationError("mutual acceptability violated: '" + d.name + "' ranks '" +
                                              drafts_[idx(other)][partner].name + "' but not vice versa");
                    person.by_partner.push_back(Entry{remap[idx(other)][partner], r});
                }
                person.by_rank = person.by_partner;
                std::sort(person.by_rank.begin(), person.by_rank.end(),
                          [](const Entry& a, const Entry& b) { return a.rank < b.rank; });
                for (std::size_t i = 0; i < person.by_rank.size(); ++i) {
                    if (i > 0 && person.by_rank[i].rank == person.by_rank[i - 1].rank)
                        throw ValidationError("duplicate rank " + std::to_string(person.by_rank[i].rank) +
                                              " in the list of '" + d.name + "'");
                    if (person.by_rank[i].rank != static_cast<Rank>(i) + 1)
                        inst.contiguous_ = false;
                }
                inst.people_[idx(s)].push_back(std::move(person));
            }
        }
        inst.target_ = target_;
        inst.functional_ = functional_ || !inst.contiguous_;
        return inst;
    }

private:
    struct Draft {
        std::string name;
        std::map<int, Rank> ranks;
        bool removed = false;
    };

    static constexpr std::size_t idx(Side s) noexcept { return static_cast<std::size_t>(s); }

    std::array<std::vector<Draft>, 2> drafts_;
    std::optional<Cost> target_;
    bool functional_ = false;
};

/// Returns a copy flagged as functional; rank values are kept as is.
inline Instance to_functional(const Instance& inst)
{
    InstanceBuilder b(inst);
    b.set_functional(true);
    return b.build();
}

/// Converts a gap-free functional instance back to list form, ranks unchanged.
inline Instance functional_to_lists(const Instance& inst)
{
    for (Side s : {Side::man, Side::woman})
        for (int p = 0; p < static_cast<int>(inst.size(s)); ++p)
            if (auto gap = inst.first_gap(s, p))
                throw GapError("'" + inst.name(s, p) + "' has a gap at " + std::to_string(*gap));
    InstanceBuilder b(inst);
    b.set_functional(false);
    return b.build();
}

/// A partial injective assignment of men to women.
class Matching {
public:
    static constexpr int none = -1;

    Matching() = default;
    Matching(std::size_t men, std::size_t women) : wife_(men, none), husband_(women, none) {}
    explicit Matching(const Instance& inst) : Matching(inst.num_men(), inst.num_women()) {}

    std::size_t num_men() const noexcept { return wife_.size(); }
    std::size_t num_women() const noexcept { return husband_.size(); }

    int wife(int m) const { return wife_.at(m); }
    int husband(int w) const { return husband_.at(w); }
    int partner(Side s, int p) const { return s == Side::man ? wife(p) : husband(p); }

    /// Pairs `man` with `woman`, first releasing whoever either was matched to.
    void match(int man, int woman)
    {
        if (int old = wife_.at(man); old != none)
            husband_[old] = none;
        if (int old = husband_.at(woman); old != none)
            wife_[old] = none;
        wife_[man] = woman;
        husband_[woman] = man;
    }

    void unmatch_man(int man)
    {
        if (int w = wife_.at(man); w != none) {
            husband_[w] = none;
            wife_[man] = none;
        }
    }

    std::size_t size() const noexcept
    {
        return static_cast<std::size_t>(std::count_if(wife_.begin(), wife_.end(), [](int w) { return w != none; }));
    }

    /// Matched pairs in man order.
    std::vector<std::pair<int, int>> pairs() const
    {
        std::vector<std::pair<int, int>> out;
        for (int m = 0; m < static_cast<int>(wife_.size()); ++m)
            if (wife_[m] != none)
                out.emplace_back(m, wife_[m]);
        return out;
    }

    const std::vector<int>& wives() const noexcept { return wife_; }

    friend bool operator==(const Matching&, const Matching&) = default;
    friend auto operator<=>(const Matching& a, const Matching& b) { return a.wife_ <=> b.wife_; }

private:
    std::vector<int> wife_;
    std::vector<int> husband_;
};

/// Throws InvalidMatching unless `mu` fits `inst` and uses only acceptable pairs.
inline void validate(const Instance& inst, const Matching& mu)
{
    if (mu.num_men() != inst.num_men() || mu.num_women() != inst.num_women())
        throw InvalidMatching("matching dimensions do not fit the instance");
    for (int m = 0; m < static_cast<int>(mu.num_men()); ++m) {
        int w = mu.wife(m);
        if (w == Matching::none)
            continue;
        if (mu.husband(w) != m)
            throw InvalidMatching("inconsistent matching at '" + inst.man_name(m) + "'");
        if (!inst.acceptable(m, w))
            throw InvalidMatching("(" + inst.man_name(m) + ", " + inst.woman_name(w) + ") is not an acceptable pair");
    }
    for (int w = 0; w < static_cast<int>(mu.num_women()); ++w)
        if (int m = mu.husband(w); m != Matching::none && mu.wife(m) != w)
            throw InvalidMatching("inconsistent matching at '" + inst.woman_name(w) + "'");
}

/// Builds a matching from index pairs, rejecting repeated people and
/// unacceptable pairs.
inline Matching make_matching(const Instance& inst, std::span<const std::pair<int, int>> pairs)
{
    Matching mu(inst);
    for (auto [m, w] : pairs) {
        if (m < 0 || w < 0 || static_cast<std::size_t>(m) >= inst.num_men() ||
            static_cast<std::size_t>(w) >= inst.num_women())
            throw InvalidMatching("matching refers to an unknown person");
        if (mu.wife(m) != Matching::none || mu.husband(w) != Matching::none)
            throw InvalidMatching("'" + inst.man_name(m) + "' or '" + inst.woman_name(w) + "' matched twice");
        if (!inst.acceptable(m, w))
            throw InvalidMatching("(" + inst.man_name(m) + ", " + inst.woman_name(w) + ") is not an acceptable pair");
        mu.match(m, w);
    }
    return mu;
}

} // namespace bsm
