#pragma once

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bsm/error.hpp"
#include "bsm/instance.hpp"

namespace bsm {

enum class Format { text, json };

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> tokens(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
            ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])))
            ++j;
        if (j > i)
            out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

/// Splits into lines with `#` comments and surrounding blanks removed; keeps
/// 1-based line numbers for diagnostics.
inline std::vector<std::pair<int, std::string_view>> content_lines(std::string_view text)
{
    std::vector<std::pair<int, std::string_view>> out;
    int number = 0;
    while (!text.empty()) {
        ++number;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty())
            out.emplace_back(number, line);
    }
    return out;
}

template <class Int>
Int parse_int(std::string_view s, int line, std::string_view what)
{
    Int value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError("line " + std::to_string(line) + ": bad " + std::string(what) + " '" + std::string(s) + "'");
    return value;
}

inline bool valid_name(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (std::isspace(static_cast<unsigned char>(c)) || c == ':' || c == '=' || c == '#')
            return false;
    return true;
}

inline bool reserved_key(std::string_view s)
{
    return s == "men" || s == "women" || s == "k" || s == "form";
}

/// Resolved person lines shared by both parsers: name -> [(partner, rank or 0 for positional)].
struct RawPrefs {
    std::string person;
    std::vector<std::pair<std::string, Rank>> entries;
    int line = 0;
};

inline Instance assemble(const std::vector<std::string>& men, const std::vector<std::string>& women,
                         const std::vector<RawPrefs>& prefs, std::optional<Cost> k, bool functional)
{
    InstanceBuilder b;
    for (const auto& m : men) {
        if (reserved_key(m))
            throw ValidationError("'" + m + "' is a reserved word and cannot name a person");
        b.add_man(m);
    }
    for (const auto& w : women) {
        if (reserved_key(w))
            throw ValidationError("'" + w + "' is a reserved word and cannot name a person");
        b.add_woman(w);
    }

    std::unordered_map<std::string, std::pair<Side, int>> where;
    for (Side s : {Side::man, Side::woman})
        for (int p = 0; p < static_cast<int>(b.size(s)); ++p)
            if (!where.emplace(b.name(s, p), std::make_pair(s, p)).second)
                throw ValidationError("duplicate person name '" + b.name(s, p) + "'");

    std::set<std::string> seen;
    for (const auto& raw : prefs) {
        auto it = where.find(raw.person);
        if (it == where.end())
            throw ValidationError("line " + std::to_string(raw.line) + ": unknown person '" + raw.person + "'");
        if (!seen.insert(raw.person).second)
            throw ValidationError("line " + std::to_string(raw.line) + ": preferences of '" + raw.person +
                                  "' given twice");
        auto [side, id] = it->second;
        Rank position = 0;
        for (const auto& [partner, explicit_rank] : raw.entries) {
            ++position;
            auto pit = where.find(partner);
            if (pit == where.end())
                throw ValidationError("line " + std::to_string(raw.line) + ": unknown person '" + partner + "'");
            if (pit->second.first == side)
                throw ValidationError("line " + std::to_string(raw.line) + ": '" + raw.person + "' ranks '" +
                                      partner + "' of the same side");
            if (b.rank(side, id, pit->second.second))
                throw ValidationError("line " + std::to_string(raw.line) + ": duplicate partner '" + partner +
                                      "' in the list of '" + raw.person + "'");
            b.set_rank(side, id, pit->second.second, explicit_rank > 0 ? explicit_rank : position);
        }
    }
    b.set_target(k);
    b.set_functional(functional);
    return b.build();
}

inline Instance parse_text(std::string_view text)
{
    std::optional<std::vector<std::string>> men, women;
    std::optional<Cost> k;
    bool functional = false;
    std::vector<RawPrefs> prefs;

    for (auto [number, line] : content_lines(text)) {
        auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw ParseError("line " + std::to_string(number) + ": expected 'key: values'");
        std::string_view key = trim(line.substr(0, colon));
        auto values = tokens(line.substr(colon + 1));
        if (!valid_name(key))
            throw ParseError("line " + std::to_string(number) + ": bad key '" + std::string(key) + "'");

        if (key == "men" || key == "women") {
            auto& slot = key == "men" ? men : women;
            if (slot)
                throw ParseError("line " + std::to_string(number) + ": '" + std::string(key) + "' declared twice");
            slot.emplace();
            for (auto v : values) {
                if (!valid_name(v))
                    throw ParseError("line " + std::to_string(number) + ": bad name '" + std::string(v) + "'");
                slot->emplace_back(v);
            }
        } else if (key == "k") {
            if (values.size() != 1)
                throw ParseError("line " + std::to_string(number) + ": 'k' takes one integer");
            if (k)
                throw ParseError("line " + std::to_string(number) + ": 'k' given twice");
            k = parse_int<Cost>(values[0], number, "target");
            if (*k < 0)
                throw ParseError("line " + std::to_string(number) + ": 'k' must be non-negative");
        } else if (key == "form") {
            if (values.size() != 1 || (values[0] != "functional" && values[0] != "list"))
                throw ParseError("line " + std::to_string(number) + ": 'form' is 'functional' or 'list'");
            functional = values[0] == "functional";
        } else {
            RawPrefs raw{std::string(key), {}, number};
            int explicit_count = 0;
            for (auto v : values) {
                auto eq = v.find('=');
                if (eq == std::string_view::npos) {
                    if (!valid_name(v))
                        throw ParseError("line " + std::to_string(number) + ": bad name '" + std::string(v) + "'");
                    raw.entries.emplace_back(std::string(v), 0);
                } else {
                    auto name = v.substr(0, eq);
                    if (!valid_name(name))
                        throw ParseError("line " + std::to_string(number) + ": bad name '" + std::string(name) + "'");
                    Rank r = parse_int<Rank>(v.substr(eq + 1), number, "rank");
                    if (r < 1)
                        throw ParseError("line " + std::to_string(number) + ": ranks are positive integers");
                    raw.entries.emplace_back(std::string(name), r);
                    ++explicit_count;
                }
            }
            if (explicit_count != 0 && explicit_count != static_cast<int>(values.size()))
                throw ParseError("line " + std::to_string(number) + ": mixes list form and 'name=rank' form");
            if (explicit_count > 0)
                functional = true;
            prefs.push_back(std::move(raw));
        }
    }
    if (!men || !women)
        throw ParseError("missing 'men:' or 'women:' declaration");
    return assemble(*men, *women, prefs, k, functional);
}

inline Instance parse_json(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    try {
        if (!doc.is_object() || !doc.contains("men") || !doc.contains("women"))
            throw ParseError("JSON instance needs 'men' and 'women'");
        auto men = doc.at("men").get<std::vector<std::string>>();
        auto women = doc.at("women").get<std::vector<std::string>>();
        for (const auto& n : men)
            if (!valid_name(n))
                throw ParseError("bad name '" + n + "'");
        for (const auto& n : women)
            if (!valid_name(n))
                throw ParseError("bad name '" + n + "'");
        std::vector<RawPrefs> prefs;
        if (doc.contains("prefs")) {
            if (!doc.at("prefs").is_object())
                throw ParseError("'prefs' must be an object");
            for (const auto& [person, list] : doc.at("prefs").items()) {
                RawPrefs raw{person, {}, 0};
                for (const auto& item : list) {
                    auto partner = item.at(0).get<std::string>();
                    auto r = item.at(1).get<Rank>();
                    if (r < 1)
                        throw ParseError("ranks are positive integers");
                    raw.entries.emplace_back(partner, r);
                }
                prefs.push_back(std::move(raw));
            }
        }
        std::optional<Cost> k;
        if (doc.contains("k") && !doc.at("k").is_null()) {
            k = doc.at("k").get<Cost>();
            if (*k < 0)
                throw ParseError("'k' must be non-negative");
        }
        bool functional = doc.value("functional", false);
        return assemble(men, women, prefs, k, functional);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed JSON instance: ") + e.what());
    }
}

} // namespace detail

/// JSON if the first non-blank character opens an object, text otherwise.
inline Format detect_format(std::string_view text)
{
    auto t = detail::trim(text);
    return (!t.empty() && t.front() == '{') ? Format::json : Format::text;
}

inline Instance parse_instance(std::string_view text, Format format)
{
    return format == Format::json ? detail::parse_json(text) : detail::parse_text(text);
}

inline Instance parse_instance(std::string_view text)
{
    return parse_instance(text, detect_format(text));
}

inline nlohmann::json to_json(const Instance& inst)
{
    nlohmann::json doc;
    doc["men"] = nlohmann::json::array();
    doc["women"] = nlohmann::json::array();
    for (int m = 0; m < static_cast<int>(inst.num_men()); ++m)
        doc["men"].push_back(inst.man_name(m));
    for (int w = 0; w < static_cast<int>(inst.num_women()); ++w)
        doc["women"].push_back(inst.woman_name(w));
    doc["prefs"] = nlohmann::json::object();
    for (Side s : {Side::man, Side::woman}) {
        for (int p = 0; p < static_cast<int>(inst.size(s)); ++p) {
            auto list = nlohmann::json::array();
            for (const auto& e : inst.prefs(s, p))
                list.push_back({inst.name(opposite(s), e.partner), e.rank});
            doc["prefs"][inst.name(s, p)] = std::move(list);
        }
    }
    if (inst.target())
        doc["k"] = *inst.target();
    if (inst.functional())
        doc["functional"] = true;
    return doc;
}

/// Canonical text (people in canonical order, partners by rank) or JSON.
/// Functional instances are written with explicit `name=rank` entries.
inline std::string serialize(const Instance& inst, Format format = Format::text)
{
    if (format == Format::json)
        return to_json(inst).dump(2) + "\n";

    std::ostringstream out;
    out << "men:";
    for (int m = 0; m < static_cast<int>(inst.num_men()); ++m)
        out << ' ' << inst.man_name(m);
    out << "\nwomen:";
    for (int w = 0; w < static_cast<int>(inst.num_women()); ++w)
        out << ' ' << inst.woman_name(w);
    out << '\n';
    if (inst.functional())
        out << "form: functional\n";
    for (Side s : {Side::man, Side::woman}) {
        for (int p = 0; p < static_cast<int>(inst.size(s)); ++p) {
            out << inst.name(s, p) << ':';
            for (const auto& e : inst.prefs(s, p)) {
                out << ' ' << inst.name(opposite(s), e.partner);
                if (inst.functional())
                    out << '=' << e.rank;
            }
            out << '\n';
        }
    }
    if (inst.target())
        out << "k: " << *inst.target() << '\n';
    return out.str();
}

/// Matching file: one `man woman` pair per line, or a JSON array of
/// `[man, woman]` pairs.
inline Matching parse_matching(const Instance& inst, std::string_view text)
{
    std::vector<std::pair<std::string, std::string>> named;
    if (auto t = detail::trim(text); !t.empty() && t.front() == '[') {
        try {
            for (const auto& item : nlohmann::json::parse(t))
                named.emplace_back(item.at(0).get<std::string>(), item.at(1).get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed JSON matching: ") + e.what());
        }
    } else {
        for (auto [number, line] : detail::content_lines(text)) {
            auto tok = detail::tokens(line);
            if (tok.size() != 2)
                throw ParseError("line " + std::to_string(number) + ": expected 'man woman'");
            named.emplace_back(std::string(tok[0]), std::string(tok[1]));
        }
    }
    std::vector<std::pair<int, int>> pairs;
    for (const auto& [m, w] : named) {
        auto mi = inst.find(Side::man, m);
        auto wi = inst.find(Side::woman, w);
        if (!mi || !wi)
            throw ValidationError("matching names unknown pair (" + m + ", " + w + ")");
        pairs.emplace_back(*mi, *wi);
    }
    return make_matching(inst, pairs);
}

inline nlohmann::json to_json(const Instance& inst, const Matching& mu)
{
    auto arr = nlohmann::json::array();
    for (auto [m, w] : mu.pairs())
        arr.push_back({inst.man_name(m), inst.woman_name(w)});
    return arr;
}

inline std::string serialize(const Instance& inst, const Matching& mu)
{
    std::string out;
    for (auto [m, w] : mu.pairs())
        out += inst.man_name(m) + " " + inst.woman_name(w) + "\n";
    return out;
}

} // namespace bsm
