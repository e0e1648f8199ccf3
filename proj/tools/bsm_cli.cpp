// Command-line front end. Every verb prints one JSON document on stdout.
// Exit status: 0 success or Yes, 1 No, 2 error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsm/bsm.hpp"

using nlohmann::json;

namespace {

constexpr int exit_yes = 0;
constexpr int exit_no = 1;
constexpr int exit_error = 2;

std::string slurp(const std::string& path)
{
    if (path == "-")
        return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw bsm::Error("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw bsm::Error("cannot write '" + path + "'");
    out << text;
}

json objectives_json(const bsm::Objectives& o)
{
    return {{"men_cost", o.men_cost},       {"women_cost", o.women_cost}, {"balance", o.balance},
            {"egalitarian", o.egalitarian}, {"sex_equal", o.sex_equal}};
}

json matching_json(const bsm::Instance& inst, const bsm::Matching& mu)
{
    return {{"pairs", bsm::to_json(inst, mu)}, {"objectives", objectives_json(bsm::objectives(inst, mu))}};
}

json trace_json(const std::vector<bsm::TraceStep>& trace)
{
    auto out = json::array();
    for (const auto& s : trace)
        out.push_back({{"rule", s.rule},
                       {"name", s.name},
                       {"affected", s.affected},
                       {"k_before", s.k_before},
                       {"k_after", s.k_after},
                       {"t_before", s.t_before},
                       {"t_after", s.t_after}});
    return out;
}

bsm::Cost target_or(const bsm::Instance& inst, std::optional<bsm::Cost> k)
{
    if (k)
        return *k;
    if (inst.target())
        return *inst.target();
    throw bsm::Error("no target: pass --k or put 'k:' in the instance");
}

int emit(const json& doc, int code)
{
    std::cout << doc.dump(2) << '\n';
    return code;
}

// Invariant sweep over generated instances; returns the failure descriptions.
json selftest(std::uint64_t seed, int count)
{
    std::mt19937_64 rng(seed);
    auto failures = json::array();
    int checks = 0;
    auto fail = [&](int i, const std::string& what, const bsm::Instance& inst) {
        failures.push_back({{"case", i}, {"check", what}, {"instance", bsm::serialize(inst)}});
    };
    for (int i = 0; i < count; ++i) {
        bsm::InstanceShape shape;
        shape.max_people = 6;
        shape.density = (i % 2 == 0) ? 1.0 : 0.6;
        const auto inst = bsm::random_instance(rng, shape);
        const auto o = bsm::optima(inst);
        const auto all = bsm::enumerate_stable(inst);
        ++checks;
        if (!bsm::is_stable(inst, o.man_optimal) || !bsm::is_stable(inst, o.woman_optimal))
            fail(i, "optima stable", inst);
        for (const auto& mu : all.matchings) {
            for (int m = 0; m < static_cast<int>(inst.num_men()); ++m) {
                if ((mu.wife(m) == bsm::Matching::none) != (o.man_optimal.wife(m) == bsm::Matching::none)) {
                    fail(i, "rural hospital", inst);
                    break;
                }
                if (mu.wife(m) == bsm::Matching::none)
                    continue;
                const auto r = inst.man_rank(m, mu.wife(m));
                if (r < inst.man_rank(m, o.man_optimal.wife(m)) || r > inst.man_rank(m, o.woman_optimal.wife(m))) {
                    fail(i, "optimality sandwich", inst);
                    break;
                }
            }
        }
        const bsm::Cost lo = std::max(o.om, o.ow) - 1;
        for (bsm::Cost k = lo; k <= o.om + o.ow; ++k) {
            ++checks;
            const auto truth = bsm::decide_above_min(inst, all, k).answer;
            const auto fpt = bsm::solve_above_min(inst, k);
            if (fpt.answer != truth)
                fail(i, "solver vs oracle at k=" + std::to_string(k), inst);
            else if (fpt.answer && (!bsm::is_stable(inst, *fpt.witness) || bsm::balance(inst, *fpt.witness) > k))
                fail(i, "witness at k=" + std::to_string(k), inst);
        }
    }
    return {{"seed", seed}, {"instances", count}, {"checks", checks}, {"failures", failures}};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Balanced stable marriage toolkit"};
    app.require_subcommand(1);

    std::string instance_path;
    std::string matching_path;
    std::string graph_path;
    std::string out_path;
    std::optional<bsm::Cost> k;
    int clique_k = 0;
    bool trace = false;
    bool optimize = false;
    std::size_t max_men = bsm::default_oracle_bound;
    std::uint64_t seed = 20240601;
    int count = 200;

    auto* optima_cmd = app.add_subcommand("optima", "man- and woman-optimal stable matchings");
    optima_cmd->add_option("instance", instance_path, "instance file ('-' for stdin)")->required();

    auto* check_cmd = app.add_subcommand("check", "list the blocking pairs of a matching");
    check_cmd->add_option("instance", instance_path, "instance file")->required();
    check_cmd->add_option("matching", matching_path, "matching file")->required();

    auto* enum_cmd = app.add_subcommand("enumerate", "all stable matchings (exhaustive search)");
    enum_cmd->add_option("instance", instance_path, "instance file")->required();
    enum_cmd->add_option("--max-men", max_men, "refuse larger instances");

    auto* kern_cmd = app.add_subcommand("kernelize", "reduce an instance to a kernel");
    kern_cmd->add_option("instance", instance_path, "instance file")->required();
    kern_cmd->add_option("--k", k, "target balance (default: the instance's k)");
    kern_cmd->add_flag("--trace", trace, "include the rule trace");

    auto* solve_cmd = app.add_subcommand("solve", "decide whether some stable matching has balance <= k");
    solve_cmd->add_option("instance", instance_path, "instance file")->required();
    solve_cmd->add_option("--k", k, "target balance (default: the instance's k)");
    solve_cmd->add_flag("--optimize", optimize, "find the optimal balance by bisection on k");

    auto* reduce_cmd = app.add_subcommand("reduce", "build the stable marriage instance for a clique query");
    reduce_cmd->add_option("--graph", graph_path, "graph file")->required();
    reduce_cmd->add_option("--k", clique_k, "clique size")->required()->check(CLI::PositiveNumber);
    reduce_cmd->add_option("--out", out_path, "write the instance here and metadata to <out>.json");

    auto* verify_cmd = app.add_subcommand("verify", "check the reduction against clique brute force");
    verify_cmd->add_option("--graph", graph_path, "graph file")->required();
    verify_cmd->add_option("--k", clique_k, "clique size")->required()->check(CLI::PositiveNumber);

    auto* self_cmd = app.add_subcommand("selftest", "invariant sweep over random instances");
    self_cmd->add_option("--seed", seed, "generator seed");
    self_cmd->add_option("--count", count, "number of instances")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_error;
    }

    try {
        if (*optima_cmd) {
            const auto inst = bsm::parse_instance(slurp(instance_path));
            const auto o = bsm::optima(inst);
            return emit({{"man_optimal", matching_json(inst, o.man_optimal)},
                         {"woman_optimal", matching_json(inst, o.woman_optimal)},
                         {"O_M", o.om},
                         {"O_W", o.ow}},
                        exit_yes);
        }
        if (*check_cmd) {
            const auto inst = bsm::parse_instance(slurp(instance_path));
            const auto mu = bsm::parse_matching(inst, slurp(matching_path));
            auto blocking = json::array();
            for (auto [m, w] : bsm::blocking_pairs(inst, mu))
                blocking.push_back({inst.man_name(m), inst.woman_name(w)});
            const bool stable = blocking.empty();
            return emit({{"stable", stable},
                         {"blocking_pairs", blocking},
                         {"objectives", objectives_json(bsm::objectives(inst, mu))}},
                        stable ? exit_yes : exit_no);
        }
        if (*enum_cmd) {
            const auto inst = bsm::parse_instance(slurp(instance_path));
            const auto all = bsm::enumerate_stable(inst, max_men);
            auto list = json::array();
            for (const auto& mu : all.matchings)
                list.push_back(matching_json(inst, mu));
            return emit({{"count", all.matchings.size()},
                         {"bal", all.bal_opt ? json(*all.bal_opt) : json(nullptr)},
                         {"matchings", list}},
                        exit_yes);
        }
        if (*kern_cmd) {
            const auto inst = bsm::parse_instance(slurp(instance_path));
            const auto kk = target_or(inst, k);
            const auto res = bsm::kernelize(inst, kk);
            json doc{{"outcome", bsm::to_string(res.outcome)}, {"t", res.t_input}};
            if (res.outcome == bsm::KernelOutcome::reduced) {
                doc["k"] = res.k;
                doc["kernel"] = bsm::serialize(res.kernel);
                doc["men"] = res.kernel.num_men();
                doc["women"] = res.kernel.num_women();
                doc["dummies"] = res.dummy_men.size();
            }
            if (res.resolved)
                doc["witness"] = matching_json(inst, *res.resolved);
            if (trace)
                doc["trace"] = trace_json(res.trace);
            return emit(doc, res.outcome == bsm::KernelOutcome::trivial_no ? exit_no : exit_yes);
        }
        if (*solve_cmd) {
            const auto inst = bsm::parse_instance(slurp(instance_path));
            if (optimize) {
                const auto best = bsm::minimize_balance(inst);
                return emit({{"bal", best.bal}, {"witness", matching_json(inst, best.witness)},
                             {"decisions", best.decisions}},
                            exit_yes);
            }
            const auto kk = target_or(inst, k);
            const auto r = bsm::solve_above_min(inst, kk);
            json doc{{"answer", r.answer},
                     {"k", kk},
                     {"t", r.t},
                     {"kernel_outcome", bsm::to_string(r.kernel_outcome)},
                     {"stats",
                      {{"subsets_tried", r.stats.subsets_tried},
                       {"branch_nodes", r.stats.branch_nodes},
                       {"max_nodes_per_subset", r.stats.max_nodes_per_subset},
                       {"r", r.stats.r},
                       {"sad_men", r.stats.sad_men}}}};
            doc["witness"] = r.witness ? matching_json(inst, *r.witness) : json(nullptr);
            return emit(doc, r.answer ? exit_yes : exit_no);
        }
        if (*reduce_cmd) {
            const auto g = bsm::parse_graph(slurp(graph_path));
            const auto art = bsm::reduce_clique(g, clique_k);
            json meta{{"delta", art.delta},
                      {"k_hat", art.k_hat},
                      {"t", art.t},
                      {"fallback", art.fallback},
                      {"men", art.inst.num_men()},
                      {"women", art.inst.num_women()}};
            json vertices = json::object(), edges = json::object();
            for (std::size_t v = 0; v < art.vertex_people.size(); ++v)
                vertices[g.vertices[v]] = art.vertex_people[v];
            for (std::size_t e = 0; e < art.edge_people.size(); ++e)
                edges[g.vertices[g.edges[e].first] + " " + g.vertices[g.edges[e].second]] = art.edge_people[e];
            meta["name_maps"] = {{"vertices", vertices}, {"edges", edges}};
            if (art.fallback_answer)
                meta["fallback_answer"] = *art.fallback_answer;
            if (!out_path.empty()) {
                write_file(out_path, bsm::serialize(art.inst));
                write_file(out_path + ".json", meta.dump(2) + "\n");
                meta["written"] = out_path;
            } else {
                meta["instance"] = bsm::serialize(art.inst);
            }
            return emit(meta, exit_yes);
        }
        if (*verify_cmd) {
            const auto g = bsm::parse_graph(slurp(graph_path));
            const auto rep = bsm::verify_reduction(g, clique_k);
            json doc{{"graph", rep.graph_summary},
                     {"k", rep.k},
                     {"clique", rep.clique},
                     {"fallback", rep.fallback},
                     {"reduction_answer", rep.reduction_answer},
                     {"agreement", rep.agree},
                     {"delta", rep.delta},
                     {"k_hat", rep.k_hat},
                     {"t", rep.t}};
            if (rep.clique_vertices) {
                auto names = json::array();
                for (int v : *rep.clique_vertices)
                    names.push_back(g.vertices[v]);
                doc["clique_vertices"] = names;
            }
            if (!rep.fallback) {
                doc["O_M"] = rep.om;
                doc["O_W"] = rep.ow;
                doc["checks"] = {{"optima_closed_form", rep.optima_match_closed_form},
                                 {"O_M_O_W", rep.om_ow_as_predicted},
                                 {"t", rep.t_as_predicted},
                                 {"family_has_optima", rep.family_has_optima},
                                 {"witness", rep.witness_ok}};
                doc["stable_matchings"] = rep.stable_count;
                doc["bal"] = rep.bal_opt ? json(*rep.bal_opt) : json(nullptr);
            }
            return emit(doc, rep.agree ? exit_yes : exit_no);
        }
        if (*self_cmd) {
            auto doc = selftest(seed, count);
            const bool ok = doc["failures"].empty();
            doc["ok"] = ok;
            return emit(doc, ok ? exit_yes : exit_no);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}
