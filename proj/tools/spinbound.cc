#include <spinbound/blowup.hh>
#include <spinbound/bounds.hh>
#include <spinbound/count.hh>
#include <spinbound/digest.hh>
#include <spinbound/errors.hh>
#include <spinbound/search.hh>

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace spinbound;

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_input = 2;
    constexpr int exit_violated = 3;
    constexpr int exit_inconclusive = 4;

    struct Common
    {
        std::string backend = "auto";
        double budget = 1e8;
        unsigned threads = 0;
        std::uint64_t seed = 1;
        std::string out;
    };

    /// Error raised for anything the user supplied; always exit status 2.
    class InputError : public Error
    {
        public:
            using Error::Error;
    };

    auto read_file(const std::string & path) -> std::string
    {
        std::ifstream in(path, std::ios::binary);
        if (! in)
            throw InputError("cannot read '" + path + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }

    template <typename Fn>
    auto parse_file(const std::string & path, Fn && parse)
    {
        auto text = read_file(path);
        try {
            return parse(text);
        }
        catch (const ParseError & e) {
            throw InputError(path + ": " + e.what());
        }
        catch (const PreconditionError & e) {
            throw InputError(path + ": " + e.what());
        }
    }

    auto load_graph(const std::string & path) -> Graph
    {
        return parse_file(path, [](const std::string & t) { return parse_graph(t); });
    }

    auto load_weights(const std::string & path, const Graph & g) -> WeightSystem
    {
        return parse_file(path, [&](const std::string & t) { return parse_weights(t, g); });
    }

    auto load_lists(const std::string & path, const Graph & g, const Graph & h) -> ListAssignment
    {
        if (path.empty())
            return ListAssignment::full(g.size(), h.size());
        return parse_file(path, [&](const std::string & t) { return parse_lists(t, g, h); });
    }

    auto eval_options(const Common & c) -> EvalOptions
    {
        return { c.budget, c.threads };
    }

    auto choose_backend(const Common & c, const WeightSystem & w) -> Backend
    {
        if (c.backend == "exact") {
            if (! w.is_exact())
                throw InputError("exact backend requested but the weights are not rational");
            return Backend::exact;
        }
        if (c.backend == "log")
            return Backend::log;
        return w.is_exact() ? Backend::exact : Backend::log;
    }

    void emit(const Common & c, const nlohmann::json & j)
    {
        auto text = j.dump(2) + "\n";
        if (c.out.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream out(c.out, std::ios::binary);
        if (! out)
            throw InputError("cannot write '" + c.out + "'");
        out << text;
    }

    auto verdict_status(Verdict v) -> int
    {
        switch (v) {
            case Verdict::holds: return exit_ok;
            case Verdict::violated: return exit_violated;
            case Verdict::inconclusive: return exit_inconclusive;
        }
        return exit_input;
    }

    auto exact_json(const NonNegValue & v) -> nlohmann::json
    {
        if (! v.is_exact())
            return nullptr;
        return { { "num", v.rational().get_num().get_str() }, { "den", v.rational().get_den().get_str() } };
    }

    struct ComputeArgs
    {
        std::string graph, weights;
    };

    auto run_compute(const Common & c, const ComputeArgs & a) -> int
    {
        auto g = load_graph(a.graph);
        auto w = load_weights(a.weights, g);
        auto backend = choose_backend(c, w);
        auto z = partition(g, backend == Backend::log ? w.to_log() : w, eval_options(c));
        nlohmann::json j = {
            { "backend", to_string(backend) },
            { "backend_requested", c.backend },
            { "log_z", json_number(z.log()) },
            { "z", exact_json(z) },
            { "graph_sha", graph_sha(g) },
            { "weights_sha", weights_sha(g, w) }
        };
        emit(c, j);
        return exit_ok;
    }

    struct BoundArgs
    {
        std::string name, graph, weights, host, lists, families;
    };

    auto run_bound(const Common & c, const BoundArgs & a) -> int
    {
        auto g = load_graph(a.graph);
        auto opts = eval_options(c);
        auto need = [&](const std::string & path, const std::string & flag) {
            if (path.empty())
                throw InputError("bound " + a.name + " needs " + flag);
        };

        BoundReport report;
        if (a.name == "thm3" || a.name == "conj1") {
            need(a.weights, "--weights");
            auto w = load_weights(a.weights, g);
            BoundOptions bo{ choose_backend(c, w), opts };
            report = a.name == "thm3" ? theorem3_bound(g, w, bo) : conjecture1_bound(g, w, bo);
        }
        else if (a.name == "thm4" || a.name == "conj2" || a.name == "thm5") {
            need(a.host, "--host");
            auto h = load_graph(a.host);
            auto lists = load_lists(a.lists, g, h);
            if (a.name == "thm4")
                report = theorem4_bound(g, h, lists, opts);
            else if (a.name == "conj2")
                report = conjecture2_bound(g, h, lists, opts);
            else {
                need(a.families, "--families");
                auto fam = parse_file(a.families, [&](const std::string & t) { return parse_families(t, g); });
                auto rhs = theorem5_bound(g, h, lists, fam, opts);
                RootProduct lhs(Rational(count_list_homs(g, h, lists, opts)));
                report = compare_sides("thm5", lhs, rhs);
                report.graph_sha = graph_sha(g);
                report.weights_sha = lists_sha(h, lists);
            }
        }
        else if (a.name == "ind")
            report = kahn_ind(g, opts);
        else if (a.name == "indconj")
            report = kahn_ind_conj(g, opts);
        else
            throw InputError("unknown bound '" + a.name + "'");

        auto j = to_json(report);
        j["backend_requested"] = c.backend;
        emit(c, j);
        return verdict_status(report.verdict);
    }

    struct ListHomArgs
    {
        std::string graph, host, lists;
    };

    auto run_listhom(const Common & c, const ListHomArgs & a) -> int
    {
        auto g = load_graph(a.graph);
        auto h = load_graph(a.host);
        auto lists = load_lists(a.lists, g, h);
        auto count = count_list_homs(g, h, lists, eval_options(c));
        emit(c, {
            { "count", count.get_str() },
            { "graph_sha", graph_sha(g) },
            { "lists_sha", lists_sha(h, lists) }
        });
        return exit_ok;
    }

    struct IsingArgs
    {
        std::string graph;
        double beta = 1.0;
    };

    auto run_ising(const Common & c, const IsingArgs & a) -> int
    {
        auto g = load_graph(a.graph);
        auto r = ising_free_energy_check(g, a.beta, eval_options(c));
        auto j = to_json(r);
        j["backend"] = "log";
        j["graph_sha"] = graph_sha(g);
        emit(c, j);
        return r.in_bounds ? exit_ok : exit_violated;
    }

    struct BlowupArgs
    {
        std::string graph, weights, cfg, samples;
        unsigned spins = 2;
        unsigned long scale = 1;
        std::size_t trials = 100;
    };

    auto parse_cfg(const std::string & text, const Graph & g, unsigned spins) -> SpinConfig
    {
        SpinConfig cfg(g.size(), 0);
        if (text.empty())
            return cfg;
        std::stringstream in(text);
        std::string item;
        std::size_t v = 0;
        while (std::getline(in, item, ',')) {
            unsigned long s = 0;
            try {
                std::size_t used = 0;
                s = std::stoul(item, &used);
                if (used != item.size())
                    throw std::invalid_argument(item);
            }
            catch (const std::exception &) {
                throw InputError("--cfg: expected comma separated spins, got '" + item + "'");
            }
            if (v >= g.size() || s < 1 || s > spins)
                throw InputError("--cfg: spin list must give one spin in 1.." + std::to_string(spins) + " per vertex");
            cfg[v++] = Spin(s - 1);
        }
        if (v != g.size())
            throw InputError("--cfg: spin list must give one spin per vertex");
        return cfg;
    }

    auto run_blowup(const Common & c, const BlowupArgs & a) -> int
    {
        auto g = load_graph(a.graph);
        auto w = a.weights.empty() ? WeightSystem(g, a.spins) : load_weights(a.weights, g);
        auto cfg = parse_cfg(a.cfg, g, w.spins());
        auto stats = concentration_experiment(g, w, cfg, a.scale, a.trials, c.seed, eval_options(c));
        std::optional<std::string> samples;
        if (! a.samples.empty()) {
            std::ofstream out(a.samples, std::ios::binary);
            if (! out)
                throw InputError("cannot write '" + a.samples + "'");
            out << format_samples(stats);
            samples = a.samples;
        }
        auto j = to_json(stats, samples);
        j["graph_sha"] = graph_sha(g);
        j["weights_sha"] = weights_sha(g, w);
        emit(c, j);
        return exit_ok;
    }

    struct SearchArgs
    {
        std::string config;
    };

    auto run_search(const Common & c, const SearchArgs & a, bool threads_given, bool seed_given, bool budget_given) -> int
    {
        auto cfg = parse_file(a.config, [](const std::string & t) { return parse_campaign_config(t); });
        if (threads_given)
            cfg.threads = c.threads;
        if (seed_given)
            cfg.seed = c.seed;
        if (budget_given)
            cfg.budget = c.budget;
        auto report = run_campaign(cfg);
        auto j = to_json(report);
        if (! cfg.out.empty()) {
            std::filesystem::create_directories(cfg.out);
            std::ofstream(std::filesystem::path(cfg.out) / "report.json", std::ios::binary) << j.dump(2) << "\n";
            std::ofstream(std::filesystem::path(cfg.out) / "summary.txt", std::ios::binary) << summary_table(report);
        }
        std::cerr << summary_table(report);
        emit(c, j);
        return exit_ok;
    }
}

auto main(int argc, char ** argv) -> int
{
    CLI::App app{ "Exact partition functions, K_{a,b} product bounds and blow-up experiments" };
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App * sub) {
        sub->add_option("--backend", common.backend, "exact, log or auto")->check(CLI::IsMember({ "exact", "log", "auto" }));
        sub->add_option("--budget", common.budget, "largest enumeration allowed");
        sub->add_option("--threads", common.threads, "worker threads, 0 for all cores");
        sub->add_option("--seed", common.seed, "random seed");
        sub->add_option("--out", common.out, "write the JSON report here instead of stdout");
    };

    ComputeArgs compute;
    auto * c_compute = app.add_subcommand("compute", "partition function Z^W(G)");
    c_compute->add_option("--graph", compute.graph)->required();
    c_compute->add_option("--weights", compute.weights)->required();
    add_common(c_compute);

    BoundArgs bound;
    auto * c_bound = app.add_subcommand("bound", "evaluate one bound");
    c_bound->add_option("name", bound.name, "thm3, thm4, thm5, conj1, conj2, ind or indconj")->required()
        ->check(CLI::IsMember({ "thm3", "thm4", "thm5", "conj1", "conj2", "ind", "indconj" }));
    c_bound->add_option("--graph", bound.graph)->required();
    c_bound->add_option("--weights", bound.weights);
    c_bound->add_option("--host", bound.host, "target graph H for list bounds");
    c_bound->add_option("--lists", bound.lists, "list file; omitted means full lists");
    c_bound->add_option("--families", bound.families, "cover families for thm5");
    add_common(c_bound);

    ListHomArgs listhom;
    auto * c_listhom = app.add_subcommand("listhom", "count list homomorphisms G -> H");
    c_listhom->add_option("--graph", listhom.graph)->required();
    c_listhom->add_option("--host", listhom.host)->required();
    c_listhom->add_option("--lists", listhom.lists);
    add_common(c_listhom);

    IsingArgs ising;
    auto * c_ising = app.add_subcommand("ising", "Ising free energy against its regular bipartite sandwich");
    c_ising->add_option("--graph", ising.graph)->required();
    c_ising->add_option("--beta", ising.beta)->required();
    add_common(c_ising);

    BlowupArgs blowup;
    auto * c_blowup = app.add_subcommand("blowup", "blow-up concentration experiment");
    c_blowup->add_option("--graph", blowup.graph)->required();
    c_blowup->add_option("--weights", blowup.weights, "omitted means all weights 1");
    c_blowup->add_option("--spins", blowup.spins, "spin count when no weights file is given");
    c_blowup->add_option("-C,--scale", blowup.scale, "block scale C")->required();
    c_blowup->add_option("--trials", blowup.trials);
    c_blowup->add_option("--cfg", blowup.cfg, "comma separated 1-based spins, default all 1");
    c_blowup->add_option("--samples", blowup.samples, "write raw counts here, one per line");
    add_common(c_blowup);

    SearchArgs search;
    auto * c_search = app.add_subcommand("search", "run a bound campaign");
    c_search->add_option("--config", search.config)->required();
    add_common(c_search);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError & e) {
        auto status = app.exit(e);
        return status == 0 ? 0 : exit_input;
    }

    try {
        if (*c_compute)
            return run_compute(common, compute);
        if (*c_bound)
            return run_bound(common, bound);
        if (*c_listhom)
            return run_listhom(common, listhom);
        if (*c_ising)
            return run_ising(common, ising);
        if (*c_blowup)
            return run_blowup(common, blowup);
        if (*c_search)
            return run_search(common, search, c_search->count("--threads") > 0, c_search->count("--seed") > 0,
                    c_search->count("--budget") > 0);
    }
    catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}
