#include <spinbound/digest.hh>
#include <spinbound/errors.hh>
#include <spinbound/parallel.hh>
#include <spinbound/search.hh>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace spinbound
{
    namespace
    {
        using Cells = std::vector<std::vector<Vertex>>;

        class Canoniser
        {
            public:
                explicit Canoniser(const Graph & g) : _g(g) { }

                auto run() -> std::pair<std::string, std::vector<Vertex>>
                {
                    Cells cells;
                    if (_g.size() > 0) {
                        cells.emplace_back();
                        for (Vertex v = 0 ; v < _g.size() ; ++v)
                            cells.back().push_back(v);
                    }
                    search(refine(std::move(cells)));
                    return { _best, _best_label };
                }

            private:
                const Graph & _g;
                std::string _best;
                std::vector<Vertex> _best_label;
                bool _have = false;

                // split cells by neighbour counts into every cell until stable
                auto refine(Cells cells) const -> Cells
                {
                    std::vector<std::size_t> cell_of(_g.size());
                    for (;;) {
                        for (std::size_t c = 0 ; c < cells.size() ; ++c)
                            for (auto v : cells[c])
                                cell_of[v] = c;
                        Cells next;
                        bool split = false;
                        for (auto & cell : cells) {
                            if (cell.size() == 1) {
                                next.push_back(cell);
                                continue;
                            }
                            std::vector<std::pair<std::vector<unsigned>, Vertex>> keyed;
                            for (auto v : cell) {
                                std::vector<unsigned> sig(cells.size(), 0);
                                for (auto u : _g.neighbours(v))
                                    ++sig[cell_of[u]];
                                keyed.emplace_back(std::move(sig), v);
                            }
                            std::sort(keyed.begin(), keyed.end());
                            for (std::size_t k = 0 ; k < keyed.size() ; ++k) {
                                if (k == 0 || keyed[k].first != keyed[k - 1].first) {
                                    if (k > 0)
                                        split = true;
                                    next.emplace_back();
                                }
                                next.back().push_back(keyed[k].second);
                            }
                        }
                        cells = std::move(next);
                        if (! split)
                            return cells;
                    }
                }

                void search(const Cells & cells)
                {
                    std::optional<std::size_t> target;
                    for (std::size_t c = 0 ; c < cells.size() ; ++c)
                        if (cells[c].size() > 1 && (! target || cells[c].size() < cells[*target].size()))
                            target = c;

                    if (! target) {
                        leaf(cells);
                        return;
                    }
                    for (auto v : cells[*target]) {
                        Cells next;
                        for (std::size_t c = 0 ; c < cells.size() ; ++c) {
                            if (c != *target) {
                                next.push_back(cells[c]);
                                continue;
                            }
                            next.push_back({ v });
                            next.emplace_back();
                            for (auto u : cells[c])
                                if (u != v)
                                    next.back().push_back(u);
                        }
                        search(refine(std::move(next)));
                    }
                }

                void leaf(const Cells & cells)
                {
                    auto n = _g.size();
                    std::vector<Vertex> order(n);
                    for (std::size_t c = 0 ; c < n ; ++c)
                        order[c] = cells[c][0];
                    std::string form;
                    form.reserve(n * (n - 1) / 2);
                    for (std::size_t i = 0 ; i < n ; ++i)
                        for (std::size_t j = i + 1 ; j < n ; ++j)
                            form += _g.has_edge(order[i], order[j]) ? '1' : '0';
                    if (! _have || form < _best) {
                        _have = true;
                        _best = std::move(form);
                        _best_label.assign(n, 0);
                        for (std::size_t i = 0 ; i < n ; ++i)
                            _best_label[order[i]] = Vertex(i);
                    }
                }
        };
    }

    auto canonical_string(const Graph & g) -> std::string
    {
        return std::to_string(g.size()) + ":" + Canoniser(g).run().first;
    }

    auto canonical_graph(const Graph & g) -> Graph
    {
        auto label = Canoniser(g).run().second;
        return relabel(g, label);
    }

    namespace
    {
        auto all_graphs(std::size_t n_max) -> std::vector<std::map<std::string, Graph>>
        {
            std::vector<std::map<std::string, Graph>> levels(n_max + 1);
            if (n_max == 0)
                return levels;
            levels[1].emplace(canonical_string(Graph(1, {})), Graph(1, {}));
            for (std::size_t k = 2 ; k <= n_max ; ++k)
                for (auto & [form, parent] : levels[k - 1]) {
                    (void) form;
                    std::vector<Edge> base(parent.edges().begin(), parent.edges().end());
                    for (std::uint64_t mask = 0 ; mask < (std::uint64_t(1) << (k - 1)) ; ++mask) {
                        auto edges = base;
                        for (Vertex u = 0 ; u < k - 1 ; ++u)
                            if (mask >> u & 1)
                                edges.emplace_back(u, Vertex(k - 1));
                        Graph g(k, std::move(edges));
                        auto key = canonical_string(g);
                        if (! levels[k].contains(key))
                            levels[k].emplace(std::move(key), canonical_graph(g));
                    }
                }
            return levels;
        }

        // classE = 0..p-1 with degree a, classO = p..p+q-1 with degree b
        void biregular_rows(std::size_t p, std::size_t q, unsigned a, unsigned b,
                const std::vector<std::vector<Vertex>> & subsets, std::size_t row, std::size_t first,
                std::vector<unsigned> & column, std::vector<std::size_t> & chosen,
                std::map<std::string, Graph> & found, bool connected_only)
        {
            if (row == p) {
                for (auto c : column)
                    if (c != b)
                        return;
                std::vector<Edge> edges;
                for (std::size_t r = 0 ; r < p ; ++r)
                    for (auto col : subsets[chosen[r]])
                        edges.emplace_back(Vertex(r), Vertex(p + col));
                Graph g(p + q, std::move(edges));
                if (connected_only && ! g.is_connected())
                    return;
                auto key = canonical_string(g);
                if (! found.contains(key))
                    found.emplace(std::move(key), canonical_graph(g));
                return;
            }
            auto rows_left = p - row;
            for (auto c : column)
                if (b - c > rows_left)
                    return;
            for (std::size_t s = first ; s < subsets.size() ; ++s) {
                bool fits = true;
                for (auto col : subsets[s])
                    if (column[col] >= b) {
                        fits = false;
                        break;
                    }
                if (! fits)
                    continue;
                for (auto col : subsets[s])
                    ++column[col];
                chosen[row] = s;
                biregular_rows(p, q, a, b, subsets, row + 1, s, column, chosen, found, connected_only);
                for (auto col : subsets[s])
                    --column[col];
            }
        }

        auto subsets_of_size(std::size_t q, unsigned a) -> std::vector<std::vector<Vertex>>
        {
            std::vector<std::vector<Vertex>> result;
            std::vector<Vertex> current;
            auto recurse = [&](auto & self, Vertex next) -> void {
                if (current.size() == a) {
                    result.push_back(current);
                    return;
                }
                for (Vertex x = next ; x < q ; ++x) {
                    current.push_back(x);
                    self(self, x + 1);
                    current.pop_back();
                }
            };
            recurse(recurse, 0);
            return result;
        }
    }

    auto enumerate_graphs(std::size_t n_max, GraphFilter filter, bool connected_only) -> std::vector<Graph>
    {
        std::vector<Graph> result;
        if (filter.kind == GraphFilter::Kind::biregular) {
            if (n_max > enumerate_ceiling_biregular)
                throw PreconditionError("biregular enumeration is limited to " + std::to_string(enumerate_ceiling_biregular) + " vertices");
            if (filter.a == 0 || filter.b == 0)
                throw PreconditionError("biregular degrees must be at least 1");
            std::map<std::string, Graph> found;
            for (std::size_t p = 1 ; p < n_max ; ++p)
                for (std::size_t q = 1 ; p + q <= n_max ; ++q) {
                    if (p * filter.a != q * filter.b || filter.a > q || filter.b > p)
                        continue;
                    auto subsets = subsets_of_size(q, filter.a);
                    std::vector<unsigned> column(q, 0);
                    std::vector<std::size_t> chosen(p, 0);
                    biregular_rows(p, q, filter.a, filter.b, subsets, 0, 0, column, chosen, found, connected_only);
                }
            std::vector<std::pair<std::pair<std::size_t, std::string>, Graph>> sorted;
            for (auto & [key, g] : found)
                sorted.push_back({ { g.size(), key }, g });
            std::sort(sorted.begin(), sorted.end(), [](auto & x, auto & y) { return x.first < y.first; });
            for (auto & [key, g] : sorted)
                result.push_back(g);
            return result;
        }

        if (n_max > enumerate_ceiling_general)
            throw PreconditionError("graph enumeration is limited to " + std::to_string(enumerate_ceiling_general) + " vertices");
        auto levels = all_graphs(n_max);
        for (auto & level : levels)
            for (auto & [key, g] : level) {
                if (g.edge_count() == 0)
                    continue;
                if (connected_only && ! g.is_connected())
                    continue;
                if (filter.kind == GraphFilter::Kind::bipartite && ! is_bipartite(g))
                    continue;
                result.push_back(g);
            }
        return result;
    }

    auto to_string(WeightMode m) -> std::string
    {
        switch (m) {
            case WeightMode::general: return "general";
            case WeightMode::uniform_edge: return "uniform-edge";
            case WeightMode::hardcore: return "hardcore";
            case WeightMode::hardcore_vertex: return "hardcore-vertex";
        }
        return "?";
    }

    auto parse_weight_mode(std::string_view s) -> WeightMode
    {
        if (s == "general")
            return WeightMode::general;
        if (s == "uniform-edge")
            return WeightMode::uniform_edge;
        if (s == "hardcore")
            return WeightMode::hardcore;
        if (s == "hardcore-vertex")
            return WeightMode::hardcore_vertex;
        throw PreconditionError("unknown weight mode '" + std::string(s)
                + "' (general, uniform-edge, hardcore, hardcore-vertex)");
    }

    auto sample_fraction(const CounterRng & rng, std::uint64_t & counter, unsigned cap) -> std::pair<unsigned, unsigned>
    {
        auto p = unsigned(rng.uniform_below(cap, counter)) + 1;
        auto q = unsigned(rng.uniform_below(cap, counter)) + 1;
        return { p, q };
    }

    namespace
    {
        auto draw(const CounterRng & rng, std::uint64_t & counter, const WeightSampler & s) -> NonNegValue
        {
            bool zero = s.allow_zero && rng.uniform_below(8, counter) == 0;
            auto [p, q] = sample_fraction(rng, counter, s.cap);
            if (zero)
                return NonNegValue(0);
            return NonNegValue(Rational(Integer(p), Integer(q)));
        }
    }

    auto sample_weights(const Graph & g, const WeightSampler & sampler, std::uint64_t seed) -> WeightSystem
    {
        if (sampler.spins == 0 || sampler.cap == 0)
            throw PreconditionError("sampler needs spins >= 1 and cap >= 1");
        CounterRng rng(seed);
        std::uint64_t counter = 0;

        if (sampler.mode == WeightMode::hardcore)
            return make_hardcore(g, draw(rng, counter, sampler));
        if (sampler.mode == WeightMode::hardcore_vertex) {
            std::vector<NonNegValue> lam;
            for (Vertex v = 0 ; v < g.size() ; ++v)
                lam.push_back(draw(rng, counter, sampler));
            return make_hardcore(g, lam);
        }

        WeightSystem w(g, sampler.spins);
        for (Vertex v = 0 ; v < g.size() ; ++v)
            for (Spin i = 0 ; i < sampler.spins ; ++i)
                w.set_vertex(v, i, draw(rng, counter, sampler));
        if (sampler.mode == WeightMode::uniform_edge) {
            std::vector<NonNegValue> table(std::size_t(sampler.spins) * sampler.spins);
            for (Spin i = 0 ; i < sampler.spins ; ++i)
                for (Spin j = i ; j < sampler.spins ; ++j)
                    table[i * sampler.spins + j] = draw(rng, counter, sampler);
            for (std::size_t e = 0 ; e < g.edge_count() ; ++e)
                for (Spin i = 0 ; i < sampler.spins ; ++i)
                    for (Spin j = i ; j < sampler.spins ; ++j)
                        w.set_edge(e, i, j, table[i * sampler.spins + j]);
        }
        else
            for (std::size_t e = 0 ; e < g.edge_count() ; ++e)
                for (Spin i = 0 ; i < sampler.spins ; ++i)
                    for (Spin j = i ; j < sampler.spins ; ++j)
                        w.set_edge(e, i, j, draw(rng, counter, sampler));
        return w;
    }

    auto sample_list_instance(const Graph & g, std::size_t max_vertices, std::uint64_t seed) -> ListInstance
    {
        if (max_vertices == 0)
            throw PreconditionError("target graph needs at least one vertex");
        CounterRng rng(seed);
        std::uint64_t counter = 0;
        auto n = std::size_t(rng.uniform_below(max_vertices, counter)) + 1;
        std::vector<Edge> edges;
        for (Vertex x = 0 ; x < n ; ++x)
            for (Vertex y = x + 1 ; y < n ; ++y)
                if (rng.uniform_below(2, counter))
                    edges.emplace_back(x, y);
        ListInstance inst{ Graph(n, std::move(edges)), {} };
        inst.lists.lists.resize(g.size());
        for (Vertex v = 0 ; v < g.size() ; ++v)
            for (Vertex x = 0 ; x < n ; ++x)
                if (rng.uniform_below(4, counter) != 0)
                    inst.lists.lists[v].push_back(x);
        return inst;
    }

    namespace
    {
        auto trim(std::string_view s) -> std::string_view
        {
            while (! s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
                s.remove_prefix(1);
            while (! s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
                s.remove_suffix(1);
            return s;
        }

        auto comma_list(std::string_view s) -> std::vector<std::string>
        {
            std::vector<std::string> out;
            std::size_t pos = 0;
            while (pos <= s.size()) {
                auto end = s.find(',', pos);
                if (end == std::string_view::npos)
                    end = s.size();
                auto item = trim(s.substr(pos, end - pos));
                if (! item.empty())
                    out.emplace_back(item);
                pos = end + 1;
            }
            return out;
        }

        template <typename T>
        auto number(std::string_view s, std::size_t line) -> T
        {
            T value{};
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
            if (ec != std::errc{} || ptr != s.data() + s.size())
                throw ParseError(ParseErrorKind::malformed, line, "expected a number, got '" + std::string(s) + "'");
            return value;
        }

        auto boolean(std::string_view s, std::size_t line) -> bool
        {
            if (s == "true" || s == "1" || s == "yes")
                return true;
            if (s == "false" || s == "0" || s == "no")
                return false;
            throw ParseError(ParseErrorKind::malformed, line, "expected true or false, got '" + std::string(s) + "'");
        }

        const std::vector<std::string> known_bounds{ "thm3", "thm4", "conj1", "conj2", "ind", "indconj" };

        auto source_name(CampaignConfig::Source s) -> std::string
        {
            switch (s) {
                case CampaignConfig::Source::biregular: return "biregular";
                case CampaignConfig::Source::bipartite: return "bipartite";
                case CampaignConfig::Source::all: return "all";
                case CampaignConfig::Source::files: return "files";
            }
            return "?";
        }
    }

    auto parse_campaign_config(std::string_view text) -> CampaignConfig
    {
        CampaignConfig cfg;
        std::size_t line_no = 0, pos = 0;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos)
                end = text.size();
            auto line = trim(text.substr(pos, end - pos));
            pos = end + 1;
            ++line_no;
            if (line.empty() || line.front() == '#')
                continue;
            auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ParseError(ParseErrorKind::malformed, line_no, "expected 'key = value'");
            auto key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));

            if (key == "source") {
                if (value == "biregular")
                    cfg.source = CampaignConfig::Source::biregular;
                else if (value == "bipartite")
                    cfg.source = CampaignConfig::Source::bipartite;
                else if (value == "all")
                    cfg.source = CampaignConfig::Source::all;
                else if (value == "files")
                    cfg.source = CampaignConfig::Source::files;
                else
                    throw ParseError(ParseErrorKind::malformed, line_no, "unknown source '" + std::string(value) + "'");
            }
            else if (key == "n_max")
                cfg.n_max = number<std::size_t>(value, line_no);
            else if (key == "a")
                cfg.a = number<unsigned>(value, line_no);
            else if (key == "b")
                cfg.b = number<unsigned>(value, line_no);
            else if (key == "max_degree")
                cfg.max_degree = number<unsigned>(value, line_no);
            else if (key == "connected")
                cfg.connected = boolean(value, line_no);
            else if (key == "spins") {
                cfg.spins.clear();
                for (auto & s : comma_list(value))
                    cfg.spins.push_back(number<unsigned>(s, line_no));
                if (cfg.spins.empty())
                    throw ParseError(ParseErrorKind::malformed, line_no, "spins needs at least one value");
                for (auto m : cfg.spins)
                    if (m == 0)
                        throw ParseError(ParseErrorKind::out_of_range, line_no, "spin count must be at least 1");
            }
            else if (key == "cap")
                cfg.cap = number<unsigned>(value, line_no);
            else if (key == "allow_zero")
                cfg.allow_zero = boolean(value, line_no);
            else if (key == "weights") {
                try {
                    cfg.weights = parse_weight_mode(value);
                }
                catch (const PreconditionError & e) {
                    throw ParseError(ParseErrorKind::malformed, line_no, e.what());
                }
            }
            else if (key == "bounds") {
                cfg.bounds = comma_list(value);
                for (auto & b : cfg.bounds)
                    if (std::find(known_bounds.begin(), known_bounds.end(), b) == known_bounds.end())
                        throw ParseError(ParseErrorKind::malformed, line_no, "unknown bound '" + b + "'");
            }
            else if (key == "trials")
                cfg.trials = number<std::size_t>(value, line_no);
            else if (key == "seed")
                cfg.seed = number<std::uint64_t>(value, line_no);
            else if (key == "out")
                cfg.out = std::string(value);
            else if (key == "host_n")
                cfg.host_n = number<std::size_t>(value, line_no);
            else if (key == "files")
                cfg.files = comma_list(value);
            else if (key == "unit_first")
                cfg.unit_first = boolean(value, line_no);
            else if (key == "threads")
                cfg.threads = number<unsigned>(value, line_no);
            else if (key == "budget")
                cfg.budget = number<double>(value, line_no);
            else
                throw ParseError(ParseErrorKind::malformed, line_no, "unknown key '" + std::string(key) + "'");
        }
        if (cfg.trials == 0)
            throw ParseError(ParseErrorKind::out_of_range, 0, "trials must be at least 1");
        if (cfg.cap == 0)
            throw ParseError(ParseErrorKind::out_of_range, 0, "cap must be at least 1");
        return cfg;
    }

    auto to_json(const CampaignConfig & cfg) -> nlohmann::json
    {
        return {
            { "source", source_name(cfg.source) },
            { "n_max", cfg.n_max },
            { "a", cfg.a },
            { "b", cfg.b },
            { "max_degree", cfg.max_degree },
            { "connected", cfg.connected },
            { "spins", cfg.spins },
            { "cap", cfg.cap },
            { "allow_zero", cfg.allow_zero },
            { "weights", to_string(cfg.weights) },
            { "bounds", cfg.bounds },
            { "trials", cfg.trials },
            { "seed", cfg.seed },
            { "out", cfg.out },
            { "host_n", cfg.host_n },
            { "files", cfg.files },
            { "unit_first", cfg.unit_first },
            { "budget", cfg.budget }
        };
    }

    auto to_json(const InstanceRecord & r) -> nlohmann::json
    {
        nlohmann::json j = {
            { "bound", r.bound },
            { "graph_index", r.graph_index },
            { "trial", r.trial },
            { "graph", r.graph_text }
        };
        if (! r.weights_text.empty())
            j["weights"] = r.weights_text;
        if (! r.host_text.empty()) {
            j["host"] = r.host_text;
            j["lists"] = r.lists_text;
        }
        return j;
    }

    auto recheck_instance(const InstanceRecord & r, const EvalOptions & opts) -> BoundReport
    {
        auto g = parse_graph(r.graph_text);
        BoundOptions exact{ Backend::exact, opts };
        if (r.bound == "thm3")
            return theorem3_bound(g, parse_weights(r.weights_text, g), exact);
        if (r.bound == "conj1")
            return conjecture1_bound(g, parse_weights(r.weights_text, g), exact);
        if (r.bound == "thm4" || r.bound == "conj2") {
            auto h = parse_graph(r.host_text);
            auto lists = parse_lists(r.lists_text, g, h);
            return r.bound == "thm4" ? theorem4_bound(g, h, lists, opts) : conjecture2_bound(g, h, lists, opts);
        }
        if (r.bound == "ind")
            return kahn_ind(g, opts);
        if (r.bound == "indconj")
            return kahn_ind_conj(g, opts);
        throw PreconditionError("unknown bound '" + r.bound + "'");
    }

    namespace
    {
        enum class Outcome
        {
            evaluated,
            skipped,
            failed
        };

        struct TaskResult
        {
            Outcome outcome = Outcome::skipped;
            InstanceRecord record;
            std::optional<BoundReport> report;
            std::string message;
        };

        struct Task
        {
            std::size_t graph;
            std::size_t bound;
            std::size_t trial;
        };

        auto campaign_graphs(const CampaignConfig & cfg) -> std::vector<Graph>
        {
            switch (cfg.source) {
                case CampaignConfig::Source::biregular: {
                    if (cfg.a != 0 || cfg.b != 0)
                        return enumerate_graphs(cfg.n_max, GraphFilter::biregular(cfg.a, cfg.b), cfg.connected);
                    std::vector<Graph> out;
                    for (unsigned a = 1 ; a <= cfg.max_degree ; ++a)
                        for (unsigned b = 1 ; b <= a ; ++b)
                            for (auto & g : enumerate_graphs(cfg.n_max, GraphFilter::biregular(a, b), cfg.connected))
                                out.push_back(g);
                    return out;
                }
                case CampaignConfig::Source::bipartite:
                    return enumerate_graphs(cfg.n_max, { GraphFilter::Kind::bipartite }, cfg.connected);
                case CampaignConfig::Source::all:
                    return enumerate_graphs(cfg.n_max, { GraphFilter::Kind::all }, cfg.connected);
                case CampaignConfig::Source::files: {
                    std::vector<Graph> out;
                    for (auto & path : cfg.files) {
                        std::ifstream in(path);
                        if (! in)
                            throw Error("cannot read graph file '" + path + "'");
                        std::stringstream buffer;
                        buffer << in.rdbuf();
                        try {
                            out.push_back(parse_graph(buffer.str()));
                        }
                        catch (const ParseError & e) {
                            throw Error(path + ": " + e.what());
                        }
                    }
                    return out;
                }
            }
            return {};
        }

        auto weight_free(const std::string & bound) -> bool
        {
            return bound == "ind" || bound == "indconj";
        }

        auto evaluate_task(const CampaignConfig & cfg, const std::vector<Graph> & graphs, const Task & task) -> TaskResult
        {
            TaskResult result;
            auto & g = graphs[task.graph];
            auto & bound = cfg.bounds[task.bound];
            auto key = CounterRng(cfg.seed).derive(task.graph).derive(task.bound).derive(task.trial).key();
            EvalOptions eval{ cfg.budget, 1 };

            result.record.bound = bound;
            result.record.graph_index = task.graph;
            result.record.trial = task.trial;
            result.record.graph_text = format_graph(g);

            try {
                if (bound == "thm3" || bound == "thm4" || bound == "ind") {
                    try {
                        auto cert = certify_biregular(g);
                        if (bound == "ind" && cert.a != cert.b)
                            return result;
                    }
                    catch (const NotBipartite &) {
                        return result;
                    }
                    catch (const NotBiregular &) {
                        return result;
                    }
                }
                if ((bound == "conj1" || bound == "conj2" || bound == "indconj") && g.min_degree() == 0)
                    return result;

                if (bound == "thm3" || bound == "conj1") {
                    WeightSampler sampler;
                    sampler.spins = cfg.spins[task.trial % cfg.spins.size()];
                    sampler.cap = cfg.cap;
                    sampler.allow_zero = cfg.allow_zero;
                    sampler.mode = cfg.weights;
                    if (bound == "conj1" && sampler.mode == WeightMode::general)
                        sampler.mode = WeightMode::uniform_edge;
                    if (cfg.unit_first && task.trial == 0) {
                        sampler.cap = 1;
                        sampler.allow_zero = false;
                    }
                    auto w = sample_weights(g, sampler, key);
                    result.record.weights_text = format_weights(g, w);
                    BoundOptions opts{ Backend::exact, eval };
                    result.report = bound == "thm3" ? theorem3_bound(g, w, opts) : conjecture1_bound(g, w, opts);
                }
                else if (bound == "thm4" || bound == "conj2") {
                    auto inst = sample_list_instance(g, cfg.host_n, key);
                    if (cfg.unit_first && task.trial == 0)
                        inst.lists = ListAssignment::full(g.size(), inst.h.size());
                    result.record.host_text = format_graph(inst.h);
                    result.record.lists_text = format_lists(inst.lists);
                    result.report = bound == "thm4" ? theorem4_bound(g, inst.h, inst.lists, eval) : conjecture2_bound(g, inst.h, inst.lists, eval);
                }
                else if (bound == "ind")
                    result.report = kahn_ind(g, eval);
                else
                    result.report = kahn_ind_conj(g, eval);
                result.outcome = Outcome::evaluated;
            }
            catch (const std::exception & e) {
                result.outcome = Outcome::failed;
                result.message = "graph " + std::to_string(task.graph) + " trial " + std::to_string(task.trial) + ": " + e.what();
            }
            return result;
        }

        auto write_file(const std::filesystem::path & path, const std::string & content) -> void
        {
            std::ofstream out(path, std::ios::binary);
            if (! out)
                throw Error("cannot write '" + path.string() + "'");
            out << content;
        }
    }

    auto run_campaign(const CampaignConfig & cfg) -> CampaignReport
    {
        auto start = std::chrono::steady_clock::now();
        CampaignReport report;
        report.config = cfg;
        report.graphs = campaign_graphs(cfg);

        std::vector<Task> tasks;
        for (std::size_t gi = 0 ; gi < report.graphs.size() ; ++gi)
            for (std::size_t bi = 0 ; bi < cfg.bounds.size() ; ++bi) {
                auto trials = weight_free(cfg.bounds[bi]) ? 1 : cfg.trials;
                for (std::size_t t = 0 ; t < trials ; ++t)
                    tasks.push_back({ gi, bi, t });
            }

        auto results = parallel_map(tasks.size(), cfg.threads, [&](std::size_t k) {
            return evaluate_task(cfg, report.graphs, tasks[k]);
        });

        report.bounds.resize(cfg.bounds.size());
        for (std::size_t bi = 0 ; bi < cfg.bounds.size() ; ++bi)
            report.bounds[bi].bound = cfg.bounds[bi];

        for (std::size_t k = 0 ; k < tasks.size() ; ++k) {
            auto & agg = report.bounds[tasks[k].bound];
            auto & r = results[k];
            switch (r.outcome) {
                case Outcome::skipped:
                    ++agg.skipped;
                    continue;
                case Outcome::failed:
                    ++agg.errors;
                    agg.error_messages.push_back(r.message);
                    continue;
                case Outcome::evaluated:
                    break;
            }
            ++agg.instances;
            auto & rep = *r.report;
            switch (rep.verdict) {
                case Verdict::holds: ++agg.holds; break;
                case Verdict::violated: ++agg.violated; break;
                case Verdict::inconclusive: ++agg.inconclusive; break;
            }
            if (! agg.min_log_slack || rep.log_slack < *agg.min_log_slack) {
                agg.min_log_slack = rep.log_slack;
                agg.min_witness = r.record;
            }
            if (rep.tight && (agg.tight_graphs.empty() || agg.tight_graphs.back() != tasks[k].graph))
                agg.tight_graphs.push_back(tasks[k].graph);
            if (rep.verdict == Verdict::violated)
                agg.violations.emplace_back(r.record, rep);
        }

        report.witness_files.resize(report.bounds.size());
        if (! cfg.out.empty()) {
            std::filesystem::path dir(cfg.out);
            for (std::size_t bi = 0 ; bi < report.bounds.size() ; ++bi)
                for (auto & [record, rep] : report.bounds[bi].violations) {
                    auto violations = dir / "violations";
                    std::filesystem::create_directories(violations);
                    auto stem = record.bound + "-g" + std::to_string(record.graph_index) + "-t" + std::to_string(record.trial);
                    std::vector<std::string> files;
                    auto put = [&](const std::string & suffix, const std::string & text) {
                        auto path = violations / (stem + suffix);
                        write_file(path, text);
                        files.push_back(path.string());
                    };
                    put(".graph", record.graph_text);
                    if (! record.weights_text.empty())
                        put(".weights", record.weights_text);
                    if (! record.host_text.empty()) {
                        put(".host", record.host_text);
                        put(".lists", record.lists_text);
                    }
                    put(".json", to_json(rep).dump(2) + "\n");
                    report.witness_files[bi].push_back(std::move(files));
                }
        }

        report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    }

    auto to_json(const CampaignReport & r) -> nlohmann::json
    {
        nlohmann::json bounds = nlohmann::json::object();
        for (std::size_t bi = 0 ; bi < r.bounds.size() ; ++bi) {
            auto & agg = r.bounds[bi];
            auto tight = nlohmann::json::array();
            for (auto gi : agg.tight_graphs)
                tight.push_back({ { "graph_index", gi }, { "complete_bipartite", is_complete_bipartite(r.graphs[gi]) },
                        { "graph", format_graph(r.graphs[gi]) } });
            auto violations = nlohmann::json::array();
            for (std::size_t k = 0 ; k < agg.violations.size() ; ++k) {
                nlohmann::json v = { { "instance", to_json(agg.violations[k].first) }, { "report", to_json(agg.violations[k].second) } };
                if (bi < r.witness_files.size() && k < r.witness_files[bi].size())
                    v["files"] = r.witness_files[bi][k];
                violations.push_back(std::move(v));
            }
            bounds[agg.bound] = {
                { "instances", agg.instances },
                { "holds", agg.holds },
                { "violated", agg.violated },
                { "inconclusive", agg.inconclusive },
                { "skipped", agg.skipped },
                { "errors", agg.errors },
                { "error_messages", agg.error_messages },
                { "min_log_slack", agg.min_log_slack ? json_number(*agg.min_log_slack) : nlohmann::json(nullptr) },
                { "min_witness", agg.min_witness ? to_json(*agg.min_witness) : nlohmann::json(nullptr) },
                { "tight_graphs", tight },
                { "violations", violations }
            };
        }
        return {
            { "config", to_json(r.config) },
            { "graph_count", r.graphs.size() },
            { "bounds", bounds },
            { "timing", { { "seconds", r.seconds } } }
        };
    }

    auto summary_table(const CampaignReport & r) -> std::string
    {
        std::ostringstream out;
        out << std::left << std::setw(9) << "bound" << std::right
            << std::setw(10) << "instances" << std::setw(8) << "holds" << std::setw(10) << "violated"
            << std::setw(14) << "inconclusive" << std::setw(9) << "skipped" << std::setw(8) << "errors"
            << std::setw(16) << "min log slack" << std::setw(8) << "tight" << "\n";
        for (auto & agg : r.bounds) {
            std::string slack = "-";
            if (agg.min_log_slack) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.6g", *agg.min_log_slack);
                slack = buf;
            }
            out << std::left << std::setw(9) << agg.bound << std::right
                << std::setw(10) << agg.instances << std::setw(8) << agg.holds << std::setw(10) << agg.violated
                << std::setw(14) << agg.inconclusive << std::setw(9) << agg.skipped << std::setw(8) << agg.errors
                << std::setw(16) << slack << std::setw(8) << agg.tight_graphs.size() << "\n";
        }
        out << r.graphs.size() << " graphs\n";
        return out.str();
    }
}
