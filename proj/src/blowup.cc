#include <spinbound/blowup.hh>
#include <spinbound/errors.hh>
#include <spinbound/parallel.hh>
#include <spinbound/rng.hh>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace spinbound
{
    namespace
    {
        auto to_u64(const Integer & z, const std::string & what) -> std::uint64_t
        {
            if (sgn(z) < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 64)
                throw PreconditionError(what + " does not fit in 64 bits");
            std::uint64_t result = 0;
            mpz_export(&result, nullptr, -1, sizeof(result), 0, 0, z.get_mpz_t());
            return result;
        }
    }

    BlowupHost::BlowupHost(const Graph & g, const WeightSystem & w, unsigned long c) :
        _g(g),
        _c(c),
        _m(w.spins())
    {
        w.check_shape(g);
        if (c == 0)
            throw PreconditionError("blow-up scale C must be positive");
        if (! w.is_exact())
            throw PreconditionError("blow-up needs rational weights");

        _size.resize(g.size() * _m);
        _offset.resize(g.size() * _m);
        for (Vertex v = 0 ; v < g.size() ; ++v)
            for (Spin i = 0 ; i < _m ; ++i) {
                Rational s = w.vertex(v, i).rational() * c;
                if (sgn(s) <= 0)
                    throw PreconditionError("vertex weight lambda_{" + std::to_string(i + 1) + "," + std::to_string(v)
                            + "} must be positive for the blow-up");
                if (s.get_den() != 1)
                    throw PreconditionError("block size C * lambda_{" + std::to_string(i + 1) + "," + std::to_string(v)
                            + "} = " + s.get_str() + " is not an integer");
                auto k = std::size_t(v) * _m + i;
                _size[k] = to_u64(s.get_num(), "block size");
                _offset[k] = _host_vertices;
                _host_vertices += _size[k];
            }
        if (_host_vertices > std::numeric_limits<Vertex>::max())
            throw PreconditionError("blow-up host has too many vertices");

        auto entries = g.edge_count() * _m * _m;
        _probability.resize(entries);
        _edge_offset.resize(entries);
        _threshold.resize(entries);
        _always.resize(entries);
        for (std::size_t e = 0 ; e < g.edge_count() ; ++e) {
            auto [u, v] = g.edge(e);
            for (Spin i = 0 ; i < _m ; ++i)
                for (Spin j = 0 ; j < _m ; ++j) {
                    auto k = table(e, i, j);
                    auto & p = w.edge(e, i, j).rational();
                    if (sgn(p) <= 0 || p > 1)
                        throw PreconditionError("edge weight on edge " + std::to_string(u) + "-" + std::to_string(v)
                                + " is " + p.get_str() + ", outside (0, 1]; scale edge weights first");
                    _probability[k] = p;
                    _edge_offset[k] = _host_edges;
                    _host_edges += block_size(u, i) * block_size(v, j);
                    _always[k] = p == 1;
                    if (! _always[k]) {
                        Integer scaled = p.get_num();
                        scaled <<= 64;
                        _threshold[k] = to_u64(Integer(scaled / p.get_den()), "edge threshold");
                    }
                }
        }
    }

    auto BlowupHost::list_of(Vertex v) const -> std::vector<Vertex>
    {
        std::vector<Vertex> result;
        for (Spin i = 0 ; i < _m ; ++i)
            for (std::uint64_t x = 0 ; x < block_size(v, i) ; ++x)
                result.push_back(Vertex(block_offset(v, i) + x));
        return result;
    }

    auto build_blowup_host(const Graph & g, const WeightSystem & w, unsigned long c) -> BlowupHost
    {
        return BlowupHost(g, w, c);
    }

    auto TildeH::edge_count() const -> std::uint64_t
    {
        std::uint64_t n = 0;
        for (auto & m : kept)
            n += std::count(m.begin(), m.end(), std::uint8_t(1));
        return n;
    }

    namespace
    {
        void sample_block_pair(const BlowupHost & host, const CounterRng & rng, TildeH & out, std::size_t e, Spin i, Spin j)
        {
            auto [u, v] = host.graph().edge(e);
            auto rows = host.block_size(u, i), cols = host.block_size(v, j);
            auto base = host.edge_offset(e, i, j);
            auto & m = out.kept[out.index(e, i, j)];
            m.assign(rows * cols, 0);
            for (std::uint64_t k = 0 ; k < rows * cols ; ++k)
                m[k] = host.keeps(e, i, j, rng.at(base + k));
            out.sampled[out.index(e, i, j)] = true;
        }

        auto empty_sample(const BlowupHost & host) -> TildeH
        {
            TildeH out;
            out.spins = host.spins();
            auto entries = host.graph().edge_count() * host.spins() * host.spins();
            out.kept.resize(entries);
            out.sampled.assign(entries, false);
            return out;
        }
    }

    auto sample_tilde_h(const BlowupHost & host, std::uint64_t seed) -> TildeH
    {
        CounterRng rng(seed);
        auto out = empty_sample(host);
        for (std::size_t e = 0 ; e < host.graph().edge_count() ; ++e)
            for (Spin i = 0 ; i < host.spins() ; ++i)
                for (Spin j = 0 ; j < host.spins() ; ++j)
                    sample_block_pair(host, rng, out, e, i, j);
        return out;
    }

    auto sample_tilde_h(const BlowupHost & host, std::uint64_t seed, const SpinConfig & cfg) -> TildeH
    {
        if (cfg.size() != host.graph().size())
            throw PreconditionError("spin configuration must assign every vertex");
        CounterRng rng(seed);
        auto out = empty_sample(host);
        for (std::size_t e = 0 ; e < host.graph().edge_count() ; ++e) {
            auto [u, v] = host.graph().edge(e);
            sample_block_pair(host, rng, out, e, cfg.at(u), cfg.at(v));
        }
        return out;
    }

    auto to_graph(const BlowupHost & host, const TildeH & h) -> Graph
    {
        std::vector<Edge> edges;
        auto & g = host.graph();
        for (std::size_t e = 0 ; e < g.edge_count() ; ++e) {
            auto [u, v] = g.edge(e);
            for (Spin i = 0 ; i < host.spins() ; ++i)
                for (Spin j = 0 ; j < host.spins() ; ++j) {
                    auto k = h.index(e, i, j);
                    if (! h.sampled.at(k))
                        throw PreconditionError("block pair not sampled");
                    auto cols = host.block_size(v, j);
                    for (std::uint64_t x = 0 ; x < host.block_size(u, i) ; ++x)
                        for (std::uint64_t y = 0 ; y < cols ; ++y)
                            if (h.kept[k][x * cols + y])
                                edges.emplace_back(Vertex(host.block_offset(u, i) + x), Vertex(host.block_offset(v, j) + y));
                }
        }
        return Graph(host.host_vertices(), std::move(edges));
    }

    namespace
    {
        struct Factor
        {
            std::vector<Vertex> scope;
            std::vector<std::uint64_t> table;
        };

        auto strides(const std::vector<Vertex> & scope, const std::vector<std::uint64_t> & dom) -> std::vector<std::uint64_t>
        {
            std::vector<std::uint64_t> s(scope.size(), 1);
            for (std::size_t k = scope.size() ; k-- > 1 ; )
                s[k - 1] = s[k] * dom[scope[k]];
            return s;
        }
    }

    auto count_block_homs(const BlowupHost & host, const TildeH & h, const SpinConfig & cfg, const EvalOptions & opts) -> std::uint64_t
    {
        auto & g = host.graph();
        if (cfg.size() != g.size())
            throw PreconditionError("spin configuration must assign every vertex");
        std::vector<std::uint64_t> dom(g.size());
        double total = 1.0;
        for (Vertex v = 0 ; v < g.size() ; ++v) {
            if (cfg[v] >= host.spins())
                throw PreconditionError("spin out of range");
            dom[v] = host.block_size(v, cfg[v]);
            total *= double(dom[v]);
        }
        if (total >= 0x1p64)
            throw PreconditionError("block homomorphism count may exceed 64 bits");

        std::vector<Factor> factors;
        for (std::size_t e = 0 ; e < g.edge_count() ; ++e) {
            auto [u, v] = g.edge(e);
            auto k = h.index(e, cfg[u], cfg[v]);
            if (! h.sampled.at(k))
                throw PreconditionError("block pair for edge " + std::to_string(u) + "-" + std::to_string(v) + " was not sampled");
            factors.push_back({ { u, v }, std::vector<std::uint64_t>(h.kept[k].begin(), h.kept[k].end()) });
        }

        std::vector<bool> eliminated(g.size(), false);
        for (std::size_t round = 0 ; round < g.size() ; ++round) {
            // cheapest vertex: smallest joint table over its factors' scopes
            std::optional<Vertex> best;
            double best_cost = 0.0;
            for (Vertex v = 0 ; v < g.size() ; ++v) {
                if (eliminated[v])
                    continue;
                std::vector<bool> in(g.size(), false);
                double cost = double(dom[v]);
                in[v] = true;
                for (auto & f : factors)
                    if (std::find(f.scope.begin(), f.scope.end(), v) != f.scope.end())
                        for (auto u : f.scope)
                            if (! in[u]) {
                                in[u] = true;
                                cost *= double(dom[u]);
                            }
                if (! best || cost < best_cost) {
                    best = v;
                    best_cost = cost;
                }
            }
            auto v = *best;
            if (best_cost > opts.budget)
                throw BudgetExceeded("variable elimination needs a table of about " + std::to_string(best_cost)
                        + " cells, over the budget of " + std::to_string(opts.budget));

            std::vector<Factor> touching, rest;
            for (auto & f : factors)
                (std::find(f.scope.begin(), f.scope.end(), v) != f.scope.end() ? touching : rest).push_back(std::move(f));

            std::vector<Vertex> scope;
            for (auto & f : touching)
                for (auto u : f.scope)
                    if (u != v && std::find(scope.begin(), scope.end(), u) == scope.end())
                        scope.push_back(u);
            std::sort(scope.begin(), scope.end());

            // strides of every touching factor, per new-scope variable and for v
            std::vector<std::vector<std::uint64_t>> along(touching.size(), std::vector<std::uint64_t>(scope.size(), 0));
            std::vector<std::uint64_t> along_v(touching.size(), 0);
            for (std::size_t f = 0 ; f < touching.size() ; ++f) {
                auto s = strides(touching[f].scope, dom);
                for (std::size_t k = 0 ; k < touching[f].scope.size() ; ++k) {
                    auto u = touching[f].scope[k];
                    if (u == v)
                        along_v[f] = s[k];
                    else
                        along[f][std::find(scope.begin(), scope.end(), u) - scope.begin()] = s[k];
                }
            }

            Factor result{ scope, {} };
            std::uint64_t cells = 1;
            for (auto u : scope)
                cells *= dom[u];
            result.table.assign(cells, 0);

            std::vector<std::uint64_t> assignment(scope.size(), 0), base(touching.size(), 0);
            for (std::uint64_t cell = 0 ; cell < cells ; ++cell) {
                std::uint64_t sum = 0;
                for (std::uint64_t x = 0 ; x < dom[v] ; ++x) {
                    std::uint64_t product = 1;
                    for (std::size_t f = 0 ; f < touching.size() && product ; ++f)
                        product *= touching[f].table[base[f] + x * along_v[f]];
                    sum += product;
                }
                result.table[cell] = sum;

                // advance the odometer, last scope variable fastest
                for (std::size_t k = scope.size() ; k-- > 0 ; ) {
                    for (std::size_t f = 0 ; f < touching.size() ; ++f)
                        base[f] += along[f][k];
                    if (++assignment[k] < dom[scope[k]])
                        break;
                    for (std::size_t f = 0 ; f < touching.size() ; ++f)
                        base[f] -= along[f][k] * dom[scope[k]];
                    assignment[k] = 0;
                }
            }

            rest.push_back(std::move(result));
            factors = std::move(rest);
            eliminated[v] = true;
        }

        std::uint64_t count = 1;
        for (auto & f : factors)
            count *= f.table.at(0);
        return count;
    }

    auto scale_edge_weights(const WeightSystem & w, WeightSystem & scaled) -> Rational
    {
        scaled = w;
        Rational max = 0;
        for (std::size_t e = 0 ; e < w.edge_count() ; ++e)
            for (Spin i = 0 ; i < w.spins() ; ++i)
                for (Spin j = 0 ; j < w.spins() ; ++j)
                    max = std::max(max, w.edge(e, i, j).rational());
        if (max <= 1)
            return 1;
        for (std::size_t e = 0 ; e < w.edge_count() ; ++e)
            for (Spin i = 0 ; i < w.spins() ; ++i)
                for (Spin j = i ; j < w.spins() ; ++j)
                    scaled.set_edge(e, i, j, NonNegValue(Rational(w.edge(e, i, j).rational() / max)));
        return max;
    }

    auto BlowupStats::var_ratio() const -> double
    {
        if (sgn(mu) == 0)
            return std::numeric_limits<double>::infinity();
        return Rational(emp_var / (mu * mu)).get_d();
    }

    auto concentration_experiment(const Graph & g, const WeightSystem & w, const SpinConfig & cfg, unsigned long c,
            std::size_t trials, std::uint64_t seed, const EvalOptions & opts) -> BlowupStats
    {
        if (trials < 2)
            throw PreconditionError("the experiment needs at least 2 trials");
        if (g.size() == 0)
            throw PreconditionError("empty graph");
        w.check_shape(g);
        if (! w.is_exact())
            throw PreconditionError("blow-up needs rational weights");

        BlowupStats s;
        s.c = c;
        s.trials = trials;
        s.seed = seed;
        s.cfg = cfg;

        WeightSystem scaled;
        s.edge_scale = scale_edge_weights(w, scaled);
        BlowupHost host(g, scaled, c);

        CounterRng root(seed);
        EvalOptions inner = opts;
        inner.threads = 1;
        s.samples = parallel_map(trials, opts.threads, [&](std::size_t t) {
            auto h = sample_tilde_h(host, root.derive(t).key(), cfg);
            return count_block_homs(host, h, cfg, inner);
        });

        Integer sum = 0, sum_sq = 0;
        for (auto x : s.samples) {
            Integer z;
            mpz_import(z.get_mpz_t(), 1, -1, sizeof(x), 0, 0, &x);
            sum += z;
            sum_sq += z * z;
        }
        s.emp_mean = Rational(sum, Integer(trials));
        s.emp_mean.canonicalize();
        s.emp_var = (Rational(sum_sq) - Rational(sum * sum, Integer(trials))) / Rational(Integer(trials - 1));
        s.emp_var.canonicalize();

        Integer c_pow;
        mpz_ui_pow_ui(c_pow.get_mpz_t(), c, g.size());
        s.mu = Rational(c_pow) * weight_of(g, scaled, cfg).rational();

        // alpha = 1/w_min + lambda_vmax^N N^2 / (lambda_vmin^2 w_min)
        Rational vmin = scaled.vertex(0, 0).rational(), vmax = vmin, emin = 1;
        for (Vertex v = 0 ; v < g.size() ; ++v)
            for (Spin i = 0 ; i < scaled.spins() ; ++i) {
                vmin = std::min(vmin, scaled.vertex(v, i).rational());
                vmax = std::max(vmax, scaled.vertex(v, i).rational());
            }
        for (std::size_t e = 0 ; e < g.edge_count() ; ++e)
            for (Spin i = 0 ; i < scaled.spins() ; ++i)
                for (Spin j = 0 ; j < scaled.spins() ; ++j)
                    emin = std::min(emin, scaled.edge(e, i, j).rational());
        Rational n = Rational(Integer(g.size()));
        Rational w_min = pow(vmin, g.size()) * pow(emin, g.edge_count());
        s.alpha = 1 / w_min + pow(vmax, g.size()) * n * n / (vmin * vmin * w_min);
        s.alpha.canonicalize();
        s.cheb_budget = s.alpha / (Rational(Integer(c)) * Rational(Integer(c)));
        s.cheb_budget.canonicalize();
        if (Rational(Integer(c)) > s.alpha) {
            double a = std::sqrt(s.alpha.get_d());
            s.delta = a / (std::sqrt(double(c)) - a);
        }

        if (g.edge_count() > 0 && is_bipartite(g)) {
            try {
                auto cert = certify_biregular(g);
                Rational m = Rational(Integer(scaled.spins()));
                s.threshold = pow(m, g.size()) + Rational(Integer(cert.a)) * n * pow(m, cert.a + cert.b) / Rational(Integer(cert.a + cert.b));
                s.threshold->canonicalize();
            }
            catch (const NotBiregular &) {
            }
        }
        return s;
    }

    auto to_json(const BlowupStats & s, const std::optional<std::string> & samples_path) -> nlohmann::json
    {
        auto cfg = nlohmann::json::array();
        for (auto i : s.cfg)
            cfg.push_back(i + 1);
        double var = s.emp_var.get_d();
        double se = std::sqrt(var / double(s.trials));
        double mean = s.emp_mean.get_d(), mu = s.mu.get_d();
        nlohmann::json j = {
            { "C", s.c },
            { "trials", s.trials },
            { "seed", s.seed },
            { "cfg", cfg },
            { "mu", s.mu.get_str() },
            { "mu_log", log_of(s.mu) },
            { "edge_scale", s.edge_scale.get_str() },
            { "emp_mean", mean },
            { "emp_var", var },
            { "std_error", se },
            { "mean_within_4se", std::abs(mean - mu) <= 4.0 * se },
            { "var_ratio", s.var_ratio() },
            { "alpha", s.alpha.get_d() },
            { "alpha_exact", s.alpha.get_str() },
            { "cheb_budget", s.cheb_budget.get_d() },
            { "delta", s.delta ? nlohmann::json(*s.delta) : nlohmann::json(nullptr) },
            { "threshold", s.threshold ? nlohmann::json(s.threshold->get_str()) : nlohmann::json(nullptr) },
            { "samples_path", samples_path ? nlohmann::json(*samples_path) : nlohmann::json(nullptr) }
        };
        return j;
    }

    auto format_samples(const BlowupStats & s) -> std::string
    {
        std::ostringstream out;
        for (auto x : s.samples)
            out << x << "\n";
        return out.str();
    }
}
