#include <spinbound/count.hh>
#include <spinbound/errors.hh>
#include <spinbound/parallel.hh>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace spinbound
{
    namespace
    {
        // Exact weights rescaled to integers: each vertex row and each edge
        // table is multiplied by the lcm of its denominators, and `scale`
        // records the product of the reciprocals, so Z = scale * (integer sum).
        struct ExactPolicy
        {
            using Value = Integer;
            using Sum = Integer;

            unsigned m;
            std::vector<Integer> vertex_table;
            std::vector<Integer> edge_table;
            Rational scale{ 1 };

            explicit ExactPolicy(const WeightSystem & w) :
                m(w.spins()),
                vertex_table(w.vertex_count() * m),
                edge_table(w.edge_count() * m * m)
            {
                for (Vertex v = 0 ; v < w.vertex_count() ; ++v) {
                    Integer lcm = 1;
                    for (Spin i = 0 ; i < m ; ++i)
                        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), w.vertex(v, i).rational().get_den_mpz_t());
                    for (Spin i = 0 ; i < m ; ++i) {
                        auto & q = w.vertex(v, i).rational();
                        vertex_table[std::size_t(v) * m + i] = q.get_num() * (lcm / q.get_den());
                    }
                    scale /= lcm;
                }
                for (std::size_t e = 0 ; e < w.edge_count() ; ++e) {
                    Integer lcm = 1;
                    for (Spin i = 0 ; i < m ; ++i)
                        for (Spin j = 0 ; j < m ; ++j)
                            mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), w.edge(e, i, j).rational().get_den_mpz_t());
                    for (Spin i = 0 ; i < m ; ++i)
                        for (Spin j = 0 ; j < m ; ++j) {
                            auto & q = w.edge(e, i, j).rational();
                            edge_table[(e * m + i) * m + j] = q.get_num() * (lcm / q.get_den());
                        }
                    scale /= lcm;
                }
                scale.canonicalize();
            }

            auto vertex(Vertex v, Spin i) const -> const Integer & { return vertex_table[std::size_t(v) * m + i]; }
            auto edge(std::size_t e, Spin i, Spin j) const -> const Integer & { return edge_table[(e * m + i) * m + j]; }

            static auto one() -> Integer { return 1; }
            static auto zero() -> Integer { return 0; }
            static auto is_zero(const Integer & x) -> bool { return sgn(x) == 0; }
            static void mul(Integer & out, const Integer & a, const Integer & b) { mpz_mul(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t()); }
            static void add(Integer & out, const Integer & a) { mpz_add(out.get_mpz_t(), out.get_mpz_t(), a.get_mpz_t()); }
            static auto new_sum() -> Sum { return 0; }
            static void accumulate(Sum & s, const Integer & x) { s += x; }
            static void merge(Sum & s, const Sum & other) { s += other; }

            auto finish(const Sum & s) const -> NonNegValue { return NonNegValue(Rational(s * scale)); }
        };

        struct LogPolicy
        {
            using Value = double;
            using Sum = LogSumAccumulator;

            unsigned m;
            std::vector<double> vertex_table;
            std::vector<double> edge_table;

            explicit LogPolicy(const WeightSystem & w) :
                m(w.spins()),
                vertex_table(w.vertex_count() * m),
                edge_table(w.edge_count() * m * m)
            {
                for (Vertex v = 0 ; v < w.vertex_count() ; ++v)
                    for (Spin i = 0 ; i < m ; ++i)
                        vertex_table[std::size_t(v) * m + i] = w.vertex(v, i).log();
                for (std::size_t e = 0 ; e < w.edge_count() ; ++e)
                    for (Spin i = 0 ; i < m ; ++i)
                        for (Spin j = 0 ; j < m ; ++j)
                            edge_table[(e * m + i) * m + j] = w.edge(e, i, j).log();
            }

            auto vertex(Vertex v, Spin i) const -> double { return vertex_table[std::size_t(v) * m + i]; }
            auto edge(std::size_t e, Spin i, Spin j) const -> double { return edge_table[(e * m + i) * m + j]; }

            static constexpr double neg_inf = -std::numeric_limits<double>::infinity();
            static auto one() -> double { return 0.0; }
            static auto zero() -> double { return neg_inf; }
            static auto is_zero(double x) -> bool { return x == neg_inf; }
            static void mul(double & out, double a, double b) { out = (a == neg_inf || b == neg_inf) ? neg_inf : a + b; }
            static void add(double & out, double a) { out = (LogValue::from_log(out) + LogValue::from_log(a)).log(); }
            static auto new_sum() -> Sum { return {}; }
            static void accumulate(Sum & s, double x) { s.add(x); }
            static void merge(Sum & s, const Sum & other) { s.merge(other); }

            auto finish(const Sum & s) const -> NonNegValue { return NonNegValue(s.result()); }
        };

        void check_budget(double configurations, const EvalOptions & opts, const std::string & what)
        {
            if (configurations > opts.budget)
                throw BudgetExceeded(what + " needs about " + std::to_string(configurations)
                        + " configurations, over the budget of " + std::to_string(opts.budget)
                        + "; raise --budget, use the log backend on a smaller instance, or shrink the instance");
        }

        // Depth-first enumeration of spins on `order`. Vertices outside
        // `order` (the "summed" set) must only neighbour enumerated
        // vertices; their contribution is a closed-form factor at the leaves.
        template <typename Policy>
        class Enumerator
        {
            public:
                using Value = typename Policy::Value;

                Enumerator(const Graph & g, const Policy & p, std::span<const Vertex> order) :
                    _p(p),
                    _order(order.begin(), order.end()),
                    _back(order.size()),
                    _spin(g.size(), 0),
                    _stack(order.size() + 1, Policy::one()),
                    _factor(Policy::one()),
                    _term(Policy::one()),
                    _tmp(Policy::one())
                {
                    std::vector<std::size_t> position(g.size(), g.size());
                    for (std::size_t k = 0 ; k < order.size() ; ++k)
                        position[order[k]] = k;
                    for (std::size_t k = 0 ; k < order.size() ; ++k)
                        for (auto u : g.neighbours(order[k]))
                            if (position[u] < k)
                                _back[k].emplace_back(*g.edge_id(u, order[k]), u);

                    for (Vertex r = 0 ; r < g.size() ; ++r) {
                        if (position[r] != g.size())
                            continue;
                        std::vector<std::pair<std::size_t, Vertex>> incident;
                        for (auto u : g.neighbours(r)) {
                            if (position[u] == g.size())
                                throw PreconditionError("summed-out vertices " + std::to_string(r) + " and " + std::to_string(u) + " are adjacent");
                            incident.emplace_back(*g.edge_id(u, r), u);
                        }
                        _summed.emplace_back(r, std::move(incident));
                    }
                }

                /// Sum over configurations whose first enumerated vertex has
                /// spin `first` (or all configurations when first is nullopt).
                void run(std::optional<Spin> first, typename Policy::Sum & sum)
                {
                    descend(0, first, sum);
                }

            private:
                const Policy & _p;
                std::vector<Vertex> _order;
                std::vector<std::vector<std::pair<std::size_t, Vertex>>> _back;
                std::vector<std::pair<Vertex, std::vector<std::pair<std::size_t, Vertex>>>> _summed;
                std::vector<Spin> _spin;
                std::vector<Value> _stack;
                Value _factor, _term, _tmp;

                void descend(std::size_t depth, std::optional<Spin> only, typename Policy::Sum & sum)
                {
                    if (depth == _order.size()) {
                        leaf(sum);
                        return;
                    }
                    auto v = _order[depth];
                    Spin lo = only ? *only : 0, hi = only ? *only + 1 : _p.m;
                    for (Spin s = lo ; s < hi ; ++s) {
                        auto & value = _stack[depth + 1];
                        Policy::mul(value, _stack[depth], _p.vertex(v, s));
                        for (auto [e, u] : _back[depth]) {
                            if (Policy::is_zero(value))
                                break;
                            Policy::mul(value, value, _p.edge(e, _spin[u], s));
                        }
                        if (Policy::is_zero(value))
                            continue;
                        _spin[v] = s;
                        descend(depth + 1, std::nullopt, sum);
                    }
                }

                void leaf(typename Policy::Sum & sum)
                {
                    if (_summed.empty()) {
                        Policy::accumulate(sum, _stack.back());
                        return;
                    }
                    _tmp = _stack.back();
                    for (auto & [r, incident] : _summed) {
                        _factor = Policy::zero();
                        for (Spin j = 0 ; j < _p.m ; ++j) {
                            _term = _p.vertex(r, j);
                            for (auto [e, u] : incident) {
                                if (Policy::is_zero(_term))
                                    break;
                                Policy::mul(_term, _term, _p.edge(e, _spin[u], j));
                            }
                            if (! Policy::is_zero(_term))
                                Policy::add(_factor, _term);
                        }
                        Policy::mul(_tmp, _tmp, _factor);
                        if (Policy::is_zero(_tmp))
                            return;
                    }
                    Policy::accumulate(sum, _tmp);
                }
        };

        template <typename Policy>
        auto enumerate(const Graph & g, const Policy & p, std::span<const Vertex> order, const EvalOptions & opts) -> NonNegValue
        {
            if (order.empty()) {
                Enumerator<Policy> en(g, p, order);
                auto sum = Policy::new_sum();
                en.run(std::nullopt, sum);
                return p.finish(sum);
            }
            auto parts = parallel_map(p.m, opts.threads, [&](std::size_t s) {
                Enumerator<Policy> en(g, p, order);
                auto sum = Policy::new_sum();
                en.run(Spin(s), sum);
                return sum;
            });
            auto total = Policy::new_sum();
            for (auto & part : parts)
                Policy::merge(total, part);
            return p.finish(total);
        }

        auto dispatch(const Graph & g, const WeightSystem & w, std::span<const Vertex> order, const EvalOptions & opts) -> NonNegValue
        {
            w.check_shape(g);
            check_budget(std::pow(double(w.spins()), double(order.size())), opts, "spin enumeration");
            if (w.is_exact())
                return enumerate(g, ExactPolicy(w), order, opts);
            return enumerate(g, LogPolicy(w), order, opts);
        }
    }

    auto weight_of(const Graph & g, const WeightSystem & w, const SpinConfig & f) -> NonNegValue
    {
        w.check_shape(g);
        if (f.size() != g.size())
            throw PreconditionError("spin configuration must assign every vertex");
        for (auto s : f)
            if (s >= w.spins())
                throw PreconditionError("spin out of range");
        NonNegValue result(1);
        if (! w.is_exact())
            result = NonNegValue(LogValue::one());
        for (Vertex v = 0 ; v < g.size() ; ++v)
            result = result * w.vertex(v, f[v]);
        for (std::size_t e = 0 ; e < g.edge_count() ; ++e)
            result = result * w.edge(e, f[g.edge(e).first], f[g.edge(e).second]);
        return result;
    }

    auto partition_brute(const Graph & g, const WeightSystem & w, const EvalOptions & opts) -> NonNegValue
    {
        std::vector<Vertex> order(g.size());
        for (Vertex v = 0 ; v < g.size() ; ++v)
            order[v] = v;
        return dispatch(g, w, order, opts);
    }

    auto partition_bipartite(const Graph & g, const WeightSystem & w, std::span<const Vertex> enumerated, const EvalOptions & opts) -> NonNegValue
    {
        std::vector<Vertex> order(enumerated.begin(), enumerated.end());
        std::sort(order.begin(), order.end());
        return dispatch(g, w, order, opts);
    }

    auto partition_kab(const KabInstance & inst, const EvalOptions & opts) -> NonNegValue
    {
        std::vector<Vertex> side;
        if (inst.b <= inst.a)
            for (unsigned k = 1 ; k <= inst.b ; ++k)
                side.push_back(KabInstance::w_vertex(k));
        else
            for (unsigned l = 1 ; l <= inst.a ; ++l)
                side.push_back(inst.z_vertex(l));
        return partition_bipartite(inst.graph, inst.weights, side, opts);
    }

    auto partition(const Graph & g, const WeightSystem & w, const EvalOptions & opts) -> NonNegValue
    {
        if (g.edge_count() > 0 && is_bipartite(g)) {
            auto bp = bipartition(g);
            auto & smaller = bp.class_e.size() <= bp.class_o.size() ? bp.class_e : bp.class_o;
            return partition_bipartite(g, w, smaller, opts);
        }
        return partition_brute(g, w, opts);
    }

    auto ListAssignment::full(std::size_t g_size, std::size_t h_size) -> ListAssignment
    {
        ListAssignment result;
        std::vector<Vertex> all(h_size);
        for (Vertex x = 0 ; x < h_size ; ++x)
            all[x] = x;
        result.lists.assign(g_size, all);
        return result;
    }

    void ListAssignment::normalise(const Graph & g, const Graph & h)
    {
        if (lists.size() != g.size())
            throw PreconditionError("list assignment must give a list for every vertex of G");
        for (auto & l : lists) {
            std::sort(l.begin(), l.end());
            l.erase(std::unique(l.begin(), l.end()), l.end());
            if (! l.empty() && l.back() >= h.size())
                throw PreconditionError("list entry " + std::to_string(l.back()) + " is not a vertex of H");
        }
    }

    namespace
    {
        class ListHomCounter
        {
            public:
                ListHomCounter(const Graph & g, const Graph & h, const ListAssignment & lists) :
                    _g(g), _h(h), _lists(lists.lists),
                    _image(g.size(), 0),
                    _state(g.size(), unassigned)
                {
                }

                auto count() -> Integer { return search(); }

            private:
                static constexpr std::uint8_t unassigned = 0, assigned = 1, factored = 2;

                const Graph & _g;
                const Graph & _h;
                const std::vector<std::vector<Vertex>> & _lists;
                std::vector<Vertex> _image;
                std::vector<std::uint8_t> _state;

                auto candidate_ok(Vertex v, Vertex c) const -> bool
                {
                    for (auto u : _g.neighbours(v))
                        if (_state[u] == assigned && ! _h.has_edge(_image[u], c))
                            return false;
                    return true;
                }

                auto candidate_count(Vertex v) const -> std::size_t
                {
                    std::size_t n = 0;
                    for (auto c : _lists[v])
                        n += candidate_ok(v, c);
                    return n;
                }

                auto search() -> Integer
                {
                    // vertices with no unassigned neighbour contribute an
                    // independent factor; branch on the tightest other vertex
                    Integer product = 1;
                    std::vector<Vertex> factored_here;
                    std::optional<Vertex> branch;
                    std::size_t branch_count = 0;
                    bool any_left = false;

                    for (Vertex v = 0 ; v < _g.size() ; ++v) {
                        if (_state[v] != unassigned)
                            continue;
                        auto n = candidate_count(v);
                        if (n == 0) {
                            for (auto f : factored_here)
                                _state[f] = unassigned;
                            return 0;
                        }
                        bool free = true;
                        for (auto u : _g.neighbours(v))
                            if (_state[u] == unassigned) {
                                free = false;
                                break;
                            }
                        if (free) {
                            product *= n;
                            _state[v] = factored;
                            factored_here.push_back(v);
                        }
                        else {
                            any_left = true;
                            if (! branch || n < branch_count) {
                                branch = v;
                                branch_count = n;
                            }
                        }
                    }

                    Integer total = 0;
                    if (! any_left)
                        total = 1;
                    else {
                        auto v = *branch;
                        for (auto c : _lists[v]) {
                            if (! candidate_ok(v, c))
                                continue;
                            _state[v] = assigned;
                            _image[v] = c;
                            total += search();
                            _state[v] = unassigned;
                        }
                    }

                    for (auto f : factored_here)
                        _state[f] = unassigned;
                    return total * product;
                }
        };
    }

    auto count_list_homs(const Graph & g, const Graph & h, const ListAssignment & lists, const EvalOptions & opts) -> Integer
    {
        ListAssignment normal = lists;
        normal.normalise(g, h);
        double space = 1.0;
        for (auto & l : normal.lists)
            space *= double(l.size());
        check_budget(space, opts, "list homomorphism search");
        return ListHomCounter(g, h, normal).count();
    }

    auto count_homs(const Graph & g, const Graph & h, const EvalOptions & opts) -> Integer
    {
        return count_list_homs(g, h, ListAssignment::full(g.size(), h.size()), opts);
    }

    auto count_extensions(const Graph & g, const Graph & h, const ListAssignment & lists,
            std::span<const Vertex> a_set, std::span<const Vertex> b_set, std::span<const Vertex> x) -> Integer
    {
        if (x.size() != a_set.size())
            throw PreconditionError("partial map must give an image for every vertex of A");
        std::vector<std::optional<Vertex>> image(g.size());
        for (std::size_t k = 0 ; k < a_set.size() ; ++k) {
            auto & l = lists.lists.at(a_set[k]);
            if (std::find(l.begin(), l.end(), x[k]) == l.end())
                throw PreconditionError("x(" + std::to_string(a_set[k]) + ") = " + std::to_string(x[k]) + " is not in its list");
            image[a_set[k]] = x[k];
        }

        Integer result = 1;
        for (auto v : b_set) {
            if (image[v])
                throw PreconditionError("vertex " + std::to_string(v) + " lies in both A and B");
            Integer n = 0;
            for (auto c : lists.lists.at(v)) {
                bool ok = true;
                for (auto u : g.neighbours(v))
                    if (image[u] && ! h.has_edge(*image[u], c)) {
                        ok = false;
                        break;
                    }
                n += ok;
            }
            result *= n;
            if (sgn(result) == 0)
                break;
        }
        return result;
    }

    auto neighbourhood_families(const BiregularCert & cert) -> CoverFamilyPair
    {
        CoverFamilyPair fam;
        fam.t1 = cert.a;
        fam.t2 = 1;
        for (auto v : cert.class_o) {
            fam.a_sets.push_back(cert.neighbour_order[v]);
            fam.b_sets.push_back({ v });
        }
        return fam;
    }

    namespace
    {
        auto words(std::string_view line) -> std::vector<std::string_view>
        {
            std::vector<std::string_view> tokens;
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
                    ++i;
                auto j = i;
                while (j < line.size() && ! (line[j] == ' ' || line[j] == '\t' || line[j] == '\r'))
                    ++j;
                if (j > i)
                    tokens.push_back(line.substr(i, j - i));
                i = j;
            }
            return tokens;
        }

        auto id(std::string_view token, std::size_t line, std::size_t limit) -> Vertex
        {
            unsigned long value = 0;
            auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
            if (ec != std::errc{} || ptr != token.data() + token.size())
                throw ParseError(ParseErrorKind::malformed, line, "expected a non-negative integer, got '" + std::string(token) + "'");
            if (value >= limit)
                throw ParseError(ParseErrorKind::out_of_range, line, "id " + std::string(token) + " out of range");
            return Vertex(value);
        }

        template <typename Fn>
        void for_each_line(std::string_view text, Fn && fn)
        {
            std::size_t line_no = 0, pos = 0;
            while (pos <= text.size()) {
                auto end = text.find('\n', pos);
                if (end == std::string_view::npos)
                    end = text.size();
                auto line = text.substr(pos, end - pos);
                pos = end + 1;
                ++line_no;
                auto t = words(line);
                if (t.empty() || t[0].front() == '#')
                    continue;
                fn(t, line_no);
            }
        }
    }

    auto parse_lists(std::string_view text, const Graph & g, const Graph & h) -> ListAssignment
    {
        auto result = ListAssignment::full(g.size(), h.size());
        std::vector<std::size_t> seen(g.size(), 0);
        for_each_line(text, [&](const std::vector<std::string_view> & t, std::size_t line) {
            if (t[0] != "l" || t.size() < 2)
                throw ParseError(ParseErrorKind::malformed, line, "expected 'l <v> <h...>'");
            auto v = id(t[1], line, g.size());
            if (seen[v])
                throw ParseError(ParseErrorKind::malformed, line, "second list for vertex " + std::to_string(v));
            seen[v] = line;
            auto & l = result.lists[v];
            l.clear();
            for (std::size_t k = 2 ; k < t.size() ; ++k)
                l.push_back(id(t[k], line, h.size()));
        });
        result.normalise(g, h);
        return result;
    }

    auto format_lists(const ListAssignment & lists) -> std::string
    {
        std::ostringstream out;
        for (std::size_t v = 0 ; v < lists.lists.size() ; ++v) {
            out << "l " << v;
            for (auto x : lists.lists[v])
                out << " " << x;
            out << "\n";
        }
        return out.str();
    }

    auto parse_families(std::string_view text, const Graph & g) -> CoverFamilyPair
    {
        CoverFamilyPair fam;
        bool have_t = false;
        for_each_line(text, [&](const std::vector<std::string_view> & t, std::size_t line) {
            if (t[0] == "t") {
                if (t.size() != 3 || have_t)
                    throw ParseError(ParseErrorKind::malformed, line, "expected a single 't <t1> <t2>' line");
                fam.t1 = id(t[1], line, std::numeric_limits<unsigned>::max());
                fam.t2 = id(t[2], line, std::numeric_limits<unsigned>::max());
                have_t = true;
            }
            else if (t[0] == "pair") {
                if (t.size() < 3 || t[1] != "A")
                    throw ParseError(ParseErrorKind::malformed, line, "expected 'pair A <ids...> B <ids...>'");
                std::vector<Vertex> a, b;
                bool in_b = false;
                for (std::size_t k = 2 ; k < t.size() ; ++k) {
                    if (t[k] == "B") {
                        if (in_b)
                            throw ParseError(ParseErrorKind::malformed, line, "second 'B' marker");
                        in_b = true;
                        continue;
                    }
                    (in_b ? b : a).push_back(id(t[k], line, g.size()));
                }
                if (! in_b)
                    throw ParseError(ParseErrorKind::malformed, line, "missing 'B' marker");
                fam.a_sets.push_back(std::move(a));
                fam.b_sets.push_back(std::move(b));
            }
            else
                throw ParseError(ParseErrorKind::malformed, line, "unrecognised line");
        });
        if (! have_t)
            throw ParseError(ParseErrorKind::malformed, 0, "missing 't <t1> <t2>' line");
        return fam;
    }

    auto format_families(const CoverFamilyPair & fam) -> std::string
    {
        std::ostringstream out;
        out << "t " << fam.t1 << " " << fam.t2 << "\n";
        for (std::size_t i = 0 ; i < fam.a_sets.size() ; ++i) {
            out << "pair A";
            for (auto v : fam.a_sets[i])
                out << " " << v;
            out << " B";
            for (auto v : fam.b_sets[i])
                out << " " << v;
            out << "\n";
        }
        return out.str();
    }
}
