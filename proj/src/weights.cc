#include <spinbound/errors.hh>
#include <spinbound/weights.hh>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace spinbound
{
    WeightSystem::WeightSystem(std::size_t vertices, std::size_t edges, unsigned spins, const NonNegValue & fill) :
        _vertices(vertices),
        _edges(edges),
        _spins(spins),
        _vertex(vertices * spins, fill),
        _edge(edges * spins * spins, fill)
    {
        if (spins == 0)
            throw PreconditionError("weight system needs at least one spin");
    }

    void WeightSystem::set_vertex(Vertex v, Spin i, const NonNegValue & value)
    {
        _vertex.at(std::size_t(v) * _spins + i) = value;
    }

    void WeightSystem::set_edge(std::size_t e, Spin i, Spin j, const NonNegValue & value)
    {
        _edge.at((e * _spins + i) * _spins + j) = value;
        _edge.at((e * _spins + j) * _spins + i) = value;
    }

    auto WeightSystem::is_exact() const -> bool
    {
        for (auto & x : _vertex)
            if (! x.is_exact())
                return false;
        for (auto & x : _edge)
            if (! x.is_exact())
                return false;
        return true;
    }

    auto WeightSystem::to_log() const -> WeightSystem
    {
        WeightSystem result = *this;
        for (auto & x : result._vertex)
            x = NonNegValue(x.to_log());
        for (auto & x : result._edge)
            x = NonNegValue(x.to_log());
        return result;
    }

    auto WeightSystem::uniform_edges() const -> bool
    {
        std::size_t table = std::size_t(_spins) * _spins;
        for (std::size_t e = 1 ; e < _edges ; ++e)
            for (std::size_t k = 0 ; k < table ; ++k)
                if (! (_edge[e * table + k] == _edge[k]) || _edge[e * table + k].backend() != _edge[k].backend())
                    return false;
        return true;
    }

    void WeightSystem::check_shape(const Graph & g) const
    {
        if (g.size() != _vertices || g.edge_count() != _edges)
            throw PreconditionError("weight system shape (" + std::to_string(_vertices) + " vertices, " + std::to_string(_edges)
                    + " edges) does not match graph (" + std::to_string(g.size()) + ", " + std::to_string(g.edge_count()) + ")");
    }

    auto make_hardcore(const Graph & g, std::span<const NonNegValue> lam) -> WeightSystem
    {
        if (lam.size() != g.size())
            throw PreconditionError("hard-core activities must cover every vertex");
        WeightSystem w(g, 2);
        for (Vertex v = 0 ; v < g.size() ; ++v)
            w.set_vertex(v, 0, lam[v]);
        for (std::size_t e = 0 ; e < g.edge_count() ; ++e)
            w.set_edge(e, 0, 0, NonNegValue(0));
        return w;
    }

    auto make_hardcore(const Graph & g, const NonNegValue & lam) -> WeightSystem
    {
        std::vector<NonNegValue> all(g.size(), lam);
        return make_hardcore(g, all);
    }

    auto make_ising(const Graph & g, double beta, double h) -> WeightSystem
    {
        if (! std::isfinite(beta) || ! std::isfinite(h))
            throw PreconditionError("Ising parameters must be finite");
        WeightSystem w(g, 2, NonNegValue(LogValue::one()));
        for (Vertex v = 0 ; v < g.size() ; ++v) {
            w.set_vertex(v, 0, LogValue::from_log(h));
            w.set_vertex(v, 1, LogValue::from_log(-h));
        }
        for (std::size_t e = 0 ; e < g.edge_count() ; ++e) {
            w.set_edge(e, 0, 0, LogValue::from_log(-beta));
            w.set_edge(e, 1, 1, LogValue::from_log(-beta));
            w.set_edge(e, 0, 1, LogValue::from_log(beta));
        }
        return w;
    }

    auto make_kab_graph(unsigned a, unsigned b) -> Graph
    {
        // w_k = k-1 has degree a; z_l = b+l-1 has degree b
        std::vector<Edge> edges;
        for (unsigned k = 0 ; k < b ; ++k)
            for (unsigned l = 0 ; l < a ; ++l)
                edges.emplace_back(k, b + l);
        return Graph(a + b, std::move(edges));
    }

    namespace
    {
        // Fills the K_{a,b} instance from per-side source vertices and a
        // source edge lookup; source_edge(k, l) gives the edge id in g used
        // for w_k z_l.
        template <typename EdgeLookup>
        auto build_instance(unsigned a, unsigned b, const WeightSystem & w,
                const std::vector<Vertex> & w_source, const std::vector<Vertex> & z_source,
                EdgeLookup source_edge) -> KabInstance
        {
            KabInstance inst;
            inst.a = a;
            inst.b = b;
            inst.graph = make_kab_graph(a, b);
            inst.weights = WeightSystem(inst.graph, w.spins());
            auto m = w.spins();

            for (unsigned k = 1 ; k <= b ; ++k)
                for (Spin i = 0 ; i < m ; ++i)
                    inst.weights.set_vertex(KabInstance::w_vertex(k), i, w.vertex(w_source[k - 1], i));
            for (unsigned l = 1 ; l <= a ; ++l)
                for (Spin i = 0 ; i < m ; ++i)
                    inst.weights.set_vertex(inst.z_vertex(l), i, w.vertex(z_source[l - 1], i));

            for (unsigned k = 1 ; k <= b ; ++k)
                for (unsigned l = 1 ; l <= a ; ++l) {
                    auto target = *inst.graph.edge_id(KabInstance::w_vertex(k), inst.z_vertex(l));
                    auto source = source_edge(k, l);
                    for (Spin i = 0 ; i < m ; ++i)
                        for (Spin j = i ; j < m ; ++j)
                            inst.weights.set_edge(target, i, j, w.edge(source, i, j));
                }
            return inst;
        }
    }

    auto restrict_to_kab(const Graph & g, const WeightSystem & w, const BiregularCert & cert, Vertex v) -> KabInstance
    {
        w.check_shape(g);
        if (! std::binary_search(cert.class_o.begin(), cert.class_o.end(), v))
            throw PreconditionError("vertex " + std::to_string(v) + " is not in classO");
        auto & order = cert.neighbour_order.at(v);
        if (order.size() != cert.b)
            throw PreconditionError("neighbour order of " + std::to_string(v) + " has the wrong length");

        std::vector<Vertex> z_source(cert.a, v);
        std::vector<std::size_t> edge_of(cert.b);
        for (unsigned k = 0 ; k < cert.b ; ++k) {
            auto e = g.edge_id(order[k], v);
            if (! e)
                throw PreconditionError("neighbour order of " + std::to_string(v) + " names a non-neighbour");
            edge_of[k] = *e;
        }
        return build_instance(cert.a, cert.b, w, order, z_source,
                [&](unsigned k, unsigned) { return edge_of[k - 1]; });
    }

    auto restrict_to_edge(const Graph & g, const WeightSystem & w, std::size_t e) -> KabInstance
    {
        w.check_shape(g);
        if (! w.uniform_edges())
            throw PreconditionError("unsupported: edge-weight mapping for conj1 is ambiguous with non-uniform edge weights");
        auto [u, v] = g.edge(e);
        auto nu = g.neighbours(u), nv = g.neighbours(v);
        std::vector<Vertex> w_source(nv.begin(), nv.end()), z_source(nu.begin(), nu.end());
        return build_instance(unsigned(nu.size()), unsigned(nv.size()), w, w_source, z_source,
                [&](unsigned, unsigned) { return e; });
    }

    namespace
    {
        auto split(std::string_view line) -> std::vector<std::string_view>
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

        auto integer(std::string_view token, std::size_t line) -> unsigned long
        {
            unsigned long value = 0;
            auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
            if (ec != std::errc{} || ptr != token.data() + token.size())
                throw ParseError(ParseErrorKind::malformed, line, "expected a non-negative integer, got '" + std::string(token) + "'");
            return value;
        }

        auto rational(std::string_view token, std::size_t line) -> Rational
        {
            try {
                return parse_rational(token);
            }
            catch (const std::invalid_argument & e) {
                throw ParseError(ParseErrorKind::malformed, line, e.what());
            }
        }
    }

    namespace
    {
        // natural log as written by format_weights: hex float, or -inf for zero
        auto log_value(std::string_view token, std::size_t line) -> LogValue
        {
            std::string s(token);
            char * end = nullptr;
            double x = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size() || std::isnan(x) || x == std::numeric_limits<double>::infinity())
                throw ParseError(ParseErrorKind::malformed, line, "expected a log weight, got '" + s + "'");
            return LogValue::from_log(x);
        }
    }

    auto parse_weights(std::string_view text, const Graph & g) -> WeightSystem
    {
        std::optional<WeightSystem> w;
        std::vector<std::size_t> vertex_seen, edge_seen;

        std::size_t line_no = 0, pos = 0;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos)
                end = text.size();
            auto line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;

            auto t = split(line);
            if (t.empty() || t[0].front() == '#')
                continue;

            auto spin = [&](std::string_view token) {
                auto i = integer(token, line_no);
                if (i < 1 || i > w->spins())
                    throw ParseError(ParseErrorKind::out_of_range, line_no, "spin " + std::string(token) + " outside 1.." + std::to_string(w->spins()));
                return Spin(i - 1);
            };
            auto vertex = [&](std::string_view token) {
                auto v = integer(token, line_no);
                if (v >= g.size())
                    throw ParseError(ParseErrorKind::out_of_range, line_no, "vertex id " + std::string(token) + " out of range");
                return Vertex(v);
            };

            if (t[0] == "m") {
                if (w)
                    throw ParseError(ParseErrorKind::malformed, line_no, "second 'm' line");
                if (t.size() != 2)
                    throw ParseError(ParseErrorKind::malformed, line_no, "expected 'm <spins>'");
                auto m = integer(t[1], line_no);
                if (m < 1 || m > 64)
                    throw ParseError(ParseErrorKind::out_of_range, line_no, "spin count must be in 1..64");
                w.emplace(g, unsigned(m));
                vertex_seen.assign(g.size() * m, 0);
                edge_seen.assign(g.edge_count() * m * m, 0);
            }
            else if (t[0] == "vw" || t[0] == "vwl") {
                if (! w)
                    throw ParseError(ParseErrorKind::malformed, line_no, "'vw' before 'm'");
                if (t.size() != 4)
                    throw ParseError(ParseErrorKind::malformed, line_no, "expected '" + std::string(t[0]) + " <v> <i> <value>'");
                auto v = vertex(t[1]);
                auto i = spin(t[2]);
                auto & seen = vertex_seen[std::size_t(v) * w->spins() + i];
                if (seen)
                    throw ParseError(ParseErrorKind::malformed, line_no, "duplicate entry (first on line " + std::to_string(seen) + ")");
                seen = line_no;
                w->set_vertex(v, i, t[0] == "vw" ? NonNegValue(rational(t[3], line_no)) : NonNegValue(log_value(t[3], line_no)));
            }
            else if (t[0] == "ew" || t[0] == "ewl") {
                if (! w)
                    throw ParseError(ParseErrorKind::malformed, line_no, "'ew' before 'm'");
                if (t.size() != 6)
                    throw ParseError(ParseErrorKind::malformed, line_no, "expected '" + std::string(t[0]) + " <u> <v> <i> <j> <value>'");
                auto u = vertex(t[1]), v = vertex(t[2]);
                auto i = spin(t[3]), j = spin(t[4]);
                if (i > j)
                    throw ParseError(ParseErrorKind::malformed, line_no, "edge weight spins must satisfy i <= j");
                auto e = g.edge_id(u, v);
                if (! e)
                    throw ParseError(ParseErrorKind::out_of_range, line_no, "no edge " + std::string(t[1]) + " " + std::string(t[2]) + " in graph");
                auto & seen = edge_seen[(*e * w->spins() + i) * w->spins() + j];
                if (seen)
                    throw ParseError(ParseErrorKind::malformed, line_no, "duplicate entry (first on line " + std::to_string(seen) + ")");
                seen = line_no;
                w->set_edge(*e, i, j, t[0] == "ew" ? NonNegValue(rational(t[5], line_no)) : NonNegValue(log_value(t[5], line_no)));
            }
            else
                throw ParseError(ParseErrorKind::malformed, line_no, "unrecognised line '" + std::string(line) + "'");
        }

        if (! w)
            throw ParseError(ParseErrorKind::malformed, line_no, "missing 'm <spins>' line");
        return std::move(*w);
    }

    auto format_weights(const Graph & g, const WeightSystem & w) -> std::string
    {
        w.check_shape(g);
        std::ostringstream out;
        auto value = [](const NonNegValue & x) {
            if (x.is_exact())
                return x.rational().get_str();
            char buffer[64];
            std::snprintf(buffer, sizeof(buffer), "%a", x.log());
            return std::string(buffer);
        };

        out << "m " << w.spins() << "\n";
        for (Vertex v = 0 ; v < g.size() ; ++v)
            for (Spin i = 0 ; i < w.spins() ; ++i) {
                auto & x = w.vertex(v, i);
                out << (x.is_exact() ? "vw " : "vwl ") << v << " " << i + 1 << " " << value(x) << "\n";
            }
        for (std::size_t e = 0 ; e < g.edge_count() ; ++e)
            for (Spin i = 0 ; i < w.spins() ; ++i)
                for (Spin j = i ; j < w.spins() ; ++j) {
                    auto & x = w.edge(e, i, j);
                    out << (x.is_exact() ? "ew " : "ewl ") << g.edge(e).first << " " << g.edge(e).second << " "
                        << i + 1 << " " << j + 1 << " " << value(x) << "\n";
                }
        return out.str();
    }
}
