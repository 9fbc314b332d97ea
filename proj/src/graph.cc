#include <spinbound/errors.hh>
#include <spinbound/graph.hh>

#include <algorithm>
#include <array>
#include <charconv>
#include <queue>
#include <sstream>

namespace spinbound
{
    Graph::Graph(std::size_t n, std::vector<Edge> edges) :
        _n(n),
        _edges(std::move(edges)),
        _adjacency(n),
        _matrix(n * n, 0)
    {
        for (auto & [u, v] : _edges) {
            if (u >= n || v >= n)
                throw PreconditionError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") has an endpoint >= " + std::to_string(n));
            if (u == v)
                throw PreconditionError("loop at vertex " + std::to_string(u));
            if (u > v)
                std::swap(u, v);
        }
        std::sort(_edges.begin(), _edges.end());
        if (auto dup = std::adjacent_find(_edges.begin(), _edges.end()); dup != _edges.end())
            throw PreconditionError("duplicate edge (" + std::to_string(dup->first) + "," + std::to_string(dup->second) + ")");

        for (auto [u, v] : _edges) {
            _adjacency[u].push_back(v);
            _adjacency[v].push_back(u);
            _matrix[std::size_t(u) * n + v] = 1;
            _matrix[std::size_t(v) * n + u] = 1;
        }
        for (auto & a : _adjacency)
            std::sort(a.begin(), a.end());
    }

    auto Graph::edge_id(Vertex u, Vertex v) const -> std::optional<std::size_t>
    {
        if (u > v)
            std::swap(u, v);
        auto it = std::lower_bound(_edges.begin(), _edges.end(), Edge{ u, v });
        if (it == _edges.end() || *it != Edge{ u, v })
            return std::nullopt;
        return std::size_t(it - _edges.begin());
    }

    auto Graph::is_connected() const -> bool
    {
        if (_n == 0)
            return true;
        std::vector<char> seen(_n, 0);
        std::vector<Vertex> stack{ 0 };
        seen[0] = 1;
        std::size_t reached = 1;
        while (! stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (auto w : _adjacency[v])
                if (! seen[w]) {
                    seen[w] = 1;
                    ++reached;
                    stack.push_back(w);
                }
        }
        return reached == _n;
    }

    auto Graph::min_degree() const -> std::size_t
    {
        std::size_t result = _n == 0 ? 0 : _adjacency[0].size();
        for (auto & a : _adjacency)
            result = std::min(result, a.size());
        return result;
    }

    namespace
    {
        auto tokenize(std::string_view line) -> std::vector<std::string_view>
        {
            std::vector<std::string_view> tokens;
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
                    ++i;
                std::size_t j = i;
                while (j < line.size() && ! (line[j] == ' ' || line[j] == '\t' || line[j] == '\r'))
                    ++j;
                if (j > i)
                    tokens.push_back(line.substr(i, j - i));
                i = j;
            }
            return tokens;
        }

        auto to_number(std::string_view token, std::size_t line) -> unsigned long
        {
            unsigned long value = 0;
            auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
            if (ec != std::errc{} || ptr != token.data() + token.size())
                throw ParseError(ParseErrorKind::malformed, line, "expected a non-negative integer, got '" + std::string(token) + "'");
            return value;
        }
    }

    auto parse_graph(std::string_view text) -> Graph
    {
        std::optional<std::size_t> n, m;
        std::vector<Edge> edges;
        std::vector<std::size_t> edge_lines;

        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos)
                end = text.size();
            auto line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;

            auto tokens = tokenize(line);
            if (tokens.empty() || tokens[0].front() == '#')
                continue;

            if (tokens[0] == "p") {
                if (n)
                    throw ParseError(ParseErrorKind::malformed, line_no, "second header line");
                if (tokens.size() != 3)
                    throw ParseError(ParseErrorKind::malformed, line_no, "header must be 'p <n> <m>'");
                n = to_number(tokens[1], line_no);
                m = to_number(tokens[2], line_no);
            }
            else if (tokens[0] == "e") {
                if (! n)
                    throw ParseError(ParseErrorKind::malformed, line_no, "edge line before header");
                if (tokens.size() != 3)
                    throw ParseError(ParseErrorKind::malformed, line_no, "edge must be 'e <u> <v>'");
                auto u = to_number(tokens[1], line_no), v = to_number(tokens[2], line_no);
                if (u >= *n || v >= *n)
                    throw ParseError(ParseErrorKind::out_of_range, line_no, "vertex id out of range (n = " + std::to_string(*n) + ")");
                if (u == v)
                    throw ParseError(ParseErrorKind::loop, line_no, "loop at vertex " + std::to_string(u));
                Edge e{ Vertex(std::min(u, v)), Vertex(std::max(u, v)) };
                for (std::size_t k = 0 ; k < edges.size() ; ++k)
                    if (edges[k] == e)
                        throw ParseError(ParseErrorKind::duplicate_edge, line_no,
                                "duplicate edge " + std::to_string(e.first) + " " + std::to_string(e.second)
                                + " (first on line " + std::to_string(edge_lines[k]) + ")");
                edges.push_back(e);
                edge_lines.push_back(line_no);
            }
            else
                throw ParseError(ParseErrorKind::malformed, line_no, "unrecognised line '" + std::string(line) + "'");
        }

        if (! n)
            throw ParseError(ParseErrorKind::malformed, line_no, "missing 'p <n> <m>' header");
        if (edges.size() != *m)
            throw ParseError(ParseErrorKind::malformed, line_no,
                    "header declares " + std::to_string(*m) + " edges, found " + std::to_string(edges.size()));
        return Graph(*n, std::move(edges));
    }

    auto format_graph(const Graph & g) -> std::string
    {
        std::ostringstream out;
        out << "p " << g.size() << " " << g.edge_count() << "\n";
        for (auto [u, v] : g.edges())
            out << "e " << u << " " << v << "\n";
        return out.str();
    }

    auto complete_bipartite(unsigned p, unsigned q) -> Graph
    {
        std::vector<Edge> edges;
        for (unsigned i = 0 ; i < p ; ++i)
            for (unsigned j = 0 ; j < q ; ++j)
                edges.emplace_back(i, p + j);
        return Graph(p + q, std::move(edges));
    }

    auto cycle_graph(unsigned n) -> Graph
    {
        std::vector<Edge> edges;
        for (unsigned i = 0 ; i < n ; ++i)
            edges.emplace_back(i, (i + 1) % n);
        return Graph(n, std::move(edges));
    }

    auto complete_graph(unsigned n) -> Graph
    {
        std::vector<Edge> edges;
        for (unsigned i = 0 ; i < n ; ++i)
            for (unsigned j = i + 1 ; j < n ; ++j)
                edges.emplace_back(i, j);
        return Graph(n, std::move(edges));
    }

    auto path_graph(unsigned n) -> Graph
    {
        std::vector<Edge> edges;
        for (unsigned i = 0 ; i + 1 < n ; ++i)
            edges.emplace_back(i, i + 1);
        return Graph(n, std::move(edges));
    }

    auto hypercube_graph(unsigned dim) -> Graph
    {
        std::vector<Edge> edges;
        unsigned n = 1u << dim;
        for (unsigned v = 0 ; v < n ; ++v)
            for (unsigned k = 0 ; k < dim ; ++k)
                if (! (v & (1u << k)))
                    edges.emplace_back(v, v | (1u << k));
        return Graph(n, std::move(edges));
    }

    auto bipartition(const Graph & g) -> Bipartition
    {
        constexpr std::uint8_t unset = 2;
        std::vector<std::uint8_t> side(g.size(), unset);
        std::vector<Vertex> parent(g.size());
        std::vector<std::size_t> depth(g.size(), 0);

        for (Vertex root = 0 ; root < g.size() ; ++root) {
            if (side[root] != unset)
                continue;
            side[root] = 0;
            parent[root] = root;
            std::queue<Vertex> queue;
            queue.push(root);
            while (! queue.empty()) {
                auto v = queue.front();
                queue.pop();
                for (auto w : g.neighbours(v)) {
                    if (side[w] == unset) {
                        side[w] = 1 - side[v];
                        parent[w] = v;
                        depth[w] = depth[v] + 1;
                        queue.push(w);
                    }
                    else if (side[w] == side[v]) {
                        // root ... v, w ... root, closed by the edge vw
                        std::vector<Vertex> up_v, up_w;
                        for (auto x = v ; ; x = parent[x]) {
                            up_v.push_back(x);
                            if (x == root)
                                break;
                        }
                        for (auto x = w ; ; x = parent[x]) {
                            up_w.push_back(x);
                            if (x == root)
                                break;
                        }
                        std::vector<Vertex> walk(up_v.rbegin(), up_v.rend());
                        walk.insert(walk.end(), up_w.begin(), up_w.end());
                        throw NotBipartite(std::move(walk));
                    }
                }
            }
        }

        Bipartition result;
        result.side = side;
        for (Vertex v = 0 ; v < g.size() ; ++v)
            (side[v] == 0 ? result.class_e : result.class_o).push_back(v);
        return result;
    }

    auto is_bipartite(const Graph & g) -> bool
    {
        try {
            bipartition(g);
            return true;
        }
        catch (const NotBipartite &) {
            return false;
        }
    }

    auto BiregularCert::swapped() const -> BiregularCert
    {
        BiregularCert result = *this;
        std::swap(result.a, result.b);
        std::swap(result.class_e, result.class_o);
        return result;
    }

    auto BiregularCert::orientations() const -> std::vector<BiregularCert>
    {
        if (a == b)
            return { *this, swapped() };
        return { *this };
    }

    auto certify_biregular(const Graph & g, const Bipartition & bp) -> BiregularCert
    {
        for (Vertex v = 0 ; v < g.size() ; ++v)
            if (g.degree(v) == 0)
                throw NotBiregular("vertex " + std::to_string(v) + " has degree 0", v, v);

        // component id per vertex
        std::vector<std::size_t> component(g.size(), g.size());
        std::vector<Vertex> roots;
        for (Vertex root = 0 ; root < g.size() ; ++root) {
            if (component[root] != g.size())
                continue;
            component[root] = roots.size();
            std::vector<Vertex> stack{ root };
            while (! stack.empty()) {
                auto v = stack.back();
                stack.pop_back();
                for (auto w : g.neighbours(v))
                    if (component[w] == g.size()) {
                        component[w] = roots.size();
                        stack.push_back(w);
                    }
            }
            roots.push_back(root);
        }

        // each class of each component must be degree-uniform
        std::vector<std::array<std::optional<Vertex>, 2>> representative(roots.size());
        for (Vertex v = 0 ; v < g.size() ; ++v) {
            auto & rep = representative[component[v]][bp.side[v]];
            if (! rep)
                rep = v;
            else if (g.degree(*rep) != g.degree(v))
                throw NotBiregular("vertices " + std::to_string(*rep) + " and " + std::to_string(v)
                        + " lie in one class with degrees " + std::to_string(g.degree(*rep)) + " and " + std::to_string(g.degree(v)),
                        *rep, v);
        }

        // orient each component so its higher-degree class is classE
        std::vector<std::uint8_t> flip(roots.size(), 0);
        bool regular = true;
        for (std::size_t c = 0 ; c < roots.size() ; ++c) {
            auto de = g.degree(*representative[c][0]), dout = g.degree(*representative[c][1]);
            flip[c] = de < dout;
            if (de != dout)
                regular = false;
        }
        if (regular)
            std::fill(flip.begin(), flip.end(), 0);

        BiregularCert cert;
        std::optional<Vertex> e_witness, o_witness;
        for (Vertex v = 0 ; v < g.size() ; ++v) {
            bool in_e = (bp.side[v] ^ flip[component[v]]) == 0;
            auto & witness = in_e ? e_witness : o_witness;
            if (! witness)
                witness = v;
            else if (g.degree(*witness) != g.degree(v))
                throw NotBiregular("vertices " + std::to_string(*witness) + " and " + std::to_string(v)
                        + " lie in one class with degrees " + std::to_string(g.degree(*witness)) + " and " + std::to_string(g.degree(v)),
                        *witness, v);
            (in_e ? cert.class_e : cert.class_o).push_back(v);
        }

        cert.a = cert.class_e.empty() ? 0 : unsigned(g.degree(cert.class_e.front()));
        cert.b = cert.class_o.empty() ? 0 : unsigned(g.degree(cert.class_o.front()));
        cert.neighbour_order.resize(g.size());
        for (Vertex v = 0 ; v < g.size() ; ++v) {
            auto nb = g.neighbours(v);
            cert.neighbour_order[v].assign(nb.begin(), nb.end());
        }
        return cert;
    }

    auto certify_biregular(const Graph & g) -> BiregularCert
    {
        return certify_biregular(g, bipartition(g));
    }

    auto relabel(const Graph & g, std::span<const Vertex> perm) -> Graph
    {
        std::vector<Edge> edges;
        for (auto [u, v] : g.edges())
            edges.emplace_back(perm[u], perm[v]);
        return Graph(g.size(), std::move(edges));
    }

    auto is_complete_bipartite(const Graph & g) -> bool
    {
        if (g.edge_count() == 0 || ! g.is_connected())
            return false;
        Bipartition bp;
        try {
            bp = bipartition(g);
        }
        catch (const NotBipartite &) {
            return false;
        }
        return g.edge_count() == bp.class_e.size() * bp.class_o.size();
    }
}
