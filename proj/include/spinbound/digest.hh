#pragma once

#include <spinbound/graph.hh>
#include <spinbound/weights.hh>

#include <string>
#include <string_view>

namespace spinbound
{
    /// Lower-case hex SHA-256.
    auto sha256_hex(std::string_view data) -> std::string;

    /// Digests of the canonical text serialisations, used to identify instances in reports.
    auto graph_sha(const Graph & g) -> std::string;
    auto weights_sha(const Graph & g, const WeightSystem & w) -> std::string;
}
