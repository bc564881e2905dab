#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "haxc/errors.hpp"

namespace haxc::detail {

/// Square matrix from JSON: either nested rows [[..],[..]] or a flat
/// row-major array whose length is a perfect square.
inline std::vector<double> parse_matrix(const nlohmann::json& j, const std::string& what,
                                        int* dim_out) {
    require(j.is_array() && !j.empty(), what + ": expected a matrix");
    std::vector<double> m;
    int n = 0;
    if (j.front().is_array()) {
        n = static_cast<int>(j.size());
        for (const auto& row : j) {
            require(row.is_array() && static_cast<int>(row.size()) == n,
                    what + ": ragged or non-square matrix");
            for (const auto& v : row) m.push_back(v.get<double>());
        }
    } else {
        const auto len = static_cast<int>(j.size());
        n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(len))));
        require(n * n == len, what + ": flat matrix length is not a perfect square");
        for (const auto& v : j) m.push_back(v.get<double>());
    }
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k)
            require(std::fabs(m[static_cast<std::size_t>(i * n + k)] -
                              m[static_cast<std::size_t>(k * n + i)]) <= 1e-12,
                    what + ": matrix must be symmetric");
    if (dim_out) *dim_out = n;
    return m;
}

inline nlohmann::json emit_matrix(const std::vector<double>& m, int n) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < n; ++j) row.push_back(m[static_cast<std::size_t>(i * n + j)]);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace haxc::detail
