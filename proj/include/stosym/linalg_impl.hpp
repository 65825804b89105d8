#pragma once

namespace stosym {

template <typename Key>
std::optional<std::vector<Coefficient>> solve_columns(const std::vector<std::map<Key, Coefficient>>& columns,
                                                      const std::map<Key, Coefficient>& target) {
    const std::size_t n = columns.size();
    std::map<Key, SparseRow> by_key;
    for (std::size_t j = 0; j < n; ++j) {
        for (const auto& [key, c] : columns[j]) {
            if (!c.is_zero()) by_key[key][j] = c;
        }
    }
    for (const auto& [key, c] : target) {
        if (!c.is_zero()) by_key[key][n] = c;
    }
    std::vector<SparseRow> rows;
    rows.reserve(by_key.size());
    for (auto& [key, row] : by_key) rows.push_back(std::move(row));
    const Rref r = row_reduce(std::move(rows), n + 1);

    std::vector<Coefficient> x(n);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const std::size_t p = r.pivot_columns[i];
        if (p == n) return std::nullopt;  // 0 = nonzero
        auto it = r.rows[i].find(n);
        if (it != r.rows[i].end()) x[p] = it->second;
    }
    return x;
}

}  // namespace stosym
