#include "stosym/linalg.hpp"

#include <algorithm>
#include <set>

namespace stosym {

namespace {

// row -= factor * pivot_row
void axpy(SparseRow& row, const Coefficient& factor, const SparseRow& pivot_row) {
    for (const auto& [col, c] : pivot_row) {
        auto it = row.find(col);
        if (it == row.end()) {
            row.emplace(col, -(factor * c));
        } else {
            it->second -= factor * c;
            if (it->second.is_zero()) row.erase(it);
        }
    }
}

}  // namespace

Rref row_reduce(std::vector<SparseRow> rows, std::size_t columns) {
    for (auto& row : rows) {
        for (auto it = row.begin(); it != row.end();) {
            it = it->second.is_zero() ? row.erase(it) : std::next(it);
        }
    }
    rows.erase(std::remove_if(rows.begin(), rows.end(), [](const SparseRow& r) { return r.empty(); }), rows.end());

    Rref out;
    out.columns = columns;
    std::vector<bool> used(rows.size(), false);
    std::vector<std::size_t> pivot_rows;
    for (std::size_t col = 0; col < columns; ++col) {
        // Sparsest unused row with an entry here keeps fill-in small; the
        // reduced form does not depend on this choice.
        std::size_t best = rows.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (used[i] || rows[i].empty() || rows[i].begin()->first != col) continue;
            if (best == rows.size() || rows[i].size() < rows[best].size()) best = i;
        }
        if (best == rows.size()) continue;
        used[best] = true;
        const Coefficient inv = rows[best].begin()->second.inverse();
        for (auto& [c, v] : rows[best]) v *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == best) continue;
            auto it = rows[i].find(col);
            if (it == rows[i].end()) continue;
            const Coefficient factor = it->second;
            axpy(rows[i], factor, rows[best]);
        }
        out.pivot_columns.push_back(col);
        pivot_rows.push_back(best);
    }
    for (std::size_t i : pivot_rows) out.rows.push_back(std::move(rows[i]));
    return out;
}

std::vector<std::vector<Coefficient>> nullspace(const Rref& r) {
    std::set<std::size_t> pivots(r.pivot_columns.begin(), r.pivot_columns.end());
    std::vector<std::vector<Coefficient>> out;
    for (std::size_t f = 0; f < r.columns; ++f) {
        if (pivots.count(f)) continue;
        std::vector<Coefficient> v(r.columns);
        v[f] = Coefficient(1);
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            auto it = r.rows[i].find(f);
            if (it != r.rows[i].end()) v[r.pivot_columns[i]] = -it->second;
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace stosym
