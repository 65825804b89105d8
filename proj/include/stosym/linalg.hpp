#pragma once

#include "stosym/param_poly.hpp"

#include <map>
#include <optional>
#include <vector>

namespace stosym {

/// Sparse row over the field of rational functions in the parameters.
using SparseRow = std::map<std::size_t, Coefficient>;

/// Reduced row echelon form computed by exact Gauss-Jordan elimination.
/// Columns are eliminated in increasing index order.
struct Rref {
    std::size_t columns = 0;
    std::vector<SparseRow> rows;                   // nonzero rows only
    std::vector<std::size_t> pivot_columns;        // pivot of rows[i]
    std::size_t rank() const { return rows.size(); }
};

Rref row_reduce(std::vector<SparseRow> rows, std::size_t columns);

/// Basis of the right nullspace: one vector per free column, with a one
/// at that column and zeros at the other free columns.
std::vector<std::vector<Coefficient>> nullspace(const Rref& r);

/// Solves sum_j x_j columns[j] = target. Inputs are column vectors given
/// sparsely by row key; nullopt when inconsistent. The solution is the one
/// with zero free variables.
template <typename Key>
std::optional<std::vector<Coefficient>> solve_columns(const std::vector<std::map<Key, Coefficient>>& columns,
                                                      const std::map<Key, Coefficient>& target);

}  // namespace stosym

#include "stosym/linalg_impl.hpp"
