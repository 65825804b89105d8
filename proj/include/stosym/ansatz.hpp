#pragma once

#include "stosym/determining.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stosym {

enum class SolveMode { General, Doob };

/// Candidate functions for each unknown component of (Y, C, tau, H[, k]).
/// Component keys: "Y[x]", "C[1][2]" (upper triangle, 1-based), "tau",
/// "H[1]", "k". Components without an override use `functions`.
struct AnsatzBasis {
    ExprVec functions;
    std::map<std::string, ExprVec> overrides;

    const ExprVec& for_component(const std::string& key) const;
};

/// Component keys in the layout order used for the unknowns.
std::vector<std::string> component_keys(const Sde& sde, SolveMode mode);

struct SymmetryGenerator {
    InfTransform V;
    std::optional<Expr> k;  // set in Doob mode
};

struct SymmetrySpace {
    SolveMode mode = SolveMode::General;
    std::vector<SymmetryGenerator> generators;
    std::size_t unknowns = 0;
    std::size_t equations = 0;
    std::size_t dimension() const { return generators.size(); }
};

/// Solves the determining equations (General) or the Doob conditions
/// (Doob) restricted to linear combinations of the basis functions. The
/// system is linear over the field of rational functions of the
/// parameters; it is reduced exactly and each returned generator is
/// re-verified against the determining equations.
SymmetrySpace solve(const Sde& sde, const AnsatzBasis& basis, SolveMode mode);

/// Coefficients expressing `target` in the span of `span`, or nullopt.
/// In Doob mode the potentials take part in the comparison.
std::optional<std::vector<Coefficient>> express_in_span(const std::vector<SymmetryGenerator>& span,
                                                        const SymmetryGenerator& target, SolveMode mode);
bool contains(const SymmetrySpace& space, const SymmetryGenerator& g);

struct StructureConstant {
    std::size_t i = 0;
    std::size_t j = 0;
    std::vector<Coefficient> coefficients;  // [g_i, g_j] = sum_k c_k g_k
};

struct ClosureReport {
    bool closed = true;
    std::vector<StructureConstant> constants;
    std::optional<std::pair<std::size_t, std::size_t>> offending;
};

/// Checks that pairwise brackets stay in the span of the given generators.
ClosureReport closure_check(const Sde& sde, const std::vector<InfTransform>& generators);

/// Closure of the nonzero vector-field parts of a solved space. Members
/// with Y = C = tau = H = 0 (constant potentials) are skipped; `members`
/// receives the indices that took part.
ClosureReport closure_check(const Sde& sde, const SymmetrySpace& space, std::vector<std::size_t>* members = nullptr);

}  // namespace stosym
