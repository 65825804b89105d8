#pragma once

#include "stosym/determining.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stosym {

enum class SymmetryKind { Doob, AlmostDoob, NonDoob, Undecided };

std::string to_string(SymmetryKind k);

struct SymmetryClass {
    SymmetryKind kind = SymmetryKind::Undecided;
    /// Potential: space-time harmonic for Doob, only a gradient
    /// potential (sigma^T grad k = H) for AlmostDoob.
    std::optional<Expr> k;
    /// For NonDoob: variables i, j with d_j g_i != d_i g_j.
    std::optional<std::pair<std::string, std::string>> witness;
    std::string reason;
    /// Whether V passes the symmetry determining equations.
    bool is_symmetry = false;
};

/// Potentials k with sigma^T grad k = H. The general solution is
/// `particular` plus an arbitrary function of `free_vars` (the variables
/// whose diffusion rows vanish). The particular solution carries no
/// constant term.
struct PotentialRecovery {
    enum class Status { Found, NotClosed, Undecided } status = Status::Undecided;
    Expr particular;
    std::vector<std::string> free_vars;
    std::optional<std::pair<std::string, std::string>> witness;
    std::string reason;
};

PotentialRecovery recover_k(const Sde& sde, const ExprVec& H);

/// Classifies V as Doob / almost Doob / non-Doob. Undecided when the
/// potential would leave the expression class or the noise is not square
/// on the diffusive variables.
SymmetryClass classify(const Sde& sde, const InfTransform& v);

/// Residuals of the finite Doob-pair conditions
///   h = sigma^T grad hpot,  |h|^2 / 2 + L(hpot) = 0.
ResidualReport doob_condition_residual(const Sde& sde, const ExprVec& h, const Expr& hpot);

/// Potential turning h into a finite Doob pair, when one exists in class.
std::optional<Expr> recover_doob_potential(const Sde& sde, const ExprVec& h);

/// Ingredients of the Radon-Nikodym density
///   exp( int theta dW - int |theta|^2 / 2 dt ),
/// with the pathwise closed form exp(hpot(X_T) - hpot(X_0)) when (h, hpot)
/// is a Doob pair.
struct DensityRecipe {
    ExprVec theta;
    Expr half_norm;
    std::optional<Expr> doob_potential;
};

/// Requires a nonexplosive SDE; hpot is used only if it satisfies the
/// Doob-pair conditions.
DensityRecipe density_recipe(const Sde& sde, const ExprVec& h, const std::optional<Expr>& hpot = std::nullopt);

}  // namespace stosym
