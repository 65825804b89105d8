#pragma once

#include "stosym/transform.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stosym {

struct ResidualEntry {
    std::string label;  // e.g. "drift[x]", "diff[x][1]", "doob.k"
    Expr residual;
    /// Informational entries are reported but do not decide the verdict.
    bool informational = false;
};

struct ResidualReport {
    std::vector<ResidualEntry> entries;
    std::vector<std::string> notes;

    bool all_zero() const;
    /// Labels of counted entries whose residual is nonzero.
    std::vector<std::string> failing() const;
    const ResidualEntry* find(const std::string& label) const;
};

/// Determining equations for V to be a symmetry of the SDE:
///   drift:     Y(mu) - L(Y) - sigma H + tau mu = 0
///   diffusion: Y(sigma) - dY sigma + tau sigma / 2 + sigma C = 0
ResidualReport sde_residual(const Sde& sde, const InfTransform& v);
bool is_symmetry(const Sde& sde, const InfTransform& v);

/// Conditions for V to be a symmetry whose Girsanov generator is the
/// gradient of a space-time harmonic potential k. The drift uses the
/// tau-mu form; the variant without tau mu is attached as informational
/// entries and a note is added when the two disagree.
ResidualReport doob_residual(const Sde& sde, const InfTransform& v, const Expr& k);
bool is_doob_symmetry(const Sde& sde, const InfTransform& v, const Expr& k);

/// Infinitesimal symmetry of the Kolmogorov backward equation
/// d_z u + L_x u = 0 in the form
///   Xi = m(x,z) d_z + phi(x,z) d_x - k(x,z) u d_u,
/// so k matches the potential of the corresponding Doob symmetry.
/// phi is indexed by the spatial variables in declaration order.
struct PdeSymmetry {
    Expr m;
    ExprVec phi;
    Expr k;
    friend bool operator==(const PdeSymmetry&, const PdeSymmetry&) = default;
};

/// Full vector field (phi with m at the time coordinate).
ExprVec pde_field(const Sde& sde, const PdeSymmetry& xi);
/// Determining equations of the backward equation; needs a time variable.
ResidualReport pde_residual(const Sde& sde, const PdeSymmetry& xi);
bool is_pde_symmetry(const Sde& sde, const PdeSymmetry& xi);

/// Floating re-evaluation of the SDE determining equations at random valid
/// points. The equations are assembled in double precision from the
/// symbolic derivatives of the individual components, so a normal-form
/// error in the exact residual shows up here. Returns the largest absolute
/// residual seen.
double probe_sde_residual(const Sde& sde, const InfTransform& v, int points, std::uint64_t seed = 3);

}  // namespace stosym
