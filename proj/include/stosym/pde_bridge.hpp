#pragma once

#include "stosym/determining.hpp"

#include <utility>

namespace stosym {

/// Image of a Doob symmetry (V, k) as a symmetry of the backward equation:
///   Xi = Y - k u d_u (same k, repackaged).
/// Throws DoobResidualNonzero when (V, k) fails the Doob conditions.
PdeSymmetry sde_to_pde(const Sde& sde, const InfTransform& v, const Expr& k);

/// Inverse map: tau = L(m), H = sigma^T grad k and
///   C = (sigma^T sigma)^{-1} sigma^T (dY sigma - Y(sigma)) - tau I / 2.
/// Throws PdeResidualNonzero or SingularSigma. Returns (V, k).
std::pair<InfTransform, Expr> pde_to_sde(const Sde& sde, const PdeSymmetry& xi);

/// sde -> pde -> sde reproduces (V, k) exactly.
bool round_trip_check(const Sde& sde, const InfTransform& v, const Expr& k);

}  // namespace stosym
