#pragma once

#include "stosym/sde.hpp"

#include <optional>

namespace stosym {

/// Finite random transformation (Phi, B, eta, h): spatial map, rotation of
/// the driving noise, time-change density and Girsanov drift.
struct FiniteTransform {
    ExprVec phi;
    std::optional<ExprVec> phi_inv;
    ExprMat B;  // m x m, orthogonal with det +1
    Expr eta{1};
    ExprVec h;  // length m
};

/// Infinitesimal generator (Y, C, tau, H): vector field, antisymmetric
/// rotation generator, time-change rate and Girsanov generator.
struct InfTransform {
    ExprVec Y;  // length n
    ExprMat C;  // m x m antisymmetric
    Expr tau;
    ExprVec H;  // length m

    static InfTransform zero(std::size_t n, std::size_t m);
    bool is_zero() const;
    InfTransform operator+(const InfTransform& o) const;
    InfTransform operator*(const Coefficient& c) const;
    friend bool operator==(const InfTransform& a, const InfTransform& b) {
        return a.Y == b.Y && a.C == b.C && a.tau == b.tau && a.H == b.H;
    }
};

FiniteTransform identity_transform(const std::vector<std::string>& vars, std::size_t m);

/// Checks sizes, B^T B = I, det B = 1 and C antisymmetric; throws Error.
void validate(const Sde& sde, const FiniteTransform& t);
void validate(const Sde& sde, const InfTransform& v);

/// Image SDE: drift (L(Phi) + dPhi sigma h)/eta and diffusion
/// dPhi sigma B^{-1}/sqrt(eta), both pulled back through Phi^{-1}.
Sde et_apply(const Sde& sde, const FiniteTransform& t);

/// second o first.
FiniteTransform compose(const std::vector<std::string>& vars, const FiniteTransform& second,
                        const FiniteTransform& first);
FiniteTransform invert(const std::vector<std::string>& vars, const FiniteTransform& t);

/// Conjugation of an infinitesimal generator by a finite transformation.
InfTransform push_forward(const std::vector<std::string>& vars, const FiniteTransform& t, const InfTransform& v);

/// Lie bracket of two infinitesimal generators.
InfTransform bracket(const std::vector<std::string>& vars, const InfTransform& v1, const InfTransform& v2);

/// f o Phi; identity maps are skipped.
Expr compose_with(const std::vector<std::string>& vars, const Expr& f, const ExprVec& phi);
ExprVec compose_with(const std::vector<std::string>& vars, const ExprVec& f, const ExprVec& phi);
ExprMat compose_with(const std::vector<std::string>& vars, const ExprMat& f, const ExprVec& phi);

}  // namespace stosym
