#pragma once

#include "stosym/doob.hpp"
#include "stosym/io.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace stosym {

struct ExpectedClass {
    std::string symmetry;
    SymmetryKind kind = SymmetryKind::Undecided;
    std::optional<std::pair<std::string, std::string>> witness;
};

/// A generator of the backward-equation algebra, stored as a [pde.NAME]
/// section of the model, and the Doob symmetry it comes from:
///   sde_to_pde(V_source, k_source) == scale * Xi.
/// An empty source stands for the trivial symmetry V = 0 with k = 1.
struct ExpectedPde {
    std::string generator;
    std::string source;
    Rational scale = 1;
};

struct CatalogEntry {
    std::string name;
    ModelFile file;  // model, symmetries (with k), transforms, PDE generators, ansatz basis, MC defaults
    std::vector<ExpectedClass> classes;
    std::vector<ExpectedPde> pde_map;
    std::vector<std::string> notes;

    const Sde& sde() const { return file.sde; }
    const NamedSymmetry& symmetry(const std::string& name) const { return file.symmetry(name); }
    const PdeSymmetry& pde(const std::string& name) const;
};

/// bm1d, ou, cir, bm2d.
std::vector<std::string> catalog_names();

/// Throws UnknownModel.
CatalogEntry load(const std::string& name);

/// Time-change family of Brownian motion in one or two dimensions,
///   ((alpha x / 2, [alpha y / 2,] int alpha), 0, alpha, -x alpha' / 2 [, -y alpha' / 2]),
/// and its gradient potential k = -alpha' |x|^2 / 4, plus n alpha' z / 4 when
/// alpha'' = 0 (then k is space-time harmonic). alpha is a function of z.
NamedSymmetry bm_alpha_family(const Sde& sde, const std::string& name, const Expr& alpha);

/// Rotation family of two-dimensional Brownian motion,
///   ((beta y, -beta x, 0), [[0, beta], [-beta, 0]], 0, (-y beta', x beta')).
NamedSymmetry bm2d_beta_family(const Sde& sde, const std::string& name, const Expr& beta);

struct SymmetryCheck {
    std::string symmetry;
    ResidualReport residual;
    std::optional<ResidualReport> doob;  // for entries expected to be Doob
    double probe_max = 0.0;
    bool pass = false;
};

struct ClassCheck {
    std::string symmetry;
    SymmetryKind expected = SymmetryKind::Undecided;
    SymmetryClass actual;
    bool pass = false;
};

struct BridgeCheck {
    std::string generator;
    std::string source;
    Rational scale = 1;
    bool match = false;       // sde_to_pde equals scale * expected generator
    bool pde_symmetry = false;  // the image passes the PDE determining equations
    bool round_trip = false;  // pde_to_sde recovers (V, k)
    bool pass = false;
};

/// Gradient potentials stored for almost-Doob entries: sigma^T grad k = H
/// holds while L(k) != 0.
struct RemarkCheck {
    std::string symmetry;
    bool gradient = false;
    bool not_harmonic = false;
    bool pass = false;
};

struct VerifyReport {
    std::string model;
    std::vector<SymmetryCheck> symmetries;
    std::vector<ClassCheck> classes;
    std::vector<BridgeCheck> bridges;
    std::vector<RemarkCheck> remarks;
    std::vector<std::string> failures;  // labels of everything that failed
    bool pass = false;
};

/// Runs every claim of an entry through the residual systems, the
/// classifier and the PDE bridge. `probes` random points per symmetry are
/// also evaluated numerically.
VerifyReport verify_all(const CatalogEntry& entry, int probes = 100);

/// All catalog symmetries pass the determining equations; throws Error
/// naming the first failing model, symmetry and residual label.
void catalog_self_test();

}  // namespace stosym
