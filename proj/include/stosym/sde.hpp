#pragma once

#include "stosym/expr.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace stosym {

/// Open interval (lo, hi); infinite ends allowed.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x > lo && x < hi; }
    bool is_unbounded() const { return std::isinf(lo) && std::isinf(hi); }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Autonomous SDE dX = mu(X) dt + sigma(X) dW on n state variables driven
/// by an m-dimensional Brownian motion. One variable may be flagged as the
/// adjoined time coordinate, whose drift is 1 and diffusion row is zero.
struct Sde {
    std::string name;
    std::vector<std::string> vars;
    std::optional<std::string> time_var;
    std::vector<std::string> params;
    std::map<std::string, Interval> domain;
    ExprVec drift;
    ExprMat diffusion;  // n x m
    bool nonexplosive = false;

    std::size_t dim() const { return vars.size(); }
    std::size_t noise_dim() const { return diffusion.empty() ? 0 : diffusion.front().size(); }
    std::size_t index_of(const std::string& var) const;
    std::set<std::string> var_set() const { return {vars.begin(), vars.end()}; }
    std::set<std::string> param_set() const { return {params.begin(), params.end()}; }
    Interval bounds(const std::string& var) const;
    /// Spatial variables, i.e. all variables except the time coordinate.
    std::vector<std::string> spatial_vars() const;

    /// Throws DeclarationError / Error when an invariant is violated.
    void validate() const;
    void check(const Expr& e, const std::string& context) const;
};

/// Y(f) = Y^i d_i f for a vector field given by its components.
Expr apply_field(const std::vector<std::string>& vars, const ExprVec& field, const Expr& f);
ExprVec apply_field(const std::vector<std::string>& vars, const ExprVec& field, const ExprVec& f);
ExprMat apply_field(const std::vector<std::string>& vars, const ExprVec& field, const ExprMat& f);
/// Jacobian J[i][k] = d_k f^i.
ExprMat jacobian(const std::vector<std::string>& vars, const ExprVec& f);
ExprVec gradient(const std::vector<std::string>& vars, const Expr& f);

/// Infinitesimal generator L(f) = A^{ij} d_i d_j f + mu^i d_i f, A = sigma sigma^T / 2.
Expr generator_apply(const Sde& sde, const Expr& f);
ExprVec generator_apply(const Sde& sde, const ExprVec& f);

/// A = sigma . sigma^T / 2.
ExprMat diffusion_square(const Sde& sde);

struct RankProbe {
    int rank = 0;
    bool constant = true;
    std::vector<int> observed;  // one rank per probe point
};

/// Numerical rank of A at random valid points (plus the origin when it is
/// inside the domain). Variables are drawn from their domain intersected
/// with a window of width 10; parameters from [1/2, 2].
RankProbe rank_probe(const Sde& sde, int trials, std::uint64_t seed = 7);

/// Draws a point satisfying the domain bounds. Unbounded variables are
/// drawn from (-window, window); half-bounded ones from a window above or
/// below the finite end. Parameters come from [1/2, 2] unless fixed.
std::map<std::string, double> sample_point(const Sde& sde, std::mt19937_64& rng, double window = 2.0,
                                           const std::map<std::string, double>& fixed_params = {});

}  // namespace stosym
