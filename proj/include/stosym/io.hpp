#pragma once

#include "stosym/ansatz.hpp"
#include "stosym/montecarlo.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace stosym {

/// Parses the expression grammar:
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' exponent)?      exponent: integer or '(' [-]p[/q] ')'
///   atom   := number | symbol | '(' expr ')' | 'exp' '(' expr ')' | 'sqrt' '(' expr ')'
/// Division needs a single-term divisor; decimals are read as exact
/// rationals. Symbols must be declared variables or parameters.
Expr parse_expr(const std::string& text, const std::set<std::string>& vars, const std::set<std::string>& params);

/// Canonical text; parse_expr(to_string(e)) == e.
std::string to_string(const Expr& e);
std::string to_string(const Coefficient& c);
std::string to_string(const ExprVec& v);
std::string to_string(const ExprMat& m);
std::string to_string(const InfTransform& v);

struct NamedSymmetry {
    std::string name;
    InfTransform V;
    std::optional<Expr> k;
};

struct NamedTransform {
    std::string name;
    FiniteTransform T;
};

struct NamedPde {
    std::string name;
    PdeSymmetry xi;
};

/// Model file: INI-like sections [model], [symmetry.NAME],
/// [transform.NAME], [pde.NAME], [ansatz] and [mc]; '#' starts a comment.
struct ModelFile {
    Sde sde;
    std::vector<NamedSymmetry> symmetries;
    std::vector<NamedTransform> transforms;
    std::vector<NamedPde> pdes;
    std::optional<AnsatzBasis> ansatz;
    std::optional<McConfig> mc;

    const NamedSymmetry& symmetry(const std::string& name) const;
    const NamedTransform& transform(const std::string& name) const;
};

ModelFile parse_model(const std::string& text);
std::string print_model(const ModelFile& f);
ModelFile read_model_file(const std::string& path);

/// Splits a bracketed list "[a, b, [c, d]]" at top-level commas.
std::vector<std::string> split_list(const std::string& text);

}  // namespace stosym
