#pragma once

// Generators, covariant momentum maps, Noether currents and the identities
// relating them.

#include <map>
#include <utility>
#include <vector>

#include "mfc/variational.hpp"

namespace mfc {

class NoParametricMetric : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

VectorField generator_on_Y(const JetBundle& jb, const GeneratorFamily& g);
VectorField generator_on_Y(const Theory& t, const GeneratorFamily& g);

// copy of g with every jet parameter (and its jets) renamed family -> family + tag
GeneratorFamily rename_parameters(const GeneratorFamily& g, const std::string& tag);
// the zero element of the algebra
GeneratorFamily zero_generator(const JetBundle& jb);
// Lie algebra bracket [xi, zeta], realized on Y as [zeta_Y, xi_Y]
GeneratorFamily algebra_bracket(const JetBundle& jb, const GeneratorFamily& a, const GeneratorFamily& b);

// delta_xi L = d_mu L xi^mu + d_A L xi^A + dL/dv^A_mu (xi^A_{,mu} - v^A_nu xi^nu_{,mu} + v^B_mu d_B xi^A) + L xi^mu_{,mu}
Expr variation_of_L(const Theory& t, const GeneratorFamily& g);

// (p_A^mu xi^A + p xi^mu) d^n x_mu - p_A^mu xi^nu dy^A ^ d^{n-1}x_{mu nu}
DiffForm covariant_momentum_map(const JetBundle& jb, const VectorField& xiY);
DiffForm covariant_momentum_map(const Theory& t, const GeneratorFamily& g);
// xi_Z -| Theta
DiffForm momentum_map_contraction(const JetBundle& jb, const VectorField& xiY);

// J^L(xi) by the coordinate formula, as FL^* J(xi), and as xi_{J1Y} -| Theta_L
DiffForm lagrangian_momentum_map(const Theory& t, const GeneratorFamily& g);
DiffForm lagrangian_momentum_map_pullback(const Theory& t, const GeneratorFamily& g);
DiffForm lagrangian_momentum_map_contraction(const Theory& t, const GeneratorFamily& g);

// (L_xi phi)^A = phi^A_{,nu} xi^nu - xi^A o phi, one per fiber coordinate
std::vector<Expr> lie_derivative_of_section(const JetBundle& jb, const SymbolicSection& phi, const GeneratorFamily& g);

// (j^1 phi)^* J^L(xi), an n-form on X
DiffForm noether_current(const Theory& t, const GeneratorFamily& g, const SymbolicSection& phi);
// the same current written as [-dL/dv^A_mu (L_xi phi)^A + L xi^mu] d^n x_mu on j^1 phi
DiffForm noether_current_lie_form(const Theory& t, const GeneratorFamily& g, const SymbolicSection& phi);

struct DivergenceIdentity {
    Expr lhs;       // coefficient of d^{n+1}x in d[(j^1 phi)^* J^L(xi)], generic phi
    Expr rhs;       // (dL/dphi^A)(L_xi phi)^A + delta_xi L, parametric fibers contributing dL/dy^A
    Expr residual;  // lhs - rhs
};
DivergenceIdentity noether_divergence_identity(const Theory& t, const GeneratorFamily& g);

// {J(xi), J(zeta)} = zeta_Z -| xi_Z -| Omega
DiffForm momentum_bracket(const Theory& t, const GeneratorFamily& a, const GeneratorFamily& b);
struct BracketIdentity {
    DiffForm bracket;   // zeta_Z -| xi_Z -| Omega
    DiffForm exact;     // d(i_{xi_Z} i_{zeta_Z} Theta)
    DiffForm commutator;  // J([xi, zeta])
    DiffForm residual;  // bracket - exact - commutator
};
BracketIdentity momentum_bracket_identity(const Theory& t, const GeneratorFamily& a, const GeneratorFamily& b);

// L_{zeta_Z} J(xi) - J([xi, zeta])
DiffForm equivariance_infinitesimal(const Theory& t, const GeneratorFamily& a, const GeneratorFamily& b);

// xi_Z o FL - T FL . xi_{J1Y}, one entry per Z coordinate
std::vector<Expr> legendre_equivariance_check(const Theory& t, const GeneratorFamily& g);
// L_{xi_{J1Y}} Theta_L
DiffForm cartan_invariance_check(const Theory& t, const GeneratorFamily& g);

struct TransitivityResult {
    bool verdict = false;
    int rank = 0;
    // a fiber direction (one weight per fiber coordinate) outside the span when verdict is false
    std::vector<double> witness;
};
// rank of the fiber components over the jet parameters, truncated at first jets, at random points
TransitivityResult vertical_transitivity(const Theory& t, int n_samples = 5, std::uint64_t seed = 1);

// T^{sr} = 2 dL/dg_{sr} in the symmetric convention, keyed by (s, r) with s <= r
std::map<std::pair<int, int>, Expr> stress_energy_from_parametric_metric(const Theory& t);

struct ConverseExtraction {
    std::vector<SymbolId> unknowns;  // formal E_A standing for dL/dphi^A, one per fiber coordinate
    std::vector<Expr> equations;     // coefficients of the parameter monomials, affine in unknowns
    std::vector<bool> forced;        // linear part pins unknown A (at sampled points)
};
// setting d[current] = 0 for all parameter values, with the variational derivatives kept formal
ConverseExtraction converse_noether(const Theory& t, const GeneratorFamily& g, int n_samples = 3,
                                    std::uint64_t seed = 1);

// unknowns pinned to zero by a homogeneous linear system, by kernel rows at sampled points
std::vector<bool> forced_unknowns(const std::vector<Expr>& equations, const std::vector<SymbolId>& unknowns,
                                  int n_samples = 3, std::uint64_t seed = 1);

// The extraction read in two steps: equations in one field's unknowns only (coefficients of
// parameter derivatives, typically), then the rest with the unknowns those pin set to zero.
struct ConverseStages {
    std::vector<Expr> single_field;
    std::vector<bool> forced_single;  // per unknown
    std::vector<Expr> contracted;     // what remains of the mixed equations
};
ConverseStages converse_stages(const Theory& t, const ConverseExtraction& ce, int n_samples = 3,
                               std::uint64_t seed = 1);

}  // namespace mfc
