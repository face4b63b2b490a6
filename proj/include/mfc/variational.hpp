#pragma once

// Lagrangian side: covariant Legendre transform, Cartan form, Euler-Lagrange
// derivative and the identities relating them.

#include <map>
#include <string>
#include <vector>

#include "mfc/jets.hpp"

namespace mfc {

class InvalidTheory : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class InvalidLagrangian : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class WNotInEitherClass : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Infinitesimal generator xi_Y = xi^mu d_mu + xi^A d_A, linear in its jet parameters.
struct GeneratorFamily {
    std::string name;
    std::vector<Expr> base;         // xi^mu, base coordinates and jet parameters only
    std::vector<Expr> fiber;        // xi^A, one per fiber coordinate of Y
    std::vector<SymbolId> params;   // value symbols of the jet parameters
    bool symmetry = false;          // claimed to leave L invariant, at least on shell
};

enum class MetricKind { None, Fixed, Parametric, Variational };

struct TheoryMeta {
    bool parametrized = false;
    MetricKind metric = MetricKind::None;
    std::string metric_field;  // Parametric / Variational: the sym2 field carrying it
};

struct Theory {
    std::string name;
    JetBundlePtr bundle;
    Expr L;  // coefficient of d^{n+1}x, on J1Y
    std::vector<GeneratorFamily> generators;
    TheoryMeta meta;

    const GeneratorFamily& generator(const std::string& name) const;
};

// Throws InvalidLagrangian / InvalidTheory when the invariants fail.
void validate_lagrangian(const JetBundle& jb, const Expr& L);
void validate(const Theory& t);

struct LegendreResult {
    std::map<SymbolId, Expr> momenta;  // p_A^mu -> dL/dv^A_mu
    Expr p;                            // covariant Hamiltonian L - p_A^mu v^A_mu
    ChartMap map;                      // FL : J1Y -> Z
};

LegendreResult legendre(const JetBundle& jb, const Expr& L);

// Theta_L by the coordinate formula, by pulling back the canonical form along FL,
// and as L d^{n+1}x + dL/dv^A_mu (dy^A - v^A_nu dx^nu) ^ d^n x_mu.
DiffForm cartan_form(const JetBundle& jb, const Expr& L);
DiffForm cartan_form_pullback(const JetBundle& jb, const Expr& L);
DiffForm cartan_form_contact(const JetBundle& jb, const Expr& L);
DiffForm omega_L(const JetBundle& jb, const Expr& L);

// dL/dy^A - D_mu(dL/dv^A_mu), one per variational fiber coordinate (chart order)
std::vector<Expr> euler_lagrange(const JetBundle& jb, const Expr& L);

// coefficient of d^{n+1}x in (j^1 phi)^*(j^1 V -| Omega_L)
Expr el_via_cartan(const JetBundle& jb, const Expr& L, const SymbolicSection& phi, const VectorField& V);
// V^A (D_mu(dL/dv^A_mu) - dL/dy^A) on j^2 phi, the expected value of el_via_cartan
Expr el_residual_contraction(const JetBundle& jb, const Expr& L, const SymbolicSection& phi,
                             const VectorField& V);

// coefficient of d^{n+1}x in (j^1 phi)^* Theta_L
Expr lagrangian_reconstruction(const JetBundle& jb, const Expr& L, const SymbolicSection& phi);

// (j^1 phi)^*(W -| Omega_L) coefficient for W = T(j^1 phi).w + (Y-vertical part);
// throws WNotInEitherClass when W's Y-part is not tangent to the image of phi.
Expr lemma32_check(const JetBundle& jb, const Expr& L, const SymbolicSection& phi, const VectorField& W);

}  // namespace mfc
