#pragma once

// Built-in catalog: the worked examples as Theory objects plus hand-assembled
// expected objects for regression tests.

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "mfc/symmetry.hpp"

namespace mfc {

using Expected = std::variant<bool, Expr, std::vector<Expr>, DiffForm>;

struct CatalogEntry {
    std::string id;
    Theory theory;
    // keys: "legendre.momenta" (Z multimomentum order), "legendre.p", "cartan_form",
    // "omega_L", "euler_lagrange", "momentum_map.<gen>", "lagrangian_momentum_map.<gen>",
    // "noether_current.<gen>", "variation_of_L.<gen>", "stress_energy", ...
    std::map<std::string, Expected> expected;

    const Expected& at(const std::string& key) const;
};

// generic L(t, q, v) on R x Q, dim Q = N; reparametrization generator chi(t) d/dt
Theory make_particle_mechanics(int N);
// L = -m sqrt(-eta_AB v^A v^B) on R x R^4
Theory make_relativistic_particle();
// covector A on 4-dim spacetime; Minkowski numbers or a parametric metric field g
Theory make_maxwell(bool fixed_minkowski);
Theory make_chern_simons();
// phi^A into a d-dim target with metric G_AB(phi), variational worldsheet metric h
Theory make_polyakov_string(int d);

CatalogEntry particle_mechanics_entry(int N);
CatalogEntry relativistic_particle_entry();
CatalogEntry maxwell_entry(bool fixed_minkowski);
CatalogEntry chern_simons_entry();
CatalogEntry polyakov_string_entry(int d);

// the five built-ins with default sizes (N = 2, d = 2); Maxwell appears fixed and parametrized
std::vector<CatalogEntry> catalog();

// the engine-derived object for an expected-object key (generic section for currents)
Expected derive_expected(const Theory& t, const std::string& key);

struct Comparison {
    bool equal = false;
    bool numeric_fallback = false;  // symbolic test failed, equal_numeric at tol passed
};
// equal_symbolic, then equal_numeric(n_samples, tol, seed)
Comparison compare_expected(const Expected& got, const Expected& want, int n_samples = 8, double tol = 1e-9,
                            std::uint64_t seed = 1);

// shared symbols
SymbolId relativistic_mass();
SymbolId mechanics_lagrangian_symbol(int N);
SymbolId target_metric_symbol(const JetBundle& jb, int A, int B);  // string G_AB(phi)
SymbolId gen_chi();                      // chi (gauge / reparametrization)
SymbolId gen_lambda();                   // conformal factor
SymbolId gen_xi(int mu);                 // xi^mu
SymbolId gen_jet(SymbolId s, std::vector<int> idx);  // s_{,idx}

// Levi-Civita symbol of a permutation of 0..n-1 (0 on repeats)
int levi_civita_sign(const std::vector<int>& idx);

}  // namespace mfc
