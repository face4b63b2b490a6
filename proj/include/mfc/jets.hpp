#pragma once

// Configuration bundle, first and second jet charts, multiphase space Z, and the
// prolongation / canonical-lift constructions between them.

#include <memory>
#include <string>
#include <vector>

#include "mfc/geometry.hpp"

namespace mfc {

class DuplicateFieldName : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class InvalidBundle : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class NotProjectable : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class MissingInverse : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class IndexStructure { Scalar, Covector, Sym2 };

struct FieldSpec {
    std::string name;
    IndexStructure index = IndexStructure::Scalar;
    bool variational = true;
    int target_dim = 1;  // scalar multiplets y^0..y^{k-1}
    int negatives = 1;   // sym2: number of negative eigenvalues (sampling only)
};

struct BundleSpec {
    int base_dim = 1;  // n+1
    std::vector<FieldSpec> fields;
};

// A jet parameter: an arbitrary function on X represented by its value symbol;
// derivatives are its jet successors.
SymbolId jet_parameter(const std::string& name, std::vector<int> comp = {}, std::vector<bool> up = {});

class JetBundle {
public:
    explicit JetBundle(BundleSpec spec);

    const BundleSpec& spec() const { return spec_; }
    int base_dim() const { return spec_.base_dim; }
    const ChartPtr& X() const { return X_; }
    const ChartPtr& Y() const { return Y_; }
    const ChartPtr& J1Y() const { return J1Y_; }
    const ChartPtr& J2Y() const { return J2Y_; }
    const ChartPtr& Z() const { return Z_; }

    // fiber coordinates y^A of Y in chart order (all fields, parametric included)
    int fiber_dim() const { return int(fiber_.size()); }
    SymbolId y(int A) const { return fiber_[A]; }
    const std::vector<SymbolId>& fiber() const { return fiber_; }
    bool variational(int A) const { return var_[A]; }
    std::vector<int> variational_fibers() const;
    int field_of(int A) const { return field_of_[A]; }
    int fiber_index(SymbolId s) const;  // -1 if not a fiber coordinate
    // fiber coordinates of one field, in chart order
    std::vector<int> field_fibers(int field) const;
    int field_index(const std::string& name) const;  // -1 if absent

    SymbolId x(int mu) const { return base_coord(mu); }
    SymbolId v(int A, int mu) const;
    SymbolId w(int A, int mu, int nu) const;
    SymbolId p() const;
    SymbolId mom(int A, int mu) const;  // p_A^mu, variational A only

private:
    BundleSpec spec_;
    ChartPtr X_, Y_, J1Y_, J2Y_, Z_;
    std::vector<SymbolId> fiber_;
    std::vector<bool> var_;
    std::vector<int> field_of_;
    std::unordered_map<SymbolId, int> fiber_pos_;
};

using JetBundlePtr = std::shared_ptr<const JetBundle>;

JetBundlePtr jet_charts(const BundleSpec& b);

// Section of Y -> X: one component per fiber coordinate, in base coordinates.
// Components may also be the fiber symbols themselves (a generic section).
struct SymbolicSection {
    std::vector<Expr> components;
};

SymbolicSection generic_section(const JetBundle& jb);

// j^1 phi : X -> J1Y (order 1) or j^2 phi : X -> J2Y (order 2). Jets of parametric
// fields go into ChartMap::extra.
ChartMap prolong_section(const JetBundle& jb, const SymbolicSection& phi, int order = 1);

// D_mu e = d_mu e + v^A_mu d e/d y^A + w^A_{mu nu} d e/d v^A_nu + ...
Expr total_derivative(const JetBundle& jb, const Expr& e, int mu);

// throws NotProjectable when a base component depends on fiber data
void require_projectable(const JetBundle& jb, const VectorField& V);

VectorField prolong_vector(const JetBundle& jb, const VectorField& V);
ChartMap prolong_automorphism(const JetBundle& jb, const ChartMap& eta);

DiffForm canonical_theta(const JetBundle& jb);
DiffForm canonical_omega(const JetBundle& jb);

VectorField lift_vector_to_Z(const JetBundle& jb, const VectorField& V);
ChartMap lift_automorphism_to_Z(const JetBundle& jb, const ChartMap& eta);

// p + p_A^mu v^A_mu for a Z point and a J1Y point given by their chart components
Expr dual_pairing(const JetBundle& jb, const std::vector<Expr>& z, const std::vector<Expr>& gamma);

// Extend a Y-field to a chart containing Y's coordinates, padding with zeros.
VectorField extend(const VectorField& V, const ChartPtr& to);

}  // namespace mfc
