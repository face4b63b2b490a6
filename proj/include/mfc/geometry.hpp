#pragma once

// Coordinate charts and exterior calculus with Expr coefficients.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfc/expr.hpp"

namespace mfc {

class ChartMismatch : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class DegreeZero : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Base-point coordinate x^mu.
SymbolId base_coord(int mu);

class Chart {
public:
    // the first base_dim coords are base coordinates x^0..x^n
    Chart(std::string label, std::vector<SymbolId> coords, int base_dim);

    const std::string& label() const { return label_; }
    const std::vector<SymbolId>& coords() const { return coords_; }
    SymbolId coord(int i) const { return coords_[i]; }
    int dim() const { return int(coords_.size()); }
    int base_dim() const { return base_dim_; }
    int index_of(SymbolId s) const;
    bool has(SymbolId s) const { return index_of(s) >= 0; }
    bool operator==(const Chart& o) const { return label_ == o.label_ && coords_ == o.coords_; }

private:
    std::string label_;
    std::vector<SymbolId> coords_;
    int base_dim_;
    std::unordered_map<SymbolId, int> pos_;
};

using ChartPtr = std::shared_ptr<const Chart>;

// Coordinate partial on a chart. Jet parameters, and field symbols that are not
// coordinates of the chart, are functions of the base point, so a base partial
// also differentiates them through their jet successors.
Expr partial(const Expr& e, const Chart& c, int i);

using Wedge = boost::container::small_vector<std::uint16_t, 6>;

class VectorField;

class DiffForm {
public:
    DiffForm(ChartPtr c, int degree);
    static DiffForm function(ChartPtr c, const Expr& f);
    static DiffForm dcoord(ChartPtr c, int i);
    // coefficient times dz^{idx[0]} ^ dz^{idx[1]} ^ ..., any index order
    static DiffForm monomial(ChartPtr c, const Expr& coeff, std::vector<int> idx);

    const ChartPtr& chart() const { return chart_; }
    int degree() const { return degree_; }
    const std::map<Wedge, Expr>& terms() const { return terms_; }
    Expr coeff(const Wedge& w) const;
    Expr coeff(std::vector<int> idx) const;  // sign-adjusted for unsorted idx
    bool is_zero() const { return terms_.empty(); }

    DiffForm operator+(const DiffForm& o) const;
    DiffForm operator-(const DiffForm& o) const;
    DiffForm operator-() const;
    DiffForm& operator+=(const DiffForm& o) { return *this = *this + o; }
    friend DiffForm operator*(const Expr& f, const DiffForm& a);
    bool operator==(const DiffForm& o) const;

    // apply f to every coefficient
    template <class F>
    DiffForm map_coeffs(F&& f) const {
        DiffForm r(chart_, degree_);
        for (auto& [w, c] : terms_) r.add(w, f(c));
        return r;
    }

    void add(const Wedge& sorted, const Expr& c);
    std::string str() const;

private:
    ChartPtr chart_;
    int degree_;
    std::map<Wedge, Expr> terms_;
};

class VectorField {
public:
    VectorField(ChartPtr c);
    VectorField(ChartPtr c, std::vector<Expr> comps);
    static VectorField coordinate(ChartPtr c, int i);

    const ChartPtr& chart() const { return chart_; }
    const std::vector<Expr>& components() const { return comps_; }
    const Expr& operator[](int i) const { return comps_[i]; }
    Expr& operator[](int i) { return comps_[i]; }
    bool is_zero() const;

    VectorField operator+(const VectorField& o) const;
    VectorField operator-(const VectorField& o) const;
    friend VectorField operator*(const Expr& f, const VectorField& v);
    bool operator==(const VectorField& o) const;

    Expr apply(const Expr& f) const;  // V(f)
    std::string str() const;

private:
    ChartPtr chart_;
    std::vector<Expr> comps_;
};

VectorField bracket(const VectorField& v, const VectorField& w);

struct ChartMap {
    ChartPtr source;
    ChartPtr target;
    std::vector<Expr> components;                  // one per target coord, in source coords
    std::optional<std::vector<Expr>> inverse;      // one per source coord, in target coords
    // values for implicit non-coordinate symbols (e.g. jets of parametric fields)
    std::unordered_map<SymbolId, Expr> extra;

    static ChartMap identity(ChartPtr c);
    // target-coordinate -> component bindings for substitution
    std::unordered_map<SymbolId, Expr> bindings() const;
    Expr pull(const Expr& f) const;  // f o m
};

ChartMap compose(const ChartMap& outer, const ChartMap& inner);  // outer o inner
// true when both compositions with the inverse reduce to the identity
bool check_inverse(const ChartMap& m, int n_samples = 5, std::uint64_t seed = 1);

DiffForm wedge(const DiffForm& a, const DiffForm& b);
DiffForm exterior_d(const DiffForm& a);
DiffForm interior(const VectorField& v, const DiffForm& a);
DiffForm pullback(const ChartMap& m, const DiffForm& a);
DiffForm lie_derivative(const VectorField& v, const DiffForm& a);

// d^{n+1}x, d^n x_mu = d_mu -| d^{n+1}x, d^{n-1}x_{mu nu} = d_nu -| d_mu -| d^{n+1}x
DiffForm volume(ChartPtr c);
DiffForm volume_n(ChartPtr c, int mu);
DiffForm volume_nm1(ChartPtr c, int mu, int nu);

bool equal_symbolic(const DiffForm& a, const DiffForm& b);
bool equal_numeric(const DiffForm& a, const DiffForm& b, int n_samples, double tol, std::uint64_t seed);

}  // namespace mfc
