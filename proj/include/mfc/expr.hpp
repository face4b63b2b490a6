#pragma once

// Symbolic scalar expressions over interned chart symbols.
//
// Every Expr is stored in canonical form: a sorted list of terms, each a
// rational coefficient times a monomial of atoms raised to integer powers.
// Atoms are symbols or square roots of canonical radicands; a sqrt atom with
// exponent k stands for radicand^(k/2).

#include <boost/container/small_vector.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mfc/rational.hpp"

namespace mfc {

using SymbolId = std::uint32_t;

enum class SymKind : std::uint8_t {
    BaseCoord,
    FiberCoord,
    Multivelocity,
    SecondMultivelocity,
    Multimomentum,
    CovHamiltonian,
    Metric,
    InverseMetric,
    DerivedScalar,
    FreeParameter,
};

const char* kind_name(SymKind k);
SymKind kind_from_name(const std::string& s);

// Differentiation rule attached to a symbol that is a function of others.
enum class Rule : std::uint8_t { None, InverseMetric, SqrtNegDet, Function };

struct SymbolDesc {
    std::string family;
    SymKind kind = SymKind::FreeParameter;
    std::vector<int> comp;
    std::vector<bool> comp_up;
    bool comp_sym = false;     // two-index symmetric: comp is sorted on interning
    std::vector<int> jet;      // base derivative multi-index, sorted on interning
    bool field = false;        // a field component or one of its jets
    bool variational = false;
    bool xdep = false;         // implicit function of the base point (jet parameter)
    Rule rule = Rule::None;
    std::string metric;        // metric family for InverseMetric / SqrtNegDet
    std::vector<SymbolId> args;  // Function: argument symbols
    std::vector<int> dargs;      // Function: sorted argument positions already differentiated
};

class Expr;

struct AtomInfo;

namespace detail {
struct Poly;
}

class UnknownSymbol : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class UnboundSymbol : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class NegativeRadicand : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Interning. Thread-safe; ids are stable for the lifetime of the process.
SymbolId intern(SymbolDesc d);
SymbolId sqrt_atom(const Expr& canonical_radicand);
const AtomInfo& atom(SymbolId id);
bool is_sqrt_atom(SymbolId id);
const SymbolDesc& desc(SymbolId id);
const std::string& display_name(SymbolId id);
const std::string& intern_key(SymbolId id);
// every leaf symbol (non-derived) the atom depends on, sorted
const std::vector<SymbolId>& leaves(SymbolId id);

// Metric families: symmetric component symbols g_{ab} plus derived g^{ab} and sqrt(-det g).
struct MetricFamily {
    std::string name;
    int dim = 0;
    int negatives = 1;  // number of negative eigenvalues of the sampled metrics
    bool variational = false;
};
void register_metric(const MetricFamily& m);
const MetricFamily* find_metric(const std::string& name);
SymbolId metric_symbol(const std::string& name, int a, int b);
SymbolId inverse_metric_symbol(const std::string& name, int a, int b);
SymbolId sqrt_neg_det_symbol(const std::string& name);

// Convenience constructors for plain symbols.
SymbolId free_symbol(const std::string& name, std::vector<int> comp = {}, std::vector<bool> up = {});
SymbolId jet_successor(SymbolId s, int mu);
// argument-derivative of a Function symbol
SymbolId function_derivative(SymbolId f, int arg_pos);

using Factor = std::pair<SymbolId, std::int32_t>;
using Monomial = boost::container::small_vector<Factor, 6>;

struct Term {
    Rational c;
    Monomial m;
};

class Expr {
public:
    Expr();
    Expr(std::int64_t v);
    Expr(const Rational& r);
    static Expr sym(SymbolId s);
    static Expr from_terms(std::vector<Term> terms);  // canonicalizes

    const std::vector<Term>& terms() const;
    bool is_zero() const;
    bool is_constant() const;
    Rational constant_value() const;  // requires is_constant()
    std::size_t size() const { return terms().size(); }
    std::size_t hash() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    Expr operator-() const;
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }
    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    std::string str() const;

private:
    explicit Expr(std::shared_ptr<const detail::Poly> p) : p_(std::move(p)) {}
    std::shared_ptr<const detail::Poly> p_;
    friend struct detail::Poly;
};

struct AtomInfo {
    bool is_sqrt = false;
    SymbolDesc d;
    std::shared_ptr<const Expr> radicand;
    std::string key;
    std::string name;
    std::vector<SymbolId> leaves;
};

Expr pow(const Expr& e, int k);
Expr sqrt(const Expr& e);
Expr scale(const Expr& e, const Rational& r);
Expr sum(const std::vector<Expr>& xs);

// Canonicalization is structural, so this is the identity on stored values; kept
// for API symmetry and used by tests for idempotence.
Expr canonicalize(const Expr& e);

Expr diff(const Expr& e, SymbolId s);
// Derivation extending a map on leaf symbols (chain rule through derived atoms).
Expr apply_derivation(const Expr& e, const std::function<Expr(SymbolId)>& delta_leaf);
// Partial of a derived atom with respect to one of its leaves (zero otherwise).
Expr atom_partial(SymbolId atom_id, SymbolId leaf);
Expr substitute(const Expr& e, const std::unordered_map<SymbolId, Expr>& bindings);

// Atoms actually appearing in e, and the leaf symbols they depend on.
std::vector<SymbolId> atoms_of(const Expr& e);
std::vector<SymbolId> free_symbols(const Expr& e);
bool depends_on(const Expr& e, SymbolId s);

// Split e = sum_k c_k m_k where m_k are monomials in the given atoms and c_k free of them.
std::map<Monomial, Expr> collect(const Expr& e, const std::vector<SymbolId>& atoms);

// Applies sum_nu g_{mu nu} g^{nu sig} = delta_mu^sig wherever the highest index is contracted.
Expr metric_reduce(const Expr& e);

// Zero test after replacing g^{ab} by adj(g)/det g and clearing denominators.
// Returns false when the expansion would exceed `budget` terms.
bool metric_zero_test(const Expr& e, std::size_t budget = 200000);

// Multiplies e by the smallest positive sqrt-atom monomial that leaves no negative sqrt
// exponent; R * sqrt(R)^-1 and sqrt(R) then share one canonical form. Zero tests only.
Expr clear_sqrt_denominators(const Expr& e);

// true iff a - b canonicalizes to zero, directly, after clearing sqrt denominators,
// or after metric_reduce
bool equal_symbolic(const Expr& a, const Expr& b);

struct Assignment {
    std::unordered_map<SymbolId, double> values;
    void set(SymbolId s, double v) { values[s] = v; }
    double get(SymbolId s) const;
    bool has(SymbolId s) const { return values.count(s) != 0; }
    // recompute g^{ab} and sqrt(-det g) from the bound components of every metric family present
    void refresh_metrics();
};

double eval_numeric(const Expr& e, const Assignment& a);

// Random assignment for the leaf symbols of the given expressions (plus the derived
// metric symbols they need). Metrics are L^T eta L with cond(L) <= 10, everything else
// uniform in [-1, 1]. Retries when a radicand goes negative; throws after 100 attempts.
class DegenerateSample : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
Assignment sample_assignment(const std::vector<Expr>& exprs, std::mt19937_64& rng,
                             const std::vector<SymbolId>& extra = {});

bool equal_numeric(const Expr& a, const Expr& b, int n_samples, double tol, std::uint64_t seed);

}  // namespace mfc
