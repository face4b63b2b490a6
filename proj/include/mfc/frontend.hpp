#pragma once

// Theory-definition language: lexer, parser with span diagnostics, and the
// index-notation elaborator producing a Theory.
//
//   theory maxwell {
//     base dim 4 coords (t, x, y, z);
//     field A : covector variational;
//     metric fixed minkowski;
//     let F[mu,nu] = d(A[nu],mu) - d(A[mu],nu);
//     generator gauge (params: chi) symmetry { fiber A[nu] = d(chi,nu); }
//     lagrangian -1/4 * F[mu,nu]*F[^mu,^nu] * sqrtdetg;
//   }

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfc/variational.hpp"

namespace mfc {

struct Span {
    int line = 1, col = 1, length = 0;  // 1-based, length in bytes
};

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    Span span;
    std::string message;
    std::string hint;
};

// "file:line:col: error: message" plus the hint on its own line
std::string format_diagnostic(const Diagnostic& d, const std::string& file = "");

// ---- AST -------------------------------------------------------------------------------

struct IndexRef {
    std::string name;  // empty for a numeric index
    int value = -1;
    bool up = false;
    Span span;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Number, Ref, Call, Neg, Add, Sub, Mul, Div, Pow };
    Kind kind = Kind::Number;
    Span span;
    Rational number;               // Number
    std::string name;              // Ref, Call
    std::vector<IndexRef> idx;     // Ref
    bool has_idx = false;          // Ref written with brackets
    std::vector<NodePtr> kids;     // operands, call arguments
    int exponent = 0;              // Pow
};

struct FieldDecl {
    std::string name;
    IndexStructure index = IndexStructure::Scalar;
    int target_dim = 1;
    bool variational = true;
    Span span;
};

struct MetricDecl {
    enum class Kind { Absent, None, FixedMinkowski, Parametric, Variational };
    Kind kind = Kind::Absent;
    std::string field;
    Span span;
};

struct FunctionDecl {
    std::string name;
    std::vector<IndexRef> idx;
    std::vector<NodePtr> args;  // coordinate names, field names, d(field)
    bool symmetric = false;
    Span span;
};

struct LetDecl {
    std::string name;
    std::vector<IndexRef> idx;
    NodePtr body;
    Span span;
};

struct ParamDecl {
    std::string name;
    std::vector<IndexRef> idx;
    Span span;
};

struct FiberRule {
    std::string field;
    std::vector<IndexRef> idx;
    NodePtr body;
    Span span;
};

struct GeneratorDecl {
    std::string name;
    std::vector<ParamDecl> params;
    bool symmetry = false;
    std::vector<NodePtr> base;
    std::vector<FiberRule> fiber;
    Span span;
    Span base_span;
};

struct TheoryDocument {
    std::string name;
    Span span;
    int base_dim = 0;
    Span base_span;
    std::vector<std::string> coords;
    std::vector<FieldDecl> fields;
    MetricDecl metric;
    bool parametrized = false;
    std::vector<std::pair<std::string, Span>> constants;
    std::vector<FunctionDecl> functions;
    std::vector<LetDecl> lets;
    std::vector<GeneratorDecl> generators;
    NodePtr lagrangian;
    Span lagrangian_span;
};

struct ParseResult {
    std::optional<TheoryDocument> doc;  // present iff diagnostics holds no error
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return doc.has_value(); }
};

ParseResult parse(const std::string& source);

class ElaborationError : public std::runtime_error {
public:
    explicit ElaborationError(Diagnostic d) : std::runtime_error(d.message), diagnostic(std::move(d)) {}
    Diagnostic diagnostic;
};

// throws ElaborationError
Theory elaborate(const TheoryDocument& doc);

// parse + elaborate; throws ElaborationError carrying the first parse error
Theory load_theory(const std::string& source);

// the shipped theory files, embedded at build time: (file name, contents)
const std::vector<std::pair<std::string, std::string>>& builtin_theory_files();

}  // namespace mfc
