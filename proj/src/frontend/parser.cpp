#include <cctype>
#include <set>
#include <sstream>

#include "mfc/frontend.hpp"

namespace mfc {

std::string format_diagnostic(const Diagnostic& d, const std::string& file) {
    std::ostringstream os;
    if (!file.empty()) os << file << ':';
    os << d.span.line << ':' << d.span.col << ": "
       << (d.severity == Diagnostic::Severity::Error ? "error" : "warning") << ": " << d.message;
    if (!d.hint.empty()) os << "\n  hint: " << d.hint;
    return os.str();
}

namespace {

// ---- lexer -------------------------------------------------------------------------------

enum class Tok { Ident, Int, Punct, End, Bad };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Span span;
};

std::vector<Token> lex(const std::string& src, std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.span = {line, col, 1};
        std::size_t j = i;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            t.kind = Tok::Ident;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Tok::Int;
        } else if (std::string("{}()[],;:=+-*/^").find(c) != std::string::npos) {
            j = i + 1;
            t.kind = Tok::Punct;
        } else {
            // one diagnostic per run of unknown bytes (keeps UTF-8 sequences together)
            while (j < src.size() && !std::isspace(static_cast<unsigned char>(src[j])) &&
                   !std::isalnum(static_cast<unsigned char>(src[j])) &&
                   std::string("{}()[],;:=+-*/^#_").find(src[j]) == std::string::npos)
                ++j;
            t.span.length = int(j - i);
            diags.push_back({Diagnostic::Severity::Error, t.span, "unexpected character '" + src.substr(i, j - i) + "'", ""});
            advance(j - i);
            continue;
        }
        t.text = src.substr(i, j - i);
        t.span.length = int(j - i);
        advance(j - i);
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.span = {line, col, 0};
    out.push_back(end);
    return out;
}

// ---- parser ------------------------------------------------------------------------------

struct SyntaxError {
    Diagnostic d;
};

class Parser {
public:
    Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags) : toks_(std::move(toks)), diags_(diags) {}

    std::optional<TheoryDocument> file() {
        TheoryDocument doc;
        if (peek().kind == Tok::End) {
            error(peek().span, "missing theory declaration", "a file starts with 'theory NAME { ... }'");
            return std::nullopt;
        }
        try {
            Token kw = expect_ident("theory");
            doc.span = kw.span;
            doc.name = ident("theory name").text;
            expect("{");
        } catch (SyntaxError& e) {
            diags_.push_back(e.d);
            return std::nullopt;
        }
        while (!at("}") && peek().kind != Tok::End) {
            try {
                statement(doc);
            } catch (SyntaxError& e) {
                diags_.push_back(e.d);
                recover();
            }
        }
        if (peek().kind == Tok::End) {
            error(peek().span, "missing '}' closing theory '" + doc.name + "'", "");
        } else {
            next();
            if (peek().kind != Tok::End) error(peek().span, "unexpected text after the theory block", "");
        }
        if (doc.base_dim == 0) error(doc.span, "theory '" + doc.name + "' declares no base", "add 'base dim N;'");
        if (!doc.lagrangian) error(doc.span, "theory '" + doc.name + "' has no lagrangian", "add 'lagrangian EXPR;'");
        return doc;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic>& diags_;
    std::set<std::string> names_;

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    Token next() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool at(const std::string& p) const {
        return (peek().kind == Tok::Punct || peek().kind == Tok::Ident) && peek().text == p;
    }
    bool accept(const std::string& p) {
        if (!at(p)) return false;
        next();
        return true;
    }
    [[noreturn]] void fail(const Span& s, const std::string& msg, const std::string& hint = "") {
        throw SyntaxError{{Diagnostic::Severity::Error, s, msg, hint}};
    }
    void error(const Span& s, const std::string& msg, const std::string& hint) {
        diags_.push_back({Diagnostic::Severity::Error, s, msg, hint});
    }
    static std::string describe(const Token& t) {
        if (t.kind == Tok::End) return "end of input";
        return "'" + t.text + "'";
    }
    Token expect(const std::string& p) {
        if (!at(p)) fail(peek().span, "expected '" + p + "', found " + describe(peek()));
        return next();
    }
    Token expect_ident(const std::string& kw) {
        if (!(peek().kind == Tok::Ident && peek().text == kw))
            fail(peek().span, "expected '" + kw + "', found " + describe(peek()));
        return next();
    }
    Token ident(const std::string& what) {
        if (peek().kind != Tok::Ident) fail(peek().span, "expected " + what + ", found " + describe(peek()));
        return next();
    }
    int integer(const std::string& what) {
        if (peek().kind != Tok::Int) fail(peek().span, "expected " + what + ", found " + describe(peek()));
        Token t = next();
        if (t.text.size() > 9) fail(t.span, "integer too large");
        return std::stoi(t.text);
    }

    // skip to the end of the current statement, keeping bracket depth
    void recover() {
        int depth = 0;
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            if (t.kind == Tok::Punct) {
                if (t.text == "{") ++depth;
                if (t.text == "}") {
                    if (depth == 0) return;
                    if (--depth == 0) {
                        next();
                        return;
                    }
                }
                if (t.text == ";" && depth == 0) {
                    next();
                    return;
                }
            }
            next();
        }
    }

    void declare(const std::string& name, const Span& s) {
        if (!names_.insert(name).second) error(s, "duplicate declaration of '" + name + "'", "");
    }

    void statement(TheoryDocument& doc) {
        Token kw = ident("a declaration");
        const std::string& k = kw.text;
        if (k == "base") {
            expect_ident("dim");
            if (doc.base_dim) fail(kw.span, "duplicate base declaration");
            doc.base_dim = integer("base dimension");
            doc.base_span = kw.span;
            if (doc.base_dim < 1) fail(kw.span, "base dimension must be at least 1");
            if (accept("coords")) {
                expect("(");
                do {
                    Token c = ident("coordinate name");
                    declare(c.text, c.span);
                    doc.coords.push_back(c.text);
                } while (accept(","));
                expect(")");
                if (int(doc.coords.size()) != doc.base_dim)
                    fail(kw.span, "base dim " + std::to_string(doc.base_dim) + " but " +
                                      std::to_string(doc.coords.size()) + " coordinate names");
            }
            expect(";");
        } else if (k == "field" || k == "param") {
            FieldDecl f;
            Token n = ident("field name");
            f.name = n.text;
            f.span = n.span;
            f.variational = k == "field";
            expect(":");
            Token ty = ident("field type");
            if (ty.text == "scalar") {
                if (accept("[")) {
                    f.target_dim = integer("multiplet size");
                    expect("]");
                    if (f.target_dim < 1) fail(ty.span, "multiplet size must be at least 1");
                }
            } else if (ty.text == "covector") {
                f.index = IndexStructure::Covector;
            } else if (ty.text == "sym2") {
                f.index = IndexStructure::Sym2;
            } else {
                fail(ty.span, "unknown field type '" + ty.text + "'", "use scalar[N], covector or sym2");
            }
            if (peek().kind == Tok::Ident) {
                Token fl = next();
                if (fl.text == "variational") f.variational = true;
                else if (fl.text == "parametric") f.variational = false;
                else fail(fl.span, "unknown field flag '" + fl.text + "'", "use variational or parametric");
            }
            expect(";");
            declare(f.name, f.span);
            doc.fields.push_back(f);
        } else if (k == "metric") {
            if (doc.metric.kind != MetricDecl::Kind::Absent) fail(kw.span, "duplicate metric declaration");
            MetricDecl m;
            m.span = kw.span;
            Token how = ident("metric kind");
            if (how.text == "none") {
                m.kind = MetricDecl::Kind::None;
            } else if (how.text == "fixed") {
                expect_ident("minkowski");
                m.kind = MetricDecl::Kind::FixedMinkowski;
            } else if (how.text == "parametric" || how.text == "variational") {
                m.kind = how.text == "parametric" ? MetricDecl::Kind::Parametric : MetricDecl::Kind::Variational;
                m.field = ident("metric field name").text;
            } else {
                fail(how.span, "unknown metric kind '" + how.text + "'",
                     "use 'fixed minkowski', 'parametric FIELD', 'variational FIELD' or 'none'");
            }
            expect(";");
            doc.metric = m;
        } else if (k == "parametrized") {
            expect(";");
            doc.parametrized = true;
        } else if (k == "constant") {
            do {
                Token c = ident("constant name");
                declare(c.text, c.span);
                doc.constants.emplace_back(c.text, c.span);
            } while (accept(","));
            expect(";");
        } else if (k == "function") {
            FunctionDecl f;
            Token n = ident("function name");
            f.name = n.text;
            f.span = n.span;
            if (at("[")) f.idx = indices();
            expect("(");
            do f.args.push_back(expr());
            while (accept(","));
            expect(")");
            if (accept("symmetric")) f.symmetric = true;
            expect(";");
            declare(f.name, f.span);
            doc.functions.push_back(std::move(f));
        } else if (k == "let") {
            LetDecl l;
            Token n = ident("definition name");
            l.name = n.text;
            l.span = n.span;
            if (at("[")) l.idx = indices();
            expect("=");
            l.body = expr();
            expect(";");
            declare(l.name, l.span);
            doc.lets.push_back(std::move(l));
        } else if (k == "generator") {
            doc.generators.push_back(generator());
        } else if (k == "lagrangian") {
            if (doc.lagrangian) fail(kw.span, "duplicate lagrangian");
            doc.lagrangian_span = kw.span;
            NodePtr e = expr();
            expect(";");
            doc.lagrangian = e;
        } else {
            fail(kw.span, "unknown declaration '" + k + "'",
                 "expected base, field, param, metric, parametrized, constant, function, let, generator or lagrangian");
        }
    }

    GeneratorDecl generator() {
        GeneratorDecl g;
        Token n = ident("generator name");
        g.name = n.text;
        g.span = n.span;
        declare(g.name, g.span);
        expect("(");
        if (accept("params")) {
            expect(":");
            do {
                ParamDecl p;
                Token pn = ident("parameter name");
                p.name = pn.text;
                p.span = pn.span;
                if (at("[")) p.idx = indices();
                g.params.push_back(std::move(p));
            } while (accept(","));
        }
        expect(")");
        if (accept("symmetry")) g.symmetry = true;
        expect("{");
        while (!at("}")) {
            if (peek().kind == Tok::End) fail(peek().span, "missing '}' closing generator '" + g.name + "'");
            Token kw = ident("'base' or 'fiber'");
            if (kw.text == "base") {
                if (!g.base.empty()) fail(kw.span, "duplicate base components");
                g.base_span = kw.span;
                expect(":");
                do g.base.push_back(expr());
                while (accept(","));
                expect(";");
            } else if (kw.text == "fiber") {
                FiberRule r;
                Token f = ident("field name");
                r.field = f.text;
                r.span = f.span;
                if (at("[")) r.idx = indices();
                expect("=");
                r.body = expr();
                expect(";");
                g.fiber.push_back(std::move(r));
            } else {
                fail(kw.span, "expected 'base' or 'fiber', found '" + kw.text + "'");
            }
        }
        next();
        return g;
    }

    std::vector<IndexRef> indices() {
        Token open = expect("[");
        std::vector<IndexRef> r;
        try {
            do {
                IndexRef i;
                i.span = peek().span;
                if (accept("^")) i.up = true;
                if (peek().kind == Tok::Int) {
                    i.value = integer("index");
                } else if (peek().kind == Tok::Ident) {
                    i.name = next().text;
                } else {
                    fail(peek().span, "expected an index, found " + describe(peek()));
                }
                r.push_back(i);
            } while (accept(","));
        } catch (SyntaxError&) {
            fail(open.span, "unbalanced '['", "close the index list with ']'");
        }
        if (!at("]")) fail(open.span, "unbalanced '['", "close the index list with ']'");
        next();
        return r;
    }

    NodePtr make(Node::Kind k, Span s, std::vector<NodePtr> kids) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->span = s;
        n->kids = std::move(kids);
        return n;
    }

    NodePtr expr() {
        NodePtr l = term();
        while (at("+") || at("-")) {
            Token op = next();
            NodePtr r = term();
            l = make(op.text == "+" ? Node::Kind::Add : Node::Kind::Sub, op.span, {l, r});
        }
        return l;
    }

    NodePtr term() {
        NodePtr l = unary();
        while (at("*") || at("/")) {
            Token op = next();
            NodePtr r = unary();
            l = make(op.text == "*" ? Node::Kind::Mul : Node::Kind::Div, op.span, {l, r});
        }
        return l;
    }

    NodePtr unary() {
        if (at("-")) {
            Token op = next();
            return make(Node::Kind::Neg, op.span, {unary()});
        }
        if (at("+")) next();
        return power();
    }

    NodePtr power() {
        NodePtr b = primary();
        if (at("^")) {
            Token op = next();
            bool neg = accept("-");
            int k = integer("integer exponent");
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Pow;
            n->span = op.span;
            n->kids = {b};
            n->exponent = neg ? -k : k;
            return n;
        }
        return b;
    }

    NodePtr primary() {
        const Token& t = peek();
        if (t.kind == Tok::Int) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Number;
            n->span = t.span;
            n->number = Rational(std::stoll(next().text));
            return n;
        }
        if (t.kind == Tok::Ident) {
            Token id = next();
            if (at("(")) {
                Token open = next();
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Call;
                n->name = id.text;
                n->span = id.span;
                if (!at(")")) {
                    do n->kids.push_back(expr());
                    while (accept(","));
                }
                if (!at(")")) fail(open.span, "unbalanced '('", "close the argument list with ')'");
                next();
                return n;
            }
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Ref;
            n->name = id.text;
            n->span = id.span;
            if (at("[")) {
                n->idx = indices();
                n->has_idx = true;
            }
            return n;
        }
        if (at("(")) {
            Token open = next();
            NodePtr e = expr();
            if (!at(")")) fail(open.span, "unbalanced '('", "close the parenthesis with ')'");
            next();
            return e;
        }
        if (at("]")) fail(t.span, "unbalanced ']'", "no matching '['");
        if (at(")")) fail(t.span, "unbalanced ')'", "no matching '('");
        fail(t.span, "expected an expression, found " + describe(t));
    }
};

}  // namespace

ParseResult parse(const std::string& source) {
    ParseResult r;
    auto toks = lex(source, r.diagnostics);
    Parser p(std::move(toks), r.diagnostics);
    auto doc = p.file();
    bool errors = false;
    for (const auto& d : r.diagnostics) errors |= d.severity == Diagnostic::Severity::Error;
    if (!errors) r.doc = std::move(doc);
    return r;
}

}  // namespace mfc
