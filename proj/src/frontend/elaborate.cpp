#include <functional>
#include <set>

#include "mfc/frontend.hpp"
#include "mfc/theories.hpp"

namespace mfc {

namespace {

[[noreturn]] void fail(const Span& s, const std::string& msg, const std::string& hint = "") {
    throw ElaborationError({Diagnostic::Severity::Error, s, msg, hint});
}

const std::set<std::string> kBuiltins = {"eps", "delta", "eta", "sqrtdetg", "d", "dd", "sqrt"};

// free index of a subexpression; range -1 = not yet fixed (eps/delta/eta slots)
struct Free {
    bool up = false;
    int range = -1;
    Span span;
};
using FreeMap = std::map<std::string, Free>;

struct Info {
    FreeMap free;
    std::vector<std::pair<std::string, int>> summed;  // Mul and d(): contracted pairs and their range
};

struct Field {
    FieldDecl decl;
    int index = 0;
    std::map<std::vector<int>, SymbolId> comps;  // component indices (sorted for sym2) -> fiber symbol
    std::vector<int> fibers;
};

struct Param {
    ParamDecl decl;
    std::vector<bool> up;
};

struct Function {
    FunctionDecl decl;
    std::vector<SymbolId> args;
    int range = 0;
};

struct Let {
    LetDecl decl;
    std::vector<int> ranges;
};

class Elaborator {
public:
    explicit Elaborator(const TheoryDocument& doc) : doc_(doc) {}

    Theory run() {
        n1_ = doc_.base_dim;
        declare_names();
        build_bundle();
        metric_setup();
        for (const auto& f : doc_.functions) add_function(f);
        for (const auto& l : doc_.lets) add_let(l);

        Theory t;
        t.name = doc_.name;
        t.bundle = jb_;
        t.meta.parametrized = doc_.parametrized;
        t.meta.metric = metric_kind_;
        t.meta.metric_field = doc_.metric.field;

        const Info& li = analyze(doc_.lagrangian);
        if (!li.free.empty())
            fail(li.free.begin()->second.span, "lagrangian has a free index '" + li.free.begin()->first + "'",
                 "contract every index with one upper and one lower occurrence");
        t.L = eval(doc_.lagrangian, {});
        try {
            validate_lagrangian(*jb_, t.L);
        } catch (const std::exception& e) {
            fail(doc_.lagrangian_span, std::string("invalid lagrangian: ") + e.what());
        }
        for (const auto& g : doc_.generators) t.generators.push_back(generator(g));
        try {
            validate(t);
        } catch (const std::exception& e) {
            fail(doc_.span, std::string("invalid theory: ") + e.what());
        }
        return t;
    }

private:
    const TheoryDocument& doc_;
    int n1_ = 1;
    JetBundlePtr jb_;
    std::map<std::string, Field> fields_;
    std::map<std::string, int> coords_;
    std::map<std::string, SymbolId> constants_;
    std::map<std::string, Function> functions_;
    std::map<std::string, Let> lets_;
    std::map<std::string, Param> params_;  // current generator only
    MetricKind metric_kind_ = MetricKind::None;
    std::string metric_fam_;
    std::map<const Node*, Info> info_;
    std::map<std::pair<const Node*, std::vector<int>>, Expr> memo_;

    // ---- declarations ------------------------------------------------------------------

    void declare_names() {
        auto check = [&](const std::string& n, const Span& s) {
            if (kBuiltins.count(n)) fail(s, "'" + n + "' is a built-in name");
        };
        for (std::size_t i = 0; i < doc_.coords.size(); ++i) {
            check(doc_.coords[i], doc_.base_span);
            coords_[doc_.coords[i]] = int(i);
        }
        for (const auto& f : doc_.fields) check(f.name, f.span);
        for (const auto& [c, s] : doc_.constants) {
            check(c, s);
            constants_[c] = free_symbol(c);
        }
        for (const auto& f : doc_.functions) check(f.name, f.span);
        for (const auto& l : doc_.lets) check(l.name, l.span);
    }

    void build_bundle() {
        BundleSpec b;
        b.base_dim = n1_;
        for (const auto& f : doc_.fields) b.fields.push_back({f.name, f.index, f.variational, f.target_dim, 1});
        if (doc_.fields.empty()) fail(doc_.span, "theory declares no field");
        try {
            jb_ = jet_charts(b);
        } catch (const std::exception& e) {
            fail(doc_.fields.front().span, std::string("invalid field declarations: ") + e.what());
        }
        for (std::size_t i = 0; i < doc_.fields.size(); ++i) {
            Field f{doc_.fields[i], int(i), {}, jb_->field_fibers(int(i))};
            for (int A : f.fibers) f.comps[desc(jb_->y(A)).comp] = jb_->y(A);
            fields_[f.decl.name] = std::move(f);
        }
    }

    void metric_setup() {
        const MetricDecl& m = doc_.metric;
        switch (m.kind) {
            case MetricDecl::Kind::Absent:
            case MetricDecl::Kind::None: metric_kind_ = MetricKind::None; return;
            case MetricDecl::Kind::FixedMinkowski: metric_kind_ = MetricKind::Fixed; return;
            case MetricDecl::Kind::Parametric:
            case MetricDecl::Kind::Variational: break;
        }
        bool var = m.kind == MetricDecl::Kind::Variational;
        auto it = fields_.find(m.field);
        if (it == fields_.end()) fail(m.span, "metric field '" + m.field + "' is not declared");
        const FieldDecl& f = it->second.decl;
        if (f.index != IndexStructure::Sym2) fail(m.span, "metric field '" + m.field + "' must be sym2");
        if (f.variational != var)
            fail(m.span, "metric field '" + m.field + "' is declared " + (f.variational ? "variational" : "parametric"),
                 std::string("use 'metric ") + (f.variational ? "variational" : "parametric") + " " + m.field + ";'");
        metric_kind_ = var ? MetricKind::Variational : MetricKind::Parametric;
        metric_fam_ = m.field;
    }

    Expr g_low(int a, int b, const Span& s) const {
        if (metric_kind_ == MetricKind::Fixed) return a != b ? Expr() : Expr(a == 0 ? -1 : 1);
        if (metric_kind_ == MetricKind::None)
            fail(s, "raising or lowering a base index needs a metric", "declare 'metric fixed minkowski;' or similar");
        return Expr::sym(metric_symbol(metric_fam_, a, b));
    }
    Expr g_up(int a, int b, const Span& s) const {
        if (metric_kind_ != MetricKind::Parametric && metric_kind_ != MetricKind::Variational) return g_low(a, b, s);
        return Expr::sym(inverse_metric_symbol(metric_fam_, a, b));
    }

    // expands function arguments: coordinates, field names, d(field, ...) for first jets
    void add_function(const FunctionDecl& fd) {
        Function fn{fd, {}, 0};
        for (const NodePtr& a : fd.args) {
            if (a->kind == Node::Kind::Ref && !a->has_idx) {
                if (auto c = coords_.find(a->name); c != coords_.end()) {
                    fn.args.push_back(base_coord(c->second));
                    continue;
                }
                if (auto f = fields_.find(a->name); f != fields_.end()) {
                    for (int A : f->second.fibers) fn.args.push_back(jb_->y(A));
                    if (!fn.range && f->second.decl.index == IndexStructure::Scalar)
                        fn.range = f->second.decl.target_dim;
                    continue;
                }
            }
            if (a->kind == Node::Kind::Call && a->name == "d" && a->kids.size() == 1 &&
                a->kids[0]->kind == Node::Kind::Ref && !a->kids[0]->has_idx) {
                auto f = fields_.find(a->kids[0]->name);
                if (f == fields_.end()) fail(a->kids[0]->span, "'" + a->kids[0]->name + "' is not a field");
                if (!f->second.decl.variational)
                    fail(a->span, "parametric field '" + f->first + "' has no first jets in the lagrangian");
                for (int A : f->second.fibers)
                    for (int mu = 0; mu < n1_; ++mu) fn.args.push_back(jb_->v(A, mu));
                continue;
            }
            fail(a->span, "function arguments are coordinates, field names or d(field)");
        }
        if (!fn.range) fn.range = n1_;
        if (fd.symmetric && fd.idx.size() != 2) fail(fd.span, "'symmetric' needs exactly two indices");
        for (const auto& i : fd.idx)
            if (i.name.empty()) fail(i.span, "function indices must be names");
        functions_[fd.name] = std::move(fn);
    }

    void add_let(const LetDecl& ld) {
        std::set<std::string> seen;
        for (const auto& i : ld.idx) {
            if (i.name.empty()) fail(i.span, "definition indices must be names");
            if (!seen.insert(i.name).second) fail(i.span, "index '" + i.name + "' repeated on the left-hand side");
        }
        const Info& bi = analyze(ld.body);
        Let l{ld, {}};
        for (const auto& i : ld.idx) {
            auto it = bi.free.find(i.name);
            if (it == bi.free.end()) fail(i.span, "index '" + i.name + "' does not appear free in the definition");
            if (it->second.up != i.up)
                fail(i.span, "index '" + i.name + "' is " + (it->second.up ? "upper" : "lower") + " in the definition");
            l.ranges.push_back(it->second.range < 0 ? n1_ : it->second.range);
        }
        for (const auto& [name, f] : bi.free)
            if (!seen.count(name)) fail(f.span, "free index '" + name + "' missing from the left-hand side of '" + ld.name + "'");
        lets_[ld.name] = std::move(l);
    }

    // ---- generators --------------------------------------------------------------------

    GeneratorFamily generator(const GeneratorDecl& gd) {
        params_.clear();
        GeneratorFamily g;
        g.name = gd.name;
        g.symmetry = gd.symmetry;
        g.base.assign(n1_, Expr());
        g.fiber.assign(jb_->fiber_dim(), Expr());
        for (const auto& p : gd.params) {
            if (kBuiltins.count(p.name) || fields_.count(p.name) || constants_.count(p.name) || lets_.count(p.name) ||
                functions_.count(p.name) || coords_.count(p.name) || params_.count(p.name))
                fail(p.span, "parameter name '" + p.name + "' is already in use");
            Param pr{p, {}};
            for (const auto& i : p.idx) {
                if (i.name.empty()) fail(i.span, "parameter indices must be names");
                pr.up.push_back(i.up);
            }
            params_[p.name] = pr;
            for_each_index(std::vector<int>(p.idx.size(), n1_), [&](const std::vector<int>& c) {
                g.params.push_back(jet_parameter(p.name, c, pr.up));
            });
        }
        if (!gd.base.empty()) {
            if (gd.base.size() == 1 && !(n1_ == 1 && analyze(gd.base[0]).free.empty())) {
                const Info& bi = analyze(gd.base[0]);
                if (bi.free.size() != 1 || !bi.free.begin()->second.up)
                    fail(gd.base_span, "a single base expression needs exactly one free upper index",
                         "or list " + std::to_string(n1_) + " components");
                const std::string& k = bi.free.begin()->first;
                for (int mu = 0; mu < n1_; ++mu) g.base[mu] = eval(gd.base[0], {{k, mu}});
            } else {
                if (int(gd.base.size()) != n1_)
                    fail(gd.base_span, "expected " + std::to_string(n1_) + " base components, found " +
                                           std::to_string(gd.base.size()));
                for (int mu = 0; mu < n1_; ++mu) {
                    const Info& bi = analyze(gd.base[mu]);
                    if (!bi.free.empty()) fail(bi.free.begin()->second.span, "base component has a free index");
                    g.base[mu] = eval(gd.base[mu], {});
                }
            }
        }
        std::set<int> assigned;
        for (const auto& r : gd.fiber) {
            auto f = fields_.find(r.field);
            if (f == fields_.end()) fail(r.span, "'" + r.field + "' is not a field");
            const Field& fl = f->second;
            std::vector<int> ranges = slot_ranges(fl.decl);
            std::vector<bool> natural = slot_natural_up(fl.decl);
            if (r.idx.size() != ranges.size())
                fail(r.span, "field '" + r.field + "' takes " + std::to_string(ranges.size()) + " indices");
            const Info& bi = analyze(r.body);
            std::set<std::string> lhs;
            for (std::size_t k = 0; k < r.idx.size(); ++k) {
                const IndexRef& i = r.idx[k];
                if (i.up != natural[k])
                    fail(i.span, "fiber rule indices take the field's own variance",
                         std::string("write it ") + (natural[k] ? "upper" : "lower"));
                if (i.name.empty() || coords_.count(i.name)) continue;
                if (!lhs.insert(i.name).second) fail(i.span, "index '" + i.name + "' repeated on the left-hand side");
                auto it = bi.free.find(i.name);
                if (it == bi.free.end()) fail(i.span, "index '" + i.name + "' does not appear free in the rule");
                if (it->second.up != i.up) fail(it->second.span, "index '" + i.name + "' has the wrong variance");
            }
            for (const auto& [name, fr] : bi.free)
                if (!lhs.count(name)) fail(fr.span, "free index '" + name + "' missing from the left-hand side");
            for (const auto& [comp, sym] : fl.comps) {
                // does this component match the written fixed indices?
                std::vector<std::vector<int>> orders = {comp};
                if (fl.decl.index == IndexStructure::Sym2 && comp[0] != comp[1]) orders.push_back({comp[1], comp[0]});
                for (const auto& c : orders) {
                    std::map<std::string, int> env;
                    bool ok = true;
                    for (std::size_t k = 0; k < r.idx.size() && ok; ++k) {
                        int fixed = fixed_value(r.idx[k], ranges[k]);
                        if (fixed >= 0) ok = fixed == c[k];
                        else if (auto e = env.find(r.idx[k].name); e != env.end()) ok = e->second == c[k];
                        else env[r.idx[k].name] = c[k];
                    }
                    if (!ok) continue;
                    int A = jb_->fiber_index(sym);
                    if (!assigned.insert(A).second) fail(r.span, "component " + display_name(sym) + " assigned twice");
                    g.fiber[A] = eval(r.body, env);
                    break;
                }
            }
        }
        params_.clear();
        return g;
    }

    // ---- index helpers -----------------------------------------------------------------

    static void for_each_index(const std::vector<int>& ranges, const std::function<void(const std::vector<int>&)>& f) {
        std::vector<int> c(ranges.size(), 0);
        for (int r : ranges)
            if (r <= 0) return;
        while (true) {
            f(c);
            std::size_t k = 0;
            for (; k < c.size(); ++k) {
                if (++c[k] < ranges[k]) break;
                c[k] = 0;
            }
            if (k == c.size()) return;
        }
    }

    std::vector<int> slot_ranges(const FieldDecl& f) const {
        switch (f.index) {
            case IndexStructure::Scalar: return f.target_dim > 1 ? std::vector<int>{f.target_dim} : std::vector<int>{};
            case IndexStructure::Covector: return {n1_};
            case IndexStructure::Sym2: return {n1_, n1_};
        }
        return {};
    }
    static std::vector<bool> slot_natural_up(const FieldDecl& f) {
        switch (f.index) {
            case IndexStructure::Scalar: return {true};
            case IndexStructure::Covector: return {false};
            case IndexStructure::Sym2: return {false, false};
        }
        return {};
    }

    // fixed component for a numeric or coordinate-name index, -1 for an index variable
    int fixed_value(const IndexRef& i, int range) const {
        int v = -1;
        if (i.name.empty()) v = i.value;
        else if (auto c = coords_.find(i.name); c != coords_.end()) v = c->second;
        else return -1;
        if (range >= 0 && (v < 0 || v >= range))
            fail(i.span, "index value " + std::to_string(v) + " out of range 0.." + std::to_string(range - 1));
        return v;
    }

    // ---- analysis ----------------------------------------------------------------------

    void add_free(FreeMap& m, const IndexRef& i, int range) {
        if (fixed_value(i, range) >= 0) return;
        if (m.count(i.name))
            fail(i.span, "index '" + i.name + "' repeated within one object", "contractions go between factors");
        m[i.name] = {i.up, range, i.span};
    }

    // merges two factors of a product; repeated indices are contracted
    Info product(const FreeMap& a, const FreeMap& b) {
        Info r;
        r.free = a;
        for (const auto& [name, fb] : b) {
            auto it = r.free.find(name);
            if (it == r.free.end()) {
                r.free[name] = fb;
                continue;
            }
            const Free& fa = it->second;
            if (fa.up == fb.up)
                fail(fb.span, "index '" + name + "' appears twice as " + (fb.up ? "upper" : "lower"),
                     "a summed index must appear once upper and once lower");
            int range = merge_range(fa, fb, name);
            r.summed.emplace_back(name, range < 0 ? n1_ : range);
            r.free.erase(it);
        }
        return r;
    }

    int merge_range(const Free& a, const Free& b, const std::string& name) {
        if (a.range >= 0 && b.range >= 0 && a.range != b.range)
            fail(b.span, "index '" + name + "' ranges over " + std::to_string(b.range) + " values here but " +
                             std::to_string(a.range) + " elsewhere");
        return a.range >= 0 ? a.range : b.range;
    }

    const Info& analyze(const NodePtr& n) {
        auto it = info_.find(n.get());
        if (it != info_.end()) return it->second;
        Info r = analyze_uncached(*n);
        return info_[n.get()] = std::move(r);
    }

    Info analyze_uncached(const Node& n) {
        Info r;
        switch (n.kind) {
            case Node::Kind::Number: return r;
            case Node::Kind::Neg: return {analyze(n.kids[0]).free, {}};
            case Node::Kind::Add:
            case Node::Kind::Sub: {
                FreeMap a = analyze(n.kids[0]).free;
                const FreeMap& b = analyze(n.kids[1]).free;
                for (const auto& [name, fb] : b) {
                    auto it = a.find(name);
                    if (it == a.end() || it->second.up != fb.up)
                        fail(fb.span, "free index '" + name + "' " + (fb.up ? "(upper)" : "(lower)") +
                                          " does not match the other side of the sum");
                    it->second.range = merge_range(it->second, fb, name);
                }
                for (const auto& [name, fa] : a)
                    if (!b.count(name)) fail(fa.span, "free index '" + name + "' does not match the other side of the sum");
                return {a, {}};
            }
            case Node::Kind::Mul: return product(analyze(n.kids[0]).free, analyze(n.kids[1]).free);
            case Node::Kind::Div: {
                r.free = analyze(n.kids[0]).free;
                if (!analyze(n.kids[1]).free.empty()) fail(n.span, "cannot divide by an indexed expression");
                return r;
            }
            case Node::Kind::Pow: {
                const Info& b = analyze(n.kids[0]);
                if (!b.free.empty() && n.exponent != 1) fail(n.span, "cannot raise an indexed expression to a power");
                return {b.free, {}};
            }
            case Node::Kind::Call: return analyze_call(n);
            case Node::Kind::Ref: return analyze_ref(n);
        }
        return r;
    }

    const IndexRef& index_arg(const Node& call, std::size_t k) {
        const Node& a = *call.kids[k];
        static thread_local IndexRef tmp;
        tmp = {};
        tmp.span = a.span;
        if (a.kind == Node::Kind::Number && a.number.is_integer()) {
            tmp.value = int(a.number.num());
        } else if (a.kind == Node::Kind::Ref && !a.has_idx) {
            tmp.name = a.name;
        } else {
            fail(a.span, "expected a derivative index");
        }
        return tmp;
    }

    Info analyze_call(const Node& n) {
        if (n.name == "sqrt") {
            if (n.kids.size() != 1) fail(n.span, "sqrt takes one argument");
            if (!analyze(n.kids[0]).free.empty()) fail(n.span, "sqrt of an indexed expression");
            return {};
        }
        if (n.name == "d" || n.name == "dd") {
            std::size_t k = n.name == "d" ? 2 : 3;
            if (n.kids.size() != k)
                fail(n.span, n.name + " takes " + std::to_string(k) + " arguments", n.name == "d" ? "d(f, mu)" : "dd(f, mu, nu)");
            check_no_parametric_jet(*n.kids[0]);
            FreeMap idx;
            for (std::size_t j = 1; j < k; ++j) {
                IndexRef i = index_arg(n, j);
                add_free(idx, i, n1_);
            }
            return product(analyze(n.kids[0]).free, idx);
        }
        if (functions_.count(n.name))
            fail(n.span, "function '" + n.name + "' is used without arguments", "write " + n.name + " or " + n.name + "[...]");
        fail(n.span, "unknown function '" + n.name + "'", "built-in calls are d, dd and sqrt");
    }

    void check_no_parametric_jet(const Node& n) {
        if (n.kind == Node::Kind::Ref) {
            auto f = fields_.find(n.name);
            if (f != fields_.end() && !f->second.decl.variational)
                fail(n.span, "derivative of parametric field '" + n.name + "'", "the lagrangian depends on it pointwise");
            if (metric_kind_ != MetricKind::Fixed && n.name == "sqrtdetg")
                fail(n.span, "derivative of the metric density");
        }
        for (const auto& k : n.kids) check_no_parametric_jet(*k);
    }

    Info analyze_ref(const Node& n) {
        Info r;
        auto need = [&](std::size_t k) {
            if (n.idx.size() != k)
                fail(n.span, "'" + n.name + "' takes " + std::to_string(k) + " index" + (k == 1 ? "" : "es") + ", found " +
                                 std::to_string(n.idx.size()));
        };
        if (n.name == "eps") {
            if (n.idx.empty()) fail(n.span, "eps needs indices");
            for (const auto& i : n.idx) add_free(r.free, i, int(n.idx.size()));
            return r;
        }
        if (n.name == "delta" || n.name == "eta") {
            need(2);
            for (const auto& i : n.idx) add_free(r.free, i, -1);
            return r;
        }
        if (n.name == "sqrtdetg") {
            need(0);
            if (metric_kind_ == MetricKind::None) fail(n.span, "sqrtdetg needs a metric declaration");
            return r;
        }
        if (coords_.count(n.name) || constants_.count(n.name)) {
            need(0);
            return r;
        }
        if (auto f = fields_.find(n.name); f != fields_.end()) {
            std::vector<int> ranges = slot_ranges(f->second.decl);
            need(ranges.size());
            for (std::size_t k = 0; k < ranges.size(); ++k) {
                if (f->second.decl.index == IndexStructure::Scalar && !n.idx[k].up)
                    fail(n.idx[k].span, "multiplet index of '" + n.name + "' is upper", "write " + n.name + "[^" +
                                                                                             n.idx[k].name + "]");
                add_free(r.free, n.idx[k], ranges[k]);
            }
            return r;
        }
        if (auto fn = functions_.find(n.name); fn != functions_.end()) {
            const auto& decl = fn->second.decl;
            need(decl.idx.size());
            for (std::size_t k = 0; k < decl.idx.size(); ++k) {
                if (n.idx[k].up != decl.idx[k].up)
                    fail(n.idx[k].span, std::string("index of '") + n.name + "' is declared " +
                                            (decl.idx[k].up ? "upper" : "lower"));
                add_free(r.free, n.idx[k], fn->second.range);
            }
            return r;
        }
        if (auto l = lets_.find(n.name); l != lets_.end()) {
            need(l->second.decl.idx.size());
            for (std::size_t k = 0; k < n.idx.size(); ++k) add_free(r.free, n.idx[k], l->second.ranges[k]);
            return r;
        }
        if (auto p = params_.find(n.name); p != params_.end()) {
            need(p->second.up.size());
            for (const auto& i : n.idx) add_free(r.free, i, n1_);
            return r;
        }
        if (kBuiltins.count(n.name)) fail(n.span, "'" + n.name + "' is a function", "call it with arguments");
        fail(n.span, "unknown name '" + n.name + "'");
    }

    // ---- evaluation --------------------------------------------------------------------

    using Env = std::map<std::string, int>;

    Expr eval(const NodePtr& n, const Env& env) {
        const Info& inf = analyze(n);
        std::vector<int> key;
        for (const auto& [name, f] : inf.free) {
            auto it = env.find(name);
            if (it == env.end()) fail(f.span, "internal: unbound index '" + name + "'");
            key.push_back(it->second);
        }
        auto mk = std::make_pair(n.get(), key);
        if (auto it = memo_.find(mk); it != memo_.end()) return it->second;
        Expr r = eval_uncached(*n, inf, env);
        memo_.emplace(std::move(mk), r);
        return r;
    }

    // sums f over every assignment of the contracted indices
    Expr contract(const Info& inf, const Env& env, const std::function<Expr(const Env&)>& f) {
        std::vector<int> ranges;
        for (const auto& s : inf.summed) ranges.push_back(s.second);
        Expr r;
        for_each_index(ranges, [&](const std::vector<int>& c) {
            Env e = env;
            for (std::size_t k = 0; k < c.size(); ++k) e[inf.summed[k].first] = c[k];
            r += f(e);
        });
        return r;
    }

    Expr eval_uncached(const Node& n, const Info& inf, const Env& env) {
        switch (n.kind) {
            case Node::Kind::Number: return Expr(n.number);
            case Node::Kind::Neg: return -eval(n.kids[0], env);
            case Node::Kind::Add: return eval(n.kids[0], env) + eval(n.kids[1], env);
            case Node::Kind::Sub: return eval(n.kids[0], env) - eval(n.kids[1], env);
            case Node::Kind::Mul:
                return contract(inf, env, [&](const Env& e) {
                    Expr a = eval(n.kids[0], e);
                    if (a.is_zero()) return a;
                    return a * eval(n.kids[1], e);
                });
            case Node::Kind::Div: {
                Expr d = eval(n.kids[1], env);
                if (d.is_constant() && !d.is_zero()) return scale(eval(n.kids[0], env), Rational(1) / d.constant_value());
                if (d.size() == 1) {
                    const Term& t = d.terms()[0];
                    Expr inv(Rational(1) / t.c);
                    for (const auto& [s, k] : t.m) inv *= pow(Expr::sym(s), -k);
                    return eval(n.kids[0], env) * inv;
                }
                fail(n.kids[1]->span, d.is_zero() ? "division by zero" : "division by a sum is not supported",
                     d.is_zero() ? "" : "divide by numbers or single products only");
            }
            case Node::Kind::Pow: {
                Expr b = eval(n.kids[0], env);
                if (n.exponent < 0 && b.size() != 1)
                    fail(n.span, "negative power of a sum is not supported");
                return pow(b, n.exponent);
            }
            case Node::Kind::Call: return eval_call(n, inf, env);
            case Node::Kind::Ref: return eval_ref(n, env);
        }
        return Expr();
    }

    Expr eval_call(const Node& n, const Info& inf, const Env& env) {
        if (n.name == "sqrt") {
            Expr a = eval(n.kids[0], env);
            try {
                return sqrt(a);
            } catch (const std::exception& e) {
                fail(n.span, std::string("sqrt: ") + e.what());
            }
        }
        // d(f, mu) / dd(f, mu, nu)
        return contract(inf, env, [&](const Env& e) {
            Expr f = eval(n.kids[0], e);
            for (std::size_t j = 1; j < n.kids.size(); ++j) {
                IndexRef i = index_arg(n, j);
                int v = fixed_value(i, n1_);
                f = total_derivative(*jb_, f, v >= 0 ? v : e.at(i.name));
            }
            return f;
        });
    }

    int value_of(const IndexRef& i, const Env& env) const {
        int v = fixed_value(i, -1);
        return v >= 0 ? v : env.at(i.name);
    }

    // component with slots in their natural variance, then raise/lower the written ones
    Expr with_metric(const std::vector<IndexRef>& idx, const std::vector<bool>& natural, const Env& env,
                     const std::function<Expr(const std::vector<int>&)>& comp) {
        std::vector<int> vals;
        std::vector<std::size_t> flip;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            vals.push_back(value_of(idx[k], env));
            if (idx[k].up != natural[k]) flip.push_back(k);
        }
        if (flip.empty()) return comp(vals);
        Expr r;
        for_each_index(std::vector<int>(flip.size(), n1_), [&](const std::vector<int>& c) {
            Expr m(1);
            std::vector<int> v = vals;
            for (std::size_t j = 0; j < flip.size(); ++j) {
                std::size_t k = flip[j];
                m *= idx[k].up ? g_up(vals[k], c[j], idx[k].span) : g_low(vals[k], c[j], idx[k].span);
                if (m.is_zero()) return;
                v[k] = c[j];
            }
            r += m * comp(v);
        });
        return r;
    }

    Expr eval_ref(const Node& n, const Env& env) {
        if (n.name == "eps") {
            std::vector<int> v;
            for (const auto& i : n.idx) v.push_back(value_of(i, env));
            return Expr(levi_civita_sign(v));
        }
        if (n.name == "delta") return Expr(value_of(n.idx[0], env) == value_of(n.idx[1], env) ? 1 : 0);
        if (n.name == "eta") {
            int a = value_of(n.idx[0], env), b = value_of(n.idx[1], env);
            return a != b ? Expr() : Expr(a == 0 ? -1 : 1);
        }
        if (n.name == "sqrtdetg")
            return metric_kind_ == MetricKind::Fixed ? Expr(1) : Expr::sym(sqrt_neg_det_symbol(metric_fam_));
        if (auto c = coords_.find(n.name); c != coords_.end()) return Expr::sym(base_coord(c->second));
        if (auto c = constants_.find(n.name); c != constants_.end()) return Expr::sym(c->second);
        if (auto f = fields_.find(n.name); f != fields_.end()) {
            const Field& fl = f->second;
            bool is_metric = fl.decl.name == metric_fam_;
            if (is_metric && n.idx[0].up && n.idx[1].up) {
                int a = value_of(n.idx[0], env), b = value_of(n.idx[1], env);
                return Expr::sym(inverse_metric_symbol(fl.decl.name, a, b));
            }
            if (is_metric && n.idx[0].up != n.idx[1].up)
                return Expr(value_of(n.idx[0], env) == value_of(n.idx[1], env) ? 1 : 0);
            if (n.idx.empty()) return Expr::sym(fl.comps.begin()->second);
            return with_metric(n.idx, slot_natural_up(fl.decl), env, [&](std::vector<int> c) {
                if (fl.decl.index == IndexStructure::Sym2 && c[0] > c[1]) std::swap(c[0], c[1]);
                return Expr::sym(fl.comps.at(c));
            });
        }
        if (auto fn = functions_.find(n.name); fn != functions_.end()) {
            const FunctionDecl& decl = fn->second.decl;
            SymbolDesc d;
            d.family = decl.name;
            d.kind = SymKind::DerivedScalar;
            d.rule = Rule::Function;
            for (std::size_t k = 0; k < n.idx.size(); ++k) {
                d.comp.push_back(value_of(n.idx[k], env));
                d.comp_up.push_back(decl.idx[k].up);
            }
            d.comp_sym = decl.symmetric;
            d.args = fn->second.args;
            return Expr::sym(intern(std::move(d)));
        }
        if (auto l = lets_.find(n.name); l != lets_.end()) {
            const LetDecl& ld = l->second.decl;
            std::vector<bool> natural;
            for (const auto& i : ld.idx) natural.push_back(i.up);
            return with_metric(n.idx, natural, env, [&](const std::vector<int>& c) {
                Env e;
                for (std::size_t k = 0; k < c.size(); ++k) e[ld.idx[k].name] = c[k];
                return eval(ld.body, e);
            });
        }
        if (auto p = params_.find(n.name); p != params_.end()) {
            const Param& pr = p->second;
            return with_metric(n.idx, pr.up, env, [&](const std::vector<int>& c) {
                return Expr::sym(jet_parameter(pr.decl.name, c, pr.up));
            });
        }
        fail(n.span, "unknown name '" + n.name + "'");
    }
};

}  // namespace

Theory elaborate(const TheoryDocument& doc) { return Elaborator(doc).run(); }

Theory load_theory(const std::string& source) {
    ParseResult r = parse(source);
    if (!r.ok()) {
        for (const auto& d : r.diagnostics)
            if (d.severity == Diagnostic::Severity::Error) throw ElaborationError(d);
    }
    return elaborate(*r.doc);
}

}  // namespace mfc
