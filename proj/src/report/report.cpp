#include "mfc/report.hpp"

#include <algorithm>
#include <sstream>

namespace mfc {

namespace {

const char* rule_name(Rule r) {
    switch (r) {
        case Rule::None: return "none";
        case Rule::InverseMetric: return "inverse_metric";
        case Rule::SqrtNegDet: return "sqrt_neg_det";
        case Rule::Function: return "function";
    }
    return "?";
}

Rule rule_from_name(const std::string& s) {
    for (Rule r : {Rule::None, Rule::InverseMetric, Rule::SqrtNegDet, Rule::Function})
        if (s == rule_name(r)) return r;
    throw ReportFormatError("unknown rule: " + s);
}

}  // namespace

// ---- symbol table --------------------------------------------------------------------

int SymbolTable::id(SymbolId s) {
    if (auto it = local_.find(s); it != local_.end()) return it->second;
    const AtomInfo& a = atom(s);
    if (a.is_sqrt) {
        for (SymbolId t : atoms_of(*a.radicand)) id(t);
    } else {
        for (SymbolId t : a.d.args) id(t);
        std::string fam = a.d.kind == SymKind::Metric ? a.d.family : a.d.metric;
        if (!fam.empty() && std::find(metrics_.begin(), metrics_.end(), fam) == metrics_.end())
            metrics_.push_back(fam);
    }
    int k = int(order_.size());
    local_[s] = k;
    order_.push_back(s);
    return k;
}

Json SymbolTable::symbols_json() const {
    Json out = Json::array();
    // a local copy resolves radicand ids without mutating the table
    SymbolTable self = *this;
    for (std::size_t k = 0; k < order_.size(); ++k) {
        SymbolId s = order_[k];
        const AtomInfo& a = atom(s);
        Json j;
        j["id"] = k;
        j["name"] = a.name;
        if (a.is_sqrt) {
            j["sqrt"] = expr_to_json(*a.radicand, self);
        } else {
            const SymbolDesc& d = a.d;
            j["family"] = d.family;
            j["kind"] = kind_name(d.kind);
            j["comp"] = d.comp;
            j["comp_up"] = d.comp_up;
            j["comp_sym"] = d.comp_sym;
            j["jet"] = d.jet;
            j["field"] = d.field;
            j["variational"] = d.variational;
            j["xdep"] = d.xdep;
            j["rule"] = rule_name(d.rule);
            j["metric"] = d.metric;
            Json args = Json::array();
            for (SymbolId t : d.args) args.push_back(self.local_.at(t));
            j["args"] = args;
            j["dargs"] = d.dargs;
        }
        out.push_back(std::move(j));
    }
    return out;
}

Json SymbolTable::metrics_json() const {
    Json out = Json::array();
    for (const auto& name : metrics_) {
        const MetricFamily* m = find_metric(name);
        if (!m) throw ReportFormatError("unregistered metric family " + name);
        out.push_back({{"name", m->name}, {"dim", m->dim}, {"negatives", m->negatives}, {"variational", m->variational}});
    }
    return out;
}

Json expr_to_json(const Expr& e, SymbolTable& st) {
    Json terms = Json::array();
    for (const Term& t : e.terms()) {
        Json m = Json::array();
        for (const auto& [s, k] : t.m) m.push_back({st.id(s), k});
        terms.push_back({{"c", t.c.str()}, {"m", m}});
    }
    return terms;
}

Json form_to_json(const DiffForm& f, SymbolTable& st) {
    Json coords = Json::array();
    for (SymbolId s : f.chart()->coords()) coords.push_back(st.id(s));
    Json terms = Json::array();
    for (const auto& [w, c] : f.terms()) {
        Json idx = Json::array();
        for (auto i : w) idx.push_back(int(i));
        terms.push_back({{"wedge", idx}, {"coeff", expr_to_json(c, st)}});
    }
    return {{"chart", f.chart()->label()},
            {"coords", coords},
            {"base_dim", f.chart()->base_dim()},
            {"degree", f.degree()},
            {"terms", terms}};
}

// ---- reading -------------------------------------------------------------------------

SymbolResolver::SymbolResolver(const Json& doc) {
    try {
        if (doc.contains("schema_version") && doc.at("schema_version").get<int>() != kReportSchemaVersion)
            throw ReportFormatError("unsupported schema_version " + doc.at("schema_version").dump());
        for (const auto& m : doc.at("metrics")) {
            try {
                register_metric({m.at("name").get<std::string>(), m.at("dim").get<int>(), m.at("negatives").get<int>(),
                                 m.at("variational").get<bool>()});
            } catch (const std::invalid_argument& e) {
                throw ReportFormatError(e.what());
            }
        }
        for (const auto& j : doc.at("symbols")) {
            if (j.at("id").get<std::size_t>() != ids_.size()) throw ReportFormatError("symbols out of order");
            if (j.contains("sqrt")) {
                ids_.push_back(sqrt_atom(expr(j.at("sqrt"))));
                continue;
            }
            SymbolDesc d;
            d.family = j.at("family").get<std::string>();
            d.kind = kind_from_name(j.at("kind").get<std::string>());
            d.comp = j.at("comp").get<std::vector<int>>();
            d.comp_up = j.at("comp_up").get<std::vector<bool>>();
            d.comp_sym = j.at("comp_sym").get<bool>();
            d.jet = j.at("jet").get<std::vector<int>>();
            d.field = j.at("field").get<bool>();
            d.variational = j.at("variational").get<bool>();
            d.xdep = j.at("xdep").get<bool>();
            d.rule = rule_from_name(j.at("rule").get<std::string>());
            d.metric = j.at("metric").get<std::string>();
            for (int a : j.at("args").get<std::vector<int>>()) d.args.push_back(symbol(a));
            d.dargs = j.at("dargs").get<std::vector<int>>();
            ids_.push_back(intern(std::move(d)));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ReportFormatError(std::string("malformed report: ") + e.what());
    }
}

SymbolId SymbolResolver::symbol(int local) const {
    if (local < 0 || local >= int(ids_.size())) throw ReportFormatError("symbol id out of range");
    return ids_[local];
}

Expr SymbolResolver::expr(const Json& j) const {
    try {
        std::vector<Term> terms;
        for (const auto& t : j) {
            Term term{Rational::parse(t.at("c").get<std::string>()), {}};
            for (const auto& f : t.at("m")) term.m.emplace_back(symbol(f.at(0).get<int>()), f.at(1).get<std::int32_t>());
            terms.push_back(std::move(term));
        }
        return Expr::from_terms(std::move(terms));
    } catch (const nlohmann::json::exception& e) {
        throw ReportFormatError(std::string("malformed expression: ") + e.what());
    } catch (const std::logic_error& e) {
        throw ReportFormatError(std::string("malformed coefficient: ") + e.what());
    }
}

DiffForm SymbolResolver::form(const Json& j) const {
    try {
        std::vector<SymbolId> coords;
        for (int c : j.at("coords").get<std::vector<int>>()) coords.push_back(symbol(c));
        auto chart = std::make_shared<Chart>(j.at("chart").get<std::string>(), coords, j.at("base_dim").get<int>());
        DiffForm f(chart, j.at("degree").get<int>());
        for (const auto& t : j.at("terms"))
            f += DiffForm::monomial(chart, expr(t.at("coeff")), t.at("wedge").get<std::vector<int>>());
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ReportFormatError(std::string("malformed form: ") + e.what());
    }
}

// ---- display -------------------------------------------------------------------------

namespace {

const char* kSup[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
const char* kSub[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};

std::string digits(int v, const char* const* table) {
    std::string s = std::to_string(v), r;
    for (char c : s) r += c == '-' ? (table == kSup ? "⁻" : "₋") : table[c - '0'];
    return r;
}

std::string indices(const SymbolDesc& d) {
    std::string r;
    for (std::size_t k = 0; k < d.comp.size(); ++k) r += digits(d.comp[k], d.comp_up[k] ? kSup : kSub);
    if (!d.jet.empty()) {
        r += ",";
        for (int j : d.jet) r += digits(j, kSub);
    }
    return r;
}

std::string group(const std::string& s) {
    return s.find_first_of("+- ") == std::string::npos ? s : "(" + s + ")";
}

}  // namespace

std::string display_symbol(SymbolId s) {
    const AtomInfo& a = atom(s);
    if (a.is_sqrt) return "√(" + display(*a.radicand) + ")";
    const SymbolDesc& d = a.d;
    if (d.kind == SymKind::BaseCoord) return "x" + indices(d);
    if (d.rule == Rule::SqrtNegDet) return "√|det " + d.metric + "|";
    if (d.rule == Rule::Function) {
        std::string r = d.family + indices(d);
        for (int k : d.dargs) r = "∂" + std::to_string(k) + " " + r;
        return r;
    }
    if (d.kind == SymKind::Multimomentum && d.family == "p_A") return "p" + indices(d);
    return d.family + indices(d);
}

std::string display(const Expr& e) {
    if (e.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const Term& t : e.terms()) {
        Rational c = t.c;
        bool neg = c < Rational(0);
        if (neg) c = -c;
        out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
        first = false;
        std::string mono;
        for (const auto& [s, k] : t.m) {
            if (!mono.empty()) mono += "·";
            mono += display_symbol(s);
            if (k != 1) mono += digits(k, kSup);
        }
        if (mono.empty()) out += c.str();
        else if (c == Rational(1)) out += mono;
        else out += c.str() + "·" + mono;
    }
    return out;
}

std::string display(const DiffForm& f) {
    if (f.is_zero()) return "0";
    std::string out;
    for (const auto& [w, c] : f.terms()) {
        if (!out.empty()) out += " + ";
        std::string basis;
        for (auto i : w) basis += (basis.empty() ? "d" : " ∧ d") + display_symbol(f.chart()->coord(i));
        std::string coeff = display(c);
        if (basis.empty()) out += group(coeff);
        else if (coeff == "1") out += basis;
        else out += group(coeff) + " " + basis;
    }
    return out;
}

// ---- report --------------------------------------------------------------------------

Report::Report(std::string command, std::string theory) : command_(std::move(command)), theory_(std::move(theory)) {}

void Report::add(const std::string& key, const Expr& e, const std::string& label) {
    body_[key] = {{"display", display(e)}, {"expr", expr_to_json(e, st_)}};
    lines_.push_back(key + ":");
    lines_.push_back("  " + (label.empty() ? "" : label + " = ") + display(e));
}

void Report::add(const std::string& key, const std::vector<Expr>& es, const std::vector<std::string>& labels) {
    Json arr = Json::array();
    lines_.push_back(key + ":");
    for (std::size_t i = 0; i < es.size(); ++i) {
        std::string label = i < labels.size() ? labels[i] : std::to_string(i);
        arr.push_back({{"label", label}, {"display", display(es[i])}, {"expr", expr_to_json(es[i], st_)}});
        lines_.push_back("  " + label + " = " + display(es[i]));
    }
    body_[key] = arr;
}

void Report::add(const std::string& key, const DiffForm& f, const std::string& label) {
    body_[key] = {{"display", display(f)}, {"form", form_to_json(f, st_)}};
    lines_.push_back(key + ":");
    lines_.push_back("  " + (label.empty() ? "" : label + " = ") + display(f));
}

void Report::add_item(const std::string& key, const std::string& item, const Expr& e) {
    add_item(key, item, Json{{"display", display(e)}, {"expr", expr_to_json(e, st_)}}, display(e));
}

void Report::add_item(const std::string& key, const std::string& item, const DiffForm& f) {
    add_item(key, item, Json{{"display", display(f)}, {"form", form_to_json(f, st_)}}, display(f));
}

void Report::add_item(const std::string& key, const std::string& item, Json value, const std::string& text) {
    if (!body_.contains(key)) body_[key] = Json::object();
    body_[key][item] = std::move(value);
    lines_.push_back(key + " [" + item + "]:");
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) lines_.push_back("  " + l);
}

void Report::add_value(const std::string& key, Json value, const std::string& text) {
    body_[key] = std::move(value);
    lines_.push_back(key + ": " + text);
}

void Report::add_checks(const std::vector<CheckResult>& checks) {
    Json arr = body_.contains("check_results") ? body_["check_results"] : Json::array();
    for (const auto& c : checks) {
        arr.push_back({{"suite", c.suite}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        lines_.push_back(std::string(c.passed ? "PASS " : "FAIL ") + c.suite + "/" + c.name +
                         (c.detail.empty() ? "" : ": " + c.detail));
    }
    body_["check_results"] = arr;
}

void Report::note(const std::string& line) { lines_.push_back(line); }

Json Report::document() const {
    Json doc;
    doc["schema_version"] = kReportSchemaVersion;
    doc["command"] = command_;
    doc["theory"] = theory_;
    doc["metrics"] = st_.metrics_json();
    doc["symbols"] = st_.symbols_json();
    for (const auto& [k, v] : body_.items()) doc[k] = v;
    return doc;
}

std::string Report::text() const {
    std::string out = theory_ + " (" + command_ + ")\n";
    for (const auto& l : lines_) out += l + "\n";
    return out;
}

}  // namespace mfc
