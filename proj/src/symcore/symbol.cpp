#include <algorithm>
#include <array>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "mfc/expr.hpp"

namespace mfc {

namespace {

constexpr std::size_t kChunkBits = 12;
constexpr std::size_t kChunk = std::size_t(1) << kChunkBits;
constexpr std::size_t kChunks = 4096;

struct Table {
    std::mutex mu;
    std::unordered_map<std::string, SymbolId> by_key;
    std::array<std::unique_ptr<AtomInfo[]>, kChunks> chunks;
    std::size_t count = 0;

    std::shared_mutex metric_mu;
    std::map<std::string, MetricFamily> metrics;
};

Table& table() {
    static Table t;
    return t;
}

std::string join(const std::vector<int>& v, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(v[i]);
    }
    return s;
}

std::string make_key(const SymbolDesc& d) {
    std::ostringstream os;
    os << d.family << '|' << int(d.kind) << '|' << join(d.comp, ",") << '|';
    for (bool u : d.comp_up) os << (u ? '^' : '_');
    os << '|' << join(d.jet, ",") << '|' << d.comp_sym << d.field << d.variational << d.xdep << '|'
       << int(d.rule) << '|' << d.metric << '|';
    for (auto a : d.args) os << a << ',';
    os << '|' << join(d.dargs, ",");
    return os.str();
}

std::string make_name(const SymbolDesc& d) {
    std::string s = d.family;
    if (!d.comp.empty()) {
        // one marker per run of equal variance
        for (std::size_t i = 0; i < d.comp.size(); ++i) {
            bool up = i < d.comp_up.size() ? d.comp_up[i] : false;
            bool prev_up = i > 0 && (i - 1 < d.comp_up.size() ? d.comp_up[i - 1] : false);
            if (i == 0 || up != prev_up) s += up ? "^" : "_";
            s += std::to_string(d.comp[i]);
        }
    }
    if (!d.jet.empty()) {
        s += ",";
        for (int j : d.jet) s += std::to_string(j);
    }
    if (d.rule == Rule::Function) {
        s += "(";
        for (std::size_t i = 0; i < d.args.size(); ++i) {
            if (i) s += ",";
            s += display_name(d.args[i]);
        }
        s += ")";
        if (!d.dargs.empty()) {
            s += "_d";
            for (int a : d.dargs) s += "[" + display_name(d.args[a]) + "]";
        }
    }
    return s;
}

SymbolId insert(AtomInfo info) {
    auto& t = table();
    std::lock_guard lk(t.mu);
    auto it = t.by_key.find(info.key);
    if (it != t.by_key.end()) return it->second;
    std::size_t id = t.count;
    std::size_t c = id >> kChunkBits;
    if (c >= kChunks) throw std::length_error("symbol table full");
    if (!t.chunks[c]) t.chunks[c] = std::make_unique<AtomInfo[]>(kChunk);
    AtomInfo& slot = t.chunks[c][id & (kChunk - 1)];
    slot = std::move(info);
    if (!slot.is_sqrt && slot.leaves.empty()) slot.leaves.push_back(SymbolId(id));
    t.by_key.emplace(slot.key, SymbolId(id));
    ++t.count;
    return SymbolId(id);
}

}  // namespace

const char* kind_name(SymKind k) {
    switch (k) {
        case SymKind::BaseCoord: return "base";
        case SymKind::FiberCoord: return "fiber";
        case SymKind::Multivelocity: return "multivelocity";
        case SymKind::SecondMultivelocity: return "second_multivelocity";
        case SymKind::Multimomentum: return "multimomentum";
        case SymKind::CovHamiltonian: return "covariant_hamiltonian";
        case SymKind::Metric: return "metric";
        case SymKind::InverseMetric: return "inverse_metric";
        case SymKind::DerivedScalar: return "derived_scalar";
        case SymKind::FreeParameter: return "parameter";
    }
    return "?";
}

SymKind kind_from_name(const std::string& s) {
    for (int k = 0; k <= int(SymKind::FreeParameter); ++k)
        if (s == kind_name(SymKind(k))) return SymKind(k);
    throw std::invalid_argument("unknown symbol kind: " + s);
}

SymbolId intern(SymbolDesc d) {
    if (d.comp_sym && d.comp.size() == 2 && d.comp[0] > d.comp[1]) std::swap(d.comp[0], d.comp[1]);
    std::sort(d.jet.begin(), d.jet.end());
    std::sort(d.dargs.begin(), d.dargs.end());
    AtomInfo info;
    info.key = make_key(d);
    {
        auto& t = table();
        std::lock_guard lk(t.mu);
        auto it = t.by_key.find(info.key);
        if (it != t.by_key.end()) return it->second;
    }
    if (d.rule == Rule::InverseMetric || d.rule == Rule::SqrtNegDet) {
        const MetricFamily* m = find_metric(d.metric);
        if (!m) throw UnknownSymbol("unregistered metric family: " + d.metric);
        for (int a = 0; a < m->dim; ++a)
            for (int b = a; b < m->dim; ++b) info.leaves.push_back(metric_symbol(d.metric, a, b));
        std::sort(info.leaves.begin(), info.leaves.end());
    } else if (d.rule == Rule::Function) {
        info.leaves = d.args;
        std::sort(info.leaves.begin(), info.leaves.end());
        info.leaves.erase(std::unique(info.leaves.begin(), info.leaves.end()), info.leaves.end());
    }
    info.name = make_name(d);
    info.d = std::move(d);
    return insert(std::move(info));
}

SymbolId sqrt_atom(const Expr& r) {
    std::ostringstream os;
    os << "sqrt(";
    for (auto& t : r.terms()) {
        os << t.c.str();
        for (auto& [a, k] : t.m) os << '*' << a << '^' << k;
        os << ';';
    }
    os << ')';
    AtomInfo info;
    info.is_sqrt = true;
    info.key = os.str();
    {
        auto& t = table();
        std::lock_guard lk(t.mu);
        auto it = t.by_key.find(info.key);
        if (it != t.by_key.end()) return it->second;
    }
    info.radicand = std::make_shared<const Expr>(r);
    info.leaves = free_symbols(r);
    info.name = "sqrt(" + r.str() + ")";
    info.d.family = "sqrt";
    info.d.kind = SymKind::DerivedScalar;
    return insert(std::move(info));
}

const AtomInfo& atom(SymbolId id) {
    auto& t = table();
    auto& chunk = t.chunks[id >> kChunkBits];
    if (!chunk) throw UnknownSymbol("unknown symbol id " + std::to_string(id));
    return chunk[id & (kChunk - 1)];
}

bool is_sqrt_atom(SymbolId id) { return atom(id).is_sqrt; }
const SymbolDesc& desc(SymbolId id) { return atom(id).d; }
const std::string& display_name(SymbolId id) { return atom(id).name; }
const std::string& intern_key(SymbolId id) { return atom(id).key; }
const std::vector<SymbolId>& leaves(SymbolId id) { return atom(id).leaves; }

void register_metric(const MetricFamily& m) {
    auto& t = table();
    std::unique_lock lk(t.metric_mu);
    auto it = t.metrics.find(m.name);
    if (it != t.metrics.end()) {
        if (it->second.dim != m.dim || it->second.negatives != m.negatives || it->second.variational != m.variational)
            throw std::invalid_argument("metric family " + m.name + " re-registered with another shape");
        return;
    }
    t.metrics.emplace(m.name, m);
}

const MetricFamily* find_metric(const std::string& name) {
    auto& t = table();
    std::shared_lock lk(t.metric_mu);
    auto it = t.metrics.find(name);
    return it == t.metrics.end() ? nullptr : &it->second;
}

SymbolId metric_symbol(const std::string& name, int a, int b) {
    const MetricFamily* m = find_metric(name);
    if (!m) throw UnknownSymbol("unregistered metric family: " + name);
    SymbolDesc d;
    d.family = name;
    d.kind = SymKind::Metric;
    d.comp = {a, b};
    d.comp_up = {false, false};
    d.comp_sym = true;
    d.field = true;
    d.variational = m->variational;
    return intern(std::move(d));
}

SymbolId inverse_metric_symbol(const std::string& name, int a, int b) {
    SymbolDesc d;
    d.family = name;
    d.kind = SymKind::InverseMetric;
    d.comp = {a, b};
    d.comp_up = {true, true};
    d.comp_sym = true;
    d.rule = Rule::InverseMetric;
    d.metric = name;
    return intern(std::move(d));
}

SymbolId sqrt_neg_det_symbol(const std::string& name) {
    SymbolDesc d;
    d.family = "sqrtdet_" + name;
    d.kind = SymKind::DerivedScalar;
    d.rule = Rule::SqrtNegDet;
    d.metric = name;
    return intern(std::move(d));
}

SymbolId free_symbol(const std::string& name, std::vector<int> comp, std::vector<bool> up) {
    SymbolDesc d;
    d.family = name;
    d.kind = SymKind::FreeParameter;
    if (up.empty()) up.assign(comp.size(), false);
    d.comp = std::move(comp);
    d.comp_up = std::move(up);
    return intern(std::move(d));
}

SymbolId jet_successor(SymbolId s, int mu) {
    SymbolDesc d = desc(s);
    d.jet.push_back(mu);
    if (d.field && d.variational) {
        d.kind = d.jet.size() == 1 ? SymKind::Multivelocity : SymKind::SecondMultivelocity;
    }
    return intern(std::move(d));
}

SymbolId function_derivative(SymbolId f, int arg_pos) {
    SymbolDesc d = desc(f);
    if (d.rule != Rule::Function) throw std::invalid_argument("not a function symbol");
    d.dargs.push_back(arg_pos);
    return intern(std::move(d));
}

}  // namespace mfc
