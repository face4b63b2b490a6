#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

#include "mfc/expr.hpp"

namespace mfc {

double Assignment::get(SymbolId s) const {
    auto it = values.find(s);
    if (it == values.end()) throw UnboundSymbol("unbound symbol " + display_name(s));
    return it->second;
}

namespace {

void bind_metric(Assignment& a, const MetricFamily& m, const Eigen::MatrixXd& g) {
    Eigen::MatrixXd gi = g.inverse();
    double det = g.determinant();
    for (int i = 0; i < m.dim; ++i)
        for (int j = i; j < m.dim; ++j) {
            a.set(metric_symbol(m.name, i, j), g(i, j));
            a.set(inverse_metric_symbol(m.name, i, j), gi(i, j));
        }
    a.set(sqrt_neg_det_symbol(m.name), std::sqrt(std::abs(det)));
}

bool is_metric_component(SymbolId s, const MetricFamily** out) {
    const SymbolDesc& d = desc(s);
    if (d.kind != SymKind::Metric || !d.jet.empty() || d.rule != Rule::None || d.comp.size() != 2) return false;
    const MetricFamily* m = find_metric(d.family);
    if (!m) return false;
    *out = m;
    return true;
}

}  // namespace

void Assignment::refresh_metrics() {
    std::set<std::string> seen;
    for (auto& [s, v] : values) {
        const MetricFamily* m = nullptr;
        if (is_metric_component(s, &m)) seen.insert(m->name);
    }
    for (auto& name : seen) {
        const MetricFamily* m = find_metric(name);
        Eigen::MatrixXd g(m->dim, m->dim);
        bool complete = true;
        for (int i = 0; i < m->dim && complete; ++i)
            for (int j = i; j < m->dim; ++j) {
                auto it = values.find(metric_symbol(name, i, j));
                if (it == values.end()) {
                    complete = false;
                    break;
                }
                g(i, j) = g(j, i) = it->second;
            }
        if (complete) bind_metric(*this, *m, g);
    }
}

double eval_numeric(const Expr& e, const Assignment& a) {
    std::unordered_map<SymbolId, double> sq;
    double total = 0;
    for (auto& t : e.terms()) {
        double v = t.c.to_double();
        for (auto& [id, k] : t.m) {
            if (is_sqrt_atom(id)) {
                auto it = sq.find(id);
                if (it == sq.end()) {
                    double r = eval_numeric(*atom(id).radicand, a);
                    if (r < 0) throw NegativeRadicand("negative radicand in " + display_name(id));
                    it = sq.emplace(id, std::sqrt(r)).first;
                }
                v *= std::pow(it->second, k);
            } else {
                double x = a.get(id);
                v *= k == 1 ? x : std::pow(x, k);
            }
        }
        total += v;
    }
    return total;
}

Assignment sample_assignment(const std::vector<Expr>& exprs, std::mt19937_64& rng,
                             const std::vector<SymbolId>& extra) {
    std::set<SymbolId> syms(extra.begin(), extra.end());
    for (auto& e : exprs)
        for (SymbolId a : atoms_of(e)) {
            for (SymbolId l : leaves(a)) syms.insert(l);
            if (!is_sqrt_atom(a)) syms.insert(a);
        }
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_real_distribution<double> sv(1.0, 3.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Assignment a;
        std::set<std::string> metrics;
        for (SymbolId s : syms) {
            const MetricFamily* m = nullptr;
            const SymbolDesc& d = desc(s);
            if (is_metric_component(s, &m)) {
                metrics.insert(m->name);
            } else if (d.rule == Rule::InverseMetric || d.rule == Rule::SqrtNegDet) {
                metrics.insert(d.metric);
            } else {
                a.set(s, uni(rng));
            }
        }
        for (auto& name : metrics) {
            const MetricFamily* m = find_metric(name);
            int n = m->dim;
            // L = Q1 diag(s) Q2 with s in [1,3]: cond(L) <= 3
            auto orth = [&]() {
                Eigen::MatrixXd r(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) r(i, j) = uni(rng);
                Eigen::HouseholderQR<Eigen::MatrixXd> qr(r);
                return Eigen::MatrixXd(qr.householderQ());
            };
            Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i) s(i, i) = sv(rng);
            Eigen::MatrixXd L = orth() * s * orth();
            Eigen::MatrixXd eta = Eigen::MatrixXd::Identity(n, n);
            for (int i = 0; i < m->negatives; ++i) eta(i, i) = -1;
            bind_metric(a, *m, L.transpose() * eta * L);
        }
        bool ok = true;
        try {
            for (auto& e : exprs) {
                double v = eval_numeric(e, a);
                if (!std::isfinite(v)) ok = false;
            }
            for (auto& e : exprs)
                for (SymbolId at : atoms_of(e))
                    if (is_sqrt_atom(at) && std::abs(eval_numeric(*atom(at).radicand, a)) < 1e-6) ok = false;
        } catch (const NegativeRadicand&) {
            ok = false;
        }
        if (ok) return a;
    }
    throw DegenerateSample("no admissible sample after 100 attempts");
}

bool equal_numeric(const Expr& a, const Expr& b, int n_samples, double tol, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n_samples; ++i) {
        Assignment s = sample_assignment({a, b}, rng);
        double x = eval_numeric(a, s), y = eval_numeric(b, s);
        if (std::abs(x - y) > tol * (1 + std::abs(x) + std::abs(y))) return false;
    }
    return true;
}

}  // namespace mfc
