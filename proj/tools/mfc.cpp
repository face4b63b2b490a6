// mfc: derive, verify and report on field theories written in the .thy language.
//
//   mfc derive FILE            Legendre transform, Cartan forms, Euler-Lagrange equations
//   mfc noether FILE           momentum maps, Noether currents, divergence identity
//   mfc check FILE --suite S   invariant suites; exit 0 iff every check passes
//   mfc examples [--emit DIR]  list or write the shipped theory files
//
// Exit codes: 0 ok, 1 verification failure, 2 usage, parse or elaboration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mfc/frontend.hpp"
#include "mfc/report.hpp"
#include "mfc/suites.hpp"

using namespace mfc;

namespace {

struct Usage {
    std::string message;
};

struct Output {
    std::string format = "text";
    std::string out;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Usage{"cannot read '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Theory load(const std::string& path) {
    std::string src = read_file(path);
    ParseResult r = parse(src);
    if (!r.ok()) {
        for (const auto& d : r.diagnostics) std::cerr << format_diagnostic(d, path) << "\n";
        throw 2;
    }
    try {
        return elaborate(*r.doc);
    } catch (const ElaborationError& e) {
        std::cerr << format_diagnostic(e.diagnostic, path) << "\n";
        throw 2;
    }
}

void emit(const Report& rep, const Output& o) {
    std::string body = o.format == "structured" ? rep.document().dump(2) + "\n" : rep.text();
    if (o.out.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw Usage{"cannot write '" + o.out + "'"};
    f << body;
}

std::vector<std::string> component_labels(const JetBundle& jb, const std::string& prefix) {
    std::vector<std::string> r;
    for (int A : jb.variational_fibers()) r.push_back(prefix + display_symbol(jb.y(A)));
    return r;
}

int cmd_derive(const std::string& path, const Output& o) {
    Theory t = load(path);
    const JetBundle& jb = *t.bundle;
    Report rep("derive", t.name);
    rep.add("lagrangian", t.L, "L");
    LegendreResult lr = legendre(jb, t.L);
    std::vector<Expr> mom;
    std::vector<std::string> labels;
    for (int A : jb.variational_fibers())
        for (int mu = 0; mu < jb.base_dim(); ++mu) {
            mom.push_back(lr.momenta.at(jb.mom(A, mu)));
            labels.push_back(display_symbol(jb.mom(A, mu)));
        }
    rep.add("multimomenta", mom, labels);
    rep.add("covariant_hamiltonian", lr.p, "p");
    rep.add("cartan_form", cartan_form(jb, t.L), "Θ_L");
    rep.add("multisymplectic_form", omega_L(jb, t.L), "Ω_L");
    rep.add("euler_lagrange", euler_lagrange(jb, t.L), component_labels(jb, "δL/δ"));
    emit(rep, o);
    return 0;
}

const GeneratorFamily& pick_generator(const Theory& t, const std::string& name) {
    for (const auto& g : t.generators)
        if (g.name == name) return g;
    const GeneratorFamily* hit = nullptr;
    int hits = 0;
    for (const auto& g : t.generators)
        if (g.name.find(name) != std::string::npos) hit = &g, ++hits;
    if (hits == 1) return *hit;
    std::string avail;
    for (const auto& g : t.generators) avail += (avail.empty() ? "" : ", ") + g.name;
    throw Usage{std::string(hits ? "ambiguous" : "unknown") + " generator '" + name + "' (available: " +
                (avail.empty() ? "none" : avail) + ")"};
}

int cmd_noether(const std::string& path, const std::string& gen, const VerifyPlan& plan, const Output& o) {
    Theory t = load(path);
    const JetBundle& jb = *t.bundle;
    std::vector<const GeneratorFamily*> gens;
    if (!gen.empty()) gens.push_back(&pick_generator(t, gen));
    else
        for (const auto& g : t.generators) gens.push_back(&g);
    if (gens.empty()) throw Usage{"theory '" + t.name + "' declares no generator"};

    Report rep("noether", t.name);
    bool ok = true;
    SymbolicSection phi = generic_section(jb);
    for (const GeneratorFamily* g : gens) {
        rep.add_item("momentum_map", g->name, covariant_momentum_map(t, *g));
        rep.add_item("lagrangian_momentum_map", g->name, lagrangian_momentum_map(t, *g));
        rep.add_item("noether_current", g->name, noether_current(t, *g, phi));
        Expr delta = variation_of_L(t, *g);
        rep.add_item("variation_of_L", g->name, delta);
        DivergenceIdentity di = noether_divergence_identity(t, *g);
        CheckResult c = check_equal("noether", "divergence identity [" + g->name + "]", di.lhs, di.rhs, plan);
        rep.add_item("divergence_residual", g->name,
                     Json{{"display", display(di.residual)},
                          {"zero", c.passed},
                          {"detail", c.detail}},
                     display(di.residual) + (c.passed ? "" : "  (Eq. 4D.9 violated)"));
        if (!c.passed) {
            ok = false;
            std::cerr << path << ": error: generator " << g->name << ": Eq. 4D.9 residual nonzero: " << c.detail << "\n";
        }
        if (g->symmetry) {
            OnShellVerdict v = on_shell_conservation(t, *g, plan);
            rep.add_item("on_shell", g->name, Json{{"conserved", v.conserved}, {"detail", v.detail}},
                         std::string(v.conserved ? "conserved: " : "NOT conserved: ") + v.detail);
            if (!v.conserved) {
                ok = false;
                std::cerr << path << ": error: generator " << g->name << ": " << v.detail << "\n";
            }
        } else {
            rep.add_item("on_shell", g->name, Json{{"conserved", nullptr}, {"detail", "not declared a symmetry"}},
                         "not declared a symmetry");
        }
        ConverseExtraction ce = converse_noether(t, *g, 3, plan.seed);
        ConverseStages st = converse_stages(t, ce, 3, plan.seed);
        Json forced = Json::array(), rest = Json::array(), legend = Json::object(), single = Json::array(),
             contracted = Json::array();
        std::string text = "unknowns:";
        for (std::size_t A = 0; A < ce.unknowns.size(); ++A) {
            std::string n = "δL/δ" + display_symbol(jb.y(int(A)));
            legend[display_symbol(ce.unknowns[A])] = n;
            text += " " + display_symbol(ce.unknowns[A]) + " = " + n;
            if (jb.variational(int(A))) (st.forced_single[A] ? forced : rest).push_back(n);
        }
        text += "\nfrom the parameter-derivative coefficients (one field at a time), forced to vanish: " + forced.dump();
        for (const auto& e : st.single_field) {
            single.push_back(display(e));
            text += "\n  0 = " + display(e);
        }
        text += "\nremaining contracted equations once those vanish:";
        for (const auto& e : st.contracted) {
            contracted.push_back(display(e));
            text += "\n  0 = " + display(e);
        }
        if (st.contracted.empty()) text += " none";
        rep.add_item("converse_extraction", g->name,
                     Json{{"unknowns", legend},
                          {"forced", forced},
                          {"not_forced", rest},
                          {"single_field_equations", single},
                          {"contracted_equations", contracted}},
                     text);
    }
    emit(rep, o);
    return ok ? 0 : 1;
}

int cmd_check(const std::string& path, const std::string& suite, const VerifyPlan& plan, const Output& o) {
    Theory t = load(path);
    std::vector<CheckResult> res;
    try {
        res = run_suite(t, suite, plan);
    } catch (const std::invalid_argument& e) {
        throw Usage{e.what()};
    }
    Report rep("check", t.name);
    rep.add_checks(res);
    int failed = 0;
    for (const auto& c : res)
        if (!c.passed) {
            ++failed;
            std::cerr << path << ": check failed: " << c.suite << "/" << c.name << ": " << c.detail << "\n";
        }
    rep.add_value("summary", Json{{"checks", res.size()}, {"failed", failed}},
                  std::to_string(res.size() - failed) + "/" + std::to_string(res.size()) + " checks passed");
    emit(rep, o);
    return failed ? 1 : 0;
}

int cmd_examples(const std::string& dir) {
    for (const auto& [name, src] : builtin_theory_files()) {
        if (dir.empty()) {
            std::cout << name << "\n";
            continue;
        }
        std::filesystem::create_directories(dir);
        std::string p = (std::filesystem::path(dir) / name).string();
        std::ofstream f(p, std::ios::binary);
        if (!f) throw Usage{"cannot write '" + p + "'"};
        f << src;
        std::cout << p << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covariant field theory derivations and checks"};
    app.require_subcommand(1);
    Output out;
    VerifyPlan plan;
    std::string file, suite = "all", generator, emit_dir;

    auto add_output = [&](CLI::App* c) {
        c->add_option("--format", out.format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
        c->add_option("--out", out.out, "write the report to PATH");
    };
    auto add_plan = [&](CLI::App* c) {
        c->add_option("--samples", plan.n_samples, "numeric samples per identity")->check(CLI::PositiveNumber);
        c->add_option("--tol", plan.tol, "numeric tolerance")->check(CLI::NonNegativeNumber);
        c->add_option("--seed", plan.seed, "sampling seed");
    };

    auto* derive = app.add_subcommand("derive", "Legendre transform, Cartan forms, Euler-Lagrange equations");
    derive->add_option("file", file, "theory file")->required();
    add_output(derive);

    auto* noether = app.add_subcommand("noether", "momentum maps, Noether currents and the divergence identity");
    noether->add_option("file", file, "theory file")->required();
    noether->add_option("--generator", generator, "generator name or unique part of it");
    add_plan(noether);
    add_output(noether);

    auto* check = app.add_subcommand("check", "run invariant suites");
    check->add_option("file", file, "theory file")->required();
    check->add_option("--suite", suite, "forms, legendre, noether, bracket, transitivity or all")
        ->check(CLI::IsMember(suite_names()));
    add_plan(check);
    add_output(check);

    auto* examples = app.add_subcommand("examples", "list or write the shipped theory files");
    examples->add_option("--emit", emit_dir, "directory to write them to");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*derive) return cmd_derive(file, out);
        if (*noether) return cmd_noether(file, generator, plan, out);
        if (*check) return cmd_check(file, suite, plan, out);
        if (*examples) return cmd_examples(emit_dir);
    } catch (const Usage& u) {
        std::cerr << "error: " << u.message << "\n";
        return 2;
    } catch (int code) {
        return code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
