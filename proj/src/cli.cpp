#include "ifc/cli.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ifc/attacker.hpp"
#include "ifc/constraint.hpp"
#include "ifc/surface.hpp"

namespace ifc::cli {

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

DelegationContext load_ctx(const std::string& path) {
    if (path.empty()) return DelegationContext{};
    return parse_context(read_file(path));
}

struct Flags {
    bool oracle = false;
    bool trace = false;
    bool json = false;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
    cmd->add_flag("--oracle", f.oracle, "cross-check against the brute-force semantics");
    cmd->add_flag("--trace", f.trace, "print rule applications");
    cmd->add_flag("--json", f.json, "machine-readable output");
}

void merge_atoms(std::set<std::string>& into, const std::set<std::string>& from) {
    into.insert(from.begin(), from.end());
}

std::string attacker_text(const Attacker& a) {
    std::string s = "{";
    bool first = true;
    for (const std::string& atom : a.controlled) {
        if (!first) s += ", ";
        s += atom;
        first = false;
    }
    return s + "}";
}

void print_trace(std::ostringstream& out, const std::vector<std::string>& trace) {
    for (const std::string& line : trace) out << "# " << line << "\n";
}

RunResult do_actsfor(const std::string& ctx_path, const std::string& p_text,
                     const std::string& q_text, const Flags& flags) {
    std::ostringstream out;
    DelegationContext ctx = load_ctx(ctx_path);
    NormalForm p = parse_normal_form(p_text);
    NormalForm q = parse_normal_form(q_text);
    std::vector<std::string> trace;
    bool result = acts_for(ctx, p, q, flags.trace ? &trace : nullptr);

    if (flags.oracle) {
        std::set<std::string> universe = ctx.atoms();
        merge_atoms(universe, p.atoms());
        merge_atoms(universe, q.atoms());
        if (universe.size() > kMaxUniverse) {
            out << "error: --oracle needs at most " << kMaxUniverse << " atoms, got "
                << universe.size() << "\n";
            return {2, out.str()};
        }
        bool semantic = oracle_acts_for(ctx, p, q);
        if (semantic != result) {
            out << "oracle disagreement: actsfor computed " << (result ? "true" : "false")
                << ", semantics says " << (semantic ? "true" : "false") << "\n";
            if (auto witness = acts_for_counterexample(ctx, p, q)) {
                out << "witness attacker: " << attacker_text(*witness) << "\n";
            }
            return {3, out.str()};
        }
    }

    if (flags.json) {
        ordered_json j;
        j["command"] = "actsfor";
        j["p"] = to_string(p);
        j["q"] = to_string(q);
        j["result"] = result;
        if (flags.trace) j["trace"] = trace;
        out << j.dump(2) << "\n";
    } else {
        if (flags.trace) print_trace(out, trace);
        out << (result ? "true" : "false") << "\n";
    }
    return {result ? 0 : 1, out.str()};
}

RunResult do_min(const std::string& ctx_path, const std::string& p_text, const Flags& flags) {
    std::ostringstream out;
    DelegationContext ctx = load_ctx(ctx_path);
    NormalForm p = parse_normal_form(p_text);
    std::vector<std::string> trace;
    NormalForm r = min_rep(ctx, p, flags.trace ? &trace : nullptr);

    if (flags.oracle) {
        // The defining property of the minimal representative: replacing p by
        // r reduces semantic acts-for to the syntactic order, for every q.
        std::set<std::string> universe = ctx.atoms();
        merge_atoms(universe, p.atoms());
        merge_atoms(universe, r.atoms());
        if (universe.size() > 5) {
            out << "error: --oracle for min needs at most 5 atoms, got " << universe.size()
                << "\n";
            return {2, out.str()};
        }
        for (const NormalForm& q : all_normal_forms(universe)) {
            if (syntactic_acts_for(r, q) != oracle_acts_for(ctx, p, q)) {
                out << "oracle disagreement: min computed " << to_string(r)
                    << " but it splits from " << to_string(p) << " at q = " << to_string(q)
                    << "\n";
                return {3, out.str()};
            }
        }
    }

    if (flags.json) {
        ordered_json j;
        j["command"] = "min";
        j["input"] = to_string(p);
        j["result"] = to_string(r);
        if (flags.trace) j["trace"] = trace;
        out << j.dump(2) << "\n";
    } else {
        if (flags.trace) print_trace(out, trace);
        out << to_string(r) << "\n";
    }
    return {0, out.str()};
}

RunResult do_flowsto(const std::string& cctx_path, const std::string& ictx_path,
                     const std::string& from_text, const std::string& to_text,
                     const Flags& flags) {
    std::ostringstream out;
    LabelContext ctx{load_ctx(cctx_path), load_ctx(ictx_path)};
    Label from = parse_label(from_text);
    Label to = parse_label(to_text);

    std::vector<std::string> trace;
    bool conf_ok, integ_ok;
    if (flags.trace) {
        std::vector<std::string> conf_trace, integ_trace;
        conf_ok = acts_for(ctx.conf_ctx, to.conf, from.conf, &conf_trace);
        integ_ok = acts_for(ctx.integ_ctx, from.integ, to.integ, &integ_trace);
        for (const std::string& l : conf_trace) trace.push_back("confidentiality: " + l);
        for (const std::string& l : integ_trace) trace.push_back("integrity: " + l);
    } else {
        conf_ok = acts_for(ctx.conf_ctx, to.conf, from.conf);
        integ_ok = acts_for(ctx.integ_ctx, from.integ, to.integ);
    }
    bool result = conf_ok && integ_ok;

    if (flags.oracle) {
        std::set<std::string> universe = ctx.conf_ctx.atoms();
        merge_atoms(universe, ctx.integ_ctx.atoms());
        merge_atoms(universe, from.atoms());
        merge_atoms(universe, to.atoms());
        if (universe.size() > kMaxUniverse) {
            out << "error: --oracle needs at most " << kMaxUniverse << " atoms, got "
                << universe.size() << "\n";
            return {2, out.str()};
        }
        bool semantic = oracle_acts_for(ctx.conf_ctx, to.conf, from.conf) &&
                        oracle_acts_for(ctx.integ_ctx, from.integ, to.integ);
        if (semantic != result) {
            out << "oracle disagreement: flowsto computed " << (result ? "true" : "false")
                << ", semantics says " << (semantic ? "true" : "false") << "\n";
            return {3, out.str()};
        }
    }

    if (flags.json) {
        ordered_json j;
        j["command"] = "flowsto";
        j["from"] = to_string(from);
        j["to"] = to_string(to);
        j["result"] = result;
        if (flags.trace) j["trace"] = trace;
        out << j.dump(2) << "\n";
    } else {
        if (flags.trace) print_trace(out, trace);
        out << (result ? "true" : "false") << "\n";
    }
    return {result ? 0 : 1, out.str()};
}

RunResult do_nmif(const std::string& cctx_path, const std::string& ictx_path,
                  const std::string& label_text, const Flags& flags) {
    std::ostringstream out;
    LabelContext ctx{load_ctx(cctx_path), load_ctx(ictx_path)};
    Label label = parse_label(label_text);
    std::vector<std::string> trace;
    bool result = uncompromised(ctx, label, flags.trace ? &trace : nullptr);

    if (flags.oracle) {
        std::set<std::string> universe = ctx.conf_ctx.atoms();
        merge_atoms(universe, ctx.integ_ctx.atoms());
        merge_atoms(universe, label.atoms());
        if (universe.size() > kMaxUniverse) {
            out << "error: --oracle needs at most " << kMaxUniverse << " atoms, got "
                << universe.size() << "\n";
            return {2, out.str()};
        }
        bool semantic = oracle_uncompromised(ctx, label);
        if (semantic != result) {
            out << "oracle disagreement: nmif computed " << (result ? "true" : "false")
                << ", semantics says " << (semantic ? "true" : "false") << "\n";
            if (auto witness = uncompromised_counterexample(ctx, label)) {
                out << "witness attacker pair: conf " << attacker_text(witness->conf)
                    << ", integ " << attacker_text(witness->integ) << "\n";
            }
            return {3, out.str()};
        }
    }

    if (flags.json) {
        ordered_json j;
        j["command"] = "nmif";
        j["label"] = to_string(label);
        j["result"] = result;
        if (flags.trace) j["trace"] = trace;
        out << j.dump(2) << "\n";
    } else {
        if (flags.trace) print_trace(out, trace);
        out << (result ? "true" : "false") << "\n";
    }
    return {result ? 0 : 1, out.str()};
}

RunResult do_solve(const std::string& path, const Flags& flags) {
    std::ostringstream out;
    ConstraintSystem sys = parse_constraint_file(read_file(path));

    auto report_failure = [&](const SolveFailure& f) -> RunResult {
        std::string kind =
            f.kind == SolveFailure::Kind::Unsatisfiable ? "unsatisfiable" : "no-minimal-solution";
        if (flags.json) {
            ordered_json j;
            j["command"] = "solve";
            j["ok"] = false;
            j["failure"] = {{"kind", kind}, {"message", f.message}, {"origin", f.origin}};
            out << j.dump(2) << "\n";
        } else {
            out << kind << ": " << f.message;
            if (!f.origin.empty()) out << " (" << f.origin << ")";
            out << "\n";
        }
        return {1, out.str()};
    };

    if (auto fail = translate_system(sys)) return report_failure(*fail);
    std::vector<std::string> trace;
    SolveResult result = solve(sys, flags.trace ? &trace : nullptr);
    if (!result.ok()) return report_failure(*result.failure);
    const Solution& sol = *result.solution;

    if (flags.oracle) {
        std::set<std::string> universe = sys.universe;
        merge_atoms(universe, sys.contexts.conf_ctx.atoms());
        merge_atoms(universe, sys.contexts.integ_ctx.atoms());
        if (universe.size() > kMaxUniverse) {
            out << "error: --oracle needs at most " << kMaxUniverse << " atoms, got "
                << universe.size() << "\n";
            return {2, out.str()};
        }
        std::map<std::pair<std::string, Proj>, NormalForm> cur;
        for (const auto& [name, label] : sol.assignment) {
            cur.emplace(std::make_pair(name, Proj::C), label.conf);
            cur.emplace(std::make_pair(name, Proj::I), label.integ);
        }
        for (const PrincipalConstraint& pc : sys.constraints) {
            NormalForm lhs = pc.lhs_is_var ? cur.at({pc.lhs_var, pc.component}) : pc.lhs_const;
            NormalForm rhs = eval_expr(pc.rhs, sys, cur);
            if (!oracle_acts_for(sys.contexts.context(pc.component), lhs, rhs)) {
                out << "oracle disagreement: solution violates " << to_string(pc)
                    << " (rhs = " << to_string(rhs) << ")\n";
                return {3, out.str()};
            }
        }
    }

    if (flags.json) {
        ordered_json j;
        j["command"] = "solve";
        j["ok"] = true;
        ordered_json vars = ordered_json::object();
        for (const std::string& v : sys.variables) {
            vars[v] = to_string(sol.assignment.at(v));
        }
        j["solution"] = vars;
        if (flags.trace) j["trace"] = trace;
        out << j.dump(2) << "\n";
    } else {
        if (flags.trace) print_trace(out, trace);
        for (const std::string& v : sys.variables) {
            out << v << " = " << to_string(sol.assignment.at(v)) << "\n";
        }
    }
    return {0, out.str()};
}

RunResult do_check(const std::string& path, const Flags& flags) {
    std::ostringstream out;
    surface::Program prog = surface::parse_program(read_file(path));
    std::vector<std::string> trace;
    surface::Report report = surface::check_program(prog, flags.trace ? &trace : nullptr);

    if (flags.oracle) {
        // Re-verify every downgrade and output verdict against the
        // brute-force semantics, under each function's own contexts.
        std::map<std::string, LabelContext> contexts;
        std::map<std::string, std::set<std::string>> universes;
        for (surface::FunctionSystem& fs : surface::gen_constraints(prog)) {
            std::set<std::string> u = fs.sys.universe;
            merge_atoms(u, fs.sys.contexts.conf_ctx.atoms());
            merge_atoms(u, fs.sys.contexts.integ_ctx.atoms());
            universes[fs.name] = std::move(u);
            contexts[fs.name] = fs.sys.contexts;
        }
        auto guard = [&](const std::string& fn) {
            return universes.at(fn).size() <= kMaxUniverse;
        };
        for (const surface::Verdict& v : report.downgrades) {
            if (!v.label) continue;
            if (!guard(v.fn)) {
                out << "error: --oracle needs at most " << kMaxUniverse << " atoms\n";
                return {2, out.str()};
            }
            if (oracle_uncompromised(contexts.at(v.fn), *v.label) != v.ok) {
                out << "oracle disagreement: " << v.kind << " at line " << v.line << " of "
                    << to_string(*v.label) << "\n";
                return {3, out.str()};
            }
        }
        for (const surface::Verdict& v : report.outputs) {
            // The semantic claim covers the flow itself; verdicts that failed
            // on side conditions (residual checks) are out of its scope.
            if (!v.label || v.host.empty()) continue;
            if (!guard(v.fn)) {
                out << "error: --oracle needs at most " << kMaxUniverse << " atoms\n";
                return {2, out.str()};
            }
            const LabelContext& ctx = contexts.at(v.fn);
            Label host(NormalForm::atom(v.host), NormalForm::atom(v.host));
            bool semantic = oracle_acts_for(ctx.conf_ctx, host.conf, v.label->conf) &&
                            oracle_acts_for(ctx.integ_ctx, v.label->integ, host.integ);
            bool algorithmic = flows_to(ctx, *v.label, host);
            if (semantic != algorithmic) {
                out << "oracle disagreement: output at line " << v.line << " of "
                    << to_string(*v.label) << "\n";
                return {3, out.str()};
            }
        }
    }

    if (flags.json) {
        ordered_json j;
        j["command"] = "check";
        j["accepted"] = report.accepted;
        if (report.blame_line) {
            j["blame_line"] = *report.blame_line;
        } else {
            j["blame_line"] = nullptr;
        }
        j["variables"] = ordered_json::array();
        for (const surface::VarReport& v : report.variables) {
            j["variables"].push_back(
                {{"function", v.fn}, {"name", v.name}, {"label", to_string(v.label)}});
        }
        auto verdicts = [&](const std::vector<surface::Verdict>& vs) {
            ordered_json arr = ordered_json::array();
            for (const surface::Verdict& v : vs) {
                ordered_json e;
                e["function"] = v.fn;
                e["line"] = v.line;
                e["kind"] = v.kind;
                if (v.label) e["label"] = to_string(*v.label);
                if (!v.host.empty()) e["host"] = v.host;
                e["ok"] = v.ok;
                e["detail"] = v.detail;
                arr.push_back(std::move(e));
            }
            return arr;
        };
        j["downgrades"] = verdicts(report.downgrades);
        j["outputs"] = verdicts(report.outputs);
        j["bounds"] = verdicts(report.bounds);
        j["specializations"] = ordered_json::array();
        for (const surface::Specialization& s : report.specializations) {
            ordered_json args = ordered_json::array();
            for (const Label& l : s.args) args.push_back(to_string(l));
            j["specializations"].push_back({{"function", s.function}, {"args", args}});
        }
        j["failures"] = ordered_json::array();
        for (const surface::Failure& f : report.failures) {
            j["failures"].push_back(
                {{"function", f.fn}, {"line", f.line}, {"message", f.message}});
        }
        if (flags.trace) j["trace"] = trace;
        out << j.dump(2) << "\n";
    } else {
        if (flags.trace) print_trace(out, trace);
        out << surface::render_report(report);
    }
    return {report.accepted ? 0 : 1, out.str()};
}

}  // namespace

RunResult run(const std::vector<std::string>& args) {
    CLI::App app{"Algebraic information-flow labels: acts-for, flows-to, nonmalleability, "
                 "constraint solving, and a security-typed checker"};
    app.name("ifc");
    app.require_subcommand(1);

    std::string ctx_path, cctx_path, ictx_path, file, p_text, q_text, from_text, to_text,
        label_text;
    Flags actsfor_flags, min_flags, flowsto_flags, nmif_flags, solve_flags, check_flags;

    CLI::App* actsfor = app.add_subcommand("actsfor", "does P act for Q?");
    actsfor->add_option("--ctx", ctx_path, "delegation context file");
    actsfor->add_option("P", p_text, "acting principal")->required();
    actsfor->add_option("Q", q_text, "target principal")->required();
    add_common_flags(actsfor, actsfor_flags);

    CLI::App* min = app.add_subcommand("min", "minimal representative of P");
    min->add_option("--ctx", ctx_path, "delegation context file");
    min->add_option("P", p_text, "principal")->required();
    add_common_flags(min, min_flags);

    CLI::App* flowsto = app.add_subcommand("flowsto", "may L1 flow to L2?");
    flowsto->add_option("--cctx", cctx_path, "confidentiality context file");
    flowsto->add_option("--ictx", ictx_path, "integrity context file");
    flowsto->add_option("L1", from_text, "source label")->required();
    flowsto->add_option("L2", to_text, "destination label")->required();
    add_common_flags(flowsto, flowsto_flags);

    CLI::App* nmif = app.add_subcommand("nmif", "is the label uncompromised?");
    nmif->add_option("--cctx", cctx_path, "confidentiality context file");
    nmif->add_option("--ictx", ictx_path, "integrity context file");
    nmif->add_option("L", label_text, "label")->required();
    add_common_flags(nmif, nmif_flags);

    CLI::App* solve = app.add_subcommand("solve", "solve a constraint file");
    solve->add_option("FILE", file, "constraint file")->required();
    add_common_flags(solve, solve_flags);

    CLI::App* check = app.add_subcommand("check", "check a surface program");
    check->add_option("FILE", file, "source file")->required();
    add_common_flags(check, check_flags);

    std::vector<const char*> argv;
    argv.push_back("ifc");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        return {0, app.help()};
    } catch (const CLI::CallForAllHelp&) {
        return {0, app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    }

    try {
        if (app.got_subcommand(actsfor)) return do_actsfor(ctx_path, p_text, q_text, actsfor_flags);
        if (app.got_subcommand(min)) return do_min(ctx_path, p_text, min_flags);
        if (app.got_subcommand(flowsto)) {
            return do_flowsto(cctx_path, ictx_path, from_text, to_text, flowsto_flags);
        }
        if (app.got_subcommand(nmif)) return do_nmif(cctx_path, ictx_path, label_text, nmif_flags);
        if (app.got_subcommand(solve)) return do_solve(file, solve_flags);
        if (app.got_subcommand(check)) return do_check(file, check_flags);
    } catch (const parse_error& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    } catch (const std::invalid_argument& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    } catch (const std::runtime_error& e) {
        return {2, std::string("error: ") + e.what() + "\n"};
    }
    return {2, "error: no command\n"};
}

}  // namespace ifc::cli
