#include "ifc/constraint.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ifc {

// ---------------------------------------------------------------------------
// Expression constructors and printing
// ---------------------------------------------------------------------------

LabelExprPtr LabelExpr::make_const(Label l) {
    auto e = std::make_shared<LabelExpr>();
    e->kind = Kind::Const;
    e->constant = std::move(l);
    return e;
}

LabelExprPtr LabelExpr::make_var(std::string name) {
    auto e = std::make_shared<LabelExpr>();
    e->kind = Kind::Var;
    e->var = std::move(name);
    return e;
}

LabelExprPtr LabelExpr::make_project(Proj p, LabelExprPtr inner) {
    auto e = std::make_shared<LabelExpr>();
    e->kind = Kind::Project;
    e->proj = p;
    e->a = std::move(inner);
    return e;
}

namespace {
LabelExprPtr make_binary(LabelExpr::Kind kind, LabelExprPtr a, LabelExprPtr b) {
    auto e = std::make_shared<LabelExpr>();
    e->kind = kind;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}
}  // namespace

LabelExprPtr LabelExpr::make_join(LabelExprPtr a, LabelExprPtr b) {
    return make_binary(Kind::Join, std::move(a), std::move(b));
}
LabelExprPtr LabelExpr::make_meet(LabelExprPtr a, LabelExprPtr b) {
    return make_binary(Kind::Meet, std::move(a), std::move(b));
}
LabelExprPtr LabelExpr::make_conj(LabelExprPtr a, LabelExprPtr b) {
    return make_binary(Kind::Conj, std::move(a), std::move(b));
}
LabelExprPtr LabelExpr::make_disj(LabelExprPtr a, LabelExprPtr b) {
    return make_binary(Kind::Disj, std::move(a), std::move(b));
}

std::string to_string(const LabelExpr& e) {
    switch (e.kind) {
        case LabelExpr::Kind::Const: return to_string(e.constant);
        case LabelExpr::Kind::Var: return e.var;
        case LabelExpr::Kind::Project:
            return "(" + to_string(*e.a) + ")->" + to_string(e.proj);
        case LabelExpr::Kind::Join:
            return "(" + to_string(*e.a) + " join " + to_string(*e.b) + ")";
        case LabelExpr::Kind::Meet:
            return "(" + to_string(*e.a) + " meet " + to_string(*e.b) + ")";
        case LabelExpr::Kind::Conj:
            return "(" + to_string(*e.a) + " & " + to_string(*e.b) + ")";
        case LabelExpr::Kind::Disj:
            return "(" + to_string(*e.a) + " | " + to_string(*e.b) + ")";
    }
    return "?";
}

LabelConstraint LabelConstraint::flows(LabelExprPtr from, LabelExprPtr to, std::string origin) {
    return LabelConstraint{Kind::FlowsTo, std::move(from), std::move(to), std::move(origin)};
}

LabelConstraint LabelConstraint::unc(LabelExprPtr e, std::string origin) {
    return LabelConstraint{Kind::Uncompromised, std::move(e), nullptr, std::move(origin)};
}

std::string to_string(const LabelConstraint& c) {
    if (c.kind == LabelConstraint::Kind::FlowsTo) {
        return "flows " + to_string(*c.lhs) + " -> " + to_string(*c.rhs);
    }
    return "unc " + to_string(*c.lhs);
}

PrincipalExprPtr PrincipalExpr::make_const(NormalForm p) {
    auto e = std::make_shared<PrincipalExpr>();
    e->kind = Kind::Const;
    e->constant = std::move(p);
    return e;
}

PrincipalExprPtr PrincipalExpr::make_pvar(std::string name, Proj proj) {
    auto e = std::make_shared<PrincipalExpr>();
    e->kind = Kind::PVar;
    e->var = std::move(name);
    e->proj = proj;
    return e;
}

PrincipalExprPtr PrincipalExpr::make_conj(PrincipalExprPtr a, PrincipalExprPtr b) {
    auto e = std::make_shared<PrincipalExpr>();
    e->kind = Kind::Conj;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

PrincipalExprPtr PrincipalExpr::make_disj(PrincipalExprPtr a, PrincipalExprPtr b) {
    auto e = std::make_shared<PrincipalExpr>();
    e->kind = Kind::Disj;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

PrincipalExprPtr PrincipalExpr::make_pseudo_imp(NormalForm lhs, PrincipalExprPtr inner) {
    auto e = std::make_shared<PrincipalExpr>();
    e->kind = Kind::PseudoImp;
    e->constant = std::move(lhs);
    e->a = std::move(inner);
    return e;
}

PrincipalExprPtr PrincipalExpr::make_min_rep(Proj inner_proj, PrincipalExprPtr inner) {
    auto e = std::make_shared<PrincipalExpr>();
    e->kind = Kind::MinRep;
    e->proj = inner_proj;
    e->a = std::move(inner);
    return e;
}

std::string to_string(const PrincipalExpr& e) {
    switch (e.kind) {
        case PrincipalExpr::Kind::Const: return to_string(e.constant);
        case PrincipalExpr::Kind::PVar: return e.var + "_" + to_string(e.proj);
        case PrincipalExpr::Kind::Conj:
            return "(" + to_string(*e.a) + " & " + to_string(*e.b) + ")";
        case PrincipalExpr::Kind::Disj:
            return "(" + to_string(*e.a) + " | " + to_string(*e.b) + ")";
        case PrincipalExpr::Kind::PseudoImp:
            return "(" + to_string(e.constant) + " ~> " + to_string(*e.a) + ")";
        case PrincipalExpr::Kind::MinRep:
            return "min_" + std::string(to_string(e.proj)) + "(" + to_string(*e.a) + ")";
    }
    return "?";
}

std::string to_string(const PrincipalConstraint& c) {
    std::string lhs = c.lhs_is_var ? c.lhs_var + "_" + to_string(c.component)
                                   : to_string(c.lhs_const);
    return lhs + " >=_" + to_string(c.component) + " " + to_string(*c.rhs);
}

// ---------------------------------------------------------------------------
// Extraction and translation
// ---------------------------------------------------------------------------

PrincipalExprPtr extract_component(const LabelExprPtr& e, Proj proj) {
    switch (e->kind) {
        case LabelExpr::Kind::Const:
            return PrincipalExpr::make_const(e->constant.component(proj));
        case LabelExpr::Kind::Var:
            return PrincipalExpr::make_pvar(e->var, proj);
        case LabelExpr::Kind::Project:
            if (e->proj == proj) return extract_component(e->a, proj);
            return PrincipalExpr::make_const(NormalForm::bottom());
        case LabelExpr::Kind::Join:
            // join is <c1 & c2, i1 | i2>
            if (proj == Proj::C) {
                return PrincipalExpr::make_conj(extract_component(e->a, proj),
                                                extract_component(e->b, proj));
            }
            return PrincipalExpr::make_disj(extract_component(e->a, proj),
                                            extract_component(e->b, proj));
        case LabelExpr::Kind::Meet:
            // meet is <c1 | c2, i1 & i2>
            if (proj == Proj::C) {
                return PrincipalExpr::make_disj(extract_component(e->a, proj),
                                                extract_component(e->b, proj));
            }
            return PrincipalExpr::make_conj(extract_component(e->a, proj),
                                            extract_component(e->b, proj));
        case LabelExpr::Kind::Conj:
            return PrincipalExpr::make_conj(extract_component(e->a, proj),
                                            extract_component(e->b, proj));
        case LabelExpr::Kind::Disj:
            return PrincipalExpr::make_disj(extract_component(e->a, proj),
                                            extract_component(e->b, proj));
    }
    throw std::logic_error("unreachable label expression kind");
}

std::vector<RawPrincipalConstraint> translate_constraint(const LabelConstraint& c) {
    std::vector<RawPrincipalConstraint> out;
    if (c.kind == LabelConstraint::Kind::FlowsTo) {
        // Receiver's confidentiality covers the sender's; sender's integrity
        // covers the receiver's.
        out.push_back({extract_component(c.rhs, Proj::C), extract_component(c.lhs, Proj::C),
                       Proj::C, c.origin});
        out.push_back({extract_component(c.lhs, Proj::I), extract_component(c.rhs, Proj::I),
                       Proj::I, c.origin});
    } else {
        out.push_back({extract_component(c.lhs, Proj::I),
                       PrincipalExpr::make_min_rep(Proj::C, extract_component(c.lhs, Proj::C)),
                       Proj::I, c.origin});
    }
    return out;
}

namespace {

// A disjunct of the lhs DNF: a constant conjoined with a set of variables.
struct DnfTerm {
    NormalForm constant = NormalForm::bottom();  // identity of conjunction
    std::set<std::string> vars;
};

std::vector<DnfTerm> lhs_dnf(const PrincipalExprPtr& e) {
    switch (e->kind) {
        case PrincipalExpr::Kind::Const:
            return {DnfTerm{e->constant, {}}};
        case PrincipalExpr::Kind::PVar:
            return {DnfTerm{NormalForm::bottom(), {e->var}}};
        case PrincipalExpr::Kind::Disj: {
            std::vector<DnfTerm> out = lhs_dnf(e->a);
            std::vector<DnfTerm> right = lhs_dnf(e->b);
            out.insert(out.end(), right.begin(), right.end());
            return out;
        }
        case PrincipalExpr::Kind::Conj: {
            std::vector<DnfTerm> out;
            for (const DnfTerm& x : lhs_dnf(e->a)) {
                for (const DnfTerm& y : lhs_dnf(e->b)) {
                    DnfTerm t;
                    t.constant = conj(x.constant, y.constant);
                    t.vars = x.vars;
                    t.vars.insert(y.vars.begin(), y.vars.end());
                    out.push_back(std::move(t));
                }
            }
            return out;
        }
        case PrincipalExpr::Kind::PseudoImp:
        case PrincipalExpr::Kind::MinRep:
            throw std::logic_error("translation never places min or ~> on a left-hand side");
    }
    throw std::logic_error("unreachable principal expression kind");
}

}  // namespace

std::optional<SolveFailure> simplify_into(const RawPrincipalConstraint& raw,
                                          std::vector<PrincipalConstraint>& out) {
    for (const DnfTerm& term : lhs_dnf(raw.lhs)) {
        if (term.vars.empty()) {
            PrincipalConstraint c;
            c.lhs_is_var = false;
            c.lhs_const = term.constant;
            c.rhs = raw.rhs;
            c.component = raw.component;
            c.origin = raw.origin;
            out.push_back(std::move(c));
        } else if (term.vars.size() == 1) {
            PrincipalConstraint c;
            c.lhs_is_var = true;
            c.lhs_var = *term.vars.begin();
            c.rhs = term.constant.is_bottom()
                        ? raw.rhs
                        : PrincipalExpr::make_pseudo_imp(term.constant, raw.rhs);
            c.component = raw.component;
            c.origin = raw.origin;
            out.push_back(std::move(c));
        } else {
            std::string vars;
            for (const std::string& v : term.vars) {
                if (!vars.empty()) vars += ", ";
                vars += v;
            }
            return SolveFailure{
                SolveFailure::Kind::NoMinimalSolution,
                "left-hand side " + to_string(*raw.lhs) + " conjoins variables {" + vars +
                    "}; such a constraint has no minimal solution",
                raw.origin};
        }
    }
    return std::nullopt;
}

std::optional<SolveFailure> translate_system(ConstraintSystem& sys) {
    sys.constraints.clear();
    for (const LabelConstraint& lc : sys.label_constraints) {
        for (const RawPrincipalConstraint& raw : translate_constraint(lc)) {
            if (auto failure = simplify_into(raw, sys.constraints)) return failure;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Evaluation and solving
// ---------------------------------------------------------------------------

NormalForm eval_expr(const PrincipalExprPtr& e, const ConstraintSystem& sys,
                     const std::map<std::pair<std::string, Proj>, NormalForm>& current) {
    switch (e->kind) {
        case PrincipalExpr::Kind::Const:
            return e->constant;
        case PrincipalExpr::Kind::PVar: {
            auto it = current.find({e->var, e->proj});
            if (it == current.end()) {
                throw std::logic_error("unbound principal variable " + e->var);
            }
            return it->second;
        }
        case PrincipalExpr::Kind::Conj:
            return conj(eval_expr(e->a, sys, current), eval_expr(e->b, sys, current));
        case PrincipalExpr::Kind::Disj:
            return disj(eval_expr(e->a, sys, current), eval_expr(e->b, sys, current));
        case PrincipalExpr::Kind::PseudoImp: {
            NormalForm rhs = eval_expr(e->a, sys, current);
            // The declared universe, widened defensively by the operands'
            // atoms (atoms outside the universe never change the result).
            std::set<std::string> universe = sys.universe;
            auto pa = e->constant.atoms();
            universe.insert(pa.begin(), pa.end());
            auto qa = rhs.atoms();
            universe.insert(qa.begin(), qa.end());
            return pseudocomplement(e->constant, rhs, universe);
        }
        case PrincipalExpr::Kind::MinRep:
            return min_rep(sys.contexts.context(e->proj), eval_expr(e->a, sys, current));
    }
    throw std::logic_error("unreachable principal expression kind");
}

SolveResult solve(const ConstraintSystem& sys, std::vector<std::string>* trace) {
    std::map<std::pair<std::string, Proj>, NormalForm> current;
    for (const std::string& v : sys.variables) {
        current.emplace(std::make_pair(v, Proj::C), NormalForm::bottom());
        current.emplace(std::make_pair(v, Proj::I), NormalForm::bottom());
    }

    bool changed = true;
    std::size_t pass = 0;
    while (changed) {
        changed = false;
        ++pass;
        if (pass > 10000) throw std::logic_error("constraint solver did not converge");
        for (const PrincipalConstraint& c : sys.constraints) {
            if (!c.lhs_is_var) continue;
            const DelegationContext& ctx = sys.contexts.context(c.component);
            NormalForm value = eval_expr(c.rhs, sys, current);
            auto key = std::make_pair(c.lhs_var, c.component);
            auto it = current.find(key);
            if (it == current.end()) throw std::logic_error("undeclared variable " + c.lhs_var);
            if (!acts_for(ctx, it->second, value)) {
                NormalForm updated = conj(it->second, value);
                if (trace) {
                    trace->push_back("pass " + std::to_string(pass) + ": " + c.lhs_var + "_" +
                                     to_string(c.component) + " := " + to_string(updated) +
                                     "  (from " + to_string(c) + ")");
                }
                it->second = std::move(updated);
                changed = true;
            }
        }
    }

    for (const PrincipalConstraint& c : sys.constraints) {
        if (c.lhs_is_var) continue;
        const DelegationContext& ctx = sys.contexts.context(c.component);
        NormalForm value = eval_expr(c.rhs, sys, current);
        if (!acts_for(ctx, c.lhs_const, value)) {
            SolveResult result;
            result.failure = SolveFailure{
                SolveFailure::Kind::Unsatisfiable,
                "residual check failed: " + to_string(c) + " with right-hand side = " +
                    to_string(value),
                c.origin};
            return result;
        }
        if (trace) {
            trace->push_back("residual ok: " + to_string(c) + " with right-hand side = " +
                             to_string(value));
        }
    }

    Solution solution;
    for (const std::string& v : sys.variables) {
        solution.assignment.emplace(
            v, Label(current.at({v, Proj::C}), current.at({v, Proj::I})));
    }
    SolveResult result;
    result.solution = std::move(solution);
    return result;
}

// ---------------------------------------------------------------------------
// Constraint files
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind { Const, Word, Amp, Pipe, LParen, RParen, ProjC, ProjI, Arrow, End };
    Kind kind;
    std::string text;  // Const: inner text of <...>; Word: the identifier
    std::size_t offset;
};

std::vector<Token> lex_label_expr(const std::string& text, std::size_t line_no) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto fail = [&](const std::string& msg) {
        throw parse_error("line " + std::to_string(line_no) + ": " + msg, i, line_no, i + 1);
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '<') {
            auto close = text.find('>', i);
            if (close == std::string::npos) fail("unterminated '<...>' label");
            out.push_back({Token::Kind::Const, text.substr(i, close - i + 1), i});
            i = close + 1;
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            // `->C` / `->I` are projections; a bare `->` is the flows arrow.
            if (i + 2 < text.size() && (text[i + 2] == 'C' || text[i + 2] == 'I') &&
                (i + 3 == text.size() ||
                 (!std::isalnum(static_cast<unsigned char>(text[i + 3])) && text[i + 3] != '_'))) {
                out.push_back({text[i + 2] == 'C' ? Token::Kind::ProjC : Token::Kind::ProjI,
                               text.substr(i, 3), i});
                i += 3;
            } else {
                out.push_back({Token::Kind::Arrow, "->", i});
                i += 2;
            }
            continue;
        }
        if (c == '&') {
            out.push_back({Token::Kind::Amp, "&", i});
            ++i;
            continue;
        }
        if (c == '|') {
            out.push_back({Token::Kind::Pipe, "|", i});
            ++i;
            continue;
        }
        if (c == '(') {
            out.push_back({Token::Kind::LParen, "(", i});
            ++i;
            continue;
        }
        if (c == ')') {
            out.push_back({Token::Kind::RParen, ")", i});
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                ++i;
            }
            out.push_back({Token::Kind::Word, text.substr(start, i - start), start});
            continue;
        }
        fail(std::string("unexpected character '") + c + "' in label expression");
    }
    out.push_back({Token::Kind::End, "", text.size()});
    return out;
}

// Precedence, loosest to tightest: join/meet, `|`, `&`, postfix projection.
class LabelExprParser {
public:
    LabelExprParser(std::vector<Token> tokens, const std::set<std::string>& vars,
                    std::size_t line_no)
        : tokens_(std::move(tokens)), vars_(vars), line_(line_no) {}

    LabelExprPtr parse_full() {
        LabelExprPtr e = parse_joinmeet();
        expect(Token::Kind::End, "end of expression");
        return e;
    }

    // For `flows L -> L` lines: parses one expression, stopping at `->`.
    LabelExprPtr parse_until_arrow() {
        LabelExprPtr e = parse_joinmeet();
        expect(Token::Kind::Arrow, "'->'");
        return e;
    }

    LabelExprPtr parse_rest() {
        LabelExprPtr e = parse_joinmeet();
        expect(Token::Kind::End, "end of expression");
        return e;
    }

private:
    LabelExprPtr parse_joinmeet() {
        LabelExprPtr e = parse_disj();
        while (peek().kind == Token::Kind::Word &&
               (peek().text == "join" || peek().text == "meet")) {
            bool join = peek().text == "join";
            advance();
            LabelExprPtr rhs = parse_disj();
            e = join ? LabelExpr::make_join(e, rhs) : LabelExpr::make_meet(e, rhs);
        }
        return e;
    }

    LabelExprPtr parse_disj() {
        LabelExprPtr e = parse_conj();
        while (peek().kind == Token::Kind::Pipe) {
            advance();
            e = LabelExpr::make_disj(e, parse_conj());
        }
        return e;
    }

    LabelExprPtr parse_conj() {
        LabelExprPtr e = parse_postfix();
        while (peek().kind == Token::Kind::Amp) {
            advance();
            e = LabelExpr::make_conj(e, parse_postfix());
        }
        return e;
    }

    LabelExprPtr parse_postfix() {
        LabelExprPtr e = parse_primary();
        while (true) {
            if (peek().kind == Token::Kind::ProjC) {
                advance();
                e = LabelExpr::make_project(Proj::C, e);
            } else if (peek().kind == Token::Kind::ProjI) {
                advance();
                e = LabelExpr::make_project(Proj::I, e);
            } else {
                return e;
            }
        }
    }

    LabelExprPtr parse_primary() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Const) {
            advance();
            return LabelExpr::make_const(parse_label(t.text));
        }
        if (t.kind == Token::Kind::Word) {
            if (t.text == "join" || t.text == "meet") fail("expected an operand", t);
            if (vars_.find(t.text) == vars_.end()) {
                fail("undeclared variable '" + t.text + "' (constants use '<C, I>')", t);
            }
            advance();
            return LabelExpr::make_var(t.text);
        }
        if (t.kind == Token::Kind::LParen) {
            advance();
            LabelExprPtr e = parse_joinmeet();
            expect(Token::Kind::RParen, "')'");
            return e;
        }
        fail("expected a label expression", t);
        return nullptr;
    }

    const Token& peek() const { return tokens_[pos_]; }
    void advance() { ++pos_; }

    void expect(Token::Kind kind, const std::string& what) {
        if (peek().kind != kind) fail("expected " + what, peek());
        advance();
    }

    [[noreturn]] void fail(const std::string& msg, const Token& t) {
        throw parse_error("line " + std::to_string(line_) + ": " + msg, t.offset, line_,
                          t.offset + 1);
    }

    std::vector<Token> tokens_;
    const std::set<std::string>& vars_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

void require_declared_atoms(const NormalForm& nf, const std::set<std::string>& universe,
                            std::size_t line_no) {
    for (const std::string& a : nf.atoms()) {
        if (universe.find(a) == universe.end()) {
            throw parse_error("line " + std::to_string(line_no) + ": atom '" + a +
                                  "' is not declared in 'atoms:'",
                              0, line_no, 1);
        }
    }
}

void require_declared_label_atoms(const LabelExprPtr& e, const std::set<std::string>& universe,
                                  std::size_t line_no) {
    if (e->kind == LabelExpr::Kind::Const) {
        require_declared_atoms(e->constant.conf, universe, line_no);
        require_declared_atoms(e->constant.integ, universe, line_no);
    }
    if (e->a) require_declared_label_atoms(e->a, universe, line_no);
    if (e->b) require_declared_label_atoms(e->b, universe, line_no);
}

}  // namespace

ConstraintSystem parse_constraint_file(const std::string& text) {
    ConstraintSystem sys;
    std::set<std::string> var_set;
    enum class Section { None, Cctx, Ictx };
    Section section = Section::None;

    std::istringstream in(text);
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        std::string line = raw_line;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);

        auto fail = [&](const std::string& msg) {
            throw parse_error("line " + std::to_string(line_no) + ": " + msg, 0, line_no, 1);
        };

        if (line.rfind("atoms:", 0) == 0) {
            std::istringstream names(line.substr(6));
            std::string name;
            while (names >> name) {
                if (!is_valid_atom_name(name)) fail("invalid atom name '" + name + "'");
                if (!sys.universe.insert(name).second) fail("duplicate atom '" + name + "'");
            }
            section = Section::None;
            continue;
        }
        if (line.rfind("vars:", 0) == 0) {
            std::istringstream names(line.substr(5));
            std::string name;
            while (names >> name) {
                if (!is_valid_atom_name(name)) fail("invalid variable name '" + name + "'");
                if (sys.universe.count(name)) fail("'" + name + "' is already an atom");
                if (!var_set.insert(name).second) fail("duplicate variable '" + name + "'");
                sys.variables.push_back(name);
            }
            section = Section::None;
            continue;
        }
        if (line == "cctx:") {
            section = Section::Cctx;
            continue;
        }
        if (line == "ictx:") {
            section = Section::Ictx;
            continue;
        }
        if (line.rfind("flows", 0) == 0 &&
            (line.size() == 5 || std::isspace(static_cast<unsigned char>(line[5])))) {
            LabelExprParser parser(lex_label_expr(line.substr(5), line_no), var_set, line_no);
            LabelExprPtr from = parser.parse_until_arrow();
            LabelExprPtr to = parser.parse_rest();
            require_declared_label_atoms(from, sys.universe, line_no);
            require_declared_label_atoms(to, sys.universe, line_no);
            sys.label_constraints.push_back(
                LabelConstraint::flows(from, to, "line " + std::to_string(line_no)));
            section = Section::None;
            continue;
        }
        if (line.rfind("unc", 0) == 0 &&
            (line.size() == 3 || std::isspace(static_cast<unsigned char>(line[3])))) {
            LabelExprParser parser(lex_label_expr(line.substr(3), line_no), var_set, line_no);
            LabelExprPtr e = parser.parse_full();
            require_declared_label_atoms(e, sys.universe, line_no);
            sys.label_constraints.push_back(
                LabelConstraint::unc(e, "line " + std::to_string(line_no)));
            section = Section::None;
            continue;
        }
        if (section == Section::Cctx || section == Section::Ictx) {
            DelegationContext parsed = parse_context(line);
            for (const DelegationEntry& e : parsed.entries()) {
                require_declared_atoms(e.delegator, sys.universe, line_no);
                require_declared_atoms(e.delegatee, sys.universe, line_no);
                if (section == Section::Cctx) {
                    sys.contexts.conf_ctx.add(e.delegator, e.delegatee);
                } else {
                    sys.contexts.integ_ctx.add(e.delegator, e.delegatee);
                }
            }
            continue;
        }
        fail("expected 'atoms:', 'vars:', 'cctx:', 'ictx:', 'flows', or 'unc'");
    }
    return sys;
}

}  // namespace ifc
