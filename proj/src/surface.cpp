#include "ifc/surface.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace ifc::surface {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

ExprPtr Expr::make_var(std::string name, std::size_t line) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Var;
    e->name = std::move(name);
    e->line = line;
    return e;
}

ExprPtr Expr::make_int(long long value, std::size_t line) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::IntLit;
    e->value = value;
    e->line = line;
    return e;
}

ExprPtr Expr::make_binary(std::string op, ExprPtr lhs, ExprPtr rhs, std::size_t line) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::Binary;
    e->op = std::move(op);
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    e->line = line;
    return e;
}

std::string to_string(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Var: return e.name;
        case Expr::Kind::IntLit: return std::to_string(e.value);
        case Expr::Kind::Binary: {
            auto side = [](const Expr& s) {
                std::string text = to_string(s);
                return s.kind == Expr::Kind::Binary ? "(" + text + ")" : text;
            };
            return side(*e.lhs) + " " + e.op + " " + side(*e.rhs);
        }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

struct Token {
    enum class Kind {
        Ident, Int,
        KwHost, KwAssume, KwFun, KwVal, KwReturn, KwDeclassify, KwEndorse,
        KwTo, KwFor, KwJoin, KwTop, KwBot,
        Semi, Comma, Dot, Colon, LParen, RParen, LBrace, RBrace,
        Lt, Gt, Le, Ge, EqEq, Ne, Assign, Amp, Pipe,
        Plus, Minus, Star, Slash, Percent,
        End
    };

    Kind kind;
    std::string text;
    long long value = 0;
    std::size_t line = 0;
    std::size_t column = 0;
    std::size_t offset = 0;
};

const std::map<std::string, Token::Kind>& keyword_table() {
    static const std::map<std::string, Token::Kind> table = {
        {"host", Token::Kind::KwHost},       {"assume", Token::Kind::KwAssume},
        {"fun", Token::Kind::KwFun},         {"val", Token::Kind::KwVal},
        {"return", Token::Kind::KwReturn},   {"declassify", Token::Kind::KwDeclassify},
        {"endorse", Token::Kind::KwEndorse}, {"to", Token::Kind::KwTo},
        {"for", Token::Kind::KwFor},         {"join", Token::Kind::KwJoin},
        {"top", Token::Kind::KwTop},         {"bot", Token::Kind::KwBot},
    };
    return table;
}

std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0, line = 1, line_start = 0;
    auto fail = [&](const std::string& msg) {
        throw parse_error("line " + std::to_string(line) + ": " + msg, i, line,
                          i - line_start + 1);
    };
    auto push = [&](Token::Kind kind, std::size_t start, std::size_t len) {
        out.push_back({kind, text.substr(start, len), 0, line, start - line_start + 1, start});
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
            line_start = i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '#') {  // comment to end of line
            while (i < text.size() && text[i] != '\n') ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
                ++i;
            }
            std::string word = text.substr(start, i - start);
            auto kw = keyword_table().find(word);
            push(kw == keyword_table().end() ? Token::Kind::Ident : kw->second, start,
                 i - start);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
            Token t{Token::Kind::Int, text.substr(start, i - start), 0, line,
                    start - line_start + 1, start};
            try {
                t.value = std::stoll(t.text);
            } catch (const std::out_of_range&) {
                fail("integer literal out of range");
            }
            out.push_back(std::move(t));
            continue;
        }
        std::size_t start = i;
        auto two = [&](char second) { return i + 1 < text.size() && text[i + 1] == second; };
        switch (c) {
            case ';': push(Token::Kind::Semi, start, 1); ++i; break;
            case ',': push(Token::Kind::Comma, start, 1); ++i; break;
            case '.': push(Token::Kind::Dot, start, 1); ++i; break;
            case ':': push(Token::Kind::Colon, start, 1); ++i; break;
            case '(': push(Token::Kind::LParen, start, 1); ++i; break;
            case ')': push(Token::Kind::RParen, start, 1); ++i; break;
            case '{': push(Token::Kind::LBrace, start, 1); ++i; break;
            case '}': push(Token::Kind::RBrace, start, 1); ++i; break;
            case '&': push(Token::Kind::Amp, start, 1); ++i; break;
            case '|': push(Token::Kind::Pipe, start, 1); ++i; break;
            case '+': push(Token::Kind::Plus, start, 1); ++i; break;
            case '-': push(Token::Kind::Minus, start, 1); ++i; break;
            case '*': push(Token::Kind::Star, start, 1); ++i; break;
            case '/': push(Token::Kind::Slash, start, 1); ++i; break;
            case '%': push(Token::Kind::Percent, start, 1); ++i; break;
            case '<':
                if (two('=')) { push(Token::Kind::Le, start, 2); i += 2; }
                else { push(Token::Kind::Lt, start, 1); ++i; }
                break;
            case '>':
                if (two('=')) { push(Token::Kind::Ge, start, 2); i += 2; }
                else { push(Token::Kind::Gt, start, 1); ++i; }
                break;
            case '=':
                if (two('=')) { push(Token::Kind::EqEq, start, 2); i += 2; }
                else { push(Token::Kind::Assign, start, 1); ++i; }
                break;
            case '!':
                if (two('=')) { push(Token::Kind::Ne, start, 2); i += 2; }
                else fail("unexpected character '!'");
                break;
            default:
                fail(std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Token::Kind::End, "", 0, line, i - line_start + 1, i});
    return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    Program parse() {
        Program prog;
        while (!at(Token::Kind::End)) {
            if (at(Token::Kind::KwHost)) {
                advance();
                Token name = expect(Token::Kind::Ident, "host name");
                expect(Token::Kind::Semi, "';'");
                prog.hosts.push_back({name.text, name.line});
            } else if (at(Token::Kind::KwAssume)) {
                prog.assumes.push_back(parse_assume());
            } else if (at(Token::Kind::KwFun)) {
                prog.functions.push_back(parse_fun());
            } else {
                prog.main.push_back(parse_stmt());
            }
        }
        return prog;
    }

private:
    AssumeDecl parse_assume() {
        AssumeDecl a;
        a.line = peek().line;
        advance();  // assume
        a.left = parse_principal();
        if (at(Token::Kind::Assign) || at(Token::Kind::EqEq)) {
            a.rel = AssumeDecl::Rel::Equals;
            advance();
        } else if (at(Token::Kind::Ge)) {
            a.rel = AssumeDecl::Rel::ActsFor;
            advance();
        } else {
            fail("expected '=', '==', or '>=' in assume");
        }
        a.right = parse_principal();
        a.comp = AssumeDecl::Comp::Both;
        if (at(Token::Kind::KwFor)) {
            advance();
            Token which = expect(Token::Kind::Ident, "'confidentiality', 'integrity', or 'both'");
            if (which.text == "confidentiality") a.comp = AssumeDecl::Comp::Conf;
            else if (which.text == "integrity") a.comp = AssumeDecl::Comp::Integ;
            else if (which.text == "both") a.comp = AssumeDecl::Comp::Both;
            else fail_at(which, "expected 'confidentiality', 'integrity', or 'both'");
        }
        expect(Token::Kind::Semi, "';'");
        return a;
    }

    FunDecl parse_fun() {
        FunDecl f;
        f.line = peek().line;
        advance();  // fun
        f.name = expect(Token::Kind::Ident, "function name").text;
        expect(Token::Kind::LParen, "'('");
        if (!at(Token::Kind::RParen)) {
            while (true) {
                Param p;
                Token name = expect(Token::Kind::Ident, "parameter name");
                p.name = name.text;
                p.line = name.line;
                if (at(Token::Kind::Colon)) {
                    advance();
                    p.exact = parse_label_tokens();
                } else if (at(Token::Kind::Le)) {
                    advance();
                    p.bound = parse_label_tokens();
                }
                f.params.push_back(std::move(p));
                if (!at(Token::Kind::Comma)) break;
                advance();
            }
        }
        expect(Token::Kind::RParen, "')'");
        expect(Token::Kind::LBrace, "'{'");
        while (!at(Token::Kind::KwReturn)) {
            if (at(Token::Kind::End) || at(Token::Kind::RBrace)) {
                fail("function body must end with a return statement");
            }
            f.body.push_back(parse_stmt());
        }
        f.ret_line = peek().line;
        advance();  // return
        f.ret = parse_expr();
        expect(Token::Kind::Semi, "';'");
        expect(Token::Kind::RBrace, "'}'");
        return f;
    }

    Stmt parse_stmt() {
        if (at(Token::Kind::KwVal)) return parse_val();
        if (at(Token::Kind::Ident)) return parse_output();
        fail("expected a statement ('val ...' or 'Host.output(...)')");
    }

    Stmt parse_val() {
        Stmt s;
        s.line = peek().line;
        advance();  // val
        s.name = expect(Token::Kind::Ident, "variable name").text;
        if (at(Token::Kind::Colon)) {
            advance();
            s.annotation = parse_label_tokens();
        }
        expect(Token::Kind::Assign, "'='");
        if (at(Token::Kind::KwDeclassify) || at(Token::Kind::KwEndorse)) {
            s.kind = Stmt::Kind::Let;
            s.downgrade = at(Token::Kind::KwDeclassify) ? DowngradeKind::Declassify
                                                        : DowngradeKind::Endorse;
            advance();
            s.value = parse_expr();
            if (at(Token::Kind::KwTo)) {
                advance();
                s.target = parse_label_tokens();
            }
        } else if (at(Token::Kind::Ident) && at(Token::Kind::Dot, 1)) {
            s.kind = Stmt::Kind::Input;
            s.host = peek().text;
            advance();  // host
            advance();  // dot
            Token method = expect(Token::Kind::Ident, "'input'");
            if (method.text != "input") fail_at(method, "expected 'input' after '.'");
            expect(Token::Kind::LParen, "'('");
            expect(Token::Kind::RParen, "')'");
        } else if (at(Token::Kind::Ident) && at(Token::Kind::LParen, 1)) {
            s.kind = Stmt::Kind::Call;
            s.callee = peek().text;
            advance();  // callee
            advance();  // (
            if (!at(Token::Kind::RParen)) {
                while (true) {
                    s.args.push_back(parse_expr());
                    if (!at(Token::Kind::Comma)) break;
                    advance();
                }
            }
            expect(Token::Kind::RParen, "')'");
        } else {
            s.kind = Stmt::Kind::Let;
            s.value = parse_expr();
        }
        expect(Token::Kind::Semi, "';'");
        return s;
    }

    Stmt parse_output() {
        Stmt s;
        s.kind = Stmt::Kind::Output;
        s.line = peek().line;
        s.host = expect(Token::Kind::Ident, "host name").text;
        expect(Token::Kind::Dot, "'.'");
        Token method = expect(Token::Kind::Ident, "'output'");
        if (method.text != "output") fail_at(method, "expected 'output' after '.'");
        expect(Token::Kind::LParen, "'('");
        if (at(Token::Kind::KwDeclassify) || at(Token::Kind::KwEndorse)) {
            s.downgrade = at(Token::Kind::KwDeclassify) ? DowngradeKind::Declassify
                                                        : DowngradeKind::Endorse;
            advance();
            s.value = parse_expr();
            if (at(Token::Kind::KwTo)) {
                advance();
                s.target = parse_label_tokens();
            }
        } else {
            s.value = parse_expr();
        }
        expect(Token::Kind::RParen, "')'");
        expect(Token::Kind::Semi, "';'");
        return s;
    }

    // Comparison (loosest), additive, multiplicative; all left-associative.
    ExprPtr parse_expr() { return parse_cmp(); }

    ExprPtr parse_cmp() {
        ExprPtr e = parse_add();
        while (at(Token::Kind::Lt) || at(Token::Kind::Gt) || at(Token::Kind::Le) ||
               at(Token::Kind::Ge) || at(Token::Kind::EqEq) || at(Token::Kind::Ne)) {
            Token op = peek();
            advance();
            e = Expr::make_binary(op.text, e, parse_add(), op.line);
        }
        return e;
    }

    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        while (at(Token::Kind::Plus) || at(Token::Kind::Minus)) {
            Token op = peek();
            advance();
            e = Expr::make_binary(op.text, e, parse_mul(), op.line);
        }
        return e;
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_primary();
        while (at(Token::Kind::Star) || at(Token::Kind::Slash) || at(Token::Kind::Percent)) {
            Token op = peek();
            advance();
            e = Expr::make_binary(op.text, e, parse_primary(), op.line);
        }
        return e;
    }

    ExprPtr parse_primary() {
        if (at(Token::Kind::Ident)) {
            Token t = peek();
            advance();
            return Expr::make_var(t.text, t.line);
        }
        if (at(Token::Kind::Int)) {
            Token t = peek();
            advance();
            return Expr::make_int(t.value, t.line);
        }
        if (at(Token::Kind::LParen)) {
            advance();
            ExprPtr e = parse_expr();
            expect(Token::Kind::RParen, "')'");
            return e;
        }
        fail("expected an expression");
    }

    // `<C, I>`, a bare principal P (meaning <P, P>), or `P join Q`
    // (meaning <P & Q, P | Q>).
    Label parse_label_tokens() {
        if (at(Token::Kind::Lt)) {
            advance();
            PrincipalPtr c = parse_principal();
            expect(Token::Kind::Comma, "','");
            PrincipalPtr i = parse_principal();
            expect(Token::Kind::Gt, "'>'");
            return Label(normalize(c), normalize(i));
        }
        PrincipalPtr p = parse_principal();
        if (at(Token::Kind::KwJoin)) {
            advance();
            PrincipalPtr q = parse_principal();
            NormalForm np = normalize(p), nq = normalize(q);
            return Label(conj(np, nq), disj(np, nq));
        }
        NormalForm n = normalize(p);
        return Label(n, n);
    }

    PrincipalPtr parse_principal() {
        PrincipalPtr e = parse_pconj();
        while (at(Token::Kind::Pipe)) {
            advance();
            e = Principal::make_disj(e, parse_pconj());
        }
        return e;
    }

    PrincipalPtr parse_pconj() {
        PrincipalPtr e = parse_patom();
        while (at(Token::Kind::Amp)) {
            advance();
            e = Principal::make_conj(e, parse_patom());
        }
        return e;
    }

    PrincipalPtr parse_patom() {
        if (at(Token::Kind::KwTop)) { advance(); return Principal::top(); }
        if (at(Token::Kind::KwBot)) { advance(); return Principal::bottom(); }
        if (at(Token::Kind::Ident)) {
            Token t = peek();
            advance();
            return Principal::make_atom(t.text);
        }
        if (at(Token::Kind::LParen)) {
            advance();
            PrincipalPtr e = parse_principal();
            expect(Token::Kind::RParen, "')'");
            return e;
        }
        fail("expected a principal");
    }

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    bool at(Token::Kind kind, std::size_t ahead = 0) const { return peek(ahead).kind == kind; }
    void advance() { ++pos_; }

    Token expect(Token::Kind kind, const std::string& what) {
        if (!at(kind)) fail("expected " + what);
        Token t = peek();
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& msg) { fail_at(peek(), msg); }

    [[noreturn]] void fail_at(const Token& t, const std::string& msg) {
        std::string shown = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw parse_error("line " + std::to_string(t.line) + ": " + msg + ", found " + shown,
                          t.offset, t.line, t.column);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

std::size_t origin_line(const std::string& origin) {
    if (origin.rfind("line ", 0) == 0) {
        try {
            return static_cast<std::size_t>(std::stoull(origin.substr(5)));
        } catch (...) {
        }
    }
    return 0;
}

std::string line_origin(std::size_t line) { return "line " + std::to_string(line); }

[[noreturn]] void semantic_error(std::size_t line, const std::string& msg) {
    throw parse_error("line " + std::to_string(line) + ": " + msg, 0, line, 1);
}

}  // namespace

Program parse_program(const std::string& text) { return Parser(lex(text)).parse(); }

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

void check_defined_expr(const Expr& e, const std::set<std::string>& scope) {
    switch (e.kind) {
        case Expr::Kind::Var:
            if (!scope.count(e.name)) {
                semantic_error(e.line, "use of undefined variable '" + e.name + "'");
            }
            return;
        case Expr::Kind::IntLit:
            return;
        case Expr::Kind::Binary:
            check_defined_expr(*e.lhs, scope);
            check_defined_expr(*e.rhs, scope);
            return;
    }
}

}  // namespace

void validate_program(const Program& prog) {
    std::set<std::string> hosts;
    for (const HostDecl& h : prog.hosts) {
        if (!is_valid_atom_name(h.name)) {
            semantic_error(h.line, "invalid host name '" + h.name + "'");
        }
        if (!hosts.insert(h.name).second) {
            semantic_error(h.line, "duplicate host '" + h.name + "'");
        }
    }

    auto check_principal_atoms = [&](const NormalForm& n, std::size_t line) {
        for (const std::string& a : n.atoms()) {
            if (!hosts.count(a)) semantic_error(line, "unknown host '" + a + "'");
        }
    };
    auto check_label_atoms = [&](const Label& l, std::size_t line) {
        check_principal_atoms(l.conf, line);
        check_principal_atoms(l.integ, line);
    };

    for (const AssumeDecl& a : prog.assumes) {
        check_principal_atoms(normalize(a.left), a.line);
        check_principal_atoms(normalize(a.right), a.line);
    }

    std::map<std::string, const FunDecl*> functions;
    for (const FunDecl& f : prog.functions) {
        if (hosts.count(f.name)) {
            semantic_error(f.line, "function '" + f.name + "' collides with a host");
        }
        if (!functions.emplace(f.name, &f).second) {
            semantic_error(f.line, "duplicate function '" + f.name + "'");
        }
    }

    auto bindable = [&](const std::string& name, std::size_t line,
                        const std::set<std::string>& scope) {
        if (hosts.count(name)) semantic_error(line, "'" + name + "' names a host");
        if (functions.count(name)) semantic_error(line, "'" + name + "' names a function");
        if (scope.count(name)) semantic_error(line, "redefinition of '" + name + "'");
    };

    auto walk_body = [&](const std::vector<Stmt>& body, std::set<std::string> scope,
                         bool in_function) {
        for (const Stmt& s : body) {
            switch (s.kind) {
                case Stmt::Kind::Input:
                    if (in_function) semantic_error(s.line, "input is only allowed in main");
                    if (!hosts.count(s.host)) {
                        semantic_error(s.line, "unknown host '" + s.host + "'");
                    }
                    if (s.annotation) check_label_atoms(*s.annotation, s.line);
                    bindable(s.name, s.line, scope);
                    scope.insert(s.name);
                    break;
                case Stmt::Kind::Output:
                    if (in_function) semantic_error(s.line, "output is only allowed in main");
                    if (!hosts.count(s.host)) {
                        semantic_error(s.line, "unknown host '" + s.host + "'");
                    }
                    check_defined_expr(*s.value, scope);
                    if (s.target) check_label_atoms(*s.target, s.line);
                    break;
                case Stmt::Kind::Let:
                    check_defined_expr(*s.value, scope);
                    if (s.annotation) check_label_atoms(*s.annotation, s.line);
                    if (s.target) check_label_atoms(*s.target, s.line);
                    if (s.downgrade != DowngradeKind::None && !s.target && !s.annotation) {
                        semantic_error(s.line,
                                       "downgrade needs a target ('to <C, I>' or a 'val x : "
                                       "<C, I>' annotation)");
                    }
                    bindable(s.name, s.line, scope);
                    scope.insert(s.name);
                    break;
                case Stmt::Kind::Call: {
                    auto it = functions.find(s.callee);
                    if (it == functions.end()) {
                        semantic_error(s.line, "call to unknown function '" + s.callee + "'");
                    }
                    if (it->second->params.size() != s.args.size()) {
                        semantic_error(
                            s.line, "'" + s.callee + "' takes " +
                                        std::to_string(it->second->params.size()) +
                                        " argument(s), got " + std::to_string(s.args.size()));
                    }
                    for (const ExprPtr& a : s.args) check_defined_expr(*a, scope);
                    if (s.annotation) check_label_atoms(*s.annotation, s.line);
                    bindable(s.name, s.line, scope);
                    scope.insert(s.name);
                    break;
                }
            }
        }
        return scope;
    };

    for (const FunDecl& f : prog.functions) {
        std::set<std::string> scope;
        for (const Param& p : f.params) {
            bindable(p.name, p.line, scope);
            scope.insert(p.name);
            if (p.exact) check_label_atoms(*p.exact, p.line);
            if (p.bound) check_label_atoms(*p.bound, p.line);
        }
        scope = walk_body(f.body, std::move(scope), true);
        check_defined_expr(*f.ret, scope);
    }
    walk_body(prog.main, {}, false);

    // Mutual recursion is rejected: the call graph without self-loops must be
    // acyclic so functions can be solved bottom-up.
    std::map<std::string, std::set<std::string>> callees;
    for (const FunDecl& f : prog.functions) {
        for (const Stmt& s : f.body) {
            if (s.kind == Stmt::Kind::Call && s.callee != f.name) {
                callees[f.name].insert(s.callee);
            }
        }
    }
    std::map<std::string, int> color;  // 0 white, 1 gray, 2 black
    auto dfs = [&](auto&& self, const std::string& fn) -> void {
        color[fn] = 1;
        for (const std::string& g : callees[fn]) {
            if (color[g] == 1) {
                semantic_error(functions.at(fn)->line,
                               "mutual recursion between '" + fn + "' and '" + g +
                                   "' is not supported");
            }
            if (color[g] == 0) self(self, g);
        }
        color[fn] = 2;
    };
    for (const FunDecl& f : prog.functions) {
        if (color[f.name] == 0) dfs(dfs, f.name);
    }
}

LabelContext program_contexts(const Program& prog) {
    LabelContext ctx;
    for (const AssumeDecl& a : prog.assumes) {
        NormalForm l = normalize(a.left), r = normalize(a.right);
        auto add = [&](DelegationContext& c) {
            c.add(l, r);
            if (a.rel == AssumeDecl::Rel::Equals) c.add(r, l);
        };
        if (a.comp != AssumeDecl::Comp::Integ) add(ctx.conf_ctx);
        if (a.comp != AssumeDecl::Comp::Conf) add(ctx.integ_ctx);
    }
    return ctx;
}

// ---------------------------------------------------------------------------
// Constraint generation
// ---------------------------------------------------------------------------

namespace {

const Label kLiteralLabel(NormalForm::bottom(), NormalForm::top());  // public, fully trusted

class FunctionBuilder {
public:
    FunctionBuilder(const Program& prog, const FunDecl* fn) : prog_(prog), fn_(fn) {
        out_.name = fn ? fn->name : "main";
        for (const HostDecl& h : prog.hosts) out_.sys.universe.insert(h.name);
        out_.sys.contexts = program_contexts(prog);
    }

    FunctionSystem build() {
        if (fn_) {
            setup_params();
            declare_synth("%return");
            for (const Stmt& s : fn_->body) visit(s);
            LabelExprPtr lr = label_of(*fn_->ret);
            auto ret_var = LabelExpr::make_var("%return");
            emit_flows(lr, ret_var, fn_->ret_line);
            emit_flows(project_expr(Proj::I, ret_var), project_expr(Proj::I, lr),
                       fn_->ret_line);
            out_.return_var = "%return";
        } else {
            for (const Stmt& s : prog_.main) visit(s);
        }
        return std::move(out_);
    }

private:
    void setup_params() {
        std::set<std::string> taken = out_.sys.universe;
        for (const Param& p : fn_->params) {
            ParamInfo info;
            info.name = p.name;
            info.line = p.line;
            if (p.exact) {
                info.label = *p.exact;
                info.bound = *p.exact;
            } else {
                info.poly = true;
                auto fresh = [&](const char* suffix) {
                    std::string name = fn_->name + "_" + p.name + suffix;
                    while (taken.count(name)) name += "_";
                    taken.insert(name);
                    return name;
                };
                info.atom_c = fresh("_C");
                info.atom_i = fresh("_I");
                info.label = Label(NormalForm::atom(info.atom_c), NormalForm::atom(info.atom_i));
                out_.sys.universe.insert(info.atom_c);
                out_.sys.universe.insert(info.atom_i);
                if (p.bound) {
                    info.bound = *p.bound;
                    // The bound justifies the function body's assumptions:
                    // the argument is at most this confidential and at least
                    // this trusted.
                    out_.sys.contexts.conf_ctx.add(p.bound->conf,
                                                   NormalForm::atom(info.atom_c));
                    out_.sys.contexts.integ_ctx.add(NormalForm::atom(info.atom_i),
                                                    p.bound->integ);
                }
            }
            env_[p.name] = LabelExpr::make_const(info.label);
            out_.params.push_back(std::move(info));
        }
    }

    void visit(const Stmt& s) {
        switch (s.kind) {
            case Stmt::Kind::Input: {
                declare(s.name);
                auto var = LabelExpr::make_var(s.name);
                auto host = LabelExpr::make_const(host_label(s.host));
                emit_flows(host, var, s.line);
                emit_flows(var, host, s.line);
                if (s.annotation) {
                    auto ann = LabelExpr::make_const(*s.annotation);
                    emit_flows(host, ann, s.line);
                    emit_flows(ann, host, s.line);
                }
                break;
            }
            case Stmt::Kind::Let: {
                LabelExprPtr le = label_of(*s.value);
                declare(s.name);
                auto var = LabelExpr::make_var(s.name);
                if (s.downgrade == DowngradeKind::None) {
                    if (s.annotation) {
                        auto ann = LabelExpr::make_const(*s.annotation);
                        emit_flows(le, ann, s.line);
                        emit_flows(ann, var, s.line);
                        emit_flows(var, ann, s.line);
                    } else {
                        emit_flows(le, var, s.line);
                        emit_flows(project_expr(Proj::I, var), project_expr(Proj::I, le),
                                   s.line);
                    }
                } else {
                    const Label& target = s.target ? *s.target : *s.annotation;
                    auto tgt = LabelExpr::make_const(target);
                    // The preserved component must match on both sides of the
                    // downgrade; only the other component may drop.
                    Proj kept = s.downgrade == DowngradeKind::Declassify ? Proj::I : Proj::C;
                    emit_flows(project_expr(kept, le), project_expr(kept, tgt), s.line);
                    emit_flows(project_expr(kept, tgt), project_expr(kept, le), s.line);
                    emit_unc(le, s.line);
                    out_.downgrades.push_back({s.line, s.downgrade, le});
                    emit_flows(tgt, var, s.line);
                    emit_flows(var, tgt, s.line);
                    if (s.annotation && s.target) {
                        emit_flows(tgt, LabelExpr::make_const(*s.annotation), s.line);
                    }
                }
                break;
            }
            case Stmt::Kind::Output: {
                LabelExprPtr le = label_of(*s.value);
                auto host = LabelExpr::make_const(host_label(s.host));
                LabelExprPtr sent = le;
                if (s.downgrade != DowngradeKind::None) {
                    emit_unc(le, s.line);
                    out_.downgrades.push_back({s.line, s.downgrade, le});
                    Proj kept =
                        s.downgrade == DowngradeKind::Declassify ? Proj::I : Proj::C;
                    if (s.target) {
                        auto tgt = LabelExpr::make_const(*s.target);
                        emit_flows(project_expr(kept, le), project_expr(kept, tgt), s.line);
                        emit_flows(project_expr(kept, tgt), project_expr(kept, le), s.line);
                        sent = tgt;
                    } else if (s.downgrade == DowngradeKind::Declassify) {
                        // Implicit target: the receiving host's confidentiality
                        // with the subject's integrity.
                        sent = LabelExpr::make_conj(
                            LabelExpr::make_const(
                                Label(NormalForm::atom(s.host), NormalForm::bottom())),
                            project_expr(Proj::I, le));
                    } else {
                        sent = LabelExpr::make_conj(
                            project_expr(Proj::C, le),
                            LabelExpr::make_const(
                                Label(NormalForm::bottom(), NormalForm::atom(s.host))));
                    }
                }
                emit_flows(sent, host, s.line);
                out_.outputs.push_back({s.line, s.host, sent});
                break;
            }
            case Stmt::Kind::Call: {
                CallSite cs;
                cs.line = s.line;
                cs.callee = s.callee;
                cs.result_var = s.name;
                cs.self = fn_ != nullptr && s.callee == fn_->name;
                const FunDecl& callee = find_function(s.callee);
                for (std::size_t i = 0; i < s.args.size(); ++i) {
                    std::string xv = "%c" + std::to_string(out_.calls.size()) + "_" +
                                     callee.params[i].name;
                    declare_synth(xv);
                    auto xvar = LabelExpr::make_var(xv);
                    LabelExprPtr la = label_of(*s.args[i]);
                    emit_flows(la, xvar, s.line);
                    emit_flows(project_expr(Proj::I, xvar), project_expr(Proj::I, la), s.line);
                    cs.arg_vars.push_back(xv);
                    if (cs.self) {
                        // Recursive calls must keep the argument inside the
                        // parameter's label, or the fixed point would not be
                        // a faithful summary of the recursion.
                        emit_flows(xvar, LabelExpr::make_const(out_.params[i].label), s.line);
                    }
                }
                declare(s.name);
                auto rvar = LabelExpr::make_var(s.name);
                if (s.annotation) {
                    auto ann = LabelExpr::make_const(*s.annotation);
                    emit_flows(rvar, ann, s.line);
                    emit_flows(ann, rvar, s.line);
                }
                if (cs.self) {
                    auto ret = LabelExpr::make_var("%return");
                    emit_flows(ret, rvar, s.line);
                    emit_flows(project_expr(Proj::I, rvar), project_expr(Proj::I, ret),
                               s.line);
                }
                out_.calls.push_back(std::move(cs));
                break;
            }
        }
    }

    const FunDecl& find_function(const std::string& name) const {
        for (const FunDecl& f : prog_.functions) {
            if (f.name == name) return f;
        }
        throw std::logic_error("unknown function " + name);  // validate_program rejects this
    }

    Label host_label(const std::string& host) const {
        return Label(NormalForm::atom(host), NormalForm::atom(host));
    }

    LabelExprPtr label_of(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::Var:
                return env_.at(e.name);
            case Expr::Kind::IntLit:
                return LabelExpr::make_const(kLiteralLabel);
            case Expr::Kind::Binary:
                return LabelExpr::make_join(label_of(*e.lhs), label_of(*e.rhs));
        }
        throw std::logic_error("unreachable expression kind");
    }

    static LabelExprPtr project_expr(Proj p, LabelExprPtr e) {
        return LabelExpr::make_project(p, std::move(e));
    }

    void declare(const std::string& name) {
        out_.sys.variables.push_back(name);
        out_.source_vars.push_back(name);
        env_[name] = LabelExpr::make_var(name);
    }

    void declare_synth(const std::string& name) { out_.sys.variables.push_back(name); }

    void emit_flows(LabelExprPtr from, LabelExprPtr to, std::size_t line) {
        out_.sys.label_constraints.push_back(
            LabelConstraint::flows(std::move(from), std::move(to), line_origin(line)));
    }

    void emit_unc(LabelExprPtr e, std::size_t line) {
        out_.sys.label_constraints.push_back(
            LabelConstraint::unc(std::move(e), line_origin(line)));
    }

    const Program& prog_;
    const FunDecl* fn_;
    FunctionSystem out_;
    std::map<std::string, LabelExprPtr> env_;
};

}  // namespace

std::vector<FunctionSystem> gen_constraints(const Program& prog) {
    std::vector<FunctionSystem> out;
    for (const FunDecl& f : prog.functions) {
        out.push_back(FunctionBuilder(prog, &f).build());
    }
    out.push_back(FunctionBuilder(prog, nullptr).build());
    return out;
}

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

namespace {

using Assignment = std::map<std::pair<std::string, Proj>, NormalForm>;

Assignment assignment_of(const Solution& sol) {
    Assignment cur;
    for (const auto& [name, label] : sol.assignment) {
        cur.emplace(std::make_pair(name, Proj::C), label.conf);
        cur.emplace(std::make_pair(name, Proj::I), label.integ);
    }
    return cur;
}

Label eval_label(const LabelExprPtr& e, const ConstraintSystem& sys, const Assignment& cur) {
    return Label(eval_expr(extract_component(e, Proj::C), sys, cur),
                 eval_expr(extract_component(e, Proj::I), sys, cur));
}

NormalForm subst_nf(const NormalForm& n, const std::map<std::string, NormalForm>& sub) {
    if (n.is_top() || n.is_bottom()) return n;
    NormalForm result = NormalForm::bottom();
    bool first = true;
    for (const Monomial& m : n.monomials()) {
        NormalForm image = NormalForm::bottom();
        for (const std::string& a : m.atoms) {
            auto it = sub.find(a);
            image = conj(image, it != sub.end() ? it->second : NormalForm::atom(a));
        }
        result = first ? image : disj(result, image);
        first = false;
    }
    return result;
}

// The callee's solved return label as a caller-side expression: the callee's
// polymorphic parameter atoms become projections of the call's argument
// label variables, host atoms stay constant.
LabelExprPtr instantiate_return(const Label& ret, const std::vector<ParamInfo>& params,
                                const std::vector<std::string>& arg_vars) {
    std::map<std::string, std::pair<Proj, std::string>> atom_map;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i].poly) continue;
        atom_map[params[i].atom_c] = {Proj::C, arg_vars[i]};
        atom_map[params[i].atom_i] = {Proj::I, arg_vars[i]};
    }
    auto nf_to_expr = [&](const NormalForm& n, Proj sel) -> LabelExprPtr {
        auto const_of = [&](const NormalForm& p) {
            return LabelExpr::make_const(sel == Proj::C ? Label(p, NormalForm::bottom())
                                                        : Label(NormalForm::bottom(), p));
        };
        if (n.is_top()) return const_of(NormalForm::top());
        if (n.is_bottom()) return const_of(NormalForm::bottom());
        LabelExprPtr all;
        for (const Monomial& m : n.monomials()) {
            LabelExprPtr me;
            for (const std::string& a : m.atoms) {
                LabelExprPtr ae;
                auto it = atom_map.find(a);
                if (it != atom_map.end()) {
                    ae = LabelExpr::make_project(it->second.first,
                                                 LabelExpr::make_var(it->second.second));
                } else {
                    ae = const_of(NormalForm::atom(a));
                }
                me = me ? LabelExpr::make_conj(me, ae) : ae;
            }
            all = all ? LabelExpr::make_disj(all, me) : me;
        }
        return all;
    };
    return LabelExpr::make_conj(nf_to_expr(ret.conf, Proj::C), nf_to_expr(ret.integ, Proj::I));
}

struct SolvedFunction {
    ConstraintSystem sys;  // flows-only, translated; contexts include bound entries
    Solution sol;
    Assignment cur;
    std::vector<PrincipalConstraint> residuals;
    std::vector<LabelConstraint> unc_constraints;
};

std::string verdict_kind(DowngradeKind k) {
    return k == DowngradeKind::Declassify ? "declassify" : "endorse";
}

}  // namespace

Report check_program(const Program& prog, std::vector<std::string>* trace) {
    validate_program(prog);
    std::vector<FunctionSystem> systems = gen_constraints(prog);

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < systems.size(); ++i) index[systems[i].name] = i;

    // Callees before callers; validate_program guarantees acyclicity (modulo
    // self-loops).  Main is last in `systems` and depends on everything.
    std::vector<std::size_t> order;
    std::vector<bool> placed(systems.size(), false);
    auto place = [&](auto&& self, std::size_t i) -> void {
        if (placed[i]) return;
        placed[i] = true;
        for (const CallSite& c : systems[i].calls) {
            if (!c.self) self(self, index.at(c.callee));
        }
        order.push_back(i);
    };
    for (std::size_t i = 0; i < systems.size(); ++i) place(place, i);

    Report report;
    std::vector<std::optional<SolvedFunction>> solved(systems.size());
    bool translation_ok = true;

    for (std::size_t si : order) {
        const FunctionSystem& f = systems[si];
        ConstraintSystem work = f.sys;
        for (const CallSite& c : f.calls) {
            if (c.self) continue;
            const FunctionSystem& callee = systems[index.at(c.callee)];
            const SolvedFunction& csol = *solved[index.at(c.callee)];
            Label ret = csol.sol.assignment.at(callee.return_var);
            LabelExprPtr re = instantiate_return(ret, callee.params, c.arg_vars);
            auto rvar = LabelExpr::make_var(c.result_var);
            work.label_constraints.push_back(
                LabelConstraint::flows(re, rvar, line_origin(c.line)));
            work.label_constraints.push_back(LabelConstraint::flows(
                LabelExpr::make_project(Proj::I, rvar), LabelExpr::make_project(Proj::I, re),
                line_origin(c.line)));
        }

        SolvedFunction sf;
        sf.sys = work;
        sf.sys.label_constraints.clear();
        for (const LabelConstraint& lc : work.label_constraints) {
            if (lc.kind == LabelConstraint::Kind::FlowsTo) {
                sf.sys.label_constraints.push_back(lc);
            } else {
                sf.unc_constraints.push_back(lc);
            }
        }
        if (auto fail = translate_system(sf.sys)) {
            report.failures.push_back({f.name, origin_line(fail->origin), fail->message});
            translation_ok = false;
            break;
        }
        std::vector<PrincipalConstraint> updates;
        for (PrincipalConstraint& pc : sf.sys.constraints) {
            (pc.lhs_is_var ? updates : sf.residuals).push_back(pc);
        }
        sf.sys.constraints = std::move(updates);
        SolveResult sr = solve(sf.sys, trace);
        if (!sr.ok()) {
            // Unreachable: residual checks were stripped above.
            report.failures.push_back(
                {f.name, origin_line(sr.failure->origin), sr.failure->message});
            translation_ok = false;
            break;
        }
        sf.sol = std::move(*sr.solution);
        sf.cur = assignment_of(sf.sol);
        solved[si] = std::move(sf);
    }

    // Verdicts and the variable table, in source order (main last).
    for (std::size_t si = 0; si < systems.size() && translation_ok; ++si) {
        const FunctionSystem& f = systems[si];
        const SolvedFunction& sf = *solved[si];

        std::map<std::size_t, std::vector<std::string>> line_fails;
        for (const PrincipalConstraint& rc : sf.residuals) {
            NormalForm value = eval_expr(rc.rhs, sf.sys, sf.cur);
            if (!acts_for(sf.sys.contexts.context(rc.component), rc.lhs_const, value)) {
                line_fails[origin_line(rc.origin)].push_back(
                    "requires " + to_string(rc.lhs_const) + " >= " + to_string(value) +
                    " for " +
                    (rc.component == Proj::C ? "confidentiality" : "integrity"));
            }
        }
        std::set<std::size_t> consumed;

        for (const DowngradeSite& d : f.downgrades) {
            Label subject = eval_label(d.subject, sf.sys, sf.cur);
            bool ok = uncompromised(sf.sys.contexts, subject);
            std::string detail = to_string(subject);
            if (!ok) detail += " is compromised";
            auto lf = line_fails.find(d.line);
            if (lf != line_fails.end() && !lf->second.empty()) {
                ok = false;
                detail += "; " + lf->second.front();
            }
            consumed.insert(d.line);
            report.downgrades.push_back(
                {f.name, d.line, verdict_kind(d.kind), detail, ok, subject, ""});
        }
        for (const OutputSite& o : f.outputs) {
            Label value = eval_label(o.value, sf.sys, sf.cur);
            Label host(NormalForm::atom(o.host), NormalForm::atom(o.host));
            bool ok = flows_to(sf.sys.contexts, value, host);
            std::string detail = to_string(value) + " to " + o.host;
            auto lf = line_fails.find(o.line);
            if (lf != line_fails.end() && !lf->second.empty()) {
                ok = false;
                detail += "; " + lf->second.front();
            }
            consumed.insert(o.line);
            report.outputs.push_back({f.name, o.line, "output", detail, ok, value, o.host});
        }
        for (const CallSite& c : f.calls) {
            const FunctionSystem& callee = systems[index.at(c.callee)];
            for (std::size_t i = 0; i < c.arg_vars.size(); ++i) {
                if (!callee.params[i].bound) continue;
                Label arg = sf.sol.assignment.at(c.arg_vars[i]);
                bool ok = flows_to(sf.sys.contexts, arg, *callee.params[i].bound);
                report.bounds.push_back(
                    {f.name, c.line, "bound",
                     callee.params[i].name + " gets " + to_string(arg) + ", bound " +
                         to_string(*callee.params[i].bound),
                     ok, arg, ""});
            }
        }
        for (const auto& [line, messages] : line_fails) {
            if (consumed.count(line)) continue;
            for (const std::string& m : messages) report.failures.push_back({f.name, line, m});
        }

        for (const ParamInfo& p : f.params) {
            report.variables.push_back({f.name, p.name, p.label});
        }
        for (const std::string& v : f.source_vars) {
            report.variables.push_back({f.name, v, sf.sol.assignment.at(v)});
        }
    }

    // Specializations: walk the call tree from main, memoizing on the tuple
    // of argument labels.
    if (translation_ok) {
        const FunctionSystem& main_fs = systems.back();
        const SolvedFunction& main_sf = *solved[systems.size() - 1];
        std::set<std::pair<std::string, std::vector<Label>>> seen;
        std::deque<std::pair<std::string, std::vector<Label>>> queue;
        auto enqueue = [&](const std::string& fn, std::vector<Label> args) {
            queue.emplace_back(fn, std::move(args));
        };
        for (const CallSite& c : main_fs.calls) {
            std::vector<Label> args;
            for (const std::string& v : c.arg_vars) args.push_back(main_sf.sol.assignment.at(v));
            enqueue(c.callee, std::move(args));
        }
        std::size_t steps = 0;
        while (!queue.empty()) {
            if (++steps > 1000) {
                report.failures.push_back(
                    {"main", 0, "specialization table exceeded 1000 entries"});
                break;
            }
            auto [fn, args] = queue.front();
            queue.pop_front();
            if (!seen.insert({fn, args}).second) continue;
            report.specializations.push_back({fn, args});
            const FunctionSystem& g = systems[index.at(fn)];
            const SolvedFunction& gs = *solved[index.at(fn)];
            std::map<std::string, NormalForm> sub;
            for (std::size_t j = 0; j < g.params.size(); ++j) {
                if (!g.params[j].poly) continue;
                sub.insert_or_assign(g.params[j].atom_c, args[j].conf);
                sub.insert_or_assign(g.params[j].atom_i, args[j].integ);
            }
            for (const CallSite& c : g.calls) {
                std::vector<Label> inner;
                for (const std::string& v : c.arg_vars) {
                    const Label& l = gs.sol.assignment.at(v);
                    inner.emplace_back(subst_nf(l.conf, sub), subst_nf(l.integ, sub));
                }
                enqueue(c.callee, std::move(inner));
            }
        }
    }

    bool verdicts_ok = true;
    std::optional<std::size_t> blame;
    auto note = [&](std::size_t line, bool ok) {
        if (ok) return;
        verdicts_ok = false;
        if (line != 0 && (!blame || line < *blame)) blame = line;
    };
    for (const Verdict& v : report.downgrades) note(v.line, v.ok);
    for (const Verdict& v : report.outputs) note(v.line, v.ok);
    for (const Verdict& v : report.bounds) note(v.line, v.ok);
    for (const Failure& f : report.failures) note(f.line, false);

    report.accepted = translation_ok && verdicts_ok && report.failures.empty();
    report.blame_line = blame;
    return report;
}

std::string render_report(const Report& report) {
    std::ostringstream out;
    if (report.accepted) {
        out << "ACCEPT\n";
    } else if (report.blame_line) {
        out << "REJECT at line " << *report.blame_line << "\n";
    } else {
        out << "REJECT\n";
    }
    if (!report.variables.empty()) {
        out << "variables:\n";
        for (const VarReport& v : report.variables) {
            out << "  " << v.fn << "." << v.name << " : " << to_string(v.label) << "\n";
        }
    }
    auto verdict_section = [&](const char* title, const std::vector<Verdict>& vs) {
        if (vs.empty()) return;
        out << title << ":\n";
        for (const Verdict& v : vs) {
            out << "  line " << v.line << " " << v.kind << " " << v.detail << ": "
                << (v.ok ? "ok" : "FAIL") << "\n";
        }
    };
    verdict_section("downgrades", report.downgrades);
    verdict_section("outputs", report.outputs);
    verdict_section("bounds", report.bounds);
    if (!report.specializations.empty()) {
        out << "specializations:\n";
        for (const Specialization& s : report.specializations) {
            out << "  " << s.function << "(";
            for (std::size_t i = 0; i < s.args.size(); ++i) {
                if (i) out << ", ";
                out << to_string(s.args[i]);
            }
            out << ")\n";
        }
    }
    if (!report.failures.empty()) {
        out << "failures:\n";
        for (const Failure& f : report.failures) {
            out << "  " << f.fn << " line " << f.line << ": " << f.message << "\n";
        }
    }
    return out.str();
}

}  // namespace ifc::surface
