#include "ifc/principal.hpp"

#include <algorithm>
#include <cctype>

namespace ifc {

// ---------------------------------------------------------------------------
// Principal terms
// ---------------------------------------------------------------------------

PrincipalPtr Principal::top() {
    auto p = std::make_shared<Principal>();
    p->kind = Kind::Top;
    return p;
}

PrincipalPtr Principal::bottom() {
    auto p = std::make_shared<Principal>();
    p->kind = Kind::Bottom;
    return p;
}

PrincipalPtr Principal::make_atom(std::string name) {
    auto p = std::make_shared<Principal>();
    p->kind = Kind::Atom;
    p->atom = std::move(name);
    return p;
}

PrincipalPtr Principal::make_conj(PrincipalPtr l, PrincipalPtr r) {
    auto p = std::make_shared<Principal>();
    p->kind = Kind::Conj;
    p->left = std::move(l);
    p->right = std::move(r);
    return p;
}

PrincipalPtr Principal::make_disj(PrincipalPtr l, PrincipalPtr r) {
    auto p = std::make_shared<Principal>();
    p->kind = Kind::Disj;
    p->left = std::move(l);
    p->right = std::move(r);
    return p;
}

bool equal_trees(const Principal& a, const Principal& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Principal::Kind::Top:
        case Principal::Kind::Bottom:
            return true;
        case Principal::Kind::Atom:
            return a.atom == b.atom;
        case Principal::Kind::Conj:
        case Principal::Kind::Disj:
            return equal_trees(*a.left, *b.left) && equal_trees(*a.right, *b.right);
    }
    return false;
}

bool is_valid_atom_name(const std::string& name) {
    if (name.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(name[0]))) return false;
    for (char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return name != "top" && name != "bot";
}

namespace {

// Recursive-descent parser for the principal grammar.
class PrincipalParser {
public:
    explicit PrincipalParser(const std::string& text) : text_(text) {}

    PrincipalPtr parse() {
        PrincipalPtr p = parse_disj();
        skip_spaces();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return p;
    }

private:
    PrincipalPtr parse_disj() {
        PrincipalPtr p = parse_conj();
        while (true) {
            skip_spaces();
            if (pos_ < text_.size() && text_[pos_] == '|') {
                ++pos_;
                p = Principal::make_disj(p, parse_conj());
            } else {
                return p;
            }
        }
    }

    PrincipalPtr parse_conj() {
        PrincipalPtr p = parse_primary();
        while (true) {
            skip_spaces();
            if (pos_ < text_.size() && text_[pos_] == '&') {
                ++pos_;
                p = Principal::make_conj(p, parse_primary());
            } else {
                return p;
            }
        }
    }

    PrincipalPtr parse_primary() {
        skip_spaces();
        if (pos_ >= text_.size()) fail("expected a principal");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            PrincipalPtr p = parse_disj();
            skip_spaces();
            if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
            ++pos_;
            return p;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            std::string word = text_.substr(start, pos_ - start);
            if (word == "top") return Principal::top();
            if (word == "bot") return Principal::bottom();
            return Principal::make_atom(std::move(word));
        }
        fail("expected an atom, 'top', 'bot', or '('");
        return nullptr;  // unreachable
    }

    void skip_spaces() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    [[noreturn]] void fail(const std::string& message) {
        throw parse_error("principal syntax error at offset " + std::to_string(pos_) +
                              ": " + message,
                          pos_);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

// Precedence used by the tree printer: Disj < Conj < leaves.
int precedence(Principal::Kind k) {
    switch (k) {
        case Principal::Kind::Disj: return 1;
        case Principal::Kind::Conj: return 2;
        default: return 3;
    }
}

void print_tree(const Principal& p, int parent_prec, bool right_operand, std::string& out) {
    int prec = precedence(p.kind);
    // Both operators are left-associative, so a right child of equal
    // precedence needs parentheses to reproduce the tree exactly.
    bool parens = prec < parent_prec || (prec == parent_prec && right_operand);
    if (parens) out += '(';
    switch (p.kind) {
        case Principal::Kind::Top: out += "top"; break;
        case Principal::Kind::Bottom: out += "bot"; break;
        case Principal::Kind::Atom: out += p.atom; break;
        case Principal::Kind::Conj:
            print_tree(*p.left, prec, false, out);
            out += " & ";
            print_tree(*p.right, prec, true, out);
            break;
        case Principal::Kind::Disj:
            print_tree(*p.left, prec, false, out);
            out += " | ";
            print_tree(*p.right, prec, true, out);
            break;
    }
    if (parens) out += ')';
}

}  // namespace

PrincipalPtr parse_principal(const std::string& text) {
    return PrincipalParser(text).parse();
}

std::string to_string(const Principal& p) {
    std::string out;
    print_tree(p, 0, false, out);
    return out;
}

// ---------------------------------------------------------------------------
// Normal forms
// ---------------------------------------------------------------------------

Monomial::Monomial(std::vector<std::string> names) : atoms(std::move(names)) {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    if (atoms.empty()) throw std::invalid_argument("monomial must have at least one atom");
}

bool Monomial::contains(const Monomial& other) const {
    return std::includes(atoms.begin(), atoms.end(), other.atoms.begin(), other.atoms.end());
}

NormalForm NormalForm::top() { return NormalForm(Kind::Top, {}); }
NormalForm NormalForm::bottom() { return NormalForm(Kind::Bottom, {}); }

NormalForm NormalForm::atom(const std::string& name) {
    return monomial(Monomial({name}));
}

NormalForm NormalForm::monomial(Monomial m) {
    return NormalForm(Kind::Disjuncts, {std::move(m)});
}

NormalForm NormalForm::disjunction(std::vector<Monomial> ms) {
    if (ms.empty()) throw std::invalid_argument("disjunction of no monomials");
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    // Absorb: a monomial that strictly contains another adds no shared
    // authority beyond the smaller one, so only inclusion-minimal sets stay.
    std::vector<Monomial> kept;
    for (const Monomial& m : ms) {
        bool absorbed = false;
        for (const Monomial& other : ms) {
            if (!(other == m) && m.contains(other)) {
                absorbed = true;
                break;
            }
        }
        if (!absorbed) kept.push_back(m);
    }
    return NormalForm(Kind::Disjuncts, std::move(kept));
}

std::set<std::string> NormalForm::atoms() const {
    std::set<std::string> out;
    for (const Monomial& m : monomials_) out.insert(m.atoms.begin(), m.atoms.end());
    return out;
}

bool NormalForm::operator==(const NormalForm& other) const {
    return kind_ == other.kind_ && monomials_ == other.monomials_;
}

bool NormalForm::operator<(const NormalForm& other) const {
    if (kind_ != other.kind_) return kind_ < other.kind_;
    return monomials_ < other.monomials_;
}

namespace {

NormalForm normalize_rec(const Principal& p) {
    switch (p.kind) {
        case Principal::Kind::Top: return NormalForm::top();
        case Principal::Kind::Bottom: return NormalForm::bottom();
        case Principal::Kind::Atom: return NormalForm::atom(p.atom);
        case Principal::Kind::Conj: return conj(normalize_rec(*p.left), normalize_rec(*p.right));
        case Principal::Kind::Disj: return disj(normalize_rec(*p.left), normalize_rec(*p.right));
    }
    throw std::logic_error("unreachable principal kind");
}

}  // namespace

NormalForm normalize(const Principal& p) { return normalize_rec(p); }

NormalForm normalize(const PrincipalPtr& p) { return normalize_rec(*p); }

NormalForm parse_normal_form(const std::string& text) {
    return normalize(parse_principal(text));
}

NormalForm conj(const NormalForm& p, const NormalForm& q) {
    // top is the annihilator (most authority), bot the identity.
    if (p.is_top() || q.is_top()) return NormalForm::top();
    if (p.is_bottom()) return q;
    if (q.is_bottom()) return p;
    // Distribute: (m1 | ... ) & (n1 | ...) = disjunction of all m_i & n_j.
    std::vector<Monomial> out;
    for (const Monomial& m : p.monomials()) {
        for (const Monomial& n : q.monomials()) {
            std::vector<std::string> atoms = m.atoms;
            atoms.insert(atoms.end(), n.atoms.begin(), n.atoms.end());
            out.emplace_back(std::move(atoms));
        }
    }
    return NormalForm::disjunction(std::move(out));
}

NormalForm disj(const NormalForm& p, const NormalForm& q) {
    // bot is the annihilator (least authority), top the identity.
    if (p.is_bottom() || q.is_bottom()) return NormalForm::bottom();
    if (p.is_top()) return q;
    if (q.is_top()) return p;
    std::vector<Monomial> out = p.monomials();
    out.insert(out.end(), q.monomials().begin(), q.monomials().end());
    return NormalForm::disjunction(std::move(out));
}

bool syntactic_acts_for(const NormalForm& p, const NormalForm& q) {
    if (p.is_top()) return true;           // top acts for everything
    if (q.is_bottom()) return true;        // everything acts for bot
    if (q.is_top()) return false;          // only top acts for top (handled above)
    if (p.is_bottom()) return false;       // bot acts only for bot (handled above)
    // Every monomial of p must have at least the authority of some monomial
    // of q (an attacker controlling any disjunct of p then controls q).
    for (const Monomial& m : p.monomials()) {
        bool covered = false;
        for (const Monomial& n : q.monomials()) {
            if (m.contains(n)) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

std::vector<Monomial> join_prime_factors(const NormalForm& p) {
    if (p.is_top() || p.is_bottom()) {
        throw std::invalid_argument("join_prime_factors: top and bot have no monomial factors");
    }
    return p.monomials();
}

bool evaluates(const NormalForm& p, const std::set<std::string>& controlled) {
    if (p.is_bottom()) return true;
    if (p.is_top()) return false;
    for (const Monomial& m : p.monomials()) {
        bool all = true;
        for (const std::string& a : m.atoms) {
            if (controlled.find(a) == controlled.end()) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

NormalForm pseudocomplement(const NormalForm& p, const NormalForm& q,
                            const std::set<std::string>& universe) {
    std::vector<std::string> atoms(universe.begin(), universe.end());
    if (atoms.size() > 20) {
        throw std::invalid_argument("pseudocomplement: universe too large to enumerate");
    }
    // A candidate is Bottom, Top, or any nonempty monomial over the universe.
    // The solutions of conj(p, r) >= q are closed under disjunction and every
    // principal is a disjunction of such candidates, so the disjunction of
    // all solving candidates is the least solution.
    if (syntactic_acts_for(conj(p, NormalForm::bottom()), q)) return NormalForm::bottom();
    NormalForm best = NormalForm::top();  // always a solution
    const std::size_t n = atoms.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::string> selected;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) selected.push_back(atoms[i]);
        }
        NormalForm candidate = NormalForm::monomial(Monomial(std::move(selected)));
        if (syntactic_acts_for(conj(p, candidate), q)) {
            best = disj(best, candidate);
        }
    }
    return best;
}

std::string to_string(const NormalForm& p) {
    if (p.is_top()) return "top";
    if (p.is_bottom()) return "bot";
    std::string out;
    bool several = p.monomials().size() > 1;
    for (std::size_t i = 0; i < p.monomials().size(); ++i) {
        const Monomial& m = p.monomials()[i];
        if (i > 0) out += " | ";
        bool parens = several && m.atoms.size() > 1;
        if (parens) out += '(';
        for (std::size_t j = 0; j < m.atoms.size(); ++j) {
            if (j > 0) out += " & ";
            out += m.atoms[j];
        }
        if (parens) out += ')';
    }
    return out;
}

}  // namespace ifc
