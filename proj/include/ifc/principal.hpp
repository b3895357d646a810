#ifndef IFC_PRINCIPAL_HPP
#define IFC_PRINCIPAL_HPP

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

// The free bounded distributive lattice of principals.
//
// Authority order: top >= p & q >= p >= p | q >= bot.  `&` (conjunction) is
// the authority of both principals acting together; `|` (disjunction) is the
// authority they share.  Canonical forms are irredundant disjunctions of
// monomials (conjunctions of atoms), with top and bot kept as distinct cases.

namespace ifc {

// Thrown by the text parsers in this library.  `offset` is a byte offset
// into the parsed string; line/column are 1-based and filled in by parsers
// that track them (0 otherwise).
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& message, std::size_t offset,
                std::size_t line = 0, std::size_t column = 0)
        : std::runtime_error(message), offset(offset), line(line), column(column) {}

    std::size_t offset;
    std::size_t line;
    std::size_t column;
};

// ---------------------------------------------------------------------------
// Principal terms (parse trees)
// ---------------------------------------------------------------------------

struct Principal;
using PrincipalPtr = std::shared_ptr<const Principal>;

struct Principal {
    enum class Kind { Top, Bottom, Atom, Conj, Disj };

    Kind kind;
    std::string atom;        // Kind::Atom only
    PrincipalPtr left;       // Kind::Conj / Kind::Disj
    PrincipalPtr right;

    static PrincipalPtr top();
    static PrincipalPtr bottom();
    static PrincipalPtr make_atom(std::string name);
    static PrincipalPtr make_conj(PrincipalPtr l, PrincipalPtr r);
    static PrincipalPtr make_disj(PrincipalPtr l, PrincipalPtr r);
};

bool equal_trees(const Principal& a, const Principal& b);

// Returns true for a spelling that may be used as an atom name:
// [A-Za-z][A-Za-z0-9_]*, excluding the reserved words "top" and "bot".
bool is_valid_atom_name(const std::string& name);

// Grammar: P ::= atom | "top" | "bot" | P "&" P | P "|" P | "(" P ")"
// with `&` binding tighter than `|`, both left-associative.
// Throws parse_error (with byte offset) on malformed input.
PrincipalPtr parse_principal(const std::string& text);

// Prints a term so that re-parsing yields an equal tree (parentheses are
// inserted exactly where the tree shape requires them).
std::string to_string(const Principal& p);

// ---------------------------------------------------------------------------
// Canonical normal forms
// ---------------------------------------------------------------------------

// A nonempty conjunction of atoms; these are exactly the join-prime
// principals.  Atoms are kept sorted and unique.
struct Monomial {
    std::vector<std::string> atoms;

    explicit Monomial(std::vector<std::string> names);

    // True iff this monomial's atom set contains `other`'s, i.e. this has at
    // least `other`'s authority.
    bool contains(const Monomial& other) const;

    bool operator==(const Monomial& other) const { return atoms == other.atoms; }
    bool operator<(const Monomial& other) const { return atoms < other.atoms; }
};

// Canonical representative: Top, Bottom, or an antichain of monomials (no
// monomial's atom set contains another's; a containing pair would have been
// absorbed by the disjunction).  The antichain is kept sorted, so equal
// normal forms compare equal structurally.
class NormalForm {
public:
    enum class Kind { Top, Bottom, Disjuncts };

    static NormalForm top();
    static NormalForm bottom();
    static NormalForm atom(const std::string& name);
    static NormalForm monomial(Monomial m);
    // Builds the disjunction of the given monomials, absorbing supersets.
    static NormalForm disjunction(std::vector<Monomial> ms);

    Kind kind() const { return kind_; }
    bool is_top() const { return kind_ == Kind::Top; }
    bool is_bottom() const { return kind_ == Kind::Bottom; }
    const std::vector<Monomial>& monomials() const { return monomials_; }

    // Every atom name mentioned.
    std::set<std::string> atoms() const;

    bool operator==(const NormalForm& other) const;
    bool operator!=(const NormalForm& other) const { return !(*this == other); }
    bool operator<(const NormalForm& other) const;  // arbitrary total order (for maps)

private:
    NormalForm(Kind kind, std::vector<Monomial> ms) : kind_(kind), monomials_(std::move(ms)) {}

    Kind kind_;
    std::vector<Monomial> monomials_;
};

NormalForm normalize(const Principal& p);
NormalForm normalize(const PrincipalPtr& p);

// Convenience: parse + normalize.
NormalForm parse_normal_form(const std::string& text);

// The lattice operations on canonical forms.
NormalForm conj(const NormalForm& p, const NormalForm& q);
NormalForm disj(const NormalForm& p, const NormalForm& q);

// The free-lattice authority order: true iff p >= q with no delegation
// assumptions.  For disjunctions this is: every monomial of p contains some
// monomial of q.
bool syntactic_acts_for(const NormalForm& p, const NormalForm& q);

// The antichain of join-prime factors whose disjunction is p.
// Top and Bottom are rejected (callers special-case them).
std::vector<Monomial> join_prime_factors(const NormalForm& p);

// Boolean evaluation against a set of controlled atoms: bot is controlled by
// everyone, top by no one, `&` needs both sides, `|` either side.  The set
// {p : evaluates(p, s)} is a prime ideal in the authority order, i.e. a
// consistent attacker's view.
bool evaluates(const NormalForm& p, const std::set<std::string>& controlled);

// The relative pseudocomplement: the unique minimum-authority r such that
// conj(p, r) >= q, computed by brute force over Bottom, Top, and every
// nonempty monomial of `universe` (the disjunction of all candidates that
// satisfy the bound is itself a candidate, by distributivity).
// Requires atoms(p) and atoms(q) to be contained in `universe`.
NormalForm pseudocomplement(const NormalForm& p, const NormalForm& q,
                            const std::set<std::string>& universe);

// Canonical printing: monomials joined with " & ", disjuncts with " | ";
// a multi-atom monomial is parenthesized when there are several disjuncts.
std::string to_string(const NormalForm& p);

}  // namespace ifc

#endif  // IFC_PRINCIPAL_HPP
