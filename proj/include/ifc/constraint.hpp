#ifndef IFC_CONSTRAINT_HPP
#define IFC_CONSTRAINT_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ifc/label.hpp"

// The inference engine: label constraints, their translation to
// per-component principal constraints, Heyting simplification of left-hand
// sides, and the minimum-authority fixed-point solver.

namespace ifc {

// ---------------------------------------------------------------------------
// Label expressions and constraints
// ---------------------------------------------------------------------------

struct LabelExpr;
using LabelExprPtr = std::shared_ptr<const LabelExpr>;

struct LabelExpr {
    enum class Kind { Const, Var, Project, Join, Meet, Conj, Disj };

    Kind kind;
    Label constant;        // Const
    std::string var;       // Var
    Proj proj = Proj::C;   // Project
    LabelExprPtr a, b;     // Project uses a; binary nodes use a and b

    static LabelExprPtr make_const(Label l);
    static LabelExprPtr make_var(std::string name);
    static LabelExprPtr make_project(Proj p, LabelExprPtr e);
    static LabelExprPtr make_join(LabelExprPtr a, LabelExprPtr b);
    static LabelExprPtr make_meet(LabelExprPtr a, LabelExprPtr b);
    static LabelExprPtr make_conj(LabelExprPtr a, LabelExprPtr b);
    static LabelExprPtr make_disj(LabelExprPtr a, LabelExprPtr b);
};

std::string to_string(const LabelExpr& e);

struct LabelConstraint {
    enum class Kind { FlowsTo, Uncompromised };

    Kind kind;
    LabelExprPtr lhs;        // FlowsTo: lhs flows to rhs; Uncompromised: lhs only
    LabelExprPtr rhs;        // null for Uncompromised
    std::string origin;      // human-readable source of the constraint ("" if none)

    static LabelConstraint flows(LabelExprPtr from, LabelExprPtr to, std::string origin = "");
    static LabelConstraint unc(LabelExprPtr e, std::string origin = "");
};

std::string to_string(const LabelConstraint& c);

// ---------------------------------------------------------------------------
// Principal expressions and constraints (one component at a time)
// ---------------------------------------------------------------------------

struct PrincipalExpr;
using PrincipalExprPtr = std::shared_ptr<const PrincipalExpr>;

// Expressions are componentwise pure: every PVar outside a MinRep carries
// the component of the constraint it appears in, and MinRep(p, e) wraps an
// expression of component p.  PseudoImp's left argument is a constant.
struct PrincipalExpr {
    enum class Kind { Const, PVar, Conj, Disj, PseudoImp, MinRep };

    Kind kind;
    NormalForm constant = NormalForm::bottom();  // Const; PseudoImp left argument
    std::string var;                             // PVar
    Proj proj = Proj::C;                         // PVar component; MinRep inner component
    PrincipalExprPtr a, b;                       // children

    static PrincipalExprPtr make_const(NormalForm p);
    static PrincipalExprPtr make_pvar(std::string name, Proj proj);
    static PrincipalExprPtr make_conj(PrincipalExprPtr a, PrincipalExprPtr b);
    static PrincipalExprPtr make_disj(PrincipalExprPtr a, PrincipalExprPtr b);
    static PrincipalExprPtr make_pseudo_imp(NormalForm lhs, PrincipalExprPtr e);
    static PrincipalExprPtr make_min_rep(Proj inner, PrincipalExprPtr e);
};

std::string to_string(const PrincipalExpr& e);

// lhs >= rhs, interpreted under the context selected by `component`.
// After simplification the lhs is a single PVar or a constant.
struct PrincipalConstraint {
    // Exactly one of lhs_var (with lhs_is_var) or lhs_const is meaningful.
    bool lhs_is_var = false;
    std::string lhs_var;
    NormalForm lhs_const = NormalForm::bottom();
    PrincipalExprPtr rhs;
    Proj component = Proj::C;
    std::string origin;
};

std::string to_string(const PrincipalConstraint& c);

// ---------------------------------------------------------------------------
// Systems, solutions, failures
// ---------------------------------------------------------------------------

struct ConstraintSystem {
    std::set<std::string> universe;               // declared atoms
    LabelContext contexts;
    std::vector<std::string> variables;           // declaration order
    std::vector<LabelConstraint> label_constraints;
    std::vector<PrincipalConstraint> constraints;  // translated + simplified
};

struct Solution {
    std::map<std::string, Label> assignment;

    const NormalForm& component(const std::string& var, Proj p) const {
        return assignment.at(var).component(p);
    }
};

struct SolveFailure {
    enum class Kind { Unsatisfiable, NoMinimalSolution };

    Kind kind;
    std::string message;
    std::string origin;  // origin of the offending constraint, if known
};

struct SolveResult {
    std::optional<Solution> solution;
    std::optional<SolveFailure> failure;

    bool ok() const { return solution.has_value(); }
};

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

// The component extraction table: constants project componentwise; a label
// variable becomes a PVar of the requested component; Project keeps its
// component and sends the other to bot; Join is conjunction on C and
// disjunction on I; Meet the reverse; label Conj/Disj map componentwise.
PrincipalExprPtr extract_component(const LabelExprPtr& e, Proj proj);

// FlowsTo(e1, e2) becomes [C(e2) >=_C C(e1), I(e1) >=_I I(e2)];
// Uncompromised(e) becomes [I(e) >=_I MinRep(C, C(e))].
// The lhs here may still be a compound expression; see simplify_into.
struct RawPrincipalConstraint {
    PrincipalExprPtr lhs;
    PrincipalExprPtr rhs;
    Proj component;
    std::string origin;
};
std::vector<RawPrincipalConstraint> translate_constraint(const LabelConstraint& c);

// Rewrites a raw constraint into lhs-atomic form:
//   - the lhs is normalized to a disjunction of (constant & variables) terms;
//   - a disjunctive lhs splits into one constraint per disjunct (p | q >= e
//     iff p >= e and q >= e);
//   - a disjunct with one variable x and constant part p becomes
//     x >= PseudoImp(p, rhs) (plain x >= rhs when p is bot);
//   - a pure-constant disjunct stays as a residual check.
// A disjunct with two or more distinct variables has no minimal solution;
// the failure is returned instead.
std::optional<SolveFailure> simplify_into(const RawPrincipalConstraint& raw,
                                          std::vector<PrincipalConstraint>& out);

// Translates and simplifies every label constraint of `sys` into
// sys.constraints.  Returns a failure instead if any constraint has no
// minimal solution.
std::optional<SolveFailure> translate_system(ConstraintSystem& sys);

// Evaluates an expression at the current assignment.  PseudoImp evaluates
// through the relative pseudocomplement over `sys.universe`; MinRep through
// min_rep under the context its component selects.
NormalForm eval_expr(const PrincipalExprPtr& e, const ConstraintSystem& sys,
                     const std::map<std::pair<std::string, Proj>, NormalForm>& current);

// The minimum-authority fixed point: every variable component starts at
// bot; a variable-lhs constraint x >= e updates x := x & val(e) whenever
// acts_for(ctx, x, val(e)) fails; passes repeat in declaration order until
// stable; residual constant-lhs constraints are then checked once.
SolveResult solve(const ConstraintSystem& sys, std::vector<std::string>* trace = nullptr);

// ---------------------------------------------------------------------------
// Constraint files
// ---------------------------------------------------------------------------

// Line-oriented format:
//   atoms: A B ...
//   vars: x y ...
//   cctx:               (entries on following lines, delegation format)
//   ictx:
//   flows LEXPR -> LEXPR
//   unc LEXPR
// Label expressions: `<C, I>` constants, declared variable names,
// `join`/`meet` (loosest), `&`/`|`, postfix `->C`/`->I` projections,
// parentheses.  `#` starts a comment.
ConstraintSystem parse_constraint_file(const std::string& text);

}  // namespace ifc

#endif  // IFC_CONSTRAINT_HPP
