#ifndef IFC_SURFACE_HPP
#define IFC_SURFACE_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ifc/constraint.hpp"

// A miniature security-typed surface language: host declarations, delegation
// assumptions, straight-line statements with inputs/outputs/downgrades, and
// label-polymorphic functions.  Programs elaborate to one constraint system
// per function (plus main); the checker solves them bottom-up, verifies
// downgrades and outputs, and builds a specialization table.

namespace ifc::surface {

// ---------------------------------------------------------------------------
// Abstract syntax
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Var, IntLit, Binary };

    Kind kind;
    std::string name;       // Var
    long long value = 0;    // IntLit
    std::string op;         // Binary
    ExprPtr lhs, rhs;       // Binary
    std::size_t line = 0;

    static ExprPtr make_var(std::string name, std::size_t line);
    static ExprPtr make_int(long long value, std::size_t line);
    static ExprPtr make_binary(std::string op, ExprPtr lhs, ExprPtr rhs, std::size_t line);
};

std::string to_string(const Expr& e);

enum class DowngradeKind { None, Declassify, Endorse };

// One statement.  `val x = H.input();` is Input; `val x [: L] = e;` is Let
// (with `e` possibly wrapped in declassify/endorse); `H.output(e);` is
// Output (again with an optional downgrade wrapper); `val x = f(a, b);` is
// Call.
struct Stmt {
    enum class Kind { Let, Input, Output, Call };

    Kind kind;
    std::size_t line = 0;
    std::string name;                     // bound variable (Let / Input / Call)
    std::optional<Label> annotation;      // `val x : L`
    std::string host;                     // Input / Output
    ExprPtr value;                        // Let value, Output argument, downgrade subject
    DowngradeKind downgrade = DowngradeKind::None;
    std::optional<Label> target;          // explicit downgrade target
    std::string callee;                   // Call
    std::vector<ExprPtr> args;            // Call
};

struct Param {
    std::string name;
    std::optional<Label> exact;  // `x : L` — monomorphic
    std::optional<Label> bound;  // `x <= L` — polymorphic with bound
    std::size_t line = 0;
};

struct FunDecl {
    std::string name;
    std::vector<Param> params;
    std::vector<Stmt> body;
    ExprPtr ret;
    std::size_t line = 0;
    std::size_t ret_line = 0;
};

struct HostDecl {
    std::string name;
    std::size_t line = 0;
};

struct AssumeDecl {
    enum class Rel { ActsFor, Equals };
    enum class Comp { Conf, Integ, Both };

    PrincipalPtr left, right;
    Rel rel = Rel::ActsFor;
    Comp comp = Comp::Both;
    std::size_t line = 0;
};

struct Program {
    std::vector<HostDecl> hosts;
    std::vector<AssumeDecl> assumes;
    std::vector<FunDecl> functions;
    std::vector<Stmt> main;
};

// Syntax only; throws parse_error with line/column on the first error.
Program parse_program(const std::string& text);

// Name and shape checks: unique names, definition before use, labels naming
// only declared hosts, input/output confined to main, downgrades with a
// determinable target, known callees with matching arity, and no mutual
// recursion (self-recursion is fine).  Throws parse_error.
void validate_program(const Program& prog);

// The program's assumes as a pair of delegation contexts.
LabelContext program_contexts(const Program& prog);

// ---------------------------------------------------------------------------
// Elaboration to constraint systems
// ---------------------------------------------------------------------------

struct ParamInfo {
    std::string name;
    Label label;               // the parameter's label (constants; fresh atoms if poly)
    bool poly = false;
    std::string atom_c, atom_i;  // the fresh atoms when poly
    std::optional<Label> bound;  // call sites must satisfy arg <= bound (or exact)
    std::size_t line = 0;
};

struct CallSite {
    std::size_t line = 0;
    std::string callee;
    std::vector<std::string> arg_vars;   // synthesized per-argument label variables
    std::string result_var;
    bool self = false;                   // recursive call back into the enclosing function
};

struct DowngradeSite {
    std::size_t line = 0;
    DowngradeKind kind = DowngradeKind::Declassify;
    LabelExprPtr subject;                // the label of the downgraded expression
};

struct OutputSite {
    std::size_t line = 0;
    std::string host;
    LabelExprPtr value;                  // the label of the transmitted value
};

// One function's (or main's) elaboration: the constraint system plus the
// bookkeeping the checker needs.  The system's contexts are the program
// assumes extended with the function's parameter-bound entries.  Calls to
// *other* functions contribute their argument constraints here; the
// return-value constraint needs the callee's solved return label and is
// added by check_program once callees are solved (self-calls are complete
// here, wired through the function's own return variable).
struct FunctionSystem {
    std::string name;  // function name, or "main"
    ConstraintSystem sys;
    std::vector<std::string> source_vars;  // declared order, synthesized ones excluded
    std::vector<ParamInfo> params;
    std::vector<CallSite> calls;
    std::vector<DowngradeSite> downgrades;
    std::vector<OutputSite> outputs;
    std::string return_var;  // "" for main
};

// Source order with main last.  Requires a validated program.
std::vector<FunctionSystem> gen_constraints(const Program& prog);

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

struct Verdict {
    std::string fn;
    std::size_t line = 0;
    std::string kind;    // "declassify", "endorse", "output", "bound"
    std::string detail;
    bool ok = false;
    std::optional<Label> label;  // downgrade subject / transmitted value / argument label
    std::string host;            // outputs only
};

struct VarReport {
    std::string fn;
    std::string name;
    Label label;
};

struct Specialization {
    std::string function;
    std::vector<Label> args;
};

struct Failure {
    std::string fn;
    std::size_t line = 0;
    std::string message;
};

struct Report {
    bool accepted = false;
    std::vector<VarReport> variables;        // params then locals, per function, main last
    std::vector<Verdict> downgrades;
    std::vector<Verdict> outputs;
    std::vector<Verdict> bounds;
    std::vector<Specialization> specializations;
    std::vector<Failure> failures;           // non-verdict constraint failures
    std::optional<std::size_t> blame_line;   // earliest failing source line
};

// Solves every function bottom-up (callees before callers, main last),
// substitutes solved return labels at call sites, evaluates downgrade,
// output, and call-bound verdicts at the solved labels, and assembles the
// specialization table by walking calls from main with memoized
// argument-label tuples.  Validates first; throws parse_error on malformed
// programs.  When `trace` is non-null, solver iterations are appended.
Report check_program(const Program& prog, std::vector<std::string>* trace = nullptr);

// Deterministic plain-text rendering.
std::string render_report(const Report& report);

}  // namespace ifc::surface

#endif  // IFC_SURFACE_HPP
