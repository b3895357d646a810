#ifndef IFC_LABEL_HPP
#define IFC_LABEL_HPP

#include <string>
#include <vector>

#include "ifc/delegation.hpp"
#include "ifc/principal.hpp"

// Labels are pairs of a confidentiality principal and an integrity
// principal.  Information flows from l1 to l2 when the receiver's
// confidentiality acts for the sender's and the sender's integrity acts for
// the receiver's; confidentiality and integrity each carry their own
// delegation context.

namespace ifc {

enum class Proj { C, I };

inline const char* to_string(Proj p) { return p == Proj::C ? "C" : "I"; }

struct Label {
    NormalForm conf;
    NormalForm integ;

    Label() : conf(NormalForm::bottom()), integ(NormalForm::bottom()) {}
    Label(NormalForm c, NormalForm i) : conf(std::move(c)), integ(std::move(i)) {}

    const NormalForm& component(Proj p) const { return p == Proj::C ? conf : integ; }

    bool operator==(const Label& other) const {
        return conf == other.conf && integ == other.integ;
    }
    bool operator!=(const Label& other) const { return !(*this == other); }
    bool operator<(const Label& other) const {
        if (!(conf == other.conf)) return conf < other.conf;
        return integ < other.integ;
    }

    std::set<std::string> atoms() const;
};

struct LabelContext {
    DelegationContext conf_ctx;
    DelegationContext integ_ctx;

    const DelegationContext& context(Proj p) const {
        return p == Proj::C ? conf_ctx : integ_ctx;
    }
};

// l1 flows to l2: acts_for(conf, l2.conf, l1.conf) and
// acts_for(integ, l1.integ, l2.integ).
bool flows_to(const LabelContext& ctx, const Label& l1, const Label& l2);

// Lattice-of-information operators: join is <c1 & c2, i1 | i2>, meet is
// <c1 | c2, i1 & i2>.
Label label_join(const Label& l1, const Label& l2);
Label label_meet(const Label& l1, const Label& l2);

// Componentwise conjunction and disjunction.
Label label_conj(const Label& l1, const Label& l2);
Label label_disj(const Label& l1, const Label& l2);

// The non-selected component drops to bot (weakest).
Label project(const Label& l, Proj p);

// The nonmalleability check: the minimal representative of the integrity
// component under the integrity context must act for the confidentiality
// component under the confidentiality context.  Equivalent to the existence
// of a witness r with ictx |= integ >= r and cctx |= r >= conf.
bool uncompromised(const LabelContext& ctx, const Label& label,
                   std::vector<std::string>* trace = nullptr);

// Label text syntax: `<C, I>` with principal grammar inside; shorthand `P`
// for <P, P>; `P join Q` for <P & Q, P | Q>.
Label parse_label(const std::string& text);

// Canonical printing: always `<C, I>`.
std::string to_string(const Label& label);

}  // namespace ifc

#endif  // IFC_LABEL_HPP
