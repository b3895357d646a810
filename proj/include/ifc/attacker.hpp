#ifndef IFC_ATTACKER_HPP
#define IFC_ATTACKER_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ifc/delegation.hpp"
#include "ifc/label.hpp"
#include "ifc/principal.hpp"

// Ground-truth brute-force semantics.  An attacker is a set of controlled
// atoms; the principals it controls form a prime ideal in the authority
// order (everyone controls bot, no one controls top, a conjunction needs
// both sides, a disjunction either side).  These enumerations are the
// reference the algorithmic judgments are tested against; they are
// exponential in the universe and refuse universes above `kMaxUniverse`.

namespace ifc {

inline constexpr std::size_t kMaxUniverse = 16;

struct Attacker {
    std::set<std::string> controlled;

    bool controls(const NormalForm& p) const { return evaluates(p, controlled); }
};

// A confidentiality/integrity attacker pair; valid when every integrity-
// controlled atom is also confidentiality-controlled (an attacker that can
// corrupt a principal can also read through it).
struct AsymmetricAttacker {
    Attacker conf;
    Attacker integ;

    bool valid() const;
};

// All subsets S of `universe` such that every entry (p >= q) of ctx is
// honored: controlling p implies controlling q.
// Throws std::invalid_argument when the universe exceeds kMaxUniverse.
std::vector<Attacker> consistent_attackers(const DelegationContext& ctx,
                                           const std::set<std::string>& universe);

// ctx |= p >= q, semantically: every consistent attacker controlling p
// controls q.  The universe is the atoms of ctx, p, and q.
bool oracle_acts_for(const DelegationContext& ctx, const NormalForm& p, const NormalForm& q);

// A witness for a failing oracle_acts_for: a consistent attacker that
// controls p but not q.  Empty when the judgment holds.
std::optional<Attacker> acts_for_counterexample(const DelegationContext& ctx,
                                                const NormalForm& p, const NormalForm& q);

// Semantic uncompromisedness: for every valid attacker pair (S_c consistent
// with the confidentiality context, S_i consistent with the integrity
// context, S_i a subset of S_c), the label is public (S_c controls conf) or
// trusted (S_i does not control integ).
bool oracle_uncompromised(const LabelContext& ctx, const Label& label);

// A witness for a failing oracle_uncompromised: a valid attacker pair for
// which the label is secret and untrusted.  Empty when uncompromised.
std::optional<AsymmetricAttacker> uncompromised_counterexample(const LabelContext& ctx,
                                                               const Label& label);

// Every normal form over the given atoms: bot, top, and one per antichain
// of monomials (e.g. 20 elements for three atoms).  Deterministic order.
// Throws std::invalid_argument when the universe exceeds 5 atoms (the count
// grows as the Dedekind numbers).
std::vector<NormalForm> all_normal_forms(const std::set<std::string>& atoms);

}  // namespace ifc

#endif  // IFC_ATTACKER_HPP
