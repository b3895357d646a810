#ifndef IFC_DELEGATION_HPP
#define IFC_DELEGATION_HPP

#include <set>
#include <string>
#include <vector>

#include "ifc/principal.hpp"

// Delegation contexts and the two algorithmic judgments over them:
// context-aware acts-for and the minimal representative of an equivalence
// class.  Both reduce, by peeling assumptions one at a time, to the
// syntactic order on normal forms.

namespace ifc {

// One assumption `delegator >= delegatee`: every consistent attacker that
// controls the delegator also controls the delegatee.
struct DelegationEntry {
    NormalForm delegator;
    NormalForm delegatee;

    bool operator==(const DelegationEntry& other) const {
        return delegator == other.delegator && delegatee == other.delegatee;
    }
};

class DelegationContext {
public:
    DelegationContext() = default;
    explicit DelegationContext(std::vector<DelegationEntry> entries)
        : entries_(std::move(entries)) {}

    void add(NormalForm delegator, NormalForm delegatee) {
        entries_.push_back({std::move(delegator), std::move(delegatee)});
    }

    const std::vector<DelegationEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    // Every atom mentioned by any entry.
    std::set<std::string> atoms() const;

    // A new context with `extra`'s entries appended.
    DelegationContext extended(const DelegationContext& extra) const;

private:
    std::vector<DelegationEntry> entries_;
};

// Text format, one entry per line:
//   P >= Q      acts-for assumption
//   P == Q      sugar for both directions
// `#` starts a comment; blank lines are skipped.
DelegationContext parse_context(const std::string& text);

std::string to_string(const DelegationContext& ctx);

// Decides ctx |= p >= q.  Recursion: if p >= q already holds syntactically
// the answer is yes (assumptions only grow the relation); otherwise peel the
// last entry (p' >= q') and require both
//     ctx' |= p & q' >= q   and   ctx' |= p >= q | p'.
// Subproblems repeat across the two branches, so results are memoized per
// query on (number of remaining entries, p, q).
// When `trace` is non-null, one line per rule application is appended.
bool acts_for(const DelegationContext& ctx, const NormalForm& p, const NormalForm& q,
              std::vector<std::string>* trace = nullptr);
bool acts_for(const DelegationContext& ctx, const PrincipalPtr& p, const PrincipalPtr& q,
              std::vector<std::string>* trace = nullptr);

// The unique representative r of p's equivalence class under ctx such that
// for every q:  acts_for(ctx, p, q)  iff  syntactic_acts_for(r, q).
//
// Factor: a disjunction minimizes each join-prime factor and rejoins.
// Pick:   a join-prime p that syntactically acts for some entry's delegator
//         absorbs that entry's delegatee (p := p & delegatee) and the entry
//         is dropped.  When several entries qualify, the last one is taken
//         (the result is order-independent).
// Base:   a join-prime p with no qualifying entry is already minimal.
// Top is returned unchanged.  Bottom qualifies for an entry exactly when the
// entry's delegator is equivalent to bot, in which case the entry is
// absorbed like any other; with no such entry, bot is returned.
NormalForm min_rep(const DelegationContext& ctx, const NormalForm& p,
                   std::vector<std::string>* trace = nullptr);
NormalForm min_rep(const DelegationContext& ctx, const PrincipalPtr& p,
                   std::vector<std::string>* trace = nullptr);

// acts_for in both directions.
bool equivalent(const DelegationContext& ctx, const NormalForm& p, const NormalForm& q);

}  // namespace ifc

#endif  // IFC_DELEGATION_HPP
