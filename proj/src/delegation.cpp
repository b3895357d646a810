#include "ifc/delegation.hpp"

#include <map>
#include <sstream>
#include <tuple>

namespace ifc {

std::set<std::string> DelegationContext::atoms() const {
    std::set<std::string> out;
    for (const DelegationEntry& e : entries_) {
        auto a = e.delegator.atoms();
        out.insert(a.begin(), a.end());
        auto b = e.delegatee.atoms();
        out.insert(b.begin(), b.end());
    }
    return out;
}

DelegationContext DelegationContext::extended(const DelegationContext& extra) const {
    std::vector<DelegationEntry> all = entries_;
    all.insert(all.end(), extra.entries().begin(), extra.entries().end());
    return DelegationContext(std::move(all));
}

DelegationContext parse_context(const std::string& text) {
    DelegationContext ctx;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // Trim.
        auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);

        bool both = false;
        auto op = line.find(">=");
        if (op == std::string::npos) {
            op = line.find("==");
            both = true;
        }
        if (op == std::string::npos) {
            throw parse_error("context line " + std::to_string(line_no) +
                                  ": expected 'P >= Q' or 'P == Q'",
                              0, line_no, 1);
        }
        NormalForm left = parse_normal_form(line.substr(0, op));
        NormalForm right = parse_normal_form(line.substr(op + 2));
        ctx.add(left, right);
        if (both) ctx.add(right, left);
    }
    return ctx;
}

std::string to_string(const DelegationContext& ctx) {
    std::string out;
    for (const DelegationEntry& e : ctx.entries()) {
        out += to_string(e.delegator) + " >= " + to_string(e.delegatee) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Acts-for
// ---------------------------------------------------------------------------

namespace {

struct ActsForQuery {
    const std::vector<DelegationEntry>& entries;
    std::map<std::tuple<std::size_t, NormalForm, NormalForm>, bool> memo;
    std::vector<std::string>* trace;

    bool run(std::size_t prefix, const NormalForm& p, const NormalForm& q) {
        if (syntactic_acts_for(p, q)) {
            if (trace) {
                trace->push_back("axiom: " + to_string(p) + " >= " + to_string(q) +
                                 " holds syntactically");
            }
            return true;
        }
        if (prefix == 0) {
            if (trace) {
                trace->push_back("axiom: " + to_string(p) + " >= " + to_string(q) +
                                 " fails with no assumptions left");
            }
            return false;
        }
        auto key = std::make_tuple(prefix, p, q);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;

        const DelegationEntry& e = entries[prefix - 1];
        if (trace) {
            trace->push_back("delegation: peel " + to_string(e.delegator) + " >= " +
                             to_string(e.delegatee) + " for " + to_string(p) + " >= " +
                             to_string(q));
        }
        bool result = run(prefix - 1, conj(p, e.delegatee), q) &&
                      run(prefix - 1, p, disj(q, e.delegator));
        memo.emplace(key, result);
        return result;
    }
};

}  // namespace

bool acts_for(const DelegationContext& ctx, const NormalForm& p, const NormalForm& q,
              std::vector<std::string>* trace) {
    ActsForQuery query{ctx.entries(), {}, trace};
    return query.run(ctx.entries().size(), p, q);
}

bool acts_for(const DelegationContext& ctx, const PrincipalPtr& p, const PrincipalPtr& q,
              std::vector<std::string>* trace) {
    return acts_for(ctx, normalize(p), normalize(q), trace);
}

// ---------------------------------------------------------------------------
// Minimal representative
// ---------------------------------------------------------------------------

namespace {

// `remaining` marks the entries still available to be picked.
NormalForm min_prime(const std::vector<DelegationEntry>& entries, std::vector<bool>& remaining,
                     NormalForm p, std::vector<std::string>* trace);

NormalForm min_impl(const std::vector<DelegationEntry>& entries, std::vector<bool>& remaining,
                    const NormalForm& p, std::vector<std::string>* trace) {
    if (p.is_top()) {
        if (trace) trace->push_back("min: top is its own representative");
        return p;
    }
    if (p.is_bottom()) {
        // Only an entry whose delegator is equivalent to bot applies to bot;
        // such an entry forces its delegatee down to bot as well, so it is
        // absorbed exactly like a pick on a join-prime.
        return min_prime(entries, remaining, p, trace);
    }
    const std::vector<Monomial> factors = join_prime_factors(p);
    if (factors.size() > 1) {
        if (trace) trace->push_back("min: factor " + to_string(p));
        NormalForm result = NormalForm::top();  // identity of disjunction
        for (const Monomial& m : factors) {
            std::vector<bool> branch = remaining;  // each factor sees all entries
            result = disj(result, min_prime(entries, branch, NormalForm::monomial(m), trace));
        }
        return result;
    }
    return min_prime(entries, remaining, p, trace);
}

NormalForm min_prime(const std::vector<DelegationEntry>& entries, std::vector<bool>& remaining,
                     NormalForm p, std::vector<std::string>* trace) {
    // Pick the last remaining entry whose delegator p syntactically acts for.
    for (std::size_t i = entries.size(); i-- > 0;) {
        if (!remaining[i]) continue;
        if (syntactic_acts_for(p, entries[i].delegator)) {
            remaining[i] = false;
            if (trace) {
                trace->push_back("min: pick " + to_string(entries[i].delegator) + " >= " +
                                 to_string(entries[i].delegatee) + " for " + to_string(p));
            }
            NormalForm next = conj(p, entries[i].delegatee);
            return min_impl(entries, remaining, next, trace);
        }
    }
    if (trace) trace->push_back("min: base " + to_string(p));
    return p;
}

}  // namespace

NormalForm min_rep(const DelegationContext& ctx, const NormalForm& p,
                   std::vector<std::string>* trace) {
    std::vector<bool> remaining(ctx.entries().size(), true);
    return min_impl(ctx.entries(), remaining, p, trace);
}

NormalForm min_rep(const DelegationContext& ctx, const PrincipalPtr& p,
                   std::vector<std::string>* trace) {
    return min_rep(ctx, normalize(p), trace);
}

bool equivalent(const DelegationContext& ctx, const NormalForm& p, const NormalForm& q) {
    return acts_for(ctx, p, q) && acts_for(ctx, q, p);
}

}  // namespace ifc
