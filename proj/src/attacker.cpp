#include "ifc/attacker.hpp"

#include <algorithm>

namespace ifc {

bool AsymmetricAttacker::valid() const {
    return std::includes(conf.controlled.begin(), conf.controlled.end(),
                         integ.controlled.begin(), integ.controlled.end());
}

namespace {

std::set<std::string> subset_from_mask(const std::vector<std::string>& atoms, std::size_t mask) {
    std::set<std::string> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (mask & (std::size_t{1} << i)) out.insert(atoms[i]);
    }
    return out;
}

void check_universe(const std::set<std::string>& universe) {
    if (universe.size() > kMaxUniverse) {
        throw std::invalid_argument("attacker enumeration: universe of " +
                                    std::to_string(universe.size()) + " atoms exceeds the bound of " +
                                    std::to_string(kMaxUniverse));
    }
}

std::set<std::string> judgment_universe(const DelegationContext& ctx, const NormalForm& p,
                                        const NormalForm& q) {
    std::set<std::string> universe = ctx.atoms();
    auto pa = p.atoms();
    universe.insert(pa.begin(), pa.end());
    auto qa = q.atoms();
    universe.insert(qa.begin(), qa.end());
    return universe;
}

}  // namespace

std::vector<Attacker> consistent_attackers(const DelegationContext& ctx,
                                           const std::set<std::string>& universe) {
    check_universe(universe);
    std::vector<std::string> atoms(universe.begin(), universe.end());
    std::vector<Attacker> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << atoms.size()); ++mask) {
        Attacker a{subset_from_mask(atoms, mask)};
        bool consistent = true;
        for (const DelegationEntry& e : ctx.entries()) {
            if (a.controls(e.delegator) && !a.controls(e.delegatee)) {
                consistent = false;
                break;
            }
        }
        if (consistent) out.push_back(std::move(a));
    }
    return out;
}

std::optional<Attacker> acts_for_counterexample(const DelegationContext& ctx,
                                                const NormalForm& p, const NormalForm& q) {
    for (const Attacker& a : consistent_attackers(ctx, judgment_universe(ctx, p, q))) {
        if (a.controls(p) && !a.controls(q)) return a;
    }
    return std::nullopt;
}

bool oracle_acts_for(const DelegationContext& ctx, const NormalForm& p, const NormalForm& q) {
    return !acts_for_counterexample(ctx, p, q).has_value();
}

std::optional<AsymmetricAttacker> uncompromised_counterexample(const LabelContext& ctx,
                                                               const Label& label) {
    std::set<std::string> universe = ctx.conf_ctx.atoms();
    auto ia = ctx.integ_ctx.atoms();
    universe.insert(ia.begin(), ia.end());
    auto la = label.atoms();
    universe.insert(la.begin(), la.end());

    std::vector<Attacker> conf_attackers = consistent_attackers(ctx.conf_ctx, universe);
    std::vector<Attacker> integ_attackers = consistent_attackers(ctx.integ_ctx, universe);
    for (const Attacker& sc : conf_attackers) {
        if (sc.controls(label.conf)) continue;  // label is public to sc
        for (const Attacker& si : integ_attackers) {
            AsymmetricAttacker pair{sc, si};
            if (!pair.valid()) continue;
            if (si.controls(label.integ)) {
                // Secret to the pair yet forgeable by it: compromised.
                return pair;
            }
        }
    }
    return std::nullopt;
}

bool oracle_uncompromised(const LabelContext& ctx, const Label& label) {
    return !uncompromised_counterexample(ctx, label).has_value();
}

std::vector<NormalForm> all_normal_forms(const std::set<std::string>& atoms) {
    if (atoms.size() > 5) {
        throw std::invalid_argument("normal-form enumeration limited to 5 atoms, got " +
                                    std::to_string(atoms.size()));
    }
    std::vector<std::string> names(atoms.begin(), atoms.end());
    const std::size_t n = names.size();
    const unsigned full = 1u << n;

    std::vector<NormalForm> out;
    out.push_back(NormalForm::bottom());
    out.push_back(NormalForm::top());

    auto monomial_of = [&](unsigned mask) {
        std::vector<std::string> picked;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) picked.push_back(names[i]);
        }
        return Monomial(std::move(picked));
    };

    // Depth-first enumeration of antichains of nonempty atom subsets: each
    // chosen mask must be incomparable (under inclusion) with the others.
    std::vector<unsigned> chosen;
    auto emit = [&]() {
        std::vector<Monomial> ms;
        ms.reserve(chosen.size());
        for (unsigned m : chosen) ms.push_back(monomial_of(m));
        out.push_back(NormalForm::disjunction(std::move(ms)));
    };
    auto extend = [&](auto&& self, unsigned next) -> void {
        for (unsigned mask = next; mask < full; ++mask) {
            bool comparable = false;
            for (unsigned prev : chosen) {
                if ((prev & mask) == prev || (prev & mask) == mask) {
                    comparable = true;
                    break;
                }
            }
            if (comparable) continue;
            chosen.push_back(mask);
            emit();
            self(self, mask + 1);
            chosen.pop_back();
        }
    };
    extend(extend, 1);
    return out;
}

}  // namespace ifc
