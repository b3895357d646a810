#include "doctest.h"

#include <random>
#include <set>
#include <string>
#include <vector>

#include "ifc/attacker.hpp"
#include "ifc/delegation.hpp"
#include "ifc/label.hpp"
#include "ifc/principal.hpp"

using namespace ifc;

namespace {

NormalForm P(const std::string& s) { return parse_normal_form(s); }

DelegationContext random_context(std::mt19937& rng, const std::vector<std::string>& pool,
                                 int max_entries) {
    std::uniform_int_distribution<int> count(0, max_entries);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    DelegationContext ctx;
    int n = count(rng);
    for (int i = 0; i < n; ++i) ctx.add(P(pool[pick(rng)]), P(pool[pick(rng)]));
    return ctx;
}

}  // namespace

TEST_SUITE("semantic oracle") {

TEST_CASE("consistent attacker counts on small universes") {
    CHECK(consistent_attackers({}, {"A", "B"}).size() == 4);
    CHECK(consistent_attackers(parse_context("A >= B\n"), {"A", "B"}).size() == 3);
    CHECK(consistent_attackers(parse_context("A == B\n"), {"A", "B"}).size() == 2);
    // Every subset is closed under an entry it cannot trigger.
    CHECK(consistent_attackers(parse_context("top >= A\n"), {"A", "B"}).size() == 4);
    CHECK_THROWS_AS(
        consistent_attackers({}, {"a01", "a02", "a03", "a04", "a05", "a06", "a07", "a08", "a09",
                                  "a10", "a11", "a12", "a13", "a14", "a15", "a16", "a17"}),
        std::invalid_argument);
}

TEST_CASE("oracle acts-for agrees with hand-computed judgments") {
    DelegationContext chain = parse_context("A >= B\nB >= C\n");
    CHECK(oracle_acts_for(chain, P("A"), P("C")));
    CHECK_FALSE(oracle_acts_for(chain, P("C"), P("A")));
    CHECK(oracle_acts_for({}, P("A & B"), P("A | B")));
    CHECK_FALSE(oracle_acts_for({}, P("A | B"), P("A & B")));
}

TEST_CASE("counterexamples control p but not q") {
    DelegationContext empty;
    auto witness = acts_for_counterexample(empty, P("A | B"), P("A & B"));
    REQUIRE(witness.has_value());
    CHECK(witness->controls(P("A | B")));
    CHECK_FALSE(witness->controls(P("A & B")));
    CHECK_FALSE(acts_for_counterexample(empty, P("A & B"), P("A | B")).has_value());
}

TEST_CASE("algorithmic acts-for matches the oracle on random judgments") {
    std::mt19937 rng(987654);
    std::vector<std::string> pool{"A", "B", "C", "A & B", "A | B", "B & C",
                                  "B | C", "A | B | C", "A & B & C", "top", "bot"};
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 400; ++i) {
        DelegationContext ctx = random_context(rng, pool, 3);
        NormalForm p = P(pool[pick(rng)]);
        NormalForm q = P(pool[pick(rng)]);
        CAPTURE(to_string(ctx));
        CAPTURE(to_string(p));
        CAPTURE(to_string(q));
        CHECK(acts_for(ctx, p, q) == oracle_acts_for(ctx, p, q));
    }
}

TEST_CASE("uncompromised oracle accepts voice-of-authority labels") {
    LabelContext empty;
    CHECK(oracle_uncompromised(empty, Label(P("A"), P("A"))));
    CHECK(oracle_uncompromised(empty, Label(P("A | B"), P("A & B"))));
    CHECK_FALSE(oracle_uncompromised(empty, Label(P("A & B"), P("A | B"))));
    CHECK_FALSE(oracle_uncompromised(empty, Label(P("A"), P("B"))));

    LabelContext mutual{DelegationContext{}, parse_context("A == B\n")};
    CHECK(oracle_uncompromised(mutual, Label(P("A & B"), P("A | B"))));
}

TEST_CASE("uncompromised counterexamples are valid asymmetric pairs") {
    LabelContext empty;
    auto witness = uncompromised_counterexample(empty, Label(P("A"), P("B")));
    REQUIRE(witness.has_value());
    CHECK(witness->valid());
    CHECK_FALSE(witness->conf.controls(P("A")));
    CHECK(witness->integ.controls(P("B")));
}

TEST_CASE("algorithmic uncompromised matches the oracle on random labels") {
    std::mt19937 rng(246810);
    std::vector<std::string> pool{"A", "B", "C", "A & B", "A | B", "B | C",
                                  "A & C", "top", "bot"};
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 300; ++i) {
        LabelContext ctx{random_context(rng, pool, 2), random_context(rng, pool, 2)};
        Label label(P(pool[pick(rng)]), P(pool[pick(rng)]));
        CAPTURE(to_string(ctx.conf_ctx));
        CAPTURE(to_string(ctx.integ_ctx));
        CAPTURE(to_string(label));
        CHECK(uncompromised(ctx, label) == oracle_uncompromised(ctx, label));
    }
}

TEST_CASE("all_normal_forms enumerates the free lattice") {
    CHECK(all_normal_forms({"A"}).size() == 3);
    CHECK(all_normal_forms({"A", "B"}).size() == 6);
    CHECK(all_normal_forms({"A", "B", "C"}).size() == 20);
    CHECK(all_normal_forms({"A", "B", "C", "D"}).size() == 168);
    CHECK_THROWS_AS(all_normal_forms({"A", "B", "C", "D", "E", "F"}), std::invalid_argument);

    // No duplicates, and every element is already canonical.
    std::vector<NormalForm> nfs = all_normal_forms({"A", "B", "C"});
    std::set<std::string> seen;
    for (const NormalForm& nf : nfs) {
        CHECK(parse_normal_form(to_string(nf)) == nf);
        seen.insert(to_string(nf));
    }
    CHECK(seen.size() == nfs.size());
}

}  // TEST_SUITE
