#include "doctest.h"

#include <fstream>
#include <sstream>
#include <string>

#include "ifc/surface.hpp"

using namespace ifc;
using namespace ifc::surface;

namespace {

std::string read_corpus(const std::string& name) {
    std::ifstream in(std::string(CORPUS_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Report check_text(const std::string& text) { return check_program(parse_program(text)); }

Label var_label(const Report& r, const std::string& fn, const std::string& name) {
    for (const VarReport& v : r.variables) {
        if (v.fn == fn && v.name == name) return v.label;
    }
    FAIL("no variable " << fn << "." << name);
    return Label(NormalForm::bottom(), NormalForm::bottom());
}

}  // namespace

TEST_SUITE("surface language") {

TEST_CASE("programs parse into hosts, assumes, functions, and statements") {
    Program p = parse_program(
        "host Alice;\n"
        "host Bob;\n"
        "assume Alice = Bob for integrity;\n"
        "fun f(x, y : <Alice, Alice>, z <= <Alice, bot>) {\n"
        "    val s = x + y;\n"
        "    return s;\n"
        "}\n"
        "val a = Alice.input();\n"
        "Alice.output(a);\n");
    CHECK(p.hosts.size() == 2);
    REQUIRE(p.assumes.size() == 1);
    CHECK(p.assumes[0].rel == AssumeDecl::Rel::Equals);
    CHECK(p.assumes[0].comp == AssumeDecl::Comp::Integ);
    REQUIRE(p.functions.size() == 1);
    CHECK(p.functions[0].params.size() == 3);
    CHECK_FALSE(p.functions[0].params[0].exact.has_value());
    CHECK(p.functions[0].params[1].exact.has_value());
    CHECK(p.functions[0].params[2].bound.has_value());
    CHECK(p.main.size() == 2);
    CHECK(p.main[0].line == 8);
    CHECK(p.main[1].kind == Stmt::Kind::Output);
}

TEST_CASE("validation rejects malformed programs with located errors") {
    CHECK_THROWS_WITH_AS(check_text("host A;\nB.output(x);\n"),
                         doctest::Contains("unknown host"), parse_error);
    CHECK_THROWS_WITH_AS(check_text("host A;\nhost A;\n"), doctest::Contains("duplicate"),
                         parse_error);
    CHECK_THROWS_WITH_AS(check_text("host A;\nval x = y + 1;\n"),
                         doctest::Contains("undefined"), parse_error);
    CHECK_THROWS_WITH_AS(
        check_text("host A;\nfun f(x) {\n val y = A.input();\n return y;\n}\nval a = f(a);\n"),
        doctest::Contains("input"), parse_error);
    CHECK_THROWS_WITH_AS(
        check_text("host A;\nassume A = B for integrity;\nval a = A.input();\nA.output(a);\n"),
        doctest::Contains("unknown"), parse_error);
    CHECK_THROWS_WITH_AS(
        check_text("host A;\n"
                   "fun f(x) { val y = g(x); return y; }\n"
                   "fun g(x) { val y = f(x); return y; }\n"
                   "val a = A.input();\nA.output(a);\n"),
        doctest::Contains("mutual recursion"), parse_error);
    CHECK_THROWS_WITH_AS(
        check_text("host A;\nfun f(x) { return x; }\nval a = A.input();\nval b = f(a, a);\n"),
        doctest::Contains("takes 1 argument"), parse_error);
    CHECK_THROWS_WITH_AS(check_text("host A;\nval w = declassify A to <A, A>;\n"),
                         doctest::Contains("undefined"), parse_error);
}

TEST_CASE("the millionaires protocol is accepted with the joint label") {
    Report r = check_text(read_corpus("millionaires.ifc"));
    CHECK(r.accepted);
    CHECK_FALSE(r.blame_line.has_value());
    CHECK(to_string(var_label(r, "main", "w")) == "<Alice & Bob, Alice | Bob>");
    CHECK(to_string(var_label(r, "main", "r1")) == "<Alice | Bob, Alice | Bob>");
    REQUIRE(r.downgrades.size() == 2);
    CHECK(r.downgrades[0].ok);
    CHECK(r.downgrades[1].ok);
    REQUIRE(r.outputs.size() == 2);
    CHECK(r.outputs[0].ok);
}

TEST_CASE("dropping the mutual endorsement rejects at the declassification") {
    Report r = check_text(read_corpus("millionaires_no_assume.ifc"));
    CHECK_FALSE(r.accepted);
    REQUIRE(r.blame_line.has_value());
    CHECK(*r.blame_line == 11);  // the first declassify, not a later output
    REQUIRE(r.downgrades.size() == 2);
    CHECK_FALSE(r.downgrades[0].ok);
    CHECK(r.downgrades[0].detail.find("compromised") != std::string::npos);
}

TEST_CASE("an onlooker host with extra delegations changes nothing") {
    Report r = check_text(read_corpus("millionaires_chuck.ifc"));
    CHECK(r.accepted);
    CHECK(to_string(var_label(r, "main", "w")) == "<Alice & Bob, Alice | Bob>");
}

TEST_CASE("polymorphic functions are specialized once per argument tuple") {
    Report r = check_text(read_corpus("average.ifc"));
    CHECK(r.accepted);
    REQUIRE(r.specializations.size() == 1);
    CHECK(r.specializations[0].function == "average");
    CHECK(to_string(var_label(r, "main", "u1")) == "<Alice & Bob, Alice | Bob>");
    CHECK(to_string(var_label(r, "main", "u2")) == "<Alice & Bob, Alice | Bob>");
    // The callee's inferred return is the join of its parameter atoms.
    CHECK(to_string(var_label(r, "average", "m")) ==
          "<average_x_C & average_y_C, average_x_I | average_y_I>");
}

TEST_CASE("distinct argument labels create distinct specializations") {
    Report r = check_text(
        "host Alice;\nhost Bob;\n"
        "fun id(x) {\n    val y = x + 0;\n    return y;\n}\n"
        "val a = Alice.input();\n"
        "val b = Bob.input();\n"
        "val u = id(a);\n"
        "val v = id(b);\n"
        "Alice.output(a);\n");
    CHECK(r.accepted);
    CHECK(r.specializations.size() == 2);
    CHECK(to_string(var_label(r, "main", "u")) == "<Alice, Alice>");
    CHECK(to_string(var_label(r, "main", "v")) == "<Bob, Bob>");
}

TEST_CASE("self-recursion terminates with a single specialization") {
    Report r = check_text(read_corpus("recursive.ifc"));
    CHECK(r.accepted);
    REQUIRE(r.specializations.size() == 1);
    CHECK(r.specializations[0].function == "countdown");
}

TEST_CASE("parameter bounds are enforced at call sites") {
    std::string accepted =
        "host Alice;\nhost Bob;\n"
        "fun f(x <= <Alice, bot>) {\n    val y = x + 1;\n    return y;\n}\n"
        "val a = Alice.input();\n"
        "val c = f(a);\n"
        "Alice.output(a);\n";
    CHECK(check_text(accepted).accepted);

    std::string rejected =
        "host Alice;\nhost Bob;\n"
        "fun f(x <= <Alice, bot>) {\n    val y = x + 1;\n    return y;\n}\n"
        "val a = Alice.input();\n"
        "val b = Bob.input();\n"
        "val c = f(b);\n"
        "Alice.output(a);\n";
    Report r = check_text(rejected);
    CHECK_FALSE(r.accepted);
    REQUIRE(r.blame_line.has_value());
    CHECK(*r.blame_line == 9);  // the offending call
    bool bound_failed = false;
    for (const Verdict& v : r.bounds) {
        if (!v.ok && v.line == 9) bound_failed = true;
    }
    CHECK(bound_failed);
}

TEST_CASE("label annotations pin variables and reject bad flows") {
    Report ok = check_text(
        "host Alice;\nhost Bob;\n"
        "val a = Alice.input();\n"
        "val y : <Alice & Bob, Alice | Bob> = a;\n"
        "Alice.output(a);\n");
    CHECK(ok.accepted);
    CHECK(to_string(var_label(ok, "main", "y")) == "<Alice & Bob, Alice | Bob>");

    // Only the confidentiality side clashes here, so the annotation line
    // itself carries the blame.
    Report bad = check_text(
        "host Alice;\nhost Bob;\n"
        "val a = Alice.input();\n"
        "val y : <Bob, bot> = a;\n"
        "Alice.output(a);\n");
    CHECK_FALSE(bad.accepted);
    REQUIRE(bad.blame_line.has_value());
    CHECK(*bad.blame_line == 4);
}

TEST_CASE("endorsement preserves confidentiality and needs an uncompromised subject") {
    Report ok = check_text(
        "host Alice;\n"
        "val a = Alice.input();\n"
        "val r = endorse a to <Alice, top>;\n"
        "Alice.output(r);\n");
    CHECK(ok.accepted);
    CHECK(to_string(var_label(ok, "main", "r")) == "<Alice, top>");

    Report bad = check_text(
        "host Alice;\nhost Bob;\n"
        "val a = Alice.input();\n"
        "val w = a + 1;\n"
        "val r = endorse w to <Bob, top>;\n"
        "Alice.output(a);\n");
    CHECK_FALSE(bad.accepted);
    REQUIRE(bad.blame_line.has_value());
    CHECK(*bad.blame_line == 5);
}

TEST_CASE("outputs require the flow to the receiving host") {
    Report r = check_text(
        "host Alice;\nhost Bob;\n"
        "val a = Alice.input();\n"
        "Bob.output(a);\n");
    CHECK_FALSE(r.accepted);
    REQUIRE(r.outputs.size() == 1);
    CHECK_FALSE(r.outputs[0].ok);
    // The demand propagates into the input's required trust, so the blame
    // reaches back to the earliest unmeetable obligation: the input itself.
    REQUIRE(r.blame_line.has_value());
    CHECK(*r.blame_line == 3);
    REQUIRE(r.failures.size() == 1);
    CHECK(r.failures[0].line == 3);
}

TEST_CASE("an output downgrade without a target defaults to the receiver") {
    // declassify-on-output releases the comparison to the host while the
    // explicit-form target stays what the annotation would have been.
    Report r = check_text(
        "host Alice;\nhost Bob;\n"
        "assume Alice = Bob for integrity;\n"
        "val a = Alice.input();\n"
        "val b = Bob.input();\n"
        "val w = a < b;\n"
        "Alice.output(declassify w);\n");
    CHECK(r.accepted);
    REQUIRE(r.downgrades.size() == 1);
    CHECK(r.downgrades[0].ok);
    REQUIRE(r.outputs.size() == 1);
    CHECK(r.outputs[0].ok);
}

TEST_CASE("adding delegations never flips acceptance") {
    std::string base = read_corpus("millionaires.ifc");
    Report before = check_text(base);
    REQUIRE(before.accepted);
    // Strengthen the context with redundant and fresh links.
    std::string more = base;
    more.insert(more.find("\nval a"), "\nassume Bob = Alice for integrity;");
    Report after = check_text(more);
    CHECK(after.accepted);
}

TEST_CASE("reports render one line per obligation") {
    std::string text = render_report(check_text(read_corpus("millionaires.ifc")));
    CHECK(text.rfind("ACCEPT\n", 0) == 0);
    CHECK(text.find("downgrades:") != std::string::npos);
    CHECK(text.find("outputs:") != std::string::npos);

    std::string bad = render_report(check_text(read_corpus("millionaires_no_assume.ifc")));
    CHECK(bad.rfind("REJECT at line 11\n", 0) == 0);
}

}  // TEST_SUITE
