#include <catch2/catch.hpp>

#include "ec3r/instance.hpp"
#include "ec3r/oracle.hpp"

using namespace ec3r;

TEST_CASE("clauses normalize to ascending order and reject repeats") {
    Clause c = Clause::of(8, 1, 2);
    CHECK(c.i == 1);
    CHECK(c.j == 2);
    CHECK(c.k == 8);
    CHECK_THROWS_AS(Clause::of(1, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(Clause::of(0, 1, 2), std::invalid_argument);
}

TEST_CASE("assignments round-trip through string and index form") {
    Assignment a = Assignment::from_string("00010111");
    CHECK(a.index() == 0b00010111u);
    CHECK(a.str() == "00010111");
    CHECK(a.bit(1) == 0);
    CHECK(a.bit(4) == 1);
    CHECK(a.bit(8) == 1);
    CHECK(Assignment(8, a.index()) == a);
    CHECK_THROWS_AS(Assignment::from_string("0012"), std::invalid_argument);
    CHECK_THROWS_AS(Assignment(3, 9), std::invalid_argument);
}

TEST_CASE("minimal instance parses") {
    Ec3Instance inst = parse_instance("p ec3 3 1\n1 2 3\n");
    CHECK(inst.n == 3);
    REQUIRE(inst.clause_count() == 1);
    CHECK(inst.clauses[0] == Clause::of(1, 2, 3));
}

TEST_CASE("comments and CRLF are tolerated") {
    Ec3Instance inst = parse_instance("c a comment\nc\np ec3 4 1\r\n2 3 4\n");
    CHECK(inst.n == 4);
    CHECK(inst.clauses[0] == Clause::of(2, 3, 4));
}

TEST_CASE("parse errors carry line numbers") {
    auto line_of = [](const std::string& text) {
        try {
            parse_instance(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    CHECK(line_of("p cnf 3 1\n1 2 3\n") == 1);          // wrong format tag
    CHECK(line_of("p ec3 3 1\n1 x 3\n") == 2);          // non-numeric token
    CHECK(line_of("p ec3 3 1\n1 2 4\n") == 2);          // index > n
    CHECK(line_of("p ec3 3 1\n1 1 2\n") == 2);          // repeated index within clause
    CHECK(line_of("p ec3 3 2\n1 2 3\np ec3 3 1\n") == 3); // duplicate header
    CHECK(line_of("1 2 3\n") == 1);                     // clause before header
    CHECK(line_of("p ec3 3 2\n1 2 3\n") == 2);          // count mismatch
    CHECK(line_of("p ec3 3 1\n1 2 3 4\n") == 2);        // trailing token
    CHECK_THROWS_AS(parse_instance(""), ParseError);
}

TEST_CASE("serialize then parse is the identity on normalized instances") {
    Ec3Instance worked{8, {Clause::of(1, 2, 8), Clause::of(2, 3, 6), Clause::of(2, 3, 7),
                          Clause::of(2, 4, 5), Clause::of(2, 5, 6), Clause::of(3, 5, 8)}};
    std::string text = serialize_instance(worked);
    Ec3Instance back = parse_instance(text);
    CHECK(back.n == worked.n);
    CHECK(back.clauses == worked.clauses);
    CHECK(serialize_instance(back) == text);
}

TEST_CASE("duplicate clauses are legal but flagged") {
    Ec3Instance inst = parse_instance("p ec3 4 2\n1 2 3\n1 2 3\n");
    CHECK(inst.has_duplicate_clauses());
    ProbabilitySequence seq = p_sequence(inst);
    REQUIRE(seq.values[1].has_value());
    CHECK(*seq.values[1] == Rational(1));
}

TEST_CASE("random instances are deterministic per seed") {
    Ec3Instance a = random_instance(8, 6, 17, true);
    Ec3Instance b = random_instance(8, 6, 17, true);
    CHECK(a.clauses == b.clauses);
    Ec3Instance c = random_instance(8, 6, 18, true);
    CHECK(a.clauses != c.clauses);
}

TEST_CASE("n=3 m=1 only has one possible clause") {
    Ec3Instance inst = random_instance(3, 1, 5, false);
    REQUIRE(inst.clause_count() == 1);
    CHECK(inst.clauses[0] == Clause::of(1, 2, 3));
}

TEST_CASE("planted instances are satisfiable") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        Ec3Instance inst = random_instance(8, 6, seed, true);
        CHECK(inst.clause_count() == 6);
        CHECK_FALSE(brute_force_solutions(inst).empty());
    }
}

TEST_CASE("random instance rejects infeasible requests") {
    CHECK_THROWS_AS(random_instance(3, 2, 0, false), std::invalid_argument); // binom(3,3) = 1
    CHECK_THROWS_AS(random_instance(2, 1, 0, false), std::invalid_argument);
    CHECK_THROWS_AS(random_instance(8, 0, 0, false), std::invalid_argument);
}
