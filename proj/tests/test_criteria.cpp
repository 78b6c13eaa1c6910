#include "charp/criteria.hpp"

#include "doctest.h"

using namespace charp;

TEST_CASE("codimension formula examples") {
    CHECK(codim_tb({4, 2, 1, std::nullopt, false}) == 3);
    CHECK(codim_tb({4, 2, 1, 1, false}) == 4);
    CHECK(codim_tb({4, 2, 1, 1, true}) == 3);
    CHECK(codim_tb({3, 1, 1, 1, false}) == 4);
    CHECK(codim_tb({3, 1, 1, 0, false}) == 3);
    CHECK(codim_tb({2, 2, 2, std::nullopt, false}) == 4);
    CHECK_THROWS_AS(codim_tb({4, 2, 3, std::nullopt, false}), PreconditionError);
    CHECK_THROWS_AS(codim_tb({4, 2, 1, 4, false}), PreconditionError);
    CHECK_THROWS_AS(codim_tb({4, 2, 0, 1, false}), PreconditionError);
}

TEST_CASE("codimension formula properties") {
    for (std::uint32_t n = 1; n <= 12; ++n)
        for (std::uint32_t e = 1; e <= 12; ++e) {
            const std::uint32_t m = std::min(n, e);
            for (std::uint32_t i = 0; i <= m; ++i) {
                const auto first = codim_tb({n, e, i, std::nullopt, false});
                CHECK(first == static_cast<std::int64_t>(i) * ((n > e ? n - e : e - n) + i));
                CHECK(codim_tb({n, e, i, 0, false}) == first);
                CHECK(codim_tb({n, e, i, 0, true}) == first);
                for (std::uint32_t j = 0; j <= (e - m + i == 0 ? 0 : n - m + i); ++j) {
                    const auto odd = codim_tb({n, e, i, j, false}), even = codim_tb({n, e, i, j, true});
                    CHECK(even <= odd);
                    CHECK((even == odd) == (j * (e - m + i) == 0));
                    CHECK(odd >= first);
                }
            }
        }
}

TEST_CASE("exception tables") {
    const auto& t = exception_sets();
    CHECK(t.E_prime.size() == 12);
    CHECK(t.E_doubleprime.size() == 8);
    CHECK(t.for_prime(2).size() == 20);
    CHECK(t.contains(2, 1, 3));
    CHECK_FALSE(t.contains(3, 1, 3));
    for (auto p : {2, 3, 5, 7, 11}) CHECK(t.contains(p, 7, 11));
    CHECK(t.for_prime(3) == t.E_prime);
}

TEST_CASE("tables agree with the codimension condition") {
    const auto& t = exception_sets();
    CHECK(derived_exceptions(false, 60) == t.E_prime);
    CHECK(derived_exceptions(true, 60) == t.for_prime(2));
}

TEST_CASE("bundle criterion") {
    auto a = check_bundle(4, 1, 2);
    CHECK(a.verdict);
    auto b = check_bundle(3, 1, 2);
    CHECK_FALSE(b.verdict);
    CHECK_FALSE(b.not_exceptional);
    CHECK(b.e_le_n_minus_1);
    CHECK(b.e_le_half_n_plus_3);
    CHECK(b.reasons == std::vector<std::string>{"(1,3) ∈ E_2"});
    CHECK(check_bundle(3, 1, 3).verdict);
    auto c = check_bundle(5, 5, 3);
    CHECK_FALSE(c.verdict);
    CHECK_FALSE(c.e_le_n_minus_1);
    auto d = check_bundle(20, 12, 5, true, true);
    CHECK_FALSE(d.e_le_half_n_plus_3);
    CHECK(d.big);
    CHECK(d.jets_generated);
    CHECK_THROWS_AS(check_bundle(4, 1, 4), PreconditionError);
}

TEST_CASE("complete intersection criterion examples") {
    auto q = check_ci(4, {4}, 2);
    CHECK_FALSE(q.verdict);
    CHECK(q.h1_half);
    CHECK(q.h1_third);
    CHECK_FALSE(q.h1_table);
    CHECK(q.H2);
    CHECK(q.H3);
    CHECK(q.reason() == "(1,3) ∈ E_2");
    CHECK(q.general_type == false);

    auto a = check_ci(9, {8}, 2);
    CHECK(a.verdict);
    CHECK(a.reason() == "all hypotheses hold");
    auto b = check_ci(12, {5, 6}, 2);
    CHECK(b.verdict);
    CHECK(b.remainders == std::vector<std::uint32_t>{1, 0});
    auto c = check_ci(5, {6}, 2);
    CHECK(c.verdict);
    CHECK(c.general_type);

    // H3 is strict: 3 * 4 = 12 > 2 * 6 = 12 fails at N = 5, d = 4.
    auto s = check_ci(5, {4}, 2);
    CHECK(s.H1);
    CHECK_FALSE(s.H3);
    CHECK_FALSE(check_ci(9, {2}, 3).H2);

    auto w = check_ci_auto(4, {4});
    CHECK_FALSE(w.has_value());
    auto w2 = check_ci_auto(9, {9});
    REQUIRE(w2.has_value());
    CHECK(w2->p == 2);
    CHECK(check_ci_auto(7, {3})->p == 3);
}

TEST_CASE("corollary examples") {
    auto a = corollary_check(9, {2, 2, 2, 2});
    CHECK_FALSE(a.applicable);
    CHECK(a.holds);
    auto b = corollary_check(12, {5, 6});
    CHECK(b.applicable);
    CHECK(b.path == CorollaryPath::Theorem);
    CHECK(b.theorem->verdict);
    CHECK(b.holds);
    auto c = corollary_check(5, {6});
    CHECK(c.applicable);
    CHECK(c.path == CorollaryPath::GeneralType);
    CHECK(c.holds);
    CHECK_THROWS_AS(corollary_check(5, {1}), PreconditionError);
}

TEST_CASE("corollary sweep and table mutations") {
    auto five = corollary_sweep(5);
    CHECK(five.counterexamples.empty());
    auto twenty = corollary_sweep(20);
    CHECK(twenty.counterexamples.empty());
    CHECK(twenty.cases > 0);
    auto forty = corollary_sweep(40, exception_sets(), 3);
    CHECK(forty.counterexamples.empty());
    CHECK(forty.unneeded_entries.empty());
    CHECK(corollary_sweep(40).cases == forty.cases);

    for (const auto& pair : exception_sets().E_prime) {
        ExceptionSets mutated = exception_sets();
        mutated.E_prime.erase(pair);
        auto r = corollary_sweep(40, mutated);
        CHECK_MESSAGE(!r.counterexamples.empty(), "deleting (" << pair.first << "," << pair.second << ")");
    }
    ExceptionSets extra = exception_sets();
    extra.E_prime.insert({9, 30});
    CHECK(corollary_sweep(40, extra).unneeded_entries == std::vector<std::string>{"(9,30)"});
    CHECK_THROWS_AS(corollary_sweep(61), PreconditionError);
}

TEST_CASE("check_ci is monotone in p-divisible degrees") {
    for (std::uint64_t p : {2, 3, 5}) {
        for (std::uint32_t N = 1; N <= 20; ++N) {
            for (std::uint32_t c = 1; c <= 3; ++c) {
                // All p-divisible multidegrees with entries <= 4p.
                std::vector<std::uint32_t> d(c, static_cast<std::uint32_t>(p));
                while (true) {
                    const bool base = check_ci(N, d, p).verdict;
                    for (std::size_t k = 0; k < c; ++k) {
                        auto up = d;
                        up[k] += static_cast<std::uint32_t>(p);
                        if (base) CHECK(check_ci(N, up, p).verdict);
                    }
                    std::size_t k = 0;
                    while (k < c && d[k] == 4 * p) d[k++] = static_cast<std::uint32_t>(p);
                    if (k == c) break;
                    d[k] += static_cast<std::uint32_t>(p);
                }
            }
        }
    }
}
