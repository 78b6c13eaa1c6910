#include "charp/powerseries.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace charp;
using testutil::random_automorphism;
using testutil::random_series;

namespace {
Context xy(std::uint64_t p, std::uint32_t D, std::uint64_t k = 1) {
    return SeriesContext::make(FieldSpec::make(p, k), Variables({"x", "y"}), D);
}
TruncatedSeries S(const Context& c, std::string_view text) { return TruncatedSeries::parse(text, c); }

// Independent oracle: multiply exactly with the map-based Polynomial and truncate afterwards.
TruncatedSeries oracle_mul(const TruncatedSeries& a, const TruncatedSeries& b) {
    return TruncatedSeries::from_polynomial(a.ctx(), a.to_polynomial() * b.to_polynomial());
}
}  // namespace

TEST_CASE("parsing and printing") {
    auto f5 = FieldSpec::make(5, 1);
    auto a = ts_parse("x1^2 + 3*x2", 2, 4, f5);
    CHECK(a.size() == 2);
    CHECK(a.str() == "3*x2 + x1^2");
    CHECK(ts_parse("5*x1", 2, 4, f5).is_zero());
    CHECK(ts_parse("x1^5", 2, 4, f5).is_zero());
    CHECK(ts_parse("x2^4 + 2*x1*x2^2 + x1^2", 2, 6, f5).str() == "x1^2 + 2*x1*x2^2 + x2^4");
    CHECK(ts_parse("-x1", 1, 3, f5).str() == "4*x1");
    CHECK(ts_parse("0", 1, 3, f5).str() == "0");
    CHECK_THROWS_AS(ts_parse("x3", 2, 4, f5), PreconditionError);
    CHECK_THROWS_AS(ts_parse("x1 +", 2, 4, f5), PreconditionError);
    CHECK_THROWS_AS(ts_parse("x1 $ x2", 2, 4, f5), PreconditionError);

    auto f4 = FieldSpec::make(2, 2);
    auto b = ts_parse("(1+w)*x1 + w*x2^2 + w^2", 2, 4, f4);
    CHECK(b.str() == "1+w + (1+w)*x1 + w*x2^2");
    CHECK(ts_parse(b.str(), 2, 4, f4) == b);

    auto ps = SeriesContext::make(f5, 2, 4, 1);
    CHECK(S(ps, "s1*x1 + x2^2").str() == "s1*x1 + x2^2");
}

TEST_CASE("parse and print round trip on random series") {
    std::mt19937_64 rng(7);
    for (auto [p, k] : std::vector<std::pair<int, int>>{{2, 1}, {5, 1}, {2, 3}, {3, 2}}) {
        auto ctx = SeriesContext::make(FieldSpec::make(p, k), 3, 5, 1);
        for (int trial = 0; trial < 20; ++trial) {
            auto f = random_series(ctx, rng, 0, 5);
            CHECK(TruncatedSeries::parse(f.str(), ctx) == f);
        }
    }
}

TEST_CASE("multiplication examples") {
    auto c3 = xy(7, 3);
    CHECK((S(c3, "1+x") * S(c3, "1-x")) == S(c3, "1 - x^2"));
    auto c4 = xy(7, 4);
    CHECK((S(c4, "x^2") * S(c4, "x^3")).is_zero());
    auto c2 = xy(7, 2);
    CHECK((S(c2, "1+x+x^2") * S(c2, "1-x")) == S(c2, "1"));
    CHECK((S(c2, "x") * S(xy(7, 2), "y")) == S(c2, "x*y"));
    CHECK_THROWS_AS(S(c2, "x") * S(c3, "x"), PreconditionError);
    CHECK_THROWS_AS(S(c2, "x") + S(xy(5, 2), "x"), PreconditionError);
}

TEST_CASE("multiplication agrees with the exact polynomial oracle") {
    std::mt19937_64 rng(11);
    for (auto [p, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {7, 1}, {2, 2}, {3, 2}}) {
        for (std::size_t n = 1; n <= 4; ++n) {
            auto ctx = SeriesContext::make(FieldSpec::make(p, k), n, 6);
            for (int trial = 0; trial < 5; ++trial) {
                auto a = random_series(ctx, rng, 0, 6, 0.4), b = random_series(ctx, rng, 0, 6, 0.4);
                CHECK(a * b == oracle_mul(a, b));
                CHECK(a * b == b * a);
            }
        }
    }
}

TEST_CASE("partial derivatives") {
    auto c = xy(5, 5);
    CHECK(S(c, "x^2*y").partial(0) == S(c, "2*x*y"));
    auto c2 = xy(2, 4);
    CHECK(S(c2, "x^2").partial(0).is_zero());
    auto c7 = xy(7, 4);
    CHECK(S(c7, "x^3 + y^3").partial(0) == S(c7, "3*x^2"));
    CHECK(S(c7, "x^3*y").hasse(0, 2) == S(c7, "3*x*y"));
    CHECK(S(c2, "x^3").hasse(0, 2) == S(c2, "x"));
}

TEST_CASE("automorphism examples") {
    auto c = xy(7, 4);
    LocalAutomorphism phi(c, {S(c, "x + y^2"), S(c, "y")});
    CHECK(aut_apply(phi, S(c, "x^2")) == S(c, "x^2 + 2*x*y^2 + y^4"));
    CHECK(aut_apply(LocalAutomorphism::identity(c), S(c, "x^3 + x*y + 5")) == S(c, "x^3 + x*y + 5"));

    auto c5 = xy(5, 4);
    LocalAutomorphism shift(c5, {S(c5, "x - 3*y^2"), S(c5, "y")});
    CHECK(aut_apply(shift, S(c5, "x^2 + x*y^2")) == S(c5, "x^2 + y^4"));

    auto c1 = SeriesContext::make(FieldSpec::make(5, 1), Variables({"x"}), 3);
    LocalAutomorphism g(c1, {S(c1, "x + x^2")});
    auto inv = aut_invert(g);
    CHECK(inv.image(0) == S(c1, "x - x^2 + 2*x^3"));
    CHECK(aut_invert(inv) == g);

    CHECK_THROWS_AS(LocalAutomorphism(c, {S(c, "x + 1"), S(c, "y")}), PreconditionError);
    CHECK_THROWS_AS(LocalAutomorphism(c, {S(c, "x + y"), S(c, "2*x + 2*y")}), PreconditionError);
    auto cp = SeriesContext::make(FieldSpec::make(5, 1), 1, 3, 1);
    CHECK_THROWS_AS(LocalAutomorphism(cp, {S(cp, "s1 + x1"), S(cp, "x1")}), PreconditionError);
}

TEST_CASE("linear automorphisms invert to the inverse matrix") {
    auto F = FieldSpec::make(7, 1);
    auto ctx = SeriesContext::make(F, 3, 4);
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix m(3, 3);
        do {
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) m(i, j) = testutil::random_code(*F, rng);
        } while (rank(*F, m) < 3);
        auto inv = aut_invert(LocalAutomorphism::linear(ctx, m));
        CHECK(inv == LocalAutomorphism::linear(ctx, *inverse(*F, m)));
    }
}

TEST_CASE("truncation consistency") {
    std::mt19937_64 rng(3);
    for (auto [p, k] : std::vector<std::pair<int, int>>{{2, 1}, {5, 1}, {2, 2}, {3, 2}}) {
        for (std::size_t n = 1; n <= 4; ++n) {
            for (std::uint32_t D = 2; D <= (n <= 2 ? 8u : 5u); D += 3) {
                auto lo = SeriesContext::make(FieldSpec::make(p, k), n, D);
                auto hi = lo->with_order(D + 2);
                auto a = random_series(hi, rng, 0, D + 2, 0.3), b = random_series(hi, rng, 0, D + 2, 0.3);
                auto phi = random_automorphism(hi, rng, 3);
                LocalAutomorphism phi_lo(lo, [&] {
                    std::vector<TruncatedSeries> v;
                    for (const auto& im : phi.images()) v.push_back(im.retruncated(lo));
                    return v;
                }());
                auto al = a.retruncated(lo), bl = b.retruncated(lo);
                CHECK((a * b).retruncated(lo) == al * bl);
                CHECK((a + b).retruncated(lo) == al + bl);
                CHECK(aut_apply(phi, a).retruncated(lo) == aut_apply(phi_lo, al));
                CHECK(aut_invert(phi).images()[0].retruncated(lo) == aut_invert(phi_lo).images()[0]);
            }
        }
    }
}

TEST_CASE("automorphism composition, inversion and ring homomorphism") {
    std::mt19937_64 rng(17);
    for (auto [p, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {5, 1}, {2, 2}}) {
        for (std::size_t n = 1; n <= 3; ++n) {
            for (std::size_t params = 0; params <= 1; ++params) {
                auto ctx = SeriesContext::make(FieldSpec::make(p, k), n, 5, params);
                auto phi = random_automorphism(ctx, rng), psi = random_automorphism(ctx, rng);
                auto f = random_series(ctx, rng, 0, 5), g = random_series(ctx, rng, 0, 5);
                CHECK(aut_apply(aut_compose(psi, phi), f) == aut_apply(psi, aut_apply(phi, f)));
                CHECK(aut_apply(phi, f * g) == aut_apply(phi, f) * aut_apply(phi, g));
                auto inv = aut_invert(phi);
                CHECK(aut_apply(inv, aut_apply(phi, f)) == f);
                CHECK(aut_apply(phi, aut_apply(inv, f)) == f);
                CHECK(aut_invert(inv) == phi);
            }
        }
    }
}

TEST_CASE("Leibniz rule and chain rule at order D-1") {
    std::mt19937_64 rng(23);
    for (auto [p, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {7, 1}, {2, 2}, {3, 2}}) {
        for (std::size_t n = 1; n <= 3; ++n) {
            const std::uint32_t D = 6;
            auto ctx = SeriesContext::make(FieldSpec::make(p, k), n, D);
            auto low = ctx->with_order(D - 1);
            auto f = random_series(ctx, rng, 0, D), g = random_series(ctx, rng, 0, D);
            auto phi = random_automorphism(ctx, rng);
            for (std::size_t i = 0; i < n; ++i) {
                auto lhs = (f * g).partial(i).retruncated(low);
                auto rhs = (f.partial(i) * g + f * g.partial(i)).retruncated(low);
                CHECK(lhs == rhs);

                TruncatedSeries chain(ctx);
                for (std::size_t j = 0; j < n; ++j) chain += aut_apply(phi, f.partial(j)) * phi.image(j).partial(i);
                CHECK(aut_apply(phi, f).partial(i).retruncated(low) == chain.retruncated(low));
            }
        }
    }
}
