#include "charp/covers.hpp"

#include <random>

#include "charp/powerseries.hpp"

namespace charp {

namespace {

std::uint64_t points_in(const Section& s, std::uint32_t m, std::uint64_t budget) {
    const std::uint64_t Q = s.spec.extension(m)->size();
    std::uint64_t total = 1;
    for (std::size_t v = 0; v < s.n; ++v) {
        if (total > budget / Q) throw BudgetExceeded("cover scan exceeds the budget of " + std::to_string(budget) + " points");
        total *= Q;
    }
    return total;
}

bool advance(std::vector<Code>& P, std::uint64_t Q) {
    for (std::size_t v = P.size(); v-- > 0;) {
        if (++P[v] < Q) return true;
        P[v] = 0;
    }
    return false;
}

// roots[v] = every t with t^p == v.
std::vector<std::vector<Code>> pth_roots(const Field& G, std::uint64_t p) {
    std::vector<std::vector<Code>> roots(G.size());
    for (Code t = 0; t < G.size(); ++t) roots[G.pow(t, p)].push_back(t);
    return roots;
}

}  // namespace

CoverChart build_cover(const Section& s, std::uint64_t p) {
    if (s.spec->p() != p)
        throw PreconditionError("cover exponent " + std::to_string(p) + " differs from the characteristic " +
                                std::to_string(s.spec->p()));
    if (s.e > s.n) throw PreconditionError("covers need e <= n");
    if (s.e == 0) throw PreconditionError("covers need e >= 1");
    std::vector<std::string> names;
    for (std::size_t v = 0; v < s.n; ++v) names.push_back("x" + std::to_string(v + 1));
    for (std::size_t l = 0; l < s.e; ++l) names.push_back("t" + std::to_string(l + 1));
    CoverChart c{s, p, Variables(names), {}};
    for (std::size_t l = 0; l < s.e; ++l) {
        Polynomial eq(s.spec, c.vars);
        Exponent te(s.n + s.e, 0);
        te[s.n + l] = static_cast<std::uint32_t>(p);
        eq.add_term(te, 1);
        for (const auto& [ex, coef] : s.polys[l].terms()) {
            Exponent lifted(ex);
            lifted.resize(s.n + s.e, 0);
            eq.add_term(lifted, s.spec->neg(coef));
        }
        c.equations.push_back(std::move(eq));
    }
    return c;
}

std::uint64_t cover_point_count(const CoverChart& c, std::uint32_t m, std::uint64_t budget) {
    points_in(c.base, m, budget);
    SectionEvaluator ev(c.base, m);
    const Field& G = *ev.target();
    const auto roots = pth_roots(G, c.p);
    std::vector<Code> P(c.base.n, 0);
    std::uint64_t count = 0;
    do {
        std::uint64_t fibre = 1;
        for (std::size_t l = 0; l < c.base.e && fibre; ++l) fibre *= roots[ev.value(l, P)].size();
        count += fibre;
    } while (advance(P, G.size()));
    return count;
}

std::vector<std::vector<Code>> cover_singular_points(const CoverChart& c, std::uint32_t m, std::uint64_t budget) {
    points_in(c.base, m, budget);
    const std::size_t n = c.base.n, e = c.base.e;
    Embedding embed(c.base.spec, m);
    const Field& G = *embed.target();
    const auto roots = pth_roots(G, c.p);
    std::vector<Polynomial> partials;
    for (const auto& eq : c.equations)
        for (std::size_t v = 0; v < n + e; ++v) partials.push_back(eq.partial(v));
    std::vector<std::vector<Code>> out;
    std::vector<Code> x(n, 0);
    do {
        std::vector<Code> values;
        for (std::size_t l = 0; l < e; ++l) values.push_back(c.base.polys[l].evaluate(embed, x));
        // Every combination of p-th roots above x.
        std::vector<std::size_t> pick(e, 0);
        bool any = true;
        for (std::size_t l = 0; l < e; ++l) any = any && !roots[values[l]].empty();
        if (!any) continue;
        while (true) {
            std::vector<Code> pt(x);
            for (std::size_t l = 0; l < e; ++l) pt.push_back(roots[values[l]][pick[l]]);
            Matrix J(e, n + e);
            for (std::size_t l = 0; l < e; ++l)
                for (std::size_t v = 0; v < n + e; ++v) J(l, v) = partials[l * (n + e) + v].evaluate(embed, pt);
            if (rank(G, J) < e) out.push_back(std::move(pt));
            std::size_t l = e;
            while (l > 0 && ++pick[l - 1] == roots[values[l - 1]].size()) pick[--l] = 0;
            if (l == 0) break;
        }
    } while (advance(x, G.size()));
    return out;
}

CoverVerdict cover_classify(const Section& s, const StrataReport& report) {
    CoverVerdict v;
    v.q = s.spec->size();
    for (const auto& lv : report.levels) {
        std::uint64_t crit = 0;
        for (const auto& [sym, cnt] : lv.counts)
            if (sym.first >= 1) crit += cnt;
        v.evidence.push_back(crit);
    }
    auto est = estimate_dim(v.q, v.evidence);
    if (est.dim >= 0) v.sigma1_codim_estimate = static_cast<int>(s.n) - est.dim;
    const int codim = v.sigma1_codim_estimate.value_or(static_cast<int>(s.n) + 1);
    v.integral = codim >= 1;
    v.normal = codim >= 2;
    return v;
}

MoriSystem mori_equations(std::uint32_t N, const std::vector<std::uint32_t>& degrees, std::uint64_t p,
                          std::uint64_t seed) {
    if (!is_prime(p)) throw PreconditionError(std::to_string(p) + " is not prime");
    if (degrees.empty() || degrees.size() > N) throw PreconditionError("need 1 <= c <= N");
    for (auto d : degrees)
        if (d == 0 || d % p != 0)
            throw PreconditionError("p = " + std::to_string(p) + " does not divide the degree " + std::to_string(d));
    const std::size_t c = degrees.size();
    MoriSystem sys{N, degrees, p, seed, {}, {}, {}, {}};
    std::vector<std::string> names;
    for (std::uint32_t v = 0; v <= N; ++v) names.push_back("x" + std::to_string(v));
    names.push_back("t");
    for (std::size_t i = 0; i < c; ++i) names.push_back("tau" + std::to_string(i + 1));
    sys.vars = Variables(names);
    sys.weights.assign(N + 1, 1);
    sys.weights.push_back(0);
    for (auto d : degrees) sys.weights.push_back(static_cast<std::uint32_t>(d / p));

    const auto F = FieldSpec::make(p, 1);
    const std::size_t nv = names.size();
    std::mt19937_64 rng(seed);
    const std::uint64_t reject_below = (0 - p) % p;
    auto draw = [&] {
        while (true) {
            std::uint64_t r = rng();
            if (r >= reject_below) return r % p;
        }
    };
    auto homogeneous = [&](std::uint32_t d) {
        Polynomial f(F, sys.vars);
        for (const auto& mono : monomials_upto(N + 1, d)) {
            if (total_degree(mono) != d) continue;
            Exponent ex(mono);
            ex.resize(nv, 0);
            f.add_term(ex, draw());
        }
        if (f.is_zero()) {
            Exponent ex(nv, 0);
            ex[0] = d;
            f.add_term(ex, 1);
        }
        return f;
    };
    for (std::size_t i = 0; i < c; ++i) {
        const std::uint32_t a = degrees[i] / static_cast<std::uint32_t>(p);
        auto f = homogeneous(degrees[i]);
        auto g = homogeneous(a);
        Exponent tau_p(nv, 0), t_tau(nv, 0);
        tau_p[N + 2 + i] = static_cast<std::uint32_t>(p);
        t_tau[N + 1] = 1;
        t_tau[N + 2 + i] = 1;
        Polynomial e1(F, sys.vars), e2(F, sys.vars);
        e1.add_term(tau_p, 1);
        e2.add_term(t_tau, 1);
        sys.equations.push_back((e1 - f).str());
        sys.equation_degrees.push_back(degrees[i]);
        sys.equations.push_back((e2 - g).str());
        sys.equation_degrees.push_back(a);
    }
    return sys;
}

std::vector<std::optional<std::uint32_t>> mori_weighted_degrees(const MoriSystem& m) {
    const auto F = FieldSpec::make(m.p, 1);
    std::vector<std::optional<std::uint32_t>> out;
    for (const auto& text : m.equations) {
        auto poly = Polynomial::parse(text, F, m.vars);
        std::optional<std::uint32_t> deg;
        bool homogeneous = !poly.is_zero();
        for (const auto& [ex, c] : poly.terms()) {
            std::uint32_t w = 0;
            for (std::size_t v = 0; v < ex.size(); ++v) w += ex[v] * m.weights[v];
            if (deg && *deg != w) homogeneous = false;
            deg = w;
        }
        out.push_back(homogeneous ? deg : std::nullopt);
    }
    return out;
}

}  // namespace charp
