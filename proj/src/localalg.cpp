#include "charp/localalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace charp {

namespace {

// Rows x^a * d_i f truncated to degree <= bound, over the monomials of degree <= bound.
// Columns run from the highest monomial in canonical order down to 1.
struct JacobianMatrix {
    std::vector<Exponent> monomials;  // ascending canonical order
    Matrix m;
    std::size_t column(std::size_t pos) const { return monomials.size() - 1 - pos; }
};

JacobianMatrix jacobian_matrix(const TruncatedSeries& f, std::uint32_t bound) {
    const Context& ctx = f.ctx();
    const std::size_t N = ctx->nvars();
    JacobianMatrix out;
    out.monomials = monomials_upto(N, bound);
    std::unordered_map<std::uint64_t, std::size_t> col;
    std::vector<std::uint64_t> keys(out.monomials.size());
    std::vector<std::uint32_t> degs(out.monomials.size());
    for (std::size_t i = 0; i < out.monomials.size(); ++i) {
        keys[i] = ctx->key(out.monomials[i]);
        degs[i] = total_degree(out.monomials[i]);
        col.emplace(keys[i], out.column(i));
    }
    std::vector<TruncatedSeries> grads;
    std::size_t rows = 0;
    for (std::size_t i = 0; i < N; ++i) {
        auto g = f.partial(i).degree_range(0, bound);
        if (g.is_zero()) continue;
        for (auto d : degs) rows += static_cast<int>(d) + g.order() <= static_cast<int>(bound);
        grads.push_back(std::move(g));
    }
    out.m = Matrix(rows, out.monomials.size());
    std::size_t row = 0;
    for (const auto& g : grads) {
        for (std::size_t a = 0; a < keys.size(); ++a) {
            if (static_cast<int>(degs[a]) + g.order() > static_cast<int>(bound)) continue;
            for (const auto& t : g.terms()) {
                if (t.deg + degs[a] > bound) break;
                out.m(row, col.at(t.key + keys[a])) = t.c;
            }
            ++row;
        }
    }
    return out;
}

void require_local(const TruncatedSeries& f) {
    if (f.constant_term() != 0) throw PreconditionError("series must have zero constant term");
}

std::optional<std::uint32_t> find_r_min(const TruncatedSeries& f, std::uint32_t cap) {
    if (contains_power(f, 0)) return 0;
    if (!contains_power(f, cap)) return std::nullopt;
    // Containment is monotone in r: gallop up from 1, then bisect.
    std::uint32_t lo = 0, hi = 1;
    while (hi < cap && !contains_power(f, hi)) {
        lo = hi;
        hi = std::min(cap, hi * 2);
    }
    while (hi - lo > 1) {
        const std::uint32_t mid = lo + (hi - lo) / 2;
        if (contains_power(f, mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

bool contains_power(const TruncatedSeries& f, std::uint32_t r) {
    if (f.ctx()->D() < r + 1)
        throw PreconditionError("truncation order " + std::to_string(f.ctx()->D()) + " is too small to decide m^" +
                                std::to_string(r) + " (needs " + std::to_string(r + 1) + ")");
    require_local(f);
    const Field& F = f.F();
    const JacobianMatrix J = jacobian_matrix(f, r);
    std::size_t top = 0;  // number of degree-r monomials; they are the leading columns
    for (const auto& e : J.monomials) top += total_degree(e) == r;
    if (J.m.rows() < top) return false;
    // W contains every degree-r monomial iff rank(W) = top + rank(W projected to degrees < r).
    Matrix low(J.m.rows(), J.m.cols() - top);
    for (std::size_t i = 0; i < J.m.rows(); ++i)
        for (std::size_t j = top; j < J.m.cols(); ++j) low(i, j - top) = J.m(i, j);
    return rank(F, J.m) == top + rank(F, low);
}

std::string MilnorResult::mu_str() const {
    return finite ? std::to_string(mu) : "infinite (>=" + std::to_string(cap) + ")";
}

MilnorResult milnor_number(const TruncatedSeries& f, std::uint32_t cap) {
    if (f.ctx()->D() < cap + 1)
        throw PreconditionError("truncation order " + std::to_string(f.ctx()->D()) + " is below cap + 1 = " +
                                std::to_string(cap + 1));
    require_local(f);
    MilnorResult res;
    res.cap = cap;
    res.r_min = find_r_min(f, cap);
    if (!res.r_min) return res;
    res.finite = true;
    const std::uint32_t r = *res.r_min;
    if (r == 0) return res;
    // k[[x]]/jac(f) = (k[x]/m^r) / image of jac(f).
    const JacobianMatrix J = jacobian_matrix(f, r - 1);
    const Echelon e = row_reduce(f.F(), J.m);
    std::vector<bool> pivot(J.m.cols(), false);
    for (auto c : e.pivots) pivot[c] = true;
    for (std::size_t i = 0; i < J.monomials.size(); ++i)
        if (!pivot[J.column(i)]) res.basis.push_back(J.monomials[i]);
    res.mu = res.basis.size();
    return res;
}

std::optional<std::uint32_t> determinacy_bound(const TruncatedSeries& f, std::uint32_t cap) {
    const auto res = milnor_number(f, cap);
    if (!res.r_min) return std::nullopt;
    return 2 * std::max<std::uint32_t>(*res.r_min, 1);
}

VersalUnfolding versal_unfolding(const TruncatedSeries& f, std::uint32_t cap) {
    const auto res = milnor_number(f, cap);
    if (!res.finite) throw PreconditionError("Milnor number is " + res.mu_str() + "; no finite versal unfolding");
    const Context& ctx = f.ctx();
    const std::size_t mu = res.basis.size();
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= mu; ++i) names.push_back("s" + std::to_string(i));
    for (std::size_t i = 0; i < ctx->nvars(); ++i) {
        if (std::find(names.begin(), names.end(), ctx->vars().name(i)) != names.end())
            throw PreconditionError("variable name " + ctx->vars().name(i) + " clashes with an unfolding parameter");
        names.push_back(ctx->vars().name(i));
    }
    auto big = SeriesContext::make(ctx->field(), Variables(std::move(names)), ctx->D(), mu + ctx->params());
    auto lift = [&](const Exponent& e) {
        Exponent out(mu, 0);
        out.insert(out.end(), e.begin(), e.end());
        return out;
    };
    VersalUnfolding v;
    v.basis = res.basis;
    v.F = TruncatedSeries(big);
    for (const auto& t : f.terms()) v.F += TruncatedSeries::monomial(big, lift(ctx->exponent(t.key)), t.c);
    for (std::size_t i = 0; i < mu; ++i) {
        Exponent e = lift(res.basis[i]);
        e[i] += 1;
        v.F += TruncatedSeries::monomial(big, e, 1);
    }
    return v;
}

// ---------------------------------------------------------------------------------------------
// Quadratic forms

QuadraticForm QuadraticForm::parse(std::string_view text, const FieldSpec& spec, std::size_t n) {
    auto ctx = SeriesContext::make(spec, n, 2);
    const auto poly = Polynomial::parse(text, spec, ctx->vars());
    for (const auto& [e, c] : poly.terms())
        if (total_degree(e) != 2) throw PreconditionError("not a quadratic form: " + std::string(text));
    return from_series(TruncatedSeries::from_polynomial(ctx, poly));
}

QuadraticForm QuadraticForm::from_series(const TruncatedSeries& f) {
    const Context& ctx = f.ctx();
    const std::size_t P = ctx->params();
    QuadraticForm q{ctx->field(), ctx->n(), {}};
    for (const auto& t : f.terms()) {
        if (t.deg < 2) continue;
        if (t.deg > 2) break;
        const Exponent e = ctx->exponent(t.key);
        if (std::any_of(e.begin(), e.begin() + static_cast<long>(P), [](auto a) { return a != 0; })) continue;
        std::vector<std::size_t> idx;
        for (std::size_t i = P; i < e.size(); ++i)
            for (std::uint32_t k = 0; k < e[i]; ++k) idx.push_back(i - P);
        q.set(idx[0], idx[1], t.c);
    }
    return q;
}

Code QuadraticForm::coeff(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    auto it = coeffs.find({a, b});
    return it == coeffs.end() ? 0 : it->second;
}

void QuadraticForm::set(std::size_t a, std::size_t b, Code c) {
    if (a > b) std::swap(a, b);
    if (b >= n) throw PreconditionError("quadratic form index out of range");
    if (c == 0)
        coeffs.erase({a, b});
    else
        coeffs[{a, b}] = c;
}

Matrix QuadraticForm::polar() const {
    const Field& F = *spec;
    Matrix H(n, n);
    for (const auto& [ab, c] : coeffs) {
        const auto [a, b] = ab;
        if (a == b) {
            H(a, a) = F.add(c, c);
        } else {
            H(a, b) = c;
            H(b, a) = c;
        }
    }
    return H;
}

Code QuadraticForm::evaluate(const std::vector<Code>& x) const {
    const Field& F = *spec;
    Code acc = 0;
    for (const auto& [ab, c] : coeffs) acc = F.add(acc, F.mul(c, F.mul(x[ab.first], x[ab.second])));
    return acc;
}

QuadraticForm QuadraticForm::substitute(const Matrix& L) const {
    const Field& F = *spec;
    QuadraticForm out{spec, n, {}};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            Code acc = 0;
            for (const auto& [ab, c] : coeffs) {
                const auto [a, b] = ab;
                Code t = F.mul(L(a, i), L(b, j));
                if (i != j) t = F.add(t, F.mul(L(a, j), L(b, i)));
                acc = F.add(acc, F.mul(c, t));
            }
            out.set(i, j, acc);
        }
    return out;
}

QuadraticForm QuadraticForm::embedded(const Embedding& e) const {
    QuadraticForm out{e.target(), n, {}};
    for (const auto& [ab, c] : coeffs) out.set(ab.first, ab.second, e(c));
    return out;
}

std::string QuadraticForm::str() const {
    auto ctx = SeriesContext::make(spec, n, 2);
    TruncatedSeries s(ctx);
    for (const auto& [ab, c] : coeffs) {
        Exponent e(n, 0);
        e[ab.first] += 1;
        e[ab.second] += 1;
        s += TruncatedSeries::monomial(ctx, e, c);
    }
    return s.str();
}

std::size_t qf_polar_rank(const QuadraticForm& q) { return rank(*q.spec, q.polar()); }

std::string QFNormalForm::tag() const {
    const char* name = shape == QFShape::DiagonalSquares ? "DiagonalSquares"
                       : shape == QFShape::Symplectic    ? "Symplectic"
                                                         : "SymplecticPlusSquare";
    return std::string(name) + "(" + std::to_string(rank) + ")";
}

QuadraticForm QFNormalForm::normal_form() const {
    QuadraticForm q{field, matrix.rows(), {}};
    if (shape == QFShape::DiagonalSquares) {
        for (std::size_t i = 0; i < rank; ++i) q.set(i, i, 1);
    } else {
        for (std::size_t i = 0; i + 1 < rank; i += 2) q.set(i, i + 1, 1);
        if (shape == QFShape::SymplecticPlusSquare) q.set(rank, rank, 1);
    }
    return q;
}

namespace {

// Basis-change bookkeeping: x = P y, and M is the Gram matrix of the current basis.
struct Congruence {
    const Field& F;
    Matrix M, P;

    void swap(std::size_t i, std::size_t j) {
        const std::size_t n = M.rows();
        for (std::size_t k = 0; k < n; ++k) {
            std::swap(P(k, i), P(k, j));
            std::swap(M(i, k), M(j, k));
        }
        for (std::size_t k = 0; k < n; ++k) std::swap(M(k, i), M(k, j));
    }
    // e_j <- e_j + c e_k
    void add(std::size_t j, std::size_t k, Code c) {
        const std::size_t n = M.rows();
        for (std::size_t t = 0; t < n; ++t) {
            P(t, j) = F.add(P(t, j), F.mul(c, P(t, k)));
            M(j, t) = F.add(M(j, t), F.mul(c, M(k, t)));
        }
        for (std::size_t t = 0; t < n; ++t) M(t, j) = F.add(M(t, j), F.mul(c, M(t, k)));
    }
};

std::optional<QFNormalForm> reduce_odd(const QuadraticForm& q) {
    const Field& F = *q.spec;
    const std::size_t n = q.n;
    const Code half = F.inv(F.from_int(2));
    Congruence cg{F, Matrix(n, n), Matrix::identity(n)};
    for (const auto& [ab, c] : q.coeffs) {
        if (ab.first == ab.second) {
            cg.M(ab.first, ab.first) = c;
        } else {
            cg.M(ab.first, ab.second) = F.mul(c, half);
            cg.M(ab.second, ab.first) = F.mul(c, half);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (cg.M(k, k) == 0) {
            std::size_t j = k + 1;
            while (j < n && cg.M(j, j) == 0) ++j;
            if (j < n) {
                cg.swap(k, j);
            } else {
                j = k + 1;
                while (j < n && cg.M(k, j) == 0) ++j;
                if (j == n) continue;
                cg.add(k, j, 1);  // M_kk becomes 2 M_kj != 0
            }
        }
        for (std::size_t j = k + 1; j < n; ++j)
            if (cg.M(j, k)) cg.add(j, k, F.neg(F.mul(cg.M(j, k), F.inv(cg.M(k, k)))));
    }
    // Nonzero diagonal entries first, keeping their order.
    for (std::size_t k = 0, front = 0; k < n; ++k)
        if (cg.M(k, k) != 0) cg.swap(front++, k);
    std::size_t r = 0;
    while (r < n && cg.M(r, r) != 0) ++r;

    // Pair up non-residues: d1 y1^2 + d2 y2^2 = z1^2 + d1 d2 z2^2 with d1 a^2 + d2 b^2 = 1.
    std::vector<std::size_t> nonres;
    for (std::size_t i = 0; i < r; ++i)
        if (!F.sqrt(cg.M(i, i))) nonres.push_back(i);
    for (std::size_t t = 0; t + 1 < nonres.size(); t += 2) {
        const std::size_t i = nonres[t], j = nonres[t + 1];
        const Code d1 = cg.M(i, i), d2 = cg.M(j, j);
        Code a = 0, b = 0;
        for (a = 0; a < F.size(); ++a) {
            const Code rest = F.mul(F.sub(1, F.mul(d1, F.mul(a, a))), F.inv(d2));
            if (auto s = F.sqrt(rest)) {
                b = *s;
                break;
            }
        }
        Matrix Pn = cg.P;
        for (std::size_t k = 0; k < n; ++k) {
            Pn(k, i) = F.add(F.mul(a, cg.P(k, i)), F.mul(b, cg.P(k, j)));
            Pn(k, j) = F.add(F.neg(F.mul(d2, F.mul(b, cg.P(k, i)))), F.mul(d1, F.mul(a, cg.P(k, j))));
        }
        cg.P = Pn;
        cg.M(i, i) = 1;
        cg.M(j, j) = F.mul(d1, d2);
    }
    if (nonres.size() % 2 == 1) return std::nullopt;

    auto Pinv = inverse(F, cg.P);
    Matrix L(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const Code s = i < r ? *F.sqrt(cg.M(i, i)) : 1;
        for (std::size_t j = 0; j < n; ++j) L(i, j) = F.mul(s, (*Pinv)(i, j));
    }
    QFNormalForm out;
    out.rank = r;
    out.shape = QFShape::DiagonalSquares;
    out.field = q.spec;
    out.matrix = L;
    return out;
}

std::optional<QFNormalForm> reduce_char2(const QuadraticForm& q) {
    const Field& F = *q.spec;
    const std::size_t n = q.n;
    const Matrix H = q.polar();
    auto h = [&](const std::vector<Code>& u, const std::vector<Code>& v) {
        Code acc = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (H(i, j)) acc = F.add(acc, F.mul(H(i, j), F.mul(u[i], v[j])));
        return acc;
    };
    auto axpy = [&](std::vector<Code>& y, Code c, const std::vector<Code>& x) {
        for (std::size_t i = 0; i < n; ++i) y[i] = F.add(y[i], F.mul(c, x[i]));
    };

    // Symplectic Gram-Schmidt on the standard basis of V.
    std::vector<std::vector<Code>> rest;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Code> e(n, 0);
        e[i] = 1;
        rest.push_back(e);
    }
    std::vector<std::pair<std::vector<Code>, std::vector<Code>>> pairs;
    std::vector<std::vector<Code>> radical;
    while (!rest.empty()) {
        auto e = rest.front();
        rest.erase(rest.begin());
        std::size_t j = 0;
        while (j < rest.size() && h(e, rest[j]) == 0) ++j;
        if (j == rest.size()) {
            radical.push_back(e);
            continue;
        }
        auto f = rest[j];
        rest.erase(rest.begin() + static_cast<long>(j));
        const Code hef = h(e, f);
        for (auto& x : f) x = F.mul(x, F.inv(hef));
        for (auto& g : rest) {
            const Code gf = h(g, f), ge = h(g, e);
            axpy(g, gf, e);
            axpy(g, ge, f);
        }
        pairs.emplace_back(e, f);
    }

    // Basis matrix P (x = P y); coordinates y_k are the new linear forms in y-space.
    Matrix P(n, n);
    std::size_t col = 0;
    auto put = [&](const std::vector<Code>& v) {
        for (std::size_t i = 0; i < n; ++i) P(i, col) = v[i];
        ++col;
    };
    for (const auto& [e, f] : pairs) {
        put(e);
        put(f);
    }
    for (const auto& w : radical) put(w);
    auto unit = [&](std::size_t k) {
        std::vector<Code> v(n, 0);
        v[k] = 1;
        return v;
    };
    auto qv = [&](const std::vector<Code>& v) { return q.evaluate(v); };

    // Collapse the radical squares to one square Z^2.
    std::optional<std::vector<Code>> Z;
    std::vector<std::vector<Code>> others;
    const std::size_t base = 2 * pairs.size();
    for (std::size_t j = 0; j < radical.size(); ++j) {
        const Code d = qv(radical[j]);
        if (d != 0 && !Z) {
            Z = std::vector<Code>(n, 0);
            for (std::size_t t = j; t < radical.size(); ++t) axpy(*Z, *F.sqrt(qv(radical[t])), unit(base + t));
        } else {
            others.push_back(unit(base + j));
        }
    }

    Code c0 = 1;
    while (F.trace(c0) == 0) ++c0;  // least element of trace 1

    std::vector<std::vector<Code>> rows;  // output coordinates, hyperbolic pairs first
    std::vector<std::pair<std::vector<Code>, std::vector<Code>>> anisotropic;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto u = unit(2 * i), v = unit(2 * i + 1);
        const Code a = qv(pairs[i].first), c = qv(pairs[i].second);
        std::vector<Code> U(n, 0), V(n, 0);
        if (c == 0) {  // u (a u + v)
            U = u;
            V = v;
            axpy(V, a, u);
        } else if (a == 0) {  // v (u + c v)
            U = v;
            V = u;
            axpy(V, c, v);
        } else if (auto s = F.artin_schreier(F.mul(a, c))) {
            // a u^2 + uv + c v^2 = a (u + t1 v)(u + t2 v), t1 = s/a, t2 = t1 + 1/a
            const Code t1 = F.mul(*s, F.inv(a)), t2 = F.add(t1, F.inv(a));
            axpy(U, a, u);
            axpy(U, F.mul(a, t1), v);
            V = u;
            axpy(V, t2, v);
        } else if (Z) {
            // a u^2 + uv + c v^2 + Z^2 = v (u + c v) + (Z + sqrt(a) u)^2
            U = v;
            V = u;
            axpy(V, c, v);
            axpy(*Z, *F.sqrt(a), u);
        } else {
            // Normalize to u1^2 + u1 v1 + c0 v1^2 with u1 = sqrt(a) u + s v / sqrt(a), v1 = v / sqrt(a).
            const Code ra = *F.sqrt(a), ira = F.inv(ra);
            const Code s = *F.artin_schreier(F.add(F.mul(a, c), c0));
            std::vector<Code> u1(n, 0), v1(n, 0);
            axpy(u1, ra, u);
            axpy(u1, F.mul(s, ira), v);
            axpy(v1, ira, v);
            anisotropic.emplace_back(u1, v1);
            continue;
        }
        rows.push_back(U);
        rows.push_back(V);
    }
    if (anisotropic.size() % 2 == 1) return std::nullopt;
    // N(u1, v1) + N(u2, v2) = A V + B U with A = u1 + u2, V = u1 + u2 + v2, B = v1 + v2, U = u1 + c0 (v1 + v2).
    for (std::size_t t = 0; t < anisotropic.size(); t += 2) {
        const auto& [u1, v1] = anisotropic[t];
        const auto& [u2, v2] = anisotropic[t + 1];
        std::vector<Code> A = u1, V, B = v1, U = u1;
        axpy(A, 1, u2);
        V = A;
        axpy(V, 1, v2);
        axpy(B, 1, v2);
        axpy(U, c0, B);
        rows.push_back(A);
        rows.push_back(V);
        rows.push_back(B);
        rows.push_back(U);
    }
    const std::size_t r = rows.size();
    if (Z) rows.push_back(*Z);
    for (const auto& o : others) rows.push_back(o);

    Matrix Ly(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Ly(i, j) = rows[i][j];
    QFNormalForm out;
    out.rank = r;
    out.shape = Z ? QFShape::SymplecticPlusSquare : QFShape::Symplectic;
    out.field = q.spec;
    out.matrix = multiply(F, Ly, *inverse(F, P));
    return out;
}

std::optional<QFNormalForm> reduce(const QuadraticForm& q) {
    auto out = q.spec->p() == 2 ? reduce_char2(q) : reduce_odd(q);
    if (!out) return out;
    out->extension_degree = 1;
    if (!(out->normal_form().substitute(out->matrix) == q))
        throw std::logic_error("quadratic form reduction failed its substitution check");
    out->transform = LocalAutomorphism::linear(SeriesContext::make(q.spec, q.n, 2), out->matrix);
    return out;
}

}  // namespace

QFNormalForm qf_classify(const QuadraticForm& q, bool allow_extension) {
    if (q.n == 0) throw PreconditionError("quadratic form needs at least one variable");
    if (auto out = reduce(q)) return *out;
    const std::string what = q.spec->p() == 2 ? "an anisotropic plane (trace obstruction) remains"
                                              : "the discriminant is a non-square";
    if (!allow_extension) throw ExtensionRequired("quadratic form needs a quadratic extension: " + what);
    Embedding e(q.spec, 2);
    auto out = reduce(q.embedded(e));
    if (!out) throw std::logic_error("quadratic form did not reduce over the quadratic extension");
    out->extension_degree = 2;
    return *out;
}

// ---------------------------------------------------------------------------------------------
// Splitting lemma

SplitResult split(const TruncatedSeries& F0, bool allow_extension) {
    const Context& ctx0 = F0.ctx();
    const std::size_t P = ctx0->params(), n = ctx0->n();
    const std::uint32_t D = ctx0->D();
    if (D < 3) throw PreconditionError("split needs truncation order at least 3");
    if (n == 0) throw PreconditionError("split needs at least one non-parameter variable");
    for (const auto& t : F0.terms()) {
        if (t.deg > 1) break;
        if (t.deg == 1) {
            const Exponent e = ctx0->exponent(t.key);
            for (std::size_t i = P; i < e.size(); ++i)
                if (e[i]) throw PreconditionError("residue has a linear term in " + ctx0->vars().name(i));
        }
    }

    SplitResult res;
    res.qf = qf_classify(QuadraticForm::from_series(F0), allow_extension);
    res.extension_degree = res.qf.extension_degree;
    Context ctx = ctx0;
    TruncatedSeries F = F0;
    if (res.extension_degree > 1) {
        ctx = std::make_shared<const SeriesContext>(res.qf.field, ctx0->vars(), P, D);
        F = ts_embed(F0, ctx, Embedding(ctx0->field(), res.extension_degree));
    }
    const Field& K = ctx->F();
    const bool char2 = K.p() == 2;
    const std::size_t r = res.qf.rank;
    res.r = r;

    // Linear step: the inverse of the classifying substitution sends q(F) to its normal form.
    LocalAutomorphism phi = LocalAutomorphism::linear(ctx, *inverse(K, res.qf.matrix));
    TruncatedSeries G = aut_apply(phi, F);

    res.q = TruncatedSeries(ctx);
    std::vector<std::uint64_t> q0_keys;
    for (std::size_t i = 0; i < r; i += char2 ? 2 : 1) {
        const std::size_t a = P + i, b = char2 ? P + i + 1 : P + i;
        const auto m = TruncatedSeries::variable(ctx, a) * TruncatedSeries::variable(ctx, b);
        q0_keys.push_back(m.terms().front().key);
        res.q += m;
    }
    auto is_active = [&](std::size_t var) { return var >= P && var < P + r; };
    auto offending = [&](const SeriesTerm& t) {
        if (std::find(q0_keys.begin(), q0_keys.end(), t.key) != q0_keys.end()) return false;
        for (std::size_t v = P; v < P + r; ++v)
            if (ctx->exponent_of(t.key, v)) return true;
        return false;
    };

    // Eliminate offending monomials degree by degree; each pass clears its degree without
    // disturbing lower ones.
    for (std::uint32_t d = 2; d <= D; ++d) {
        for (int guard = 0;; ++guard) {
            if (guard > 8) throw std::logic_error("split elimination did not converge");
            std::vector<TruncatedSeries> images;
            for (std::size_t v = 0; v < ctx->nvars(); ++v) images.push_back(TruncatedSeries::variable(ctx, v));
            bool any = false;
            for (const auto& t : G.terms()) {
                if (t.deg < d) continue;
                if (t.deg > d) break;
                if (!offending(t)) continue;
                any = true;
                std::size_t i = P;
                while (!(is_active(i) && ctx->exponent_of(t.key, i))) ++i;
                Exponent w = ctx->exponent(t.key);
                w[i] -= 1;
                if (char2) {
                    const std::size_t partner = ((i - P) % 2 == 0) ? i + 1 : i - 1;
                    images[partner] += TruncatedSeries::monomial(ctx, w, t.c);
                } else {
                    const Code c = K.neg(K.mul(t.c, K.inv(K.from_int(2))));
                    images[i] += TruncatedSeries::monomial(ctx, w, c);
                }
            }
            if (!any) break;
            LocalAutomorphism step(ctx, std::move(images));
            G = aut_apply(step, G);
            phi = aut_compose(step, phi);
        }
    }

    for (const auto& t : G.terms())
        if (offending(t)) throw std::logic_error("split left an active monomial behind");
    res.residual = G - res.q;
    for (const auto& t : res.residual.terms())
        for (std::size_t v = P; v < P + r; ++v)
            if (ctx->exponent_of(t.key, v)) throw std::logic_error("split residual involves an active variable");
    if (!(aut_apply(phi, F) == res.q + res.residual)) throw std::logic_error("split certificate check failed");
    res.phi = std::move(phi);
    return res;
}

}  // namespace charp
