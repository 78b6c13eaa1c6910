#include "charp/strata.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <thread>

#include "charp/powerseries.hpp"

namespace charp {

namespace {

// Dense univariate polynomials, coefficient of x^k at index k, no trailing zeros.
using UPoly = std::vector<Code>;

void trim(UPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

UPoly umul(const Field& F, const UPoly& a, const UPoly& b) {
    if (a.empty() || b.empty()) return {};
    UPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
    }
    trim(r);
    return r;
}

UPoly uaddsub(const Field& F, const UPoly& a, const UPoly& b, bool subtract) {
    UPoly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        Code x = i < a.size() ? a[i] : 0, y = i < b.size() ? b[i] : 0;
        r[i] = subtract ? F.sub(x, y) : F.add(x, y);
    }
    trim(r);
    return r;
}

void umake_monic(const Field& F, UPoly& a) {
    if (a.empty() || a.back() == 1) return;
    Code inv = F.inv(a.back());
    for (auto& c : a) c = F.mul(c, inv);
}

// a mod b, b nonzero.
void umod(const Field& F, UPoly& a, const UPoly& b) {
    Code lead_inv = F.inv(b.back());
    while (a.size() >= b.size()) {
        Code c = F.mul(a.back(), lead_inv);
        std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = F.sub(a[shift + i], F.mul(c, b[i]));
        trim(a);
    }
}

// Monic gcd; gcd(0, 0) = 0.
UPoly ugcd(const Field& F, UPoly a, UPoly b) {
    while (!b.empty()) {
        umod(F, a, b);
        std::swap(a, b);
    }
    umake_monic(F, a);
    return a;
}

Code ueval(const Field& F, const UPoly& a, Code x) {
    Code r = 0;
    for (std::size_t k = a.size(); k-- > 0;) r = F.add(F.mul(r, x), a[k]);
    return r;
}

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t r) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(r);
    for (std::size_t i = 0; i < r; ++i) cur[i] = i;
    if (r > n) return out;
    while (true) {
        out.push_back(cur);
        std::size_t i = r;
        while (i > 0 && cur[i - 1] == n - r + i - 1) --i;
        if (i == 0) break;
        ++cur[i - 1];
        for (std::size_t k = i; k < r; ++k) cur[k] = cur[k - 1] + 1;
    }
    return out;
}

// Laplace expansion along the first row; entries(r, c) gives the (r, c) entry.
template <class T, class Get, class Mul, class Add, class Sub>
T laplace(std::vector<std::size_t> rows, std::vector<std::size_t> cols, const Get& get, const Mul& mul,
          const Add& add, const Sub& sub, const T& zero) {
    if (rows.size() == 1) return get(rows[0], cols[0]);
    T acc = zero;
    std::vector<std::size_t> rest_rows(rows.begin() + 1, rows.end());
    for (std::size_t k = 0; k < cols.size(); ++k) {
        std::vector<std::size_t> rest_cols;
        for (std::size_t c = 0; c < cols.size(); ++c)
            if (c != k) rest_cols.push_back(cols[c]);
        T term = mul(get(rows[0], cols[k]), laplace<T>(rest_rows, rest_cols, get, mul, add, sub, zero));
        acc = k % 2 == 0 ? add(acc, term) : sub(acc, term);
    }
    return acc;
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
    std::uint64_t r = 1;
    for (std::uint64_t k = 0; k < exp; ++k) {
        if (r > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
        r *= base;
    }
    return r;
}

void require_scannable(const Section& s) {
    if (s.n == 0 || s.e == 0) throw PreconditionError("section needs n >= 1 and e >= 1");
}

// Per-level scan state shared by the line scanner and the exhaustive scanner.
class LevelScan {
   public:
    LevelScan(const Section& s, std::uint32_t m) : s_(s), ev_(s, m), G_(*ev_.target()), Q_(G_.size()) {
        const std::size_t n = s.n;
        // Jacobian entries split by the exponent of the last variable.
        for (std::size_t l = 0; l < s.e; ++l) {
            for (std::size_t b = 0; b < n; ++b) {
                std::vector<LTerm> terms;
                auto partial = s.polys[l].partial(b);
                for (const auto& [ex, c] : partial.terms()) {
                    LTerm t{ev_.embedding()(c), Exponent(ex.begin(), ex.end() - 1), ex.back()};
                    terms.push_back(std::move(t));
                }
                jac_.push_back(std::move(terms));
            }
        }
        const std::size_t mm = s.m();
        row_sets_ = subsets(s.e, mm);
        col_sets_ = subsets(n, mm);
    }

    std::uint64_t Q() const noexcept { return Q_; }
    std::uint64_t lines() const { return checked_pow(Q_, s_.n - 1); }

    // Scans prefixes [t0, t1); tallies every point and optionally records points with i >= 1.
    void scan_lines(std::uint64_t t0, std::uint64_t t1, SymbolCounts& counts, std::vector<CriticalPoint>* crit) const {
        const std::size_t n = s_.n;
        std::vector<Code> P(n, 0);
        decode(t0, P);
        std::vector<std::vector<Code>> pw(n, std::vector<Code>(s_.d + 1, 1));
        std::vector<UPoly> U(jac_.size());
        std::uint64_t plain = 0;
        for (std::uint64_t t = t0; t < t1; ++t) {
            for (std::size_t v = 0; v + 1 < n; ++v)
                for (std::uint32_t k = 1; k <= s_.d; ++k) pw[v][k] = G_.mul(pw[v][k - 1], P[v]);
            for (std::size_t idx = 0; idx < jac_.size(); ++idx) {
                UPoly& u = U[idx];
                u.assign(s_.d + 1, 0);
                for (const auto& term : jac_[idx]) {
                    Code c = term.c;
                    for (std::size_t v = 0; v + 1 < n && c != 0; ++v)
                        if (term.pre[v]) c = G_.mul(c, pw[v][term.pre[v]]);
                    u[term.last] = G_.add(u[term.last], c);
                }
                trim(u);
            }
            UPoly g;
            bool unit = false;
            for (const auto& rows : row_sets_) {
                for (const auto& cols : col_sets_) {
                    UPoly minor = laplace<UPoly>(
                        rows, cols, [&](std::size_t r, std::size_t c) { return U[r * n + c]; },
                        [&](const UPoly& a, const UPoly& b) { return umul(G_, a, b); },
                        [&](const UPoly& a, const UPoly& b) { return uaddsub(G_, a, b, false); },
                        [&](const UPoly& a, const UPoly& b) { return uaddsub(G_, a, b, true); }, UPoly{});
                    g = ugcd(G_, std::move(g), std::move(minor));
                    if (g.size() == 1) {
                        unit = true;
                        break;
                    }
                }
                if (unit) break;
            }
            if (unit) {
                plain += Q_;
            } else {
                for (Code x = 0; x < Q_; ++x) {
                    if (!g.empty() && ueval(G_, g, x) != 0) {
                        ++plain;
                        continue;
                    }
                    P[n - 1] = x;
                    auto sym = ev_.symbol(P);
                    ++counts[sym.key()];
                    if (crit && sym.i >= 1) crit->push_back({P, sym});
                }
                P[n - 1] = 0;
            }
            advance_prefix(P);
        }
        if (plain) counts[{0, 0}] += plain;
    }

    void scan_points(std::uint64_t t0, std::uint64_t t1, SymbolCounts& counts) const {
        std::vector<Code> P(s_.n, 0);
        for (std::uint64_t t = t0; t < t1; ++t) {
            for (Code x = 0; x < Q_; ++x) {
                P[s_.n - 1] = x;
                ++counts[ev_.symbol(P).key()];
            }
            P[s_.n - 1] = 0;
            advance_prefix(P);
        }
    }

   private:
    struct LTerm {
        Code c;
        Exponent pre;
        std::uint32_t last;
    };

    void decode(std::uint64_t t, std::vector<Code>& P) const {
        for (std::size_t v = s_.n - 1; v-- > 0;) {
            P[v] = t % Q_;
            t /= Q_;
        }
    }
    void advance_prefix(std::vector<Code>& P) const {
        for (std::size_t v = s_.n - 1; v-- > 0;) {
            if (++P[v] < Q_) return;
            P[v] = 0;
        }
    }

    const Section& s_;
    SectionEvaluator ev_;
    const Field& G_;
    std::uint64_t Q_;
    std::vector<std::vector<LTerm>> jac_;
    std::vector<std::vector<std::size_t>> row_sets_, col_sets_;
};

// Runs fn(t0, t1, chunk) over `threads` contiguous chunks of [0, total).
template <class Fn>
void run_chunks(std::uint64_t total, unsigned threads, const Fn& fn) {
    threads = std::max(1u, threads);
    if (total < threads) threads = static_cast<unsigned>(std::max<std::uint64_t>(total, 1));
    if (threads == 1) {
        fn(0, total, 0u);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned c = 0; c < threads; ++c) {
        std::uint64_t t0 = total * c / threads, t1 = total * (c + 1) / threads;
        pool.emplace_back([&fn, t0, t1, c] { fn(t0, t1, c); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

Section::Section(FieldSpec spec_, std::size_t n_, std::vector<Polynomial> polys_)
    : spec(std::move(spec_)), n(n_), e(polys_.size()), polys(std::move(polys_)) {
    const auto vars = Variables::standard(n);
    for (const auto& p : polys) {
        if (!(p.field() == spec) || !(p.vars() == vars))
            throw PreconditionError("section polynomials must live over the section's field and x1..xn");
        d = std::max(d, static_cast<std::uint32_t>(std::max(p.degree(), 0)));
    }
}

Section Section::parse(const std::vector<std::string>& lines, const FieldSpec& spec, std::size_t n) {
    std::vector<Polynomial> polys;
    const auto vars = Variables::standard(n);
    for (const auto& line : lines) polys.push_back(Polynomial::parse(line, spec, vars));
    return Section(spec, n, std::move(polys));
}

std::vector<std::string> Section::lines() const {
    std::vector<std::string> out;
    for (const auto& p : polys) out.push_back(p.str());
    return out;
}

SectionEvaluator::SectionEvaluator(const Section& s, std::uint32_t m) : s_(&s), embed_(s.spec, m) {
    for (std::size_t l = 0; l < s.e; ++l) {
        f_.push_back(compile(s.polys[l]));
        for (std::size_t b = 0; b < s.n; ++b) jac_.push_back(compile(s.polys[l].partial(b)));
    }
    hess_.resize(s.e * s.n * s.n);
    for (std::size_t l = 0; l < s.e; ++l)
        for (std::size_t a = 0; a < s.n; ++a) {
            auto pa = s.polys[l].partial(a);
            for (std::size_t b = a; b < s.n; ++b) hess_[(l * s.n + a) * s.n + b] = compile(pa.partial(b));
        }
}

SectionEvaluator::Compiled SectionEvaluator::compile(const Polynomial& p) const {
    Compiled out;
    for (const auto& [e, c] : p.terms()) out.push_back({embed_(c), e});
    return out;
}

std::vector<std::vector<Code>> SectionEvaluator::powers(const std::vector<Code>& P) const {
    if (P.size() != s_->n) throw PreconditionError("point has the wrong number of coordinates");
    const Field& G = *target();
    std::vector<std::vector<Code>> pw(P.size(), std::vector<Code>(s_->d + 1, 1));
    for (std::size_t v = 0; v < P.size(); ++v) {
        if (P[v] >= G.size()) throw PreconditionError("point coordinate outside the field");
        for (std::uint32_t k = 1; k <= s_->d; ++k) pw[v][k] = G.mul(pw[v][k - 1], P[v]);
    }
    return pw;
}

Code SectionEvaluator::eval(const Compiled& c, const std::vector<std::vector<Code>>& pw) const {
    const Field& G = *target();
    Code acc = 0;
    for (const auto& t : c) {
        Code v = t.c;
        for (std::size_t i = 0; i < t.e.size(); ++i)
            if (t.e[i]) v = G.mul(v, pw[i][t.e[i]]);
        acc = G.add(acc, v);
    }
    return acc;
}

Code SectionEvaluator::value(std::size_t l, const std::vector<Code>& P) const { return eval(f_.at(l), powers(P)); }

Matrix SectionEvaluator::jacobian(const std::vector<Code>& P) const {
    auto pw = powers(P);
    Matrix J(s_->e, s_->n);
    for (std::size_t l = 0; l < s_->e; ++l)
        for (std::size_t b = 0; b < s_->n; ++b) J(l, b) = eval(jac_[l * s_->n + b], pw);
    return J;
}

Matrix SectionEvaluator::hessian(std::size_t l, const std::vector<Code>& P) const {
    auto pw = powers(P);
    const std::size_t n = s_->n;
    Matrix H(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) H(a, b) = H(b, a) = eval(hess_[(l * n + a) * n + b], pw);
    return H;
}

TBSymbol SectionEvaluator::symbol(const std::vector<Code>& P) const {
    const Field& G = *target();
    const std::size_t n = s_->n, e = s_->e, mm = s_->m();
    Matrix J = jacobian(P);
    const std::size_t rk = rank(G, J);
    TBSymbol sym;
    sym.jac_rank = static_cast<std::uint32_t>(rk);
    sym.i = static_cast<std::uint32_t>(mm - rk);
    const std::size_t k = n - rk, c = e - rk;
    if (k == 0 || c == 0) return sym;

    Matrix K = kernel(G, J);         // k x n
    Matrix Pi = left_kernel(G, J);   // c x e
    Matrix Kt = K.transpose();
    std::vector<Matrix> W;
    for (std::size_t l = 0; l < e; ++l) W.push_back(multiply(G, multiply(G, K, hessian(l, P)), Kt));
    // Row (b, a): the C-component a of the bilinear value on (u, v_b); column u.
    Matrix D(k * c, k);
    for (std::size_t b = 0; b < k; ++b)
        for (std::size_t a = 0; a < c; ++a)
            for (std::size_t u = 0; u < k; ++u) {
                Code acc = 0;
                for (std::size_t l = 0; l < e; ++l) acc = G.add(acc, G.mul(Pi(a, l), W[l](u, b)));
                D(b * c + a, u) = acc;
            }
    const std::size_t r2 = rank(G, D);
    sym.second_rank = static_cast<std::uint32_t>(r2);
    sym.j = static_cast<std::uint32_t>(std::min(k, k * c) - r2);
    return sym;
}

TBSymbol tb_symbol_at(const Section& s, std::uint32_t m, const std::vector<Code>& P) {
    return SectionEvaluator(s, m).symbol(P);
}

std::uint64_t StrataReport::count(std::uint32_t i, std::uint32_t j, std::uint32_t m) const {
    for (const auto& lv : levels)
        if (lv.m == m) {
            auto it = lv.counts.find({i, j});
            return it == lv.counts.end() ? 0 : it->second;
        }
    return 0;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> StrataReport::symbols() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (const auto& lv : levels)
        for (const auto& [sym, cnt] : lv.counts) out.push_back(sym);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

StrataReport strata_scan(const Section& s, const ScanOptions& opt) {
    require_scannable(s);
    if (opt.max_ext == 0) throw PreconditionError("max extension degree must be positive");
    StrataReport rep{s.spec, s.n, s.e, opt.max_ext, opt.budget, {}};
    std::uint64_t points = 0;
    for (std::uint32_t m = 1; m <= opt.max_ext; ++m) {
        std::uint64_t Qm = checked_pow(s.spec->size(), m);
        std::uint64_t pts = checked_pow(Qm, s.n);
        if (pts > opt.budget || points + pts > opt.budget)
            throw BudgetExceeded("scan of F_q^" + std::to_string(m) + " points exceeds the budget of " +
                                 std::to_string(opt.budget) + " points");
        points += pts;
    }
    for (std::uint32_t m = 1; m <= opt.max_ext; ++m) {
        LevelScan scan(s, m);
        std::vector<SymbolCounts> parts(std::max(1u, opt.threads));
        run_chunks(scan.lines(), opt.threads, [&](std::uint64_t t0, std::uint64_t t1, unsigned c) {
            if (opt.method == ScanMethod::Lines)
                scan.scan_lines(t0, t1, parts[c], nullptr);
            else
                scan.scan_points(t0, t1, parts[c]);
        });
        StrataLevel lv{m, checked_pow(scan.Q(), s.n), {}};
        for (const auto& part : parts)
            for (const auto& [sym, cnt] : part) lv.counts[sym] += cnt;
        rep.levels.push_back(std::move(lv));
    }
    return rep;
}

std::vector<CriticalPoint> critical_points(const Section& s, std::uint32_t m, std::uint64_t budget, unsigned threads) {
    require_scannable(s);
    if (checked_pow(checked_pow(s.spec->size(), m), s.n) > budget)
        throw BudgetExceeded("critical point search exceeds the budget of " + std::to_string(budget) + " points");
    LevelScan scan(s, m);
    threads = std::max(1u, threads);
    std::vector<SymbolCounts> counts(threads);
    std::vector<std::vector<CriticalPoint>> found(threads);
    run_chunks(scan.lines(), threads,
               [&](std::uint64_t t0, std::uint64_t t1, unsigned c) { scan.scan_lines(t0, t1, counts[c], &found[c]); });
    std::vector<CriticalPoint> out;
    for (auto& part : found) out.insert(out.end(), part.begin(), part.end());
    return out;
}

DimEstimate estimate_dim(std::uint64_t q, const std::vector<std::uint64_t>& counts) {
    DimEstimate est;
    est.M = static_cast<std::uint32_t>(counts.size());
    est.counts = counts;
    est.empty = std::all_of(counts.begin(), counts.end(), [](std::uint64_t c) { return c == 0; });
    if (counts.empty() || counts.back() == 0) return est;
    // Half-up rounding of log_q(c) / M: the largest d with q^{(2d-1)M} <= c^2.
    const unsigned __int128 c2 = static_cast<unsigned __int128>(counts.back()) * counts.back();
    int d = 0;
    while (true) {
        unsigned __int128 pw = 1;
        bool over = false;
        for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(2 * d + 1) * est.M; ++k) {
            pw *= q;
            if (pw > c2) {
                over = true;
                break;
            }
        }
        if (over) break;
        ++d;
    }
    est.dim = d;
    return est;
}

DimEstimate estimate_dim(const StrataReport& r, std::uint32_t i, std::uint32_t j) {
    std::vector<std::uint64_t> counts;
    for (const auto& lv : r.levels) counts.push_back(r.count(i, j, lv.m));
    return estimate_dim(r.spec->size(), counts);
}

Section sample_section(std::size_t n, std::size_t e, std::uint32_t d, const FieldSpec& spec, std::uint64_t seed,
                       bool second_order) {
    if (second_order && d < 2) throw PreconditionError("second-order experiments need degree >= 2");
    if (n == 0 || e == 0) throw PreconditionError("section needs n >= 1 and e >= 1");
    std::mt19937_64 rng(seed);
    const std::uint64_t q = spec->size();
    const std::uint64_t reject_below = (0 - q) % q;  // 2^64 mod q
    auto draw = [&] {
        while (true) {
            std::uint64_t r = rng();
            if (r >= reject_below) return r % q;
        }
    };
    const auto vars = Variables::standard(n);
    const auto monos = monomials_upto(n, d);
    std::vector<Polynomial> polys;
    for (std::size_t l = 0; l < e; ++l) {
        Polynomial p(spec, vars);
        for (const auto& mono : monos) p.add_term(mono, draw());
        polys.push_back(std::move(p));
    }
    Section s(spec, n, std::move(polys));
    s.d = std::max(s.d, d);
    return s;
}

std::vector<Polynomial> degeneracy_minors(const Section& s, std::size_t i) {
    const std::size_t mm = s.m();
    if (i > mm) throw PreconditionError("corank index exceeds min(n, e)");
    if (i == 0) return {};
    const std::size_t r = mm - i + 1;
    const auto vars = Variables::standard(s.n);
    std::vector<Polynomial> J;
    for (std::size_t l = 0; l < s.e; ++l)
        for (std::size_t b = 0; b < s.n; ++b) J.push_back(s.polys[l].partial(b));
    const Polynomial zero(s.spec, vars);
    std::vector<Polynomial> out;
    for (const auto& rows : subsets(s.e, r))
        for (const auto& cols : subsets(s.n, r))
            out.push_back(laplace<Polynomial>(
                rows, cols, [&](std::size_t a, std::size_t b) { return J[a * s.n + b]; },
                [](const Polynomial& a, const Polynomial& b) { return a * b; },
                [](const Polynomial& a, const Polynomial& b) { return a + b; },
                [](const Polynomial& a, const Polynomial& b) { return a - b; }, zero));
    return out;
}

}  // namespace charp
