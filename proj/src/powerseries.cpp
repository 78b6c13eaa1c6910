#include "charp/powerseries.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace charp {

namespace {

constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 20;

bool canonical_less(const SeriesTerm& a, const SeriesTerm& b) {
    return a.deg != b.deg ? a.deg < b.deg : a.key > b.key;
}

// binom(a, l) mod p via a Pascal row; a stays below the truncation order.
std::uint64_t binom_mod(std::uint32_t a, std::uint32_t l, std::uint32_t p) {
    if (l > a) return 0;
    std::vector<std::uint64_t> row(l + 1, 0);
    row[0] = 1;
    for (std::uint32_t i = 1; i <= a; ++i)
        for (std::uint32_t j = std::min(i, l); j >= 1; --j) row[j] = (row[j] + row[j - 1]) % p;
    return row[l];
}

}  // namespace

// Accumulates (key, coefficient) contributions, then emits a canonical series.
class SeriesBuilder {
   public:
    // The dense scratch is per thread; a nested builder falls back to hashing.
    explicit SeriesBuilder(const Context& ctx)
        : ctx_(ctx), F_(ctx->F()), dense_(ctx->key_bound() <= kDenseLimit && !scratch().busy) {
        if (dense_) {
            auto& s = scratch();
            s.busy = true;
            if (s.acc.size() < ctx->key_bound()) {
                s.acc.resize(ctx->key_bound(), 0);
                s.seen.resize(ctx->key_bound(), 0);
            }
            s.touched.clear();
        }
    }

    void add(std::uint64_t key, std::uint32_t deg, Code c) {
        if (dense_) {
            auto& s = scratch();
            if (!s.seen[key]) {
                s.seen[key] = 1;
                s.touched.push_back({key, deg, 0});
            }
            s.acc[key] = F_.add(s.acc[key], c);
        } else {
            auto [it, inserted] = map_.try_emplace(key, deg, c);
            if (!inserted) it->second.second = F_.add(it->second.second, c);
        }
    }

    SeriesBuilder(const SeriesBuilder&) = delete;
    SeriesBuilder& operator=(const SeriesBuilder&) = delete;
    ~SeriesBuilder() {
        if (!dense_) return;
        auto& s = scratch();
        for (const auto& t : s.touched) {
            s.acc[t.key] = 0;
            s.seen[t.key] = 0;
        }
        s.touched.clear();
        s.busy = false;
    }

    TruncatedSeries finish() {
        TruncatedSeries out(ctx_);
        if (dense_) {
            auto& s = scratch();
            for (auto t : s.touched) {
                t.c = s.acc[t.key];
                s.acc[t.key] = 0;
                s.seen[t.key] = 0;
                if (t.c) out.terms_.push_back(t);
            }
            s.touched.clear();
            s.busy = false;
            dense_ = false;
        } else {
            for (const auto& [key, dc] : map_)
                if (dc.second) out.terms_.push_back({key, dc.first, dc.second});
        }
        std::sort(out.terms_.begin(), out.terms_.end(), canonical_less);
        return out;
    }

   private:
    struct Scratch {
        std::vector<Code> acc;
        std::vector<std::uint8_t> seen;
        std::vector<SeriesTerm> touched;
        bool busy = false;
    };
    static Scratch& scratch() {
        thread_local Scratch s;
        return s;
    }

    const Context& ctx_;
    const Field& F_;
    bool dense_;
    std::unordered_map<std::uint64_t, std::pair<std::uint32_t, Code>> map_;
};

SeriesContext::SeriesContext(FieldSpec field, Variables vars, std::size_t params, std::uint32_t D)
    : field_(std::move(field)), vars_(std::move(vars)), params_(params), D_(D) {
    if (!field_) throw PreconditionError("series context needs a field");
    if (params_ > vars_.size()) throw PreconditionError("more parameters than variables");
    if (D_ > 1024) throw PreconditionError("truncation order too large");
    const std::size_t N = vars_.size();
    place_.assign(N, 1);
    std::uint64_t acc = 1;
    const std::uint64_t radix = std::uint64_t{D_} + 1;
    for (std::size_t i = N; i-- > 0;) {
        place_[i] = acc;
        if (acc > (std::uint64_t{1} << 62) / radix)
            throw PreconditionError("truncation order " + std::to_string(D_) + " with " + std::to_string(N) +
                                    " variables exceeds the supported exponent range");
        acc *= radix;
    }
    bound_ = acc;
}

Context SeriesContext::make(FieldSpec field, std::size_t n, std::uint32_t D, std::size_t params) {
    return std::make_shared<const SeriesContext>(std::move(field), Variables::standard(n, params), params, D);
}

Context SeriesContext::make(FieldSpec field, Variables vars, std::uint32_t D, std::size_t params) {
    return std::make_shared<const SeriesContext>(std::move(field), std::move(vars), params, D);
}

Context SeriesContext::with_order(std::uint32_t D) const {
    return std::make_shared<const SeriesContext>(field_, vars_, params_, D);
}

std::uint64_t SeriesContext::key(const Exponent& e) const {
    if (e.size() != nvars()) throw PreconditionError("exponent length does not match the variable count");
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] > D_) throw PreconditionError("exponent exceeds the truncation order");
        k += e[i] * place_[i];
    }
    return k;
}

Exponent SeriesContext::exponent(std::uint64_t key) const {
    Exponent e(nvars());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = exponent_of(key, i);
    return e;
}

TruncatedSeries TruncatedSeries::constant(Context ctx, Code c) {
    TruncatedSeries s(std::move(ctx));
    if (c) s.terms_.push_back({0, 0, c});
    return s;
}

TruncatedSeries TruncatedSeries::variable(Context ctx, std::size_t var) {
    if (var >= ctx->nvars()) throw PreconditionError("variable index out of range");
    TruncatedSeries s(std::move(ctx));
    if (s.ctx_->D() >= 1) s.terms_.push_back({s.ctx_->place(var), 1, 1});
    return s;
}

TruncatedSeries TruncatedSeries::monomial(Context ctx, const Exponent& e, Code c) {
    TruncatedSeries s(std::move(ctx));
    const auto d = total_degree(e);
    if (c && d <= s.ctx_->D()) s.terms_.push_back({s.ctx_->key(e), d, c});
    return s;
}

TruncatedSeries TruncatedSeries::from_polynomial(Context ctx, const Polynomial& p) {
    if (!(p.field() == ctx->field()) || !(p.vars() == ctx->vars()))
        throw PreconditionError("polynomial ring does not match the series context");
    TruncatedSeries s(std::move(ctx));
    // Polynomial terms are already in canonical (graded, lex-descending) order.
    for (const auto& [e, c] : p.terms()) {
        const auto d = total_degree(e);
        if (d > s.ctx_->D()) break;
        s.terms_.push_back({s.ctx_->key(e), d, c});
    }
    return s;
}

TruncatedSeries TruncatedSeries::parse(std::string_view text, Context ctx) {
    return from_polynomial(ctx, Polynomial::parse(text, ctx->field(), ctx->vars()));
}

TruncatedSeries ts_parse(std::string_view text, std::size_t n, std::uint32_t D, const FieldSpec& spec) {
    return TruncatedSeries::parse(text, SeriesContext::make(spec, n, D));
}

TruncatedSeries ts_embed(const TruncatedSeries& f, const Context& target, const Embedding& embed) {
    if (!(embed.base() == f.ctx()->field()) || !(embed.target() == target->field()) ||
        !(target->vars() == f.ctx()->vars()) || target->params() != f.ctx()->params())
        throw PreconditionError("embedding does not match the series contexts");
    TruncatedSeries out(target);
    for (const auto& t : f.terms()) {
        if (t.deg > target->D()) break;
        out += TruncatedSeries::monomial(target, f.ctx()->exponent(t.key), embed(t.c));
    }
    return out;
}

std::vector<Exponent> monomials_upto(std::size_t n, std::uint32_t r) {
    std::vector<Exponent> out;
    Exponent e(n, 0);
    // Degree-d exponents in lexicographically descending order.
    std::function<void(std::size_t, std::uint32_t)> fill = [&](std::size_t i, std::uint32_t left) {
        if (i + 1 >= n) {
            if (n > 0) e[n - 1] = left;
            if (n > 0 || left == 0) out.push_back(e);
            return;
        }
        for (std::uint32_t a = left + 1; a-- > 0;) {
            e[i] = a;
            fill(i + 1, left - a);
        }
        e[i] = 0;
    };
    for (std::uint32_t d = 0; d <= r; ++d) fill(0, d);
    return out;
}

Code TruncatedSeries::coeff_key(std::uint64_t key) const {
    for (const auto& t : terms_)
        if (t.key == key) return t.c;
    return 0;
}

Code TruncatedSeries::coeff(const Exponent& e) const {
    const auto d = total_degree(e);
    if (d > ctx_->D()) return 0;
    const SeriesTerm probe{ctx_->key(e), d, 0};
    auto it = std::lower_bound(terms_.begin(), terms_.end(), probe, canonical_less);
    return (it != terms_.end() && it->key == probe.key) ? it->c : 0;
}

Code TruncatedSeries::constant_term() const { return (!terms_.empty() && terms_.front().deg == 0) ? terms_.front().c : 0; }

void TruncatedSeries::require_same(const TruncatedSeries& o) const {
    if (ctx_ == o.ctx_) return;
    if (!ctx_ || !o.ctx_ || !(*ctx_ == *o.ctx_)) throw PreconditionError("series live in different contexts");
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
    require_same(o);
    const Field& F = this->F();
    TruncatedSeries r(ctx_);
    r.terms_.reserve(terms_.size() + o.terms_.size());
    auto a = terms_.begin(), b = o.terms_.begin();
    while (a != terms_.end() || b != o.terms_.end()) {
        if (b == o.terms_.end() || (a != terms_.end() && canonical_less(*a, *b))) {
            r.terms_.push_back(*a++);
        } else if (a == terms_.end() || canonical_less(*b, *a)) {
            r.terms_.push_back(*b++);
        } else {
            const Code c = F.add(a->c, b->c);
            if (c) r.terms_.push_back({a->key, a->deg, c});
            ++a;
            ++b;
        }
    }
    return r;
}

TruncatedSeries TruncatedSeries::operator-() const {
    TruncatedSeries r = *this;
    for (auto& t : r.terms_) t.c = F().neg(t.c);
    return r;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const { return *this + (-o); }

TruncatedSeries TruncatedSeries::scaled(Code s) const {
    TruncatedSeries r(ctx_);
    if (s == 0) return r;
    r.terms_ = terms_;
    for (auto& t : r.terms_) t.c = F().mul(t.c, s);
    return r;
}

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const {
    require_same(o);
    if (terms_.empty() || o.terms_.empty()) return TruncatedSeries(ctx_);
    const Field& F = this->F();
    const std::uint32_t D = ctx_->D();
    SeriesBuilder acc(ctx_);
    for (const auto& a : terms_) {
        if (a.deg + o.terms_.front().deg > D) break;
        const std::uint32_t room = D - a.deg;
        for (const auto& b : o.terms_) {
            if (b.deg > room) break;
            acc.add(a.key + b.key, a.deg + b.deg, F.mul(a.c, b.c));
        }
    }
    return acc.finish();
}

TruncatedSeries TruncatedSeries::shifted(std::size_t var) const {
    TruncatedSeries r(ctx_);
    const auto step = ctx_->place(var);
    for (const auto& t : terms_) {
        if (t.deg >= ctx_->D()) break;
        r.terms_.push_back({t.key + step, t.deg + 1, t.c});
    }
    return r;
}

TruncatedSeries TruncatedSeries::partial(std::size_t var) const { return hasse(var, 1); }

TruncatedSeries TruncatedSeries::hasse(std::size_t var, std::uint32_t l) const {
    if (var >= ctx_->nvars()) throw PreconditionError("variable index out of range");
    if (l == 0) return *this;
    TruncatedSeries r(ctx_);
    const auto step = ctx_->place(var) * l;
    const std::uint32_t p = F().p();
    // Every surviving term loses the same key amount, so canonical order is preserved.
    for (const auto& t : terms_) {
        const std::uint32_t a = ctx_->exponent_of(t.key, var);
        if (a < l) continue;
        const std::uint64_t b = binom_mod(a, l, p);
        if (b == 0) continue;
        r.terms_.push_back({t.key - step, t.deg - l, F().mul(t.c, F().from_int(static_cast<std::int64_t>(b)))});
    }
    return r;
}

TruncatedSeries TruncatedSeries::degree_range(std::uint32_t lo, std::uint32_t hi) const {
    TruncatedSeries r(ctx_);
    for (const auto& t : terms_)
        if (t.deg >= lo && t.deg <= hi) r.terms_.push_back(t);
    return r;
}

TruncatedSeries TruncatedSeries::retruncated(const Context& target) const {
    if (!(target->field() == ctx_->field()) || !(target->vars() == ctx_->vars()) || target->params() != ctx_->params())
        throw PreconditionError("retruncation target has a different ring");
    TruncatedSeries r(target);
    // Graded lex order does not depend on the radix, so the order carries over.
    for (const auto& t : terms_) {
        if (t.deg > target->D()) break;
        r.terms_.push_back({target->key(ctx_->exponent(t.key)), t.deg, t.c});
    }
    return r;
}

Polynomial TruncatedSeries::to_polynomial() const {
    Polynomial p(ctx_->field(), ctx_->vars());
    for (const auto& t : terms_) p.add_term(ctx_->exponent(t.key), t.c);
    return p;
}

std::string TruncatedSeries::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& t : terms_) {
        if (!out.empty()) out += " + ";
        out += format_term(F(), ctx_->vars(), ctx_->exponent(t.key), t.c);
    }
    return out;
}

bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.ctx_ != b.ctx_ && (!a.ctx_ || !b.ctx_ || !(*a.ctx_ == *b.ctx_))) return false;
    return a.terms_ == b.terms_;
}

LocalAutomorphism::LocalAutomorphism(Context ctx, std::vector<TruncatedSeries> images)
    : ctx_(std::move(ctx)), images_(std::move(images)) {
    const std::size_t N = ctx_->nvars();
    if (images_.size() != N) throw PreconditionError("automorphism needs one image per variable");
    for (std::size_t i = 0; i < N; ++i) {
        if (!images_[i].ctx() || !(*images_[i].ctx() == *ctx_))
            throw PreconditionError("automorphism image lives in a different context");
        if (images_[i].constant_term() != 0) throw PreconditionError("automorphism image has a constant term");
        if (i < ctx_->params() && !(images_[i] == TruncatedSeries::variable(ctx_, i)))
            throw PreconditionError("automorphism must fix the parameter variables");
    }
    if (ctx_->D() >= 1 && rank(ctx_->F(), linear_part()) < N)
        throw PreconditionError("automorphism has a singular linear part");
}

LocalAutomorphism LocalAutomorphism::identity(Context ctx) {
    std::vector<TruncatedSeries> images;
    for (std::size_t i = 0; i < ctx->nvars(); ++i) images.push_back(TruncatedSeries::variable(ctx, i));
    return LocalAutomorphism(ctx, std::move(images));
}

LocalAutomorphism LocalAutomorphism::linear(Context ctx, const Matrix& m) {
    const std::size_t P = ctx->params(), n = ctx->n();
    if (m.rows() != n || m.cols() != n) throw PreconditionError("linear substitution matrix has the wrong size");
    std::vector<TruncatedSeries> images;
    for (std::size_t i = 0; i < P; ++i) images.push_back(TruncatedSeries::variable(ctx, i));
    for (std::size_t i = 0; i < n; ++i) {
        TruncatedSeries img(ctx);
        for (std::size_t j = 0; j < n; ++j) img += TruncatedSeries::variable(ctx, P + j).scaled(m(i, j));
        images.push_back(std::move(img));
    }
    return LocalAutomorphism(ctx, std::move(images));
}

Matrix LocalAutomorphism::linear_part() const {
    const std::size_t N = ctx_->nvars();
    Matrix m(N, N);
    for (std::size_t i = 0; i < N; ++i)
        for (const auto& t : images_[i].terms()) {
            if (t.deg > 1) break;
            if (t.deg == 1)
                for (std::size_t j = 0; j < N; ++j)
                    if (t.key == ctx_->place(j)) m(i, j) = t.c;
        }
    return m;
}

TruncatedSeries aut_apply(const LocalAutomorphism& phi, const TruncatedSeries& f) {
    const Context& ctx = phi.ctx();
    if (!f.ctx() || !(*f.ctx() == *ctx)) throw PreconditionError("series and automorphism live in different contexts");
    const std::size_t N = ctx->nvars();
    std::vector<bool> is_identity(N);
    for (std::size_t j = 0; j < N; ++j) is_identity[j] = phi.image(j) == TruncatedSeries::variable(ctx, j);

    // img(a) = img(a - e_j) * phi_j with j the last variable occurring in a.
    std::unordered_map<std::uint64_t, TruncatedSeries> memo;
    memo.emplace(0, TruncatedSeries::constant(ctx, 1));
    std::function<const TruncatedSeries&(std::uint64_t)> img = [&](std::uint64_t key) -> const TruncatedSeries& {
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        std::size_t j = N;
        while (ctx->exponent_of(key, j - 1) == 0) --j;
        --j;
        const TruncatedSeries& prev = img(key - ctx->place(j));
        TruncatedSeries next = is_identity[j] ? prev.shifted(j) : prev * phi.image(j);
        return memo.emplace(key, std::move(next)).first->second;
    };

    SeriesBuilder acc(ctx);
    for (const auto& t : f.terms()) {
        const TruncatedSeries& m = img(t.key);
        for (const auto& u : m.terms()) acc.add(u.key, u.deg, ctx->F().mul(t.c, u.c));
    }
    return acc.finish();
}

LocalAutomorphism aut_compose(const LocalAutomorphism& psi, const LocalAutomorphism& phi) {
    std::vector<TruncatedSeries> images;
    for (const auto& p : phi.images()) images.push_back(aut_apply(psi, p));
    return LocalAutomorphism(psi.ctx(), std::move(images));
}

LocalAutomorphism aut_invert(const LocalAutomorphism& phi) {
    const Context& ctx = phi.ctx();
    const Field& F = ctx->F();
    const std::size_t N = ctx->nvars();
    const auto Linv = inverse(F, phi.linear_part());
    if (!Linv) throw PreconditionError("automorphism has a singular linear part");

    // psi = L^{-1} (x - Nl(psi)) where Nl is the nonlinear part of phi; each pass fixes one more degree.
    std::vector<TruncatedSeries> nonlinear;
    for (const auto& p : phi.images()) nonlinear.push_back(p.degree_range(2, ctx->D()));
    auto combine = [&](const std::vector<TruncatedSeries>& rhs) {
        std::vector<TruncatedSeries> out;
        for (std::size_t i = 0; i < N; ++i) {
            TruncatedSeries s(ctx);
            for (std::size_t j = 0; j < N; ++j)
                if ((*Linv)(i, j)) s += rhs[j].scaled((*Linv)(i, j));
            out.push_back(std::move(s));
        }
        return out;
    };
    std::vector<TruncatedSeries> x;
    for (std::size_t j = 0; j < N; ++j) x.push_back(TruncatedSeries::variable(ctx, j));
    LocalAutomorphism psi(ctx, combine(x));
    for (std::uint32_t pass = 1; pass < ctx->D(); ++pass) {
        std::vector<TruncatedSeries> rhs;
        for (std::size_t j = 0; j < N; ++j) rhs.push_back(x[j] - aut_apply(psi, nonlinear[j]));
        LocalAutomorphism next(ctx, combine(rhs));
        if (next == psi) break;
        psi = std::move(next);
    }
    return psi;
}

}  // namespace charp
