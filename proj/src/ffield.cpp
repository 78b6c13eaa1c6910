#include "charp/ffield.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <sstream>

namespace charp {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

// Dense polynomials over F_p, lowest coefficient first, no trailing zeros.
using PPoly = std::vector<u64>;

void trim(PPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

u64 inv_mod(u64 a, u64 p) {
    // p prime: a^(p-2)
    u64 r = 1, b = a % p, e = p - 2;
    while (e) {
        if (e & 1) r = mulmod(r, b, p);
        b = mulmod(b, b, p);
        e >>= 1;
    }
    return r;
}

PPoly poly_mod(PPoly a, const PPoly& m, u64 p) {
    trim(a);
    const std::size_t dm = m.size() - 1;
    const u64 lead_inv = inv_mod(m.back(), p);
    while (a.size() >= m.size()) {
        const u64 c = mulmod(a.back(), lead_inv, p);
        const std::size_t shift = a.size() - 1 - dm;
        for (std::size_t i = 0; i <= dm; ++i) {
            a[shift + i] = (a[shift + i] + p - mulmod(c, m[i], p)) % p;
        }
        trim(a);
    }
    return a;
}

PPoly poly_mulmod(const PPoly& a, const PPoly& b, const PPoly& m, u64 p) {
    if (a.empty() || b.empty()) return {};
    PPoly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
    }
    return poly_mod(std::move(r), m, p);
}

PPoly poly_powmod(PPoly base, u64 e, const PPoly& m, u64 p) {
    PPoly r{1};
    base = poly_mod(std::move(base), m, p);
    while (e) {
        if (e & 1) r = poly_mulmod(r, base, m, p);
        base = poly_mulmod(base, base, m, p);
        e >>= 1;
    }
    return r;
}

PPoly poly_gcd(PPoly a, PPoly b, u64 p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        PPoly r = poly_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

std::vector<u64> prime_factors(u64 n) {
    std::vector<u64> out;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// Rabin's test for a monic polynomial of degree k over F_p.
bool is_irreducible(const PPoly& g, u64 p) {
    const u64 k = g.size() - 1;
    if (k == 1) return true;
    if (g[0] == 0) return false;
    const PPoly x{0, 1};
    auto frob_iter = [&](u64 times) {
        PPoly r = x;
        for (u64 i = 0; i < times; ++i) r = poly_powmod(r, p, g, p);
        return r;
    };
    PPoly full = frob_iter(k);
    if (full != poly_mod(x, g, p)) return false;
    for (u64 ell : prime_factors(k)) {
        PPoly h = frob_iter(k / ell);
        h.resize(std::max<std::size_t>(h.size(), 2), 0);
        h[1] = (h[1] + p - 1) % p;
        trim(h);
        PPoly d = poly_gcd(g, h, p);
        if (d.size() != 1) return false;
    }
    return true;
}

PPoly least_irreducible(u64 p, u64 k) {
    if (k == 1) return {0, 1};
    u64 total = 1;
    for (u64 i = 0; i < k; ++i) total *= p;
    for (u64 code = 0; code < total; ++code) {
        if (code % p == 0) continue;  // constant term must be nonzero
        PPoly g(k + 1, 0);
        u64 c = code;
        for (u64 i = 0; i < k; ++i) {
            g[i] = c % p;
            c /= p;
        }
        g[k] = 1;
        if (is_irreducible(g, p)) return g;
    }
    throw PreconditionError("no irreducible polynomial found");
}

constexpr u64 kTableLimit = u64{1} << 20;
constexpr u64 kAddTableLimit = 1024;

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

Field::Field(std::uint32_t p, std::uint32_t k) : p_(p), k_(k) {
    if (!is_prime(p)) throw PreconditionError("characteristic " + std::to_string(p) + " is not prime");
    if (k == 0) throw PreconditionError("extension degree must be positive");
    u128 q = 1;
    for (std::uint32_t i = 0; i < k; ++i) {
        q *= p;
        if (q > kMaxFieldSize) throw PreconditionError("field " + literal() + " exceeds the size cap 2^40");
    }
    q_ = static_cast<u64>(q);
    modulus_ = least_irreducible(p, k);
    if (q_ <= kTableLimit) build_tables();
    primitive_ = has_tables() ? exp_[1] : find_primitive();
    if (p_ != 2) {
        for (Code z = 2; z < q_; ++z) {
            if (pow(z, (q_ - 1) / 2) != 1) {
                nonresidue_ = z;
                break;
            }
        }
    }
    if (p_ != 2 && k_ > 1 && q_ <= kAddTableLimit) {
        add_table_.resize(q_ * q_);
        for (Code a = 0; a < q_; ++a)
            for (Code b = 0; b < q_; ++b) add_table_[a * q_ + b] = static_cast<std::uint16_t>(add_digits(a, b, false));
    }
}

Code Field::find_primitive() const {
    if (q_ == 2) return 1;
    const auto factors = prime_factors(q_ - 1);
    for (Code g = 2; g < q_; ++g) {
        bool ok = true;
        for (u64 ell : factors) {
            if (pow(g, (q_ - 1) / ell) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    return 1;
}

void Field::build_tables() {
    const Code g = find_primitive();
    const u64 order = q_ - 1;
    exp_.assign(2 * order + 1, 0);
    log_.assign(q_, 0);
    Code x = 1;
    for (u64 i = 0; i < order; ++i) {
        exp_[i] = static_cast<std::uint32_t>(x);
        log_[x] = static_cast<std::uint32_t>(i);
        x = mul_slow(x, g);
    }
    for (u64 i = order; i < exp_.size(); ++i) exp_[i] = exp_[i - order];
}

Code Field::from_int(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<Code>(r);
}

std::vector<std::uint64_t> Field::digits(Code a) const {
    std::vector<u64> d(k_, 0);
    for (std::uint32_t i = 0; i < k_; ++i) {
        d[i] = a % p_;
        a /= p_;
    }
    return d;
}

Code Field::pack(std::span<const std::uint64_t> d) const {
    Code c = 0;
    for (std::size_t i = d.size(); i-- > 0;) c = c * p_ + d[i] % p_;
    return c;
}

Code Field::add_digits(Code a, Code b, bool subtract) const {
    Code r = 0, place = 1;
    for (std::uint32_t i = 0; i < k_; ++i) {
        const u64 x = a % p_, y = b % p_;
        a /= p_;
        b /= p_;
        const u64 s = subtract ? (x + p_ - y) % p_ : (x + y) % p_;
        r += s * place;
        place *= p_;
    }
    return r;
}

Code Field::add(Code a, Code b) const {
    if (p_ == 2) return a ^ b;
    if (k_ == 1) {
        const u64 s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    if (!add_table_.empty()) return add_table_[a * q_ + b];
    return add_digits(a, b, false);
}

Code Field::sub(Code a, Code b) const {
    if (p_ == 2) return a ^ b;
    if (k_ == 1) return a >= b ? a - b : a + p_ - b;
    return add_digits(a, b, true);
}

Code Field::neg(Code a) const { return sub(0, a); }

Code Field::mul_slow(Code a, Code b) const {
    if (k_ == 1) return mulmod(a, b, p_);
    const auto da = digits(a), db = digits(b);
    std::vector<u64> r(2 * k_ - 1, 0);
    for (std::uint32_t i = 0; i < k_; ++i) {
        if (da[i] == 0) continue;
        for (std::uint32_t j = 0; j < k_; ++j) r[i + j] = (r[i + j] + mulmod(da[i], db[j], p_)) % p_;
    }
    for (std::size_t d = r.size() - 1; d >= k_; --d) {
        const u64 c = r[d];
        if (c == 0) continue;
        r[d] = 0;
        for (std::uint32_t i = 0; i < k_; ++i)
            r[d - k_ + i] = (r[d - k_ + i] + p_ - mulmod(c, modulus_[i], p_)) % p_;
    }
    r.resize(k_);
    return pack(r);
}

Code Field::mul(Code a, Code b) const {
    if (a == 0 || b == 0) return 0;
    if (k_ == 1 && p_ < (1u << 31)) return a * b % p_;
    if (!exp_.empty()) return exp_[log_[a] + log_[b]];
    return mul_slow(a, b);
}

Code Field::pow(Code a, std::uint64_t e) const {
    if (e == 0) return 1;
    if (a == 0) return 0;
    if (!exp_.empty()) {
        const u64 order = q_ - 1;
        const u64 l = static_cast<u64>(static_cast<u128>(log_[a]) * (e % order) % order);
        return exp_[l];
    }
    Code r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Code Field::inv(Code a) const {
    if (a == 0) throw PreconditionError("inverse of zero");
    if (!exp_.empty()) return exp_[(q_ - 1) - log_[a]];
    return pow(a, q_ - 2);
}

Code Field::trace(Code a) const {
    Code t = 0, x = a;
    for (std::uint32_t i = 0; i < k_; ++i) {
        t = add(t, x);
        x = frobenius(x);
    }
    return t;
}

std::optional<Code> Field::sqrt(Code a) const {
    if (a == 0) return Code{0};
    if (p_ == 2) return pow(a, q_ / 2);
    if (pow(a, (q_ - 1) / 2) != 1) return std::nullopt;
    // Tonelli-Shanks
    u64 Q = q_ - 1, S = 0;
    while (Q % 2 == 0) {
        Q /= 2;
        ++S;
    }
    u64 M = S;
    Code c = pow(nonresidue_, Q);
    Code t = pow(a, Q);
    Code R = pow(a, (Q + 1) / 2);
    while (t != 1) {
        u64 i = 0;
        Code tt = t;
        while (tt != 1) {
            tt = mul(tt, tt);
            ++i;
        }
        Code b = c;
        for (u64 j = 0; j + i + 1 < M; ++j) b = mul(b, b);
        M = i;
        c = mul(b, b);
        t = mul(t, c);
        R = mul(R, b);
    }
    return std::min(R, neg(R));
}

std::optional<Code> Field::artin_schreier(Code c) const {
    if (p_ != 2) throw PreconditionError("Artin-Schreier solving needs characteristic 2");
    // t -> t^2 + t is F_2-linear; reduce c against the images of the basis w^i.
    std::vector<std::pair<u64, u64>> basis;  // (image, combination), pivot = highest bit
    for (std::uint32_t i = 0; i < k_; ++i) {
        const Code wi = Code{1} << i;
        u64 img = add(mul(wi, wi), wi);
        u64 comb = wi;
        for (const auto& [v, cb] : basis) {
            if (img & (u64{1} << (63 - __builtin_clzll(v)))) {
                img ^= v;
                comb ^= cb;
            }
        }
        if (img == 0) continue;
        // keep basis sorted by pivot descending so reduction is a single pass
        basis.emplace_back(img, comb);
        std::sort(basis.begin(), basis.end(), [](auto x, auto y) { return x.first > y.first; });
    }
    u64 rest = c, t = 0;
    for (const auto& [v, cb] : basis) {
        if (rest & (u64{1} << (63 - __builtin_clzll(v)))) {
            rest ^= v;
            t ^= cb;
        }
    }
    if (rest != 0) return std::nullopt;
    return std::min(t, t ^ 1);
}

std::string Field::format(Code a) const {
    if (k_ == 1) return std::to_string(a);
    if (a == 0) return "0";
    const auto d = digits(a);
    std::string out;
    for (std::uint32_t i = 0; i < k_; ++i) {
        if (d[i] == 0) continue;
        if (!out.empty()) out += "+";
        if (i == 0) {
            out += std::to_string(d[i]);
            continue;
        }
        if (d[i] != 1) out += std::to_string(d[i]) + "*";
        out += "w";
        if (i > 1) out += "^" + std::to_string(i);
    }
    return out;
}

std::string Field::literal() const {
    return k_ == 1 ? std::to_string(p_) : std::to_string(p_) + "^" + std::to_string(k_);
}

FieldSpec FieldSpec::make(std::uint64_t p, std::uint64_t k) {
    static std::mutex mu;
    static std::map<std::pair<u64, u64>, std::shared_ptr<const Field>> cache;
    if (p > 0xffffffffULL || k == 0 || k > 64) throw PreconditionError("field parameters out of range");
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{p, k}];
    if (!slot) slot = std::make_shared<const Field>(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(k));
    return FieldSpec(slot);
}

FieldSpec FieldSpec::parse(std::string_view lit) {
    auto bad = [&] { return PreconditionError("malformed field literal '" + std::string(lit) + "'"); };
    auto to_u64 = [&](std::string_view s) {
        if (s.empty() || s.size() > 12) throw bad();
        u64 v = 0;
        for (char ch : s) {
            if (!std::isdigit(static_cast<unsigned char>(ch))) throw bad();
            v = v * 10 + static_cast<u64>(ch - '0');
        }
        return v;
    };
    const auto caret = lit.find('^');
    if (caret == std::string_view::npos) return make(to_u64(lit), 1);
    return make(to_u64(lit.substr(0, caret)), to_u64(lit.substr(caret + 1)));
}

FieldSpec FieldSpec::extension(std::uint32_t m) const {
    if (m == 0) throw PreconditionError("extension degree must be positive");
    return make(f_->p(), static_cast<u64>(f_->k()) * m);
}

FqElement FqElement::from_coeffs(const FieldSpec& spec, std::span<const std::uint64_t> coeffs) {
    if (coeffs.size() != spec->k()) throw PreconditionError("coefficient vector length must equal k");
    for (u64 c : coeffs)
        if (c >= spec->p()) throw PreconditionError("coefficient out of range");
    return {spec, spec->pack(coeffs)};
}

namespace {
void require_same(const FieldSpec& a, const FieldSpec& b) {
    if (!(a == b)) throw PreconditionError("mixed fields " + a->literal() + " and " + b->literal());
}
}  // namespace

FqElement FqElement::operator+(const FqElement& o) const {
    require_same(spec_, o.spec_);
    return {spec_, spec_->add(code_, o.code_)};
}
FqElement FqElement::operator-(const FqElement& o) const {
    require_same(spec_, o.spec_);
    return {spec_, spec_->sub(code_, o.code_)};
}
FqElement FqElement::operator*(const FqElement& o) const {
    require_same(spec_, o.spec_);
    return {spec_, spec_->mul(code_, o.code_)};
}
FqElement FqElement::inv() const { return {spec_, spec_->inv(code_)}; }

std::optional<FqElement> fq_sqrt(const FqElement& a) {
    auto r = a.spec()->sqrt(a.code());
    if (!r) return std::nullopt;
    return FqElement(a.spec(), *r);
}

std::optional<FqElement> fq_artin_schreier(const FqElement& c) {
    auto r = c.spec()->artin_schreier(c.code());
    if (!r) return std::nullopt;
    return FqElement(c.spec(), *r);
}

Embedding::Embedding(FieldSpec base, std::uint32_t m) : base_(std::move(base)), target_(base_.extension(m)) {
    static std::mutex mu;
    static std::map<std::tuple<u64, u64, u64>, std::vector<Code>> cache;
    const Field& B = *base_;
    const Field& T = *target_;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find({B.p(), B.k(), m});
        if (it != cache.end()) {
            powers_ = it->second;
            return;
        }
    }
    std::vector<Code> powers{1};
    u64 ell = m;
    for (u64 c = 2; c < m; ++c)
        if (m % c == 0) {
            ell = c;
            break;
        }
    if (B.k() > 1 && ell < m) {
        // Composite degree: go through the intermediate field of degree ell so that
        // towers built from prime steps agree with the direct embedding.
        Embedding first(base_, static_cast<std::uint32_t>(ell));
        Embedding second(first.target(), static_cast<std::uint32_t>(m / ell));
        for (std::uint32_t i = 1; i < B.k(); ++i) powers.push_back(second(first(B.pow(B.root(), i))));
    } else if (B.k() > 1) {
        // Roots of the base modulus lie in the subfield of size q, generated by gamma^((Q-1)/(q-1)).
        const Code beta = T.pow(T.primitive(), (T.size() - 1) / (B.size() - 1));
        const auto& g = B.modulus();
        Code best = 0;
        bool found = false;
        Code x = 1;
        for (u64 t = 0; t + 1 < B.size(); ++t, x = T.mul(x, beta)) {
            Code val = 0;
            for (std::size_t i = g.size(); i-- > 0;) val = T.add(T.mul(val, x), g[i]);
            if (val == 0 && (!found || x < best)) {
                best = x;
                found = true;
            }
        }
        if (!found) throw PreconditionError("embedding: modulus has no root in the extension");
        for (std::uint32_t i = 1; i < B.k(); ++i) powers.push_back(T.mul(powers.back(), best));
    }
    std::lock_guard<std::mutex> lock(mu);
    cache[{B.p(), B.k(), m}] = powers;
    powers_ = std::move(powers);
}

Code Embedding::operator()(Code a) const {
    const Field& B = *base_;
    const Field& T = *target_;
    if (B.k() == 1) return a;
    Code r = 0;
    for (std::uint32_t i = 0; i < B.k(); ++i) {
        const u64 d = a % B.p();
        a /= B.p();
        if (d) r = T.add(r, T.mul(d, powers_[i]));
    }
    return r;
}

FqElement fq_embed(const FqElement& a, std::uint32_t m) {
    Embedding e(a.spec(), m);
    return {e.target(), e(a.code())};
}

std::vector<FqElement> enumerate(const FieldSpec& spec, std::uint64_t budget) {
    if (spec->size() > budget) throw BudgetExceeded("field " + spec->literal() + " exceeds the enumeration budget");
    std::vector<FqElement> out;
    out.reserve(spec->size());
    for (Code c = 0; c < spec->size(); ++c) out.emplace_back(spec, c);
    return out;
}

Code parse_element(const Field& f, std::string_view text) {
    // sum of signed terms; term = product of integers and w^e
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto number = [&]() -> u64 {
        skip();
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            throw PreconditionError("malformed coefficient '" + std::string(text) + "'");
        u64 v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = (v * 10 + static_cast<u64>(text[pos] - '0')) % f.p();
            ++pos;
        }
        return v;
    };
    Code total = 0;
    bool first = true;
    skip();
    if (pos == text.size()) throw PreconditionError("empty coefficient");
    while (true) {
        skip();
        bool negate = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            negate = text[pos] == '-';
            ++pos;
        } else if (!first) {
            break;
        }
        first = false;
        Code term = 1;
        while (true) {
            skip();
            if (pos < text.size() && text[pos] == 'w') {
                ++pos;
                u64 e = 1;
                skip();
                if (pos < text.size() && text[pos] == '^') {
                    ++pos;
                    e = number();
                    skip();
                }
                if (f.k() == 1) throw PreconditionError("'w' is not defined over a prime field");
                term = f.mul(term, f.pow(f.root(), e));
            } else {
                term = f.mul(term, number());
            }
            skip();
            if (pos < text.size() && text[pos] == '*') {
                ++pos;
                continue;
            }
            break;
        }
        total = negate ? f.sub(total, term) : f.add(total, term);
    }
    skip();
    if (pos != text.size()) throw PreconditionError("malformed coefficient '" + std::string(text) + "'");
    return total;
}

}  // namespace charp
