#include "charp/polynomial.hpp"

#include <cctype>
#include <numeric>

namespace charp {

std::uint32_t total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), std::uint32_t{0}); }

bool GradedOrder::operator()(const Exponent& a, const Exponent& b) const {
    const auto da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return b < a;
}

Variables::Variables(std::vector<std::string> names) : names_(std::move(names)) {}

Variables Variables::standard(std::size_t xs, std::size_t params) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= params; ++i) names.push_back("s" + std::to_string(i));
    for (std::size_t i = 1; i <= xs; ++i) names.push_back("x" + std::to_string(i));
    return Variables(std::move(names));
}

long Variables::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<long>(i);
    return -1;
}

Polynomial Polynomial::constant(FieldSpec field, Variables vars, Code c) {
    Polynomial r(std::move(field), std::move(vars));
    r.add_term(Exponent(r.nvars(), 0), c);
    return r;
}

Polynomial Polynomial::variable(FieldSpec field, Variables vars, std::size_t i) {
    Polynomial r(std::move(field), std::move(vars));
    Exponent e(r.nvars(), 0);
    e.at(i) = 1;
    r.add_term(e, 1);
    return r;
}

int Polynomial::degree() const {
    if (terms_.empty()) return -1;
    return static_cast<int>(total_degree(terms_.rbegin()->first));
}

Code Polynomial::coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0 : it->second;
}

void Polynomial::add_term(const Exponent& e, Code c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (inserted) return;
    it->second = field_->add(it->second, c);
    if (it->second == 0) terms_.erase(it);
}

void Polynomial::require_compatible(const Polynomial& o) const {
    if (!(field_ == o.field_) || !(vars_ == o.vars_)) throw PreconditionError("polynomials live in different rings");
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    require_compatible(o);
    Polynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator-() const {
    Polynomial r(field_, vars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, field_->neg(c));
    return r;
}

Polynomial Polynomial::scaled(Code s) const {
    Polynomial r(field_, vars_);
    if (s == 0) return r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, field_->mul(c, s));
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    require_compatible(o);
    Polynomial r(field_, vars_);
    Exponent sum(nvars());
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = ea[i] + eb[i];
            r.add_term(sum, field_->mul(ca, cb));
        }
    }
    return r;
}

Polynomial Polynomial::pow(std::uint32_t e) const {
    Polynomial r = constant(field_, vars_, 1);
    for (std::uint32_t i = 0; i < e; ++i) r = r * *this;
    return r;
}

Polynomial Polynomial::partial(std::size_t i) const {
    if (i >= nvars()) throw PreconditionError("variable index out of range");
    Polynomial r(field_, vars_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        Exponent d = e;
        d[i] -= 1;
        r.add_term(d, field_->mul(c, field_->from_int(e[i])));
    }
    return r;
}

Code Polynomial::evaluate(const Embedding& embed, const std::vector<Code>& point) const {
    const Field& T = *embed.target();
    Code acc = 0;
    for (const auto& [e, c] : terms_) {
        Code v = embed(c);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i]) v = T.mul(v, T.pow(point[i], e[i]));
        acc = T.add(acc, v);
    }
    return acc;
}

Code Polynomial::evaluate(const std::vector<Code>& point) const { return evaluate(Embedding(field_, 1), point); }

std::string format_term(const Field& f, const Variables& vars, const Exponent& e, Code c) {
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += vars.name(i);
        if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    const std::string coeff = f.format(c);
    if (mono.empty()) return coeff;
    if (c == 1) return mono;
    if (coeff.find('+') != std::string::npos) return "(" + coeff + ")*" + mono;
    return coeff + "*" + mono;
}

std::string Polynomial::str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [e, c] : terms_) {
        if (!out.empty()) out += " + ";
        out += format_term(*field_, vars_, e, c);
    }
    return out;
}

namespace {

class Parser {
   public:
    Parser(std::string_view text, FieldSpec field, Variables vars)
        : text_(text), field_(std::move(field)), vars_(std::move(vars)) {}

    Polynomial run() {
        Polynomial r = expr();
        skip();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return r;
    }

   private:
    [[noreturn]] void fail(const std::string& what) const {
        throw PreconditionError("cannot parse '" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " +
                                what);
    }
    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool accept(char ch) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::uint64_t integer() {
        skip();
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) fail("expected integer");
        std::uint64_t v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            if (v > (std::uint64_t{1} << 56)) fail("integer too large");
            v = v * 10 + static_cast<std::uint64_t>(text_[pos_] - '0');
            ++pos_;
        }
        return v;
    }

    Polynomial expr() {
        Polynomial acc(field_, vars_);
        bool first = true;
        while (true) {
            skip();
            bool negate = false;
            if (accept('+')) {
            } else if (accept('-')) {
                negate = true;
            } else if (!first) {
                break;
            }
            first = false;
            Polynomial t = term();
            acc = negate ? acc - t : acc + t;
        }
        return acc;
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (accept('*')) acc = acc * factor();
        return acc;
    }

    Polynomial factor() {
        skip();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        Polynomial base(field_, vars_);
        const char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            base = expr();
            if (!accept(')')) fail("expected ')'");
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            const std::uint64_t v = integer();
            base = Polynomial::constant(field_, vars_, field_->from_int(static_cast<std::int64_t>(v % field_->p())));
        } else if (std::isalpha(static_cast<unsigned char>(ch))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            const std::string_view name = text_.substr(start, pos_ - start);
            const long idx = vars_.find(name);
            if (idx >= 0) {
                base = Polynomial::variable(field_, vars_, static_cast<std::size_t>(idx));
            } else if (name == "w") {
                if (field_->k() == 1) fail("'w' is not defined over a prime field");
                base = Polynomial::constant(field_, vars_, field_->root());
            } else {
                pos_ = start;
                fail("unknown variable '" + std::string(name) + "'");
            }
        } else {
            fail("unexpected '" + std::string(1, ch) + "'");
        }
        if (accept('^')) {
            const std::uint64_t e = integer();
            if (e > 4096) fail("exponent too large");
            base = base.pow(static_cast<std::uint32_t>(e));
        }
        return base;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    FieldSpec field_;
    Variables vars_;
};

}  // namespace

Polynomial Polynomial::parse(std::string_view text, FieldSpec field, Variables vars) {
    return Parser(text, std::move(field), std::move(vars)).run();
}

}  // namespace charp
