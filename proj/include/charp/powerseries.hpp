#pragma once

// Truncated power series in k[[s_1..s_t, x_1..x_n]] and local automorphisms.
//
// A series lives in a SeriesContext (field, variable names, parameter count, truncation order D).
// Exponent vectors are packed into a mixed-radix key with radix D+1, the first variable being the
// most significant digit, so that key(a + b) == key(a) + key(b) whenever |a + b| <= D.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "charp/linalg.hpp"
#include "charp/polynomial.hpp"

namespace charp {

class SeriesContext;
using Context = std::shared_ptr<const SeriesContext>;

class SeriesContext {
   public:
    SeriesContext(FieldSpec field, Variables vars, std::size_t params, std::uint32_t D);

    /// Context over s1..s{params}, x1..x{n}.
    static Context make(FieldSpec field, std::size_t n, std::uint32_t D, std::size_t params = 0);
    static Context make(FieldSpec field, Variables vars, std::uint32_t D, std::size_t params = 0);

    const FieldSpec& field() const noexcept { return field_; }
    const Field& F() const noexcept { return *field_; }
    const Variables& vars() const noexcept { return vars_; }
    std::size_t nvars() const noexcept { return vars_.size(); }
    std::size_t params() const noexcept { return params_; }
    /// Number of non-parameter variables.
    std::size_t n() const noexcept { return vars_.size() - params_; }
    std::uint32_t D() const noexcept { return D_; }

    std::uint64_t place(std::size_t var) const noexcept { return place_[var]; }
    std::uint64_t key_bound() const noexcept { return bound_; }
    std::uint64_t key(const Exponent& e) const;
    Exponent exponent(std::uint64_t key) const;
    std::uint32_t exponent_of(std::uint64_t key, std::size_t var) const noexcept {
        return static_cast<std::uint32_t>((key / place_[var]) % (D_ + 1));
    }

    /// Same field and variables, different truncation order.
    Context with_order(std::uint32_t D) const;

    friend bool operator==(const SeriesContext& a, const SeriesContext& b) {
        return a.field_ == b.field_ && a.vars_ == b.vars_ && a.params_ == b.params_ && a.D_ == b.D_;
    }

   private:
    FieldSpec field_;
    Variables vars_;
    std::size_t params_;
    std::uint32_t D_;
    std::vector<std::uint64_t> place_;
    std::uint64_t bound_;
};

struct SeriesTerm {
    std::uint64_t key;
    std::uint32_t deg;
    Code c;
    friend bool operator==(const SeriesTerm&, const SeriesTerm&) = default;
};

class TruncatedSeries {
   public:
    TruncatedSeries() = default;
    explicit TruncatedSeries(Context ctx) : ctx_(std::move(ctx)) {}

    static TruncatedSeries constant(Context ctx, Code c);
    static TruncatedSeries variable(Context ctx, std::size_t var);
    static TruncatedSeries monomial(Context ctx, const Exponent& e, Code c);
    static TruncatedSeries from_polynomial(Context ctx, const Polynomial& p);
    static TruncatedSeries parse(std::string_view text, Context ctx);

    const Context& ctx() const noexcept { return ctx_; }
    const Field& F() const noexcept { return ctx_->F(); }
    /// Terms in canonical order: ascending degree, then descending key.
    const std::vector<SeriesTerm>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }
    /// Least degree of a stored term, or -1 for zero.
    int order() const noexcept { return terms_.empty() ? -1 : static_cast<int>(terms_.front().deg); }
    Code coeff(const Exponent& e) const;
    Code coeff_key(std::uint64_t key) const;
    Code constant_term() const;

    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator-(const TruncatedSeries& o) const;
    TruncatedSeries operator*(const TruncatedSeries& o) const;
    TruncatedSeries operator-() const;
    TruncatedSeries& operator+=(const TruncatedSeries& o) { return *this = *this + o; }
    TruncatedSeries scaled(Code c) const;
    /// Multiplication by the variable `var`.
    TruncatedSeries shifted(std::size_t var) const;

    TruncatedSeries partial(std::size_t var) const;
    /// Hasse derivative D^{(l)}_{var}: x^a -> binom(a, l) x^{a-l}.
    TruncatedSeries hasse(std::size_t var, std::uint32_t l) const;
    /// Terms whose degree lies in [lo, hi].
    TruncatedSeries degree_range(std::uint32_t lo, std::uint32_t hi) const;
    /// The same series in a context with another truncation order (terms above it are dropped).
    TruncatedSeries retruncated(const Context& target) const;

    Polynomial to_polynomial() const;
    std::string str() const;

    friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b);

   private:
    friend class SeriesBuilder;
    void require_same(const TruncatedSeries& o) const;

    Context ctx_;
    std::vector<SeriesTerm> terms_;
};

TruncatedSeries ts_parse(std::string_view text, std::size_t n, std::uint32_t D, const FieldSpec& spec);

/// Maps coefficients through `embed` into `target`, which must share variables and parameters.
TruncatedSeries ts_embed(const TruncatedSeries& f, const Context& target, const Embedding& embed);

/// All exponents over n variables with total degree <= r, in canonical ascending order.
std::vector<Exponent> monomials_upto(std::size_t n, std::uint32_t r);

/// A local automorphism x_i -> phi_i fixing the origin and every parameter variable.
class LocalAutomorphism {
   public:
    LocalAutomorphism() = default;
    /// Validates: one image per variable, zero constant terms, parameters fixed, invertible linear part.
    LocalAutomorphism(Context ctx, std::vector<TruncatedSeries> images);

    static LocalAutomorphism identity(Context ctx);
    /// Linear substitution x_i -> sum_j m(i, j) x_j on the non-parameter block.
    static LocalAutomorphism linear(Context ctx, const Matrix& m);

    const Context& ctx() const noexcept { return ctx_; }
    const std::vector<TruncatedSeries>& images() const noexcept { return images_; }
    const TruncatedSeries& image(std::size_t var) const { return images_.at(var); }
    /// Matrix of linear parts over all variables: entry (i, j) is the x_j coefficient of phi_i.
    Matrix linear_part() const;

    friend bool operator==(const LocalAutomorphism& a, const LocalAutomorphism& b) { return a.images_ == b.images_; }

   private:
    Context ctx_;
    std::vector<TruncatedSeries> images_;
};

/// f(phi_1, ..., phi_N), truncated at D.
TruncatedSeries aut_apply(const LocalAutomorphism& phi, const TruncatedSeries& f);
/// psi o phi, defined so that aut_apply(psi o phi, f) == aut_apply(psi, aut_apply(phi, f)).
LocalAutomorphism aut_compose(const LocalAutomorphism& psi, const LocalAutomorphism& phi);
/// psi with aut_apply(psi, aut_apply(phi, f)) == f up to truncation.
LocalAutomorphism aut_invert(const LocalAutomorphism& phi);

}  // namespace charp
