#pragma once

// Exact sparse multivariate polynomials and the shared text grammar:
//
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := integer | 'w' | name | '(' expr ')'   each optionally followed by '^' integer
//
// `w` is the modulus root of the coefficient field; names are resolved through a Variables list
// (default: s1..sK for parameters, then x1..xN).

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "charp/ffield.hpp"

namespace charp {

using Exponent = std::vector<std::uint32_t>;

std::uint32_t total_degree(const Exponent& e);

/// Graded order used for all printing: lower degree first, then lexicographically larger first
/// (so x1^2 precedes x1*x2 precedes x2^2).
struct GradedOrder {
    bool operator()(const Exponent& a, const Exponent& b) const;
};

class Variables {
   public:
    Variables() = default;
    explicit Variables(std::vector<std::string> names);
    /// s1..s{params} followed by x1..x{xs}.
    static Variables standard(std::size_t xs, std::size_t params = 0);

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    /// Index of `name`, or -1.
    long find(std::string_view name) const;
    friend bool operator==(const Variables& a, const Variables& b) { return a.names_ == b.names_; }

   private:
    std::vector<std::string> names_;
};

class Polynomial {
   public:
    using Terms = std::map<Exponent, Code, GradedOrder>;

    Polynomial() = default;
    Polynomial(FieldSpec field, Variables vars) : field_(std::move(field)), vars_(std::move(vars)) {}

    static Polynomial constant(FieldSpec field, Variables vars, Code c);
    static Polynomial variable(FieldSpec field, Variables vars, std::size_t i);
    static Polynomial parse(std::string_view text, FieldSpec field, Variables vars);

    const FieldSpec& field() const noexcept { return field_; }
    const Variables& vars() const noexcept { return vars_; }
    std::size_t nvars() const noexcept { return vars_.size(); }
    const Terms& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    /// Total degree; -1 for the zero polynomial.
    int degree() const;
    Code coeff(const Exponent& e) const;

    /// Adds c * x^e (dropping the term if the sum vanishes).
    void add_term(const Exponent& e, Code c);

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator-() const;
    Polynomial scaled(Code c) const;
    Polynomial pow(std::uint32_t e) const;
    Polynomial partial(std::size_t i) const;

    /// Value at a point whose coordinates live in `target`; coefficients are mapped by `embed`.
    Code evaluate(const Embedding& embed, const std::vector<Code>& point) const;
    /// Value at a point over the polynomial's own field.
    Code evaluate(const std::vector<Code>& point) const;

    std::string str() const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.field_ == b.field_ && a.vars_ == b.vars_ && a.terms_ == b.terms_;
    }

   private:
    void require_compatible(const Polynomial& o) const;

    FieldSpec field_;
    Variables vars_;
    Terms terms_;
};

/// Renders a coefficient/monomial pair in canonical form ("3*x1^2", "(1+w)*x2", "x1").
std::string format_term(const Field& f, const Variables& vars, const Exponent& e, Code c);

}  // namespace charp
