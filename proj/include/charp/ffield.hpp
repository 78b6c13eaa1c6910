#pragma once

// Exact arithmetic in F_p and F_{p^k}.
//
// Elements are stored as a packed residue vector: code = c0 + c1*p + ... + c_{k-1}*p^{k-1}
// where c_i is the coefficient of w^i and w is a root of the field's modulus. "Least" for
// elements and polynomials always means least packed code, i.e. the coefficient vector
// compared from the highest-degree coefficient down.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "charp/error.hpp"

namespace charp {

using Code = std::uint64_t;

/// Largest field (q^m) any scan or enumeration may touch.
inline constexpr std::uint64_t kMaxFieldSize = std::uint64_t{1} << 40;

bool is_prime(std::uint64_t n);

class Field {
   public:
    Field(std::uint32_t p, std::uint32_t k);

    std::uint32_t p() const noexcept { return p_; }
    std::uint32_t k() const noexcept { return k_; }
    std::uint64_t size() const noexcept { return q_; }
    /// Coefficients c0..ck of the monic modulus (ck == 1). For k == 1 the modulus is x.
    const std::vector<std::uint64_t>& modulus() const noexcept { return modulus_; }

    Code from_int(std::int64_t v) const;
    Code add(Code a, Code b) const;
    Code sub(Code a, Code b) const;
    Code neg(Code a) const;
    Code mul(Code a, Code b) const;
    Code inv(Code a) const;
    Code pow(Code a, std::uint64_t e) const;
    Code frobenius(Code a) const { return pow(a, p_); }

    std::vector<std::uint64_t> digits(Code a) const;
    Code pack(std::span<const std::uint64_t> digits) const;

    /// Absolute trace to F_p (returned as an element of the prime field).
    Code trace(Code a) const;
    /// Least generator of the multiplicative group.
    Code primitive() const noexcept { return primitive_; }
    /// The modulus root w (code p); for prime fields the root of x, i.e. 0.
    Code root() const noexcept { return k_ == 1 ? 0 : p_; }

    /// Least r with r^2 == a, or nullopt when a is a non-square.
    std::optional<Code> sqrt(Code a) const;
    /// Least t with t^2 + t == c (characteristic 2 only), or nullopt when Tr(c) == 1.
    std::optional<Code> artin_schreier(Code c) const;

    std::string format(Code a) const;
    std::string literal() const;

    bool has_tables() const noexcept { return !exp_.empty(); }

   private:
    Code mul_slow(Code a, Code b) const;
    Code add_digits(Code a, Code b, bool subtract) const;
    void build_tables();
    Code find_primitive() const;

    std::uint32_t p_;
    std::uint32_t k_;
    std::uint64_t q_;
    std::vector<std::uint64_t> modulus_;
    Code primitive_ = 1;
    Code nonresidue_ = 0;
    // exp_[i] = g^i, log_[a] = i; present when q is small enough.
    std::vector<std::uint32_t> exp_;
    std::vector<std::uint32_t> log_;
    // Full addition table for small odd extension fields.
    std::vector<std::uint16_t> add_table_;
};

/// Shared immutable handle to a canonical field; equality is by (p, k).
class FieldSpec {
   public:
    FieldSpec() = default;
    explicit FieldSpec(std::shared_ptr<const Field> f) : f_(std::move(f)) {}

    /// Canonical F_{p^k} with the least monic irreducible modulus; cached per (p, k).
    static FieldSpec make(std::uint64_t p, std::uint64_t k);
    /// Parses a literal "p" or "p^k".
    static FieldSpec parse(std::string_view literal);

    const Field& operator*() const { return *f_; }
    const Field* operator->() const { return f_.get(); }
    const Field* get() const noexcept { return f_.get(); }
    explicit operator bool() const noexcept { return static_cast<bool>(f_); }

    /// F_{q^m} over the same prime.
    FieldSpec extension(std::uint32_t m) const;

    friend bool operator==(const FieldSpec& a, const FieldSpec& b) noexcept {
        if (a.f_ == b.f_) return true;
        if (!a.f_ || !b.f_) return false;
        return a.f_->p() == b.f_->p() && a.f_->k() == b.f_->k();
    }

   private:
    std::shared_ptr<const Field> f_;
};

class FqElement {
   public:
    FqElement() = default;
    FqElement(FieldSpec spec, Code code) : spec_(std::move(spec)), code_(code) {}
    static FqElement from_int(const FieldSpec& spec, std::int64_t v) { return {spec, spec->from_int(v)}; }
    static FqElement from_coeffs(const FieldSpec& spec, std::span<const std::uint64_t> coeffs);

    const FieldSpec& spec() const noexcept { return spec_; }
    Code code() const noexcept { return code_; }
    std::vector<std::uint64_t> coeffs() const { return spec_->digits(code_); }
    bool is_zero() const noexcept { return code_ == 0; }

    FqElement operator+(const FqElement& o) const;
    FqElement operator-(const FqElement& o) const;
    FqElement operator*(const FqElement& o) const;
    FqElement operator-() const { return {spec_, spec_->neg(code_)}; }
    FqElement inv() const;
    FqElement pow(std::uint64_t e) const { return {spec_, spec_->pow(code_, e)}; }

    friend bool operator==(const FqElement& a, const FqElement& b) noexcept {
        return a.code_ == b.code_ && a.spec_ == b.spec_;
    }

    std::string str() const { return spec_->format(code_); }

   private:
    FieldSpec spec_;
    Code code_ = 0;
};

std::optional<FqElement> fq_sqrt(const FqElement& a);
std::optional<FqElement> fq_artin_schreier(const FqElement& c);

/// Ring embedding F_q -> F_{q^m}: w maps to the least root of the base modulus in the extension.
class Embedding {
   public:
    Embedding(FieldSpec base, std::uint32_t m);

    const FieldSpec& base() const noexcept { return base_; }
    const FieldSpec& target() const noexcept { return target_; }
    Code operator()(Code a) const;

   private:
    FieldSpec base_;
    FieldSpec target_;
    std::vector<Code> powers_;  // images of w^0 .. w^{k-1}
};

FqElement fq_embed(const FqElement& a, std::uint32_t m);

/// All elements in increasing code order; refuses fields larger than `budget`.
std::vector<FqElement> enumerate(const FieldSpec& spec, std::uint64_t budget = std::uint64_t{1} << 24);

/// Parses an element literal such as "3", "1+w", "2*w^2+w" (w is the modulus root).
Code parse_element(const Field& f, std::string_view text);

}  // namespace charp
