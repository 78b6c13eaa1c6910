#pragma once

// Thom-Boardman symbols of polynomial sections s = (f_1..f_e) of the trivial rank-e bundle on affine n-space,
// and exhaustive point scans over F_{q^m}.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "charp/linalg.hpp"
#include "charp/polynomial.hpp"

namespace charp {

inline constexpr std::uint64_t kDefaultScanBudget = std::uint64_t{1} << 27;

struct Section {
    FieldSpec spec;
    std::size_t n = 0;
    std::size_t e = 0;
    std::vector<Polynomial> polys;
    std::uint32_t d = 0;

    Section() = default;
    /// Variables x1..xn; d is the largest degree among the polys.
    Section(FieldSpec spec, std::size_t n, std::vector<Polynomial> polys);
    static Section parse(const std::vector<std::string>& lines, const FieldSpec& spec, std::size_t n);

    std::size_t m() const noexcept { return n < e ? n : e; }
    std::vector<std::string> lines() const;
};

struct TBSymbol {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    std::uint32_t jac_rank = 0;
    std::uint32_t second_rank = 0;

    std::pair<std::uint32_t, std::uint32_t> key() const { return {i, j}; }
    friend bool operator==(const TBSymbol&, const TBSymbol&) = default;
};

/// Jacobian and Hessians of a section compiled over F_{q^m}.
class SectionEvaluator {
   public:
    SectionEvaluator(const Section& s, std::uint32_t m);

    const Section& section() const noexcept { return *s_; }
    const FieldSpec& target() const noexcept { return embed_.target(); }
    const Embedding& embedding() const noexcept { return embed_; }

    Code value(std::size_t l, const std::vector<Code>& P) const;
    /// e x n matrix of first partials.
    Matrix jacobian(const std::vector<Code>& P) const;
    /// n x n Hessian of f_l.
    Matrix hessian(std::size_t l, const std::vector<Code>& P) const;
    TBSymbol symbol(const std::vector<Code>& P) const;

   private:
    struct Term {
        Code c;
        Exponent e;
    };
    using Compiled = std::vector<Term>;
    Compiled compile(const Polynomial& p) const;
    Code eval(const Compiled& c, const std::vector<std::vector<Code>>& pw) const;
    std::vector<std::vector<Code>> powers(const std::vector<Code>& P) const;

    const Section* s_;
    Embedding embed_;
    std::vector<Compiled> f_;
    std::vector<Compiled> jac_;   // l * n + b
    std::vector<Compiled> hess_;  // (l * n + a) * n + b, filled for a <= b
};

/// Symbol at a point whose coordinates lie in F_{q^m} (codes of spec.extension(m)).
TBSymbol tb_symbol_at(const Section& s, std::uint32_t m, const std::vector<Code>& P);

using SymbolCounts = std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t>;

struct StrataLevel {
    std::uint32_t m = 0;
    std::uint64_t total = 0;  // q^{mn}
    SymbolCounts counts;
};

struct StrataReport {
    FieldSpec spec;
    std::size_t n = 0;
    std::size_t e = 0;
    std::uint32_t M = 0;
    std::uint64_t budget = 0;
    std::vector<StrataLevel> levels;

    std::uint64_t count(std::uint32_t i, std::uint32_t j, std::uint32_t m) const;
    /// Every symbol seen at some level, ascending.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> symbols() const;
};

enum class ScanMethod {
    Lines,       // per line in the last coordinate, only roots of the gcd of the maximal minors are inspected
    Exhaustive,  // tb_symbol_at at every point
};

struct ScanOptions {
    std::uint32_t max_ext = 1;
    std::uint64_t budget = kDefaultScanBudget;
    unsigned threads = 1;
    ScanMethod method = ScanMethod::Lines;
};

/// Tallies of tb_symbol_at over F_{q^m}^n for m = 1..max_ext. Throws BudgetExceeded when the total
/// number of points exceeds the budget.
StrataReport strata_scan(const Section& s, const ScanOptions& opt);

struct CriticalPoint {
    std::vector<Code> point;
    TBSymbol symbol;
};

/// Points of F_{q^m}^n with first index >= 1, in lexicographic code order.
std::vector<CriticalPoint> critical_points(const Section& s, std::uint32_t m,
                                           std::uint64_t budget = kDefaultScanBudget, unsigned threads = 1);

struct DimEstimate {
    bool empty = false;       // zero points at every level
    int dim = -1;             // -1 when the largest level has no points
    std::uint32_t M = 0;
    std::vector<std::uint64_t> counts;  // one per level
};

/// round(log_q count(M) / M), computed exactly with half-up rounding.
DimEstimate estimate_dim(std::uint64_t q, const std::vector<std::uint64_t>& counts);
DimEstimate estimate_dim(const StrataReport& r, std::uint32_t i, std::uint32_t j);

/// Coefficients of every monomial of degree <= d drawn uniformly from F_q with a seeded mt19937_64.
Section sample_section(std::size_t n, std::size_t e, std::uint32_t d, const FieldSpec& spec, std::uint64_t seed,
                       bool second_order = true);

/// All (m-i+1)-minors of the symbolic Jacobian; empty for i == 0.
std::vector<Polynomial> degeneracy_minors(const Section& s, std::size_t i);

}  // namespace charp
