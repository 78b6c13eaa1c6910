#pragma once

// Codimensions of Thom-Boardman loci of general sections, the exception tables, and the arithmetic
// criteria for very general complete intersections not to be ruled.
//
// Every inequality is evaluated in integers after clearing denominators.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "charp/error.hpp"

namespace charp {

struct CodimQuery {
    std::uint32_t n = 0;
    std::uint32_t e = 0;
    std::uint32_t i = 0;
    std::optional<std::uint32_t> j;
    bool char2 = false;
};

/// i(|n-e|+i) + j(n-m+i-j)(e-m+i-1) + j(j+-1)(e-m+i)/2, "-" in characteristic 2; without j only the first term.
std::int64_t codim_tb(const CodimQuery& q);

using PairSet = std::set<std::pair<std::uint32_t, std::uint32_t>>;

struct ExceptionSets {
    PairSet E_prime;
    PairSet E_doubleprime;

    /// E' for odd p, E' together with E'' for p = 2.
    PairSet for_prime(std::uint64_t p) const;
    bool contains(std::uint64_t p, std::uint32_t a, std::uint32_t b) const { return for_prime(p).count({a, b}) > 0; }
};

const ExceptionSets& exception_sets();

/// The pairs (e, n) with e <= n-1 and 2e <= n+3 for which delta + 1 + (delta-1)(delta-1 +- 1)/2 <= n,
/// delta = n - e, over the given range of n. These are the pairs the tables must contain.
PairSet derived_exceptions(bool char2, std::uint32_t n_max);

struct BundleReport {
    std::uint32_t n = 0, e = 0;
    std::uint64_t p = 0;
    bool e_le_n_minus_1 = false;
    bool e_le_half_n_plus_3 = false;
    bool not_exceptional = false;
    bool verdict = false;
    // Caller-asserted, echoed only.
    bool big = false;
    bool jets_generated = false;
    std::vector<std::string> reasons;
};

BundleReport check_bundle(std::uint32_t n, std::uint32_t e, std::uint64_t p, bool big = false,
                          bool jets_generated = false, const ExceptionSets& tables = exception_sets());

struct CriterionReport {
    std::uint32_t N = 0;
    std::vector<std::uint32_t> degrees;
    std::uint64_t p = 0;
    std::vector<std::uint32_t> remainders;
    bool h1_half = false;    // 2c <= N - 2
    bool h1_third = false;   // 3c <= N + 3
    bool h1_table = false;   // (c, N - c) not in E_p
    bool H1 = false;
    bool H2 = false;         // every d_i >= p
    bool H3 = false;         // (p+1) sum(d_i - r_i) > p (N+1)
    bool verdict = false;
    bool general_type = false;  // sum d_i >= N + 1, reported separately
    std::vector<std::string> reasons;

    /// Reasons joined by "; ", or "all hypotheses hold".
    std::string reason() const;
};

CriterionReport check_ci(std::uint32_t N, const std::vector<std::uint32_t>& degrees, std::uint64_t p,
                         const ExceptionSets& tables = exception_sets());

/// Tries every prime p <= max(d_i) in increasing order; returns the first passing report, if any.
std::optional<CriterionReport> check_ci_auto(std::uint32_t N, const std::vector<std::uint32_t>& degrees,
                                             const ExceptionSets& tables = exception_sets());

enum class CorollaryPath { NotApplicable, GeneralType, Theorem };

struct CorollaryReport {
    std::uint32_t N = 0;
    std::vector<std::uint32_t> degrees;
    bool applicable = false;  // 3 sum d_i >= 2N + 3c + 3
    CorollaryPath path = CorollaryPath::NotApplicable;
    std::optional<CriterionReport> theorem;
    bool holds = false;  // not applicable, or one of the two paths succeeds
};

CorollaryReport corollary_check(std::uint32_t N, const std::vector<std::uint32_t>& degrees,
                                const ExceptionSets& tables = exception_sets());

struct SweepResult {
    std::uint32_t N_max = 0;
    std::uint64_t cases = 0;  // multidegrees satisfying the corollary inequality with sum d_i <= N
    std::vector<std::string> counterexamples;
    /// Table entries in range that the codimension condition does not require.
    std::vector<std::string> unneeded_entries;
};

/// Every multidegree with d_i >= 2, sum d_i <= N and 3 sum d_i >= 2N + 3c + 3 must pass check_ci(., ., 2);
/// also audits the p = 2 table against the codimension condition for every (e, n) with e + n <= N_max.
SweepResult corollary_sweep(std::uint32_t N_max, const ExceptionSets& tables = exception_sets(),
                            unsigned threads = 1);

std::vector<std::uint64_t> primes_upto(std::uint64_t n);

}  // namespace charp
