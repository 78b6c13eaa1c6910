#pragma once

// Inseparable covers Y = {t_l^p = f_l} of affine space attached to a section s = (f_1..f_e), checked on points,
// and the equations of Mori's degeneration.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "charp/strata.hpp"

namespace charp {

struct CoverChart {
    Section base;
    std::uint64_t p = 0;
    Variables vars;                    // x1..xn, t1..te
    std::vector<Polynomial> equations; // t_l^p - f_l
};

CoverChart build_cover(const Section& s, std::uint64_t p);

/// |Y(F_{q^m})|, counting p-th roots of f_l(x) over every base point x.
std::uint64_t cover_point_count(const CoverChart& c, std::uint32_t m, std::uint64_t budget = kDefaultScanBudget);

/// Points (x, t) of Y(F_{q^m}) where the e x (n+e) Jacobian of the equations has rank < e, lexicographic order.
std::vector<std::vector<Code>> cover_singular_points(const CoverChart& c, std::uint32_t m,
                                                     std::uint64_t budget = kDefaultScanBudget);

struct CoverVerdict {
    /// Estimated codimension of the critical locus; nullopt when it has no points at the largest level.
    std::optional<int> sigma1_codim_estimate;
    bool estimated = true;
    bool integral = false;
    bool normal = false;
    std::vector<std::uint64_t> evidence;  // points with i >= 1 at m = 1..M
    std::uint64_t q = 0;
};

CoverVerdict cover_classify(const Section& s, const StrataReport& report);

struct MoriSystem {
    std::uint32_t N = 0;
    std::vector<std::uint32_t> degrees;
    std::uint64_t p = 0;
    std::uint64_t seed = 0;
    Variables vars;                      // x0..xN, t, tau1..tauc
    std::vector<std::uint32_t> weights;  // per variable: 1 for x, 0 for t, d_i/p for tau_i
    std::vector<std::string> equations;  // tau_i^p - f_i, then t*tau_i - g_i, interleaved per i
    std::vector<std::uint32_t> equation_degrees;
};

MoriSystem mori_equations(std::uint32_t N, const std::vector<std::uint32_t>& degrees, std::uint64_t p,
                          std::uint64_t seed);

/// Weighted degree of every monomial of each equation, after parsing the rendered text back;
/// nullopt for an equation that is not weighted-homogeneous.
std::vector<std::optional<std::uint32_t>> mori_weighted_degrees(const MoriSystem& m);

}  // namespace charp
