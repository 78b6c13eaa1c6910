#pragma once

// Local algebra of power series over a finite field: Jacobian ideals and Milnor numbers,
// determinacy, versal unfoldings, quadratic forms and the splitting lemma.
//
// All ideal questions reduce to linear algebra on the monomial basis of k[x]/m^{r+1}.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "charp/powerseries.hpp"

namespace charp {

inline constexpr std::uint32_t kDefaultMilnorCap = 32;

/// True iff m^r is contained in the Jacobian ideal of f. Needs f.ctx()->D() >= r + 1.
bool contains_power(const TruncatedSeries& f, std::uint32_t r);

struct MilnorResult {
    bool finite = false;
    std::uint64_t mu = 0;
    std::optional<std::uint32_t> r_min;
    std::vector<Exponent> basis;  // canonical ascending order
    std::uint32_t cap = 0;
    /// "4" or "infinite (>=32)".
    std::string mu_str() const;
};

MilnorResult milnor_number(const TruncatedSeries& f, std::uint32_t cap = kDefaultMilnorCap);

/// 2 * max(r_min, 1), or nullopt when no r_min <= cap exists.
std::optional<std::uint32_t> determinacy_bound(const TruncatedSeries& f, std::uint32_t cap = kDefaultMilnorCap);

struct VersalUnfolding {
    std::vector<Exponent> basis;  // g_1..g_mu as monomials in the original variables
    TruncatedSeries F;            // f + s1*g1 + ... in a context with mu leading parameters
};

VersalUnfolding versal_unfolding(const TruncatedSeries& f, std::uint32_t cap = kDefaultMilnorCap);

/// q = sum over a <= b of c_ab x_a x_b.
struct QuadraticForm {
    FieldSpec spec;
    std::size_t n = 0;
    std::map<std::pair<std::size_t, std::size_t>, Code> coeffs;

    static QuadraticForm parse(std::string_view text, const FieldSpec& spec, std::size_t n);
    /// Degree-2 part of f in the non-parameter variables, ignoring every term that involves a parameter.
    static QuadraticForm from_series(const TruncatedSeries& f);

    Code coeff(std::size_t a, std::size_t b) const;
    void set(std::size_t a, std::size_t b, Code c);
    /// Polar matrix: H_ab = c_ab off the diagonal, H_aa = 2 c_aa.
    Matrix polar() const;
    Code evaluate(const std::vector<Code>& x) const;
    /// q(Lx), the form obtained by substituting x_i -> (Lx)_i.
    QuadraticForm substitute(const Matrix& L) const;
    QuadraticForm embedded(const Embedding& e) const;
    std::string str() const;

    friend bool operator==(const QuadraticForm&, const QuadraticForm&) = default;
};

std::size_t qf_polar_rank(const QuadraticForm& q);

enum class QFShape { DiagonalSquares, Symplectic, SymplecticPlusSquare };

struct QFNormalForm {
    std::size_t rank = 0;
    QFShape shape = QFShape::DiagonalSquares;
    FieldSpec field;  // field over which the reduction holds (an extension when extension_degree > 1)
    std::uint32_t extension_degree = 1;
    /// Substituting x_i -> (matrix x)_i into the normal form reproduces the input.
    Matrix matrix;
    LocalAutomorphism transform;

    /// "DiagonalSquares(3)", "Symplectic(2)", "SymplecticPlusSquare(2)".
    std::string tag() const;
    /// x1^2 + ... + xr^2, or x1*x2 + ... (+ x_{r+1}^2).
    QuadraticForm normal_form() const;
};

/// Throws ExtensionRequired when the reduction needs a quadratic extension and allow_extension is false.
QFNormalForm qf_classify(const QuadraticForm& q, bool allow_extension = true);

struct SplitResult {
    LocalAutomorphism phi;
    std::size_t r = 0;
    TruncatedSeries q;         // the split quadratic block
    TruncatedSeries residual;  // involves only parameters and x_{r+1..n}
    QFNormalForm qf;
    std::uint32_t extension_degree = 1;
};

/// Splitting lemma with parameters: aut_apply(phi, F) == q + residual. The first `ctx->params()` variables of F
/// are the parameters. When the quadratic part needs a field extension, everything is returned over it.
SplitResult split(const TruncatedSeries& F, bool allow_extension = true);

}  // namespace charp
