#include "charp/criteria.hpp"

#include <algorithm>
#include <numeric>
#include <thread>

#include "charp/error.hpp"
#include "charp/ffield.hpp"

namespace charp {

namespace {

std::string pair_str(std::uint32_t a, std::uint32_t b) {
    return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

std::string degrees_str(const std::vector<std::uint32_t>& d) {
    std::string s = "[";
    for (std::size_t k = 0; k < d.size(); ++k) s += (k ? "," : "") + std::to_string(d[k]);
    return s + "]";
}

void require_prime(std::uint64_t p) {
    if (!is_prime(p)) throw PreconditionError(std::to_string(p) + " is not prime");
}

// 2 * (delta + 1 + (delta-1)(delta-1 +- 1)/2) compared with 2n.
bool codim_condition(bool char2, std::int64_t e, std::int64_t n) {
    const std::int64_t delta = n - e;
    const std::int64_t twice_C = 2 * (delta + 1) + (delta - 1) * (delta - 1 + (char2 ? -1 : 1));
    return twice_C > 2 * n;
}

}  // namespace

std::int64_t codim_tb(const CodimQuery& q) {
    const std::int64_t n = q.n, e = q.e, i = q.i, m = std::min(n, e);
    if (n == 0 || e == 0) throw PreconditionError("codim_tb needs n, e >= 1");
    if (i > m) throw PreconditionError("i exceeds min(n, e)");
    std::int64_t c = i * (std::abs(n - e) + i);
    if (!q.j) return c;
    const std::int64_t j = *q.j;
    // The second differential maps K (dim n-m+i) to Hom(K, C) with dim C = e-m+i.
    if (j > (e - m + i == 0 ? 0 : n - m + i)) throw PreconditionError("j exceeds min(dim K, dim K * dim C)");
    const std::int64_t sym = j * (j + (q.char2 ? -1 : 1));  // always even
    return c + j * (n - m + i - j) * (e - m + i - 1) + sym / 2 * (e - m + i);
}

PairSet ExceptionSets::for_prime(std::uint64_t p) const {
    PairSet out = E_prime;
    if (p == 2) out.insert(E_doubleprime.begin(), E_doubleprime.end());
    return out;
}

const ExceptionSets& exception_sets() {
    static const ExceptionSets tables{
        {{1, 2}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}, {4, 6}, {4, 7}, {5, 7}, {5, 8}, {6, 9}, {7, 11}},
        {{1, 3}, {2, 5}, {3, 6}, {4, 8}, {5, 9}, {6, 10}, {7, 12}, {8, 13}},
    };
    return tables;
}

PairSet derived_exceptions(bool char2, std::uint32_t n_max) {
    PairSet out;
    for (std::uint32_t n = 1; n <= n_max; ++n)
        for (std::uint32_t e = 1; e + 1 <= n && 2 * e <= n + 3; ++e)
            if (!codim_condition(char2, e, n)) out.insert({e, n});
    return out;
}

BundleReport check_bundle(std::uint32_t n, std::uint32_t e, std::uint64_t p, bool big, bool jets_generated,
                          const ExceptionSets& tables) {
    require_prime(p);
    BundleReport r;
    r.n = n;
    r.e = e;
    r.p = p;
    r.big = big;
    r.jets_generated = jets_generated;
    r.e_le_n_minus_1 = e + 1 <= n;
    r.e_le_half_n_plus_3 = 2 * e <= n + 3;
    r.not_exceptional = !tables.contains(p, e, n);
    if (!r.e_le_n_minus_1) r.reasons.push_back("e <= n-1 fails");
    if (!r.e_le_half_n_plus_3) r.reasons.push_back("2e <= n+3 fails");
    if (!r.not_exceptional) r.reasons.push_back(pair_str(e, n) + " ∈ E_" + std::to_string(p));
    r.verdict = r.e_le_n_minus_1 && r.e_le_half_n_plus_3 && r.not_exceptional;
    return r;
}

std::string CriterionReport::reason() const {
    if (reasons.empty()) return "all hypotheses hold";
    std::string s;
    for (std::size_t k = 0; k < reasons.size(); ++k) s += (k ? "; " : "") + reasons[k];
    return s;
}

CriterionReport check_ci(std::uint32_t N, const std::vector<std::uint32_t>& degrees, std::uint64_t p,
                         const ExceptionSets& tables) {
    require_prime(p);
    if (N == 0 || degrees.empty()) throw PreconditionError("check_ci needs N >= 1 and at least one degree");
    for (auto d : degrees)
        if (d == 0) throw PreconditionError("degrees must be positive");
    CriterionReport r;
    r.N = N;
    r.degrees = degrees;
    r.p = p;
    const std::int64_t c = static_cast<std::int64_t>(degrees.size()), n = N, P = static_cast<std::int64_t>(p);
    std::int64_t reduced = 0, total = 0;
    r.H2 = true;
    for (auto d : degrees) {
        r.remainders.push_back(static_cast<std::uint32_t>(d % p));
        reduced += d - static_cast<std::int64_t>(d % p);
        total += d;
        if (d < p) r.H2 = false;
    }
    r.h1_half = 2 * c <= n - 2;
    r.h1_third = 3 * c <= n + 3;
    r.h1_table = !(c < n && tables.contains(p, static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(n - c)));
    r.H1 = r.h1_half && r.h1_third && r.h1_table;
    r.H3 = (P + 1) * reduced > P * (n + 1);
    r.verdict = r.H1 && r.H2 && r.H3;
    r.general_type = total >= n + 1;
    if (!r.h1_half) r.reasons.push_back("2c <= N-2 fails");
    if (!r.h1_third) r.reasons.push_back("3c <= N+3 fails");
    if (!r.h1_table) r.reasons.push_back(pair_str(static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(n - c)) +
                                         " ∈ E_" + std::to_string(p));
    if (!r.H2) r.reasons.push_back("some d_i < p");
    if (!r.H3)
        r.reasons.push_back("(p+1)*sum(d_i-r_i) = " + std::to_string((P + 1) * reduced) +
                            " <= p*(N+1) = " + std::to_string(P * (n + 1)));
    return r;
}

std::vector<std::uint64_t> primes_upto(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t k = 2; k <= n; ++k)
        if (is_prime(k)) out.push_back(k);
    return out;
}

std::optional<CriterionReport> check_ci_auto(std::uint32_t N, const std::vector<std::uint32_t>& degrees,
                                             const ExceptionSets& tables) {
    if (degrees.empty()) throw PreconditionError("check_ci needs at least one degree");
    for (auto p : primes_upto(*std::max_element(degrees.begin(), degrees.end()))) {
        auto r = check_ci(N, degrees, p, tables);
        if (r.verdict) return r;
    }
    return std::nullopt;
}

CorollaryReport corollary_check(std::uint32_t N, const std::vector<std::uint32_t>& degrees,
                                const ExceptionSets& tables) {
    for (auto d : degrees)
        if (d < 2) throw PreconditionError("corollary needs every d_i >= 2");
    if (degrees.empty()) throw PreconditionError("corollary needs at least one degree");
    CorollaryReport r;
    r.N = N;
    r.degrees = degrees;
    const std::int64_t c = static_cast<std::int64_t>(degrees.size());
    const std::int64_t total = std::accumulate(degrees.begin(), degrees.end(), std::int64_t{0});
    r.applicable = 3 * total >= 2 * static_cast<std::int64_t>(N) + 3 * c + 3;
    if (!r.applicable) {
        r.holds = true;
        return r;
    }
    if (total >= static_cast<std::int64_t>(N) + 1) {
        r.path = CorollaryPath::GeneralType;
        r.holds = true;
        return r;
    }
    r.path = CorollaryPath::Theorem;
    r.theorem = check_ci(N, degrees, 2, tables);
    r.holds = r.theorem->verdict;
    return r;
}

SweepResult corollary_sweep(std::uint32_t N_max, const ExceptionSets& tables, unsigned threads) {
    if (N_max > 60) throw PreconditionError("sweep is limited to N <= 60");
    SweepResult out;
    out.N_max = N_max;
    threads = std::max(1u, threads);

    struct Part {
        std::uint64_t cases = 0;
        std::vector<std::string> counterexamples;
    };
    std::vector<Part> parts(N_max + 1);
    auto work = [&](std::uint32_t N) {
        Part& part = parts[N];
        // Non-increasing multisets of parts >= 2 with sum <= N.
        std::vector<std::uint32_t> d;
        auto rec = [&](auto&& self, std::uint32_t max_part, std::uint32_t remaining) -> void {
            if (!d.empty()) {
                auto rep = corollary_check(N, d, tables);
                if (rep.applicable) {
                    ++part.cases;
                    if (!rep.holds)
                        part.counterexamples.push_back("N=" + std::to_string(N) + " degrees=" + degrees_str(d) + ": " +
                                                       rep.theorem->reason());
                }
            }
            for (std::uint32_t x = std::min(max_part, remaining); x >= 2; --x) {
                d.push_back(x);
                self(self, x, remaining - x);
                d.pop_back();
            }
        };
        rec(rec, N, N);
        // Table audit at bundle level: every (e, n) with e + n == N passing e <= n-1 and 2e <= n+3.
        for (std::uint32_t e = 1; 2 * e + 1 <= N; ++e) {
            const std::uint32_t n = N - e;
            if (2 * e <= n + 3 && !codim_condition(true, e, n) && !tables.contains(2, e, n))
                part.counterexamples.push_back("table audit: " + pair_str(e, n) +
                                               " violates the codimension condition but is missing from E_2");
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::uint32_t N = 1 + t; N <= N_max; N += threads) work(N);
        });
    for (auto& th : pool) th.join();
    for (const auto& part : parts) {
        out.cases += part.cases;
        out.counterexamples.insert(out.counterexamples.end(), part.counterexamples.begin(), part.counterexamples.end());
    }
    for (const auto& [c, n] : tables.for_prime(2))
        if (c + n <= N_max && c + 1 <= n && 2 * c <= n + 3 && codim_condition(true, c, n))
            out.unneeded_entries.push_back(pair_str(c, n));
    return out;
}

}  // namespace charp
