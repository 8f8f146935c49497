#pragma once

// Brute-force ground truth for deck reconstruction: exact kappa tables,
// collision search, the counting lower bound, deck refinement, and exact
// moment sums against difference matrices.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypermatrix.hpp"
#include "numerics.hpp"
#include "prng.hpp"

namespace deckpoly {

enum class ReconMode { Deck, PrincipalDeck, Sum, PrincipalSum };

inline const char* to_string(ReconMode m) {
    switch (m) {
        case ReconMode::Deck: return "deck";
        case ReconMode::PrincipalDeck: return "principal-deck";
        case ReconMode::Sum: return "sum";
        default: return "principal-sum";
    }
}

inline std::optional<ReconMode> recon_mode_from_string(const std::string& s) {
    if (s == "deck") return ReconMode::Deck;
    if (s == "principal-deck") return ReconMode::PrincipalDeck;
    if (s == "sum") return ReconMode::Sum;
    if (s == "principal-sum") return ReconMode::PrincipalSum;
    return std::nullopt;
}

inline bool is_sum_mode(ReconMode m) { return m == ReconMode::Sum || m == ReconMode::PrincipalSum; }
inline DeckMode deck_mode_of(ReconMode m) {
    return (m == ReconMode::Deck || m == ReconMode::Sum) ? DeckMode::Full : DeckMode::Principal;
}

// canonical serialization of A's image under the chosen map
inline std::string image_key(const Hypermatrix& a, int k, ReconMode mode) {
    std::string key;
    if (is_sum_mode(mode)) {
        SumDeck s = sum_deck_direct(a, k, deck_mode_of(mode));
        for (const auto& e : s.entries) {
            key += e.get_str();
            key += ',';
        }
    } else {
        Deck dk = deck(a, k, deck_mode_of(mode));
        for (const auto& [bits, mult] : dk.entries) {
            key += bits;
            key += ':';
            key += mult.get_str();
            key += ';';
        }
    }
    return key;
}

inline Hypermatrix hypermatrix_from_word(int d, int n, std::uint64_t word) {
    Hypermatrix a(d, n);
    for (std::size_t i = 0; i < a.size(); ++i) a.set_flat(i, (word >> i) & 1u);
    return a;
}

struct KappaResult {
    int n = 0;
    int d = 0;
    ReconMode mode = ReconMode::Deck;
    int kappa = 0;
    std::optional<std::pair<Hypermatrix, Hypermatrix>> witness; // collision at kappa-1
    std::vector<bool> injective_at;                             // index k = 1..n
};

namespace detail {

inline void check_exhaustive_size(int n, int d) {
    std::size_t cells = pow_size(n, d);
    if (cells > 20) throw std::invalid_argument("kappa_exact: instance too large (n^d > 20)");
}

// first colliding pair in word order, or nullopt if the map is injective at k
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> scan_collision(int n, int d, int k,
                                                                             ReconMode mode) {
    std::size_t cells = pow_size(n, d);
    std::uint64_t total = std::uint64_t(1) << cells;
    std::unordered_map<std::string, std::uint64_t> seen;
    seen.reserve(total * 2);
    for (std::uint64_t w = 0; w < total; ++w) {
        std::string key = image_key(hypermatrix_from_word(d, n, w), k, mode);
        auto [it, inserted] = seen.emplace(std::move(key), w);
        if (!inserted) return std::make_pair(it->second, w);
    }
    return std::nullopt;
}

} // namespace detail

inline KappaResult kappa_exact(int n, int d, ReconMode mode) {
    detail::check_exhaustive_size(n, d);
    KappaResult res;
    res.n = n;
    res.d = d;
    res.mode = mode;
    res.injective_at.assign(n + 1, false);
    std::optional<std::pair<std::uint64_t, std::uint64_t>> last_collision;
    int kappa = 0;
    for (int k = 1; k <= n; ++k) {
        auto col = detail::scan_collision(n, d, k, mode);
        res.injective_at[k] = !col.has_value();
        if (col) last_collision = col;
        if (!col && kappa == 0) kappa = k;
    }
    if (kappa == 0) throw std::logic_error("kappa_exact: map not injective even at k = n");
    res.kappa = kappa;
    if (kappa > 1) {
        auto col = detail::scan_collision(n, d, kappa - 1, mode);
        if (!col) throw std::logic_error("kappa_exact: no witness below kappa");
        res.witness = std::make_pair(hypermatrix_from_word(d, n, col->first),
                                     hypermatrix_from_word(d, n, col->second));
    }
    return res;
}

struct CollisionReport {
    bool found = false;
    bool exhaustive = false;
    std::uint64_t pairs_tried = 0;
    std::optional<std::pair<Hypermatrix, Hypermatrix>> pair;
};

// exhaustive bucket scan when 2^(n^d) <= 2^20, else seeded random-pair sampling
inline CollisionReport find_collision(int n, int d, int k, ReconMode mode, std::uint64_t budget,
                                      std::uint64_t seed = 0) {
    CollisionReport rep;
    std::size_t cells = pow_size(n, d);
    if (cells <= 20) {
        rep.exhaustive = true;
        auto col = detail::scan_collision(n, d, k, mode);
        rep.pairs_tried = std::uint64_t(1) << cells;
        if (col) {
            rep.found = true;
            rep.pair = std::make_pair(hypermatrix_from_word(d, n, col->first),
                                      hypermatrix_from_word(d, n, col->second));
        }
        return rep;
    }
    Rng rng(seed);
    for (std::uint64_t t = 0; t < budget; ++t) {
        Hypermatrix a = Hypermatrix::random(d, n, rng);
        Hypermatrix b = Hypermatrix::random(d, n, rng);
        ++rep.pairs_tried;
        if (a == b) continue;
        if (image_key(a, k, mode) == image_key(b, k, mode)) {
            rep.found = true;
            rep.pair = std::make_pair(a, b);
            return rep;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// counting lower bound: floor of n^{d/(d+1)} / (d log2(n+1))^{1/(d+1)},
// i.e. the largest k with k^{d+1} * d * log2(n+1) <= n^d.
// ---------------------------------------------------------------------------
namespace detail {

// sign of (k^{d+1} * d * log2(n+1) - n^d), certified
inline int threshold_cmp(long k, int n, int d) {
    BigInt nd;
    mpz_ui_pow_ui(nd.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(d));
    BigInt kpow;
    mpz_ui_pow_ui(kpow.get_mpz_t(), static_cast<unsigned long>(k),
                  static_cast<unsigned long>(d + 1));
    BigInt np1(n + 1);
    // exact path when n+1 is a power of two
    if (mpz_popcount(np1.get_mpz_t()) == 1) {
        long e = static_cast<long>(mpz_sizeinbase(np1.get_mpz_t(), 2)) - 1;
        BigInt lhs = kpow * d * e;
        return cmp(lhs, nd);
    }
    for (mpfr_prec_t p = IntervalScalar::kDefaultPrec; p <= IntervalScalar::kMaxPrec; p *= 2) {
        IntervalScalar lhs = IntervalScalar::from_bigint(kpow * d, p) * IntervalScalar::log2_of(np1, p);
        IntervalScalar rhs = IntervalScalar::from_bigint(nd, p);
        int s = (lhs - rhs).sign_certain();
        if (s != 0) return s;
    }
    throw std::logic_error("threshold_cmp: undecidable comparison");
}

} // namespace detail

inline long counting_threshold(int n, int d) {
    if (n < 2 || d < 1) throw std::invalid_argument("counting_threshold: need n >= 2, d >= 1");
    // double estimate, then certify the floor exactly
    double est = std::pow(double(n), double(d) / (d + 1)) /
                 std::pow(double(d) * std::log2(double(n) + 1.0), 1.0 / (d + 1));
    long k = std::max<long>(0, static_cast<long>(est) - 2);
    while (detail::threshold_cmp(k + 1, n, d) <= 0) ++k;
    while (k > 0 && detail::threshold_cmp(k, n, d) > 0) --k;
    return k;
}

// exact check of the pigeonhole chain at k: (C(n,k)^d + 1)^{k^d} < 2^{n^d}
// (full-sum mode) or (C(n,k) + 1)^{k^d} < 2^{n^d} (principal)
inline bool counting_inequality_holds(int n, int d, long k, ReconMode mode) {
    if (!is_sum_mode(mode)) throw std::invalid_argument("counting bound is about sum modes");
    if (k < 1) return true;
    BigInt base = binom(n, static_cast<long>(k));
    if (mode == ReconMode::Sum) {
        BigInt b(1);
        for (int j = 0; j < d; ++j) b *= base;
        base = b;
    }
    base += 1;
    BigInt kd;
    mpz_ui_pow_ui(kd.get_mpz_t(), static_cast<unsigned long>(k), static_cast<unsigned long>(d));
    BigInt nd;
    mpz_ui_pow_ui(nd.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(d));
    // compare k^d * log2(base) against n^d
    if (mpz_popcount(base.get_mpz_t()) == 1) {
        long e = static_cast<long>(mpz_sizeinbase(base.get_mpz_t(), 2)) - 1;
        return cmp(kd * e, nd) < 0;
    }
    for (mpfr_prec_t p = IntervalScalar::kDefaultPrec; p <= IntervalScalar::kMaxPrec; p *= 2) {
        IntervalScalar lhs = IntervalScalar::from_bigint(kd, p) * IntervalScalar::log2_of(base, p);
        IntervalScalar rhs = IntervalScalar::from_bigint(nd, p);
        int s = (lhs - rhs).sign_certain();
        if (s != 0) return s < 0;
    }
    throw std::logic_error("counting_inequality_holds: undecidable");
}

// ---------------------------------------------------------------------------
// deck refinement: merging the k-decks of all members of M_l(A) equals
// C(n-k, l-k)^d * M_k(A) (power 1 in principal mode)
// ---------------------------------------------------------------------------
inline bool refinement_check(const Hypermatrix& a, int k, int l, DeckMode mode) {
    if (k < 1 || k > l || l > a.order()) throw std::invalid_argument("refinement_check: need 1 <= k <= l <= n");
    Deck dl = deck(a, l, mode);
    std::map<std::string, BigInt> merged;
    for (const auto& [bits, mult] : dl.entries) {
        Hypermatrix b = Hypermatrix::from_bits(a.dim(), l, bits);
        for (const auto& [bk, mk] : deck(b, k, mode).entries) merged[bk] += mk * mult;
    }
    BigInt factor = deck_member_count(a.dim(), a.order() - k, l - k, mode);
    std::map<std::string, BigInt> scaled;
    for (const auto& [bk, mk] : deck(a, k, mode).entries) scaled[bk] = mk * factor;
    return merged == scaled;
}

// ---------------------------------------------------------------------------
// multivariate polynomials as sums of separable terms (every polynomial is
// expressible this way; beta products are single terms)
// ---------------------------------------------------------------------------
struct SeparablePoly {
    struct Term {
        BigRational coef{1};
        std::vector<std::vector<BigRational>> uni; // per-dimension coefficient lists
    };
    int d = 0;
    std::vector<Term> terms;

    BigRational eval(const Index& x) const {
        BigRational acc(0);
        for (const auto& t : terms) {
            BigRational prod = t.coef;
            for (int j = 0; j < d; ++j) prod *= eval_poly(t.uni[j], BigRational(x[j]));
            acc += prod;
        }
        return acc;
    }

    int local_degree() const {
        int deg = 0;
        for (const auto& t : terms)
            for (const auto& u : t.uni)
                deg = std::max<int>(deg, static_cast<int>(u.size()) - 1);
        return deg;
    }

    int total_degree() const {
        int deg = 0;
        for (const auto& t : terms) {
            int s = 0;
            for (const auto& u : t.uni) s += static_cast<int>(u.size()) - 1;
            deg = std::max(deg, s);
        }
        return deg;
    }
};

// beta_u as a separable polynomial (exact expansion of the binomial products)
inline SeparablePoly beta_product_poly(const Index& u, int n, int k) {
    SeparablePoly p;
    p.d = static_cast<int>(u.size());
    SeparablePoly::Term term;
    for (int j = 0; j < p.d; ++j) {
        // beta_u(x) = C(x-1, u-1) * C(n-x, k-u): expand both falling-factorial parts
        std::vector<BigRational> first = {BigRational(1)}; // C(x-1, u-1) = prod_{t=1}^{u-1} (x-t)/t
        for (int t = 1; t <= u[j] - 1; ++t) {
            std::vector<BigRational> next(first.size() + 1, BigRational(0));
            for (std::size_t i = 0; i < first.size(); ++i) {
                next[i + 1] += first[i] / t;
                next[i] -= first[i];
            }
            first = std::move(next);
        }
        std::vector<BigRational> second = {BigRational(1)}; // C(n-x, k-u) = prod_{t=0}^{k-u-1} (n-x-t)/(k-u-t)
        for (int t = 0; t <= k - u[j] - 1; ++t) {
            std::vector<BigRational> next(second.size() + 1, BigRational(0));
            BigRational den(k - u[j] - t);
            for (std::size_t i = 0; i < second.size(); ++i) {
                next[i] += second[i] * (n - t) / den;
                next[i + 1] -= second[i] / den;
            }
            second = std::move(next);
        }
        // multiply the two univariates
        std::vector<BigRational> prod(first.size() + second.size() - 1, BigRational(0));
        for (std::size_t i = 0; i < first.size(); ++i)
            for (std::size_t jj = 0; jj < second.size(); ++jj) prod[i + jj] += first[i] * second[jj];
        term.uni.push_back(std::move(prod));
    }
    p.terms.push_back(std::move(term));
    return p;
}

// exact sum over [n]^d of p(i) * D_i (only the support contributes)
inline BigRational moment_sum(const DifferenceMatrix& D, const SeparablePoly& p) {
    if (p.d != D.dim()) throw std::invalid_argument("moment_sum: dimension mismatch");
    BigRational acc(0);
    Index i(D.dim(), 1);
    std::size_t flat = 0;
    do {
        int v = D.at_flat(flat);
        if (v != 0) acc += p.eval(i) * v;
        ++flat;
    } while (next_index(i, D.order()));
    return acc;
}

} // namespace deckpoly
