#pragma once

// Integer-geometric machinery: primitive direction sets, kernel lattices,
// reduced bases and height vectors, tangent support translation, rotated
// direction functions, and slice lattices.

#include <array>
#include <numeric>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace deckpoly {

using VecI = std::vector<long long>; // small integer vectors (enumeration scale)
using VecZ = std::vector<BigInt>;
using VecQ = std::vector<BigRational>;

inline long long dot_ll(const VecI& a, const VecI& b) {
    long long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline long long norm_sq_ll(const VecI& a) { return dot_ll(a, a); }

inline BigInt dot_z(const VecZ& a, const VecZ& b) {
    BigInt s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}
inline BigRational dot_qz(const VecQ& a, const VecZ& b) {
    BigRational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * BigRational(b[i]);
    return s;
}
inline BigRational dot_qq(const VecQ& a, const VecQ& b) {
    BigRational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline VecZ to_vecz(const VecI& a) {
    VecZ r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = to_bigint((a[i]));
    return r;
}

inline long long vec_gcd(const VecI& a) {
    long long g = 0;
    for (long long v : a) g = std::gcd(g, v < 0 ? -v : v);
    return g;
}

struct LexLess {
    bool operator()(const VecI& a, const VecI& b) const { return a < b; }
};

// ---------------------------------------------------------------------------
// certified radius bound: exact rational R^2 when available, else an interval
// evaluator with escalating precision
// ---------------------------------------------------------------------------
struct RadiusBound {
    std::optional<BigRational> exact_r2;
    std::function<IntervalScalar(mpfr_prec_t)> eval_r2;

    static RadiusBound from_rational(const BigRational& r2) {
        RadiusBound b;
        b.exact_r2 = r2;
        b.eval_r2 = [r2](mpfr_prec_t p) { return IntervalScalar::from_rational(r2, p); };
        return b;
    }
    static RadiusBound from_eval(std::function<IntervalScalar(mpfr_prec_t)> f) {
        RadiusBound b;
        b.eval_r2 = std::move(f);
        return b;
    }

    // certified: norm_sq <= R^2 ?
    bool contains_norm_sq(const BigInt& norm_sq) const {
        if (exact_r2) return cmp(BigRational(norm_sq), *exact_r2) <= 0;
        for (mpfr_prec_t p = IntervalScalar::kDefaultPrec; p <= IntervalScalar::kMaxPrec; p *= 2) {
            IntervalScalar r2 = eval_r2(p);
            int s = (IntervalScalar::from_bigint(norm_sq, p) - r2).sign_certain();
            if (s != 0) return s < 0;
        }
        throw std::logic_error("RadiusBound: norm comparison undecided (equality case?)");
    }

    // an integer certainly >= R (outer bound for enumeration boxes)
    long long outer_int_radius() const {
        IntervalScalar r2 = eval_r2(128);
        double hi = r2.hi_d();
        if (hi < 0) return 0;
        return static_cast<long long>(std::ceil(std::sqrt(hi))) + 1;
    }
};

// ---------------------------------------------------------------------------
// primitive points and the lambda-patterned direction set
// ---------------------------------------------------------------------------
inline bool is_prime_ll(long long x) {
    if (x < 2) return false;
    for (long long p = 2; p * p <= x; ++p)
        if (x % p == 0) return false;
    return true;
}

inline long long largest_prime_leq(long long x) {
    if (x < 2) throw std::domain_error("largest_prime_leq: no prime <= x for x < 2");
    for (long long p = x; p >= 2; --p)
        if (is_prime_ll(p)) return p;
    throw std::logic_error("unreachable");
}

// all primitive a in Z^d with ||a|| <= R; closed under negation
inline std::vector<VecI> primitive_points(const RadiusBound& R, int d,
                                          std::size_t budget = 200000000) {
    long long m = R.outer_int_radius();
    // rough count guard before enumerating the box
    double volume = 1;
    for (int j = 0; j < d; ++j) volume *= 2.0 * static_cast<double>(m) + 1.0;
    if (volume > static_cast<double>(budget))
        throw std::length_error("primitive_points: enumeration budget exceeded");
    std::vector<VecI> out;
    VecI a(d, -m);
    while (true) {
        long long ns = norm_sq_ll(a);
        if (ns > 0 && ns <= m * m && vec_gcd(a) == 1 && R.contains_norm_sq(to_bigint((ns))))
            out.push_back(a);
        int j = d - 1;
        while (j >= 0 && a[j] == m) a[j--] = -m;
        if (j < 0) break;
        ++a[j];
    }
    return out;
}

struct DirectionParams {
    int n = 0;
    int d = 0;
    long long lambda = 0;   // largest prime <= n^{1/(d+1)}
    RadiusBound R_sq;       // R = sqrt(d) * n^{(d-1)/(d+1)}
    bool lambda_small = false; // lambda < 3: outside the paper's asymptotic regime
};

inline DirectionParams compute_direction_params(int n, int d) {
    if (d < 3) throw std::invalid_argument("direction params need d >= 3");
    DirectionParams p;
    p.n = n;
    p.d = d;
    BigInt root = iroot_floor(BigInt(n), static_cast<unsigned long>(d + 1));
    if (root < 2) throw std::domain_error("n too small: no prime <= n^(1/(d+1))");
    p.lambda = largest_prime_leq(root.get_si());
    p.lambda_small = p.lambda < 3;
    // R^2 = d * n^{2(d-1)/(d+1)}: exact when n^{2(d-1)} is a perfect (d+1)-power
    long pp = 2 * (d - 1), q = d + 1;
    long g = std::gcd(pp, q);
    pp /= g;
    q /= g;
    BigInt npow;
    mpz_ui_pow_ui(npow.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(pp));
    bool exact = false;
    BigInt r = iroot_floor(npow, static_cast<unsigned long>(q), &exact);
    if (exact) {
        p.R_sq = RadiusBound::from_rational(BigRational(r * d));
    } else {
        int nn = n, dd = d;
        p.R_sq = RadiusBound::from_eval([nn, dd, pp, q](mpfr_prec_t prec) {
            IntervalScalar base = IntervalScalar::from_long(nn, prec);
            IntervalScalar acc = IntervalScalar::from_long(1, prec);
            for (long t = 0; t < pp; ++t) acc = acc * base;
            return acc.rootn(static_cast<unsigned long>(q)) * IntervalScalar::from_long(dd, prec);
        });
    }
    return p;
}

// N'_lambda(R): the gcd-patterned primitive points, before permutation closure
inline std::vector<VecI> n_lambda_prime_set(const DirectionParams& params) {
    int d = params.d;
    long long lam = params.lambda;
    std::vector<long long> lampow(d + 1, 1);
    for (int i = 1; i <= d; ++i) lampow[i] = lampow[i - 1] * lam;
    long long outer = params.R_sq.outer_int_radius();

    std::vector<VecI> out;
    // a_1 = lam^{d-2} c1, a_2 = lam^{d-2} c2, gcd(c1,c2)=1, c1^2+c2^2 >= lam^2
    long long scale12 = lampow[d - 2];
    long long cmax12 = outer / scale12;
    VecI a(d, 0);
    std::function<void(int, long long)> rec = [&](int i, long long partial_ns) {
        if (i == d) {
            long long g = vec_gcd(a);
            if (g != 1) return;
            if (!params.R_sq.contains_norm_sq(to_bigint((partial_ns)))) return;
            out.push_back(a);
            return;
        }
        // a_i = lam^{d-i} c_i with lam not dividing c_i (i >= 3, 1-based)
        long long scale = lampow[d - (i + 1)];
        long long cmax = outer / scale;
        for (long long c = -cmax; c <= cmax; ++c) {
            if (c % lam == 0) continue;
            long long ai = scale * c;
            long long ns = partial_ns + ai * ai;
            if (ns > outer * outer) continue;
            a[i] = ai;
            rec(i + 1, ns);
        }
        a[i] = 0;
    };
    for (long long c1 = -cmax12; c1 <= cmax12; ++c1)
        for (long long c2 = -cmax12; c2 <= cmax12; ++c2) {
            if (std::gcd(c1 < 0 ? -c1 : c1, c2 < 0 ? -c2 : c2) != 1) continue;
            if (c1 * c1 + c2 * c2 < lam * lam) continue;
            a[0] = scale12 * c1;
            a[1] = scale12 * c2;
            long long ns = a[0] * a[0] + a[1] * a[1];
            if (ns > outer * outer) continue;
            rec(2, ns);
        }
    std::sort(out.begin(), out.end());
    return out;
}

// N_lambda(R): all coordinate permutations of N'_lambda(R)
inline std::vector<VecI> n_lambda_set(const DirectionParams& params) {
    std::set<VecI> all;
    for (const VecI& a : n_lambda_prime_set(params)) {
        VecI p = a;
        std::sort(p.begin(), p.end());
        do {
            all.insert(p);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    return {all.begin(), all.end()};
}

// verbatim membership conditions of N'_lambda(R) (used as a test oracle and by
// nearest_direction's post checks)
inline bool in_n_lambda_prime(const VecI& a, const DirectionParams& params) {
    int d = params.d;
    long long lam = params.lambda;
    if (static_cast<int>(a.size()) != d) return false;
    if (vec_gcd(a) != 1) return false;
    std::vector<long long> lampow(d + 1, 1);
    for (int i = 1; i <= d; ++i) lampow[i] = lampow[i - 1] * lam;
    for (int i = 3; i <= d; ++i) {
        long long g = std::gcd(lampow[d], a[i - 1] < 0 ? -a[i - 1] : a[i - 1]);
        if (g != lampow[d - i]) return false;
    }
    long long g12 = std::gcd(a[0] < 0 ? -a[0] : a[0], a[1] < 0 ? -a[1] : a[1]);
    if (g12 != lampow[d - 2]) return false;
    if (a[0] * a[0] + a[1] * a[1] < lampow[d - 1] * lampow[d - 1]) return false;
    return params.R_sq.contains_norm_sq(to_bigint((norm_sq_ll(a))));
}

inline bool in_n_lambda(const VecI& a, const DirectionParams& params) {
    VecI p = a;
    std::sort(p.begin(), p.end());
    do {
        if (in_n_lambda_prime(p, params)) return true;
    } while (std::next_permutation(p.begin(), p.end()));
    return false;
}

// ---------------------------------------------------------------------------
// kernel lattice basis and reduction
// ---------------------------------------------------------------------------
struct LatticeBasis {
    int ambient_dim = 0;
    std::vector<VecZ> vectors; // rank = ambient_dim - 1 for kernel lattices

    int rank() const { return static_cast<int>(vectors.size()); }

    std::vector<std::vector<BigInt>> gram() const {
        int r = rank();
        std::vector<std::vector<BigInt>> g(r, std::vector<BigInt>(r));
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) g[i][j] = dot_z(vectors[i], vectors[j]);
        return g;
    }

    BigInt gram_det() const {
        auto g = gram();
        return det_int(g);
    }

    static BigInt det_int(std::vector<std::vector<BigInt>> m) {
        // exact fraction-free (Bareiss) determinant
        int n = static_cast<int>(m.size());
        if (n == 0) return BigInt(1);
        BigInt prev(1);
        int sign = 1;
        for (int k = 0; k < n - 1; ++k) {
            if (sign_of(m[k][k]) == 0) {
                int p = k + 1;
                while (p < n && sign_of(m[p][k]) == 0) ++p;
                if (p == n) return BigInt(0);
                std::swap(m[p], m[k]);
                sign = -sign;
            }
            for (int i = k + 1; i < n; ++i)
                for (int j = k + 1; j < n; ++j) {
                    m[i][j] = m[k][k] * m[i][j] - m[i][k] * m[k][j];
                    mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
                }
            prev = m[k][k];
        }
        return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
    }
};

// integer vector y with a . y = 1 (a primitive), by iterated extended gcd
inline VecZ solve_unit_dot(const VecZ& a) {
    int d = static_cast<int>(a.size());
    VecZ y(d, BigInt(0));
    BigInt g = a[0];
    y[0] = sign_of(a[0]) >= 0 ? 1 : -1;
    if (sign_of(a[0]) == 0) y[0] = 0;
    g = abs(a[0]);
    for (int i = 1; i < d; ++i) {
        BigInt s, t, g2;
        mpz_gcdext(g2.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(),
                   a[i].get_mpz_t());
        // g2 = s*g + t*a_i
        for (int j = 0; j < i; ++j) y[j] *= s;
        y[i] = t;
        g = g2;
    }
    if (g != 1) throw std::invalid_argument("solve_unit_dot: vector not primitive");
    return y;
}

// saturated integer basis of {x : a . x = 0} by unimodular column elimination
inline LatticeBasis kernel_basis(const VecI& a_in) {
    int d = static_cast<int>(a_in.size());
    VecZ r = to_vecz(a_in);
    // columns of the identity, transformed alongside r
    std::vector<VecZ> cols(d, VecZ(d, BigInt(0)));
    for (int j = 0; j < d; ++j) cols[j][j] = 1;
    while (true) {
        // pick the smallest-magnitude nonzero pivot
        int piv = -1;
        for (int j = 0; j < d; ++j)
            if (sign_of(r[j]) != 0 && (piv < 0 || abs(r[j]) < abs(r[piv]))) piv = j;
        if (piv < 0) throw std::invalid_argument("kernel_basis: zero vector");
        bool done = true;
        for (int j = 0; j < d; ++j) {
            if (j == piv || sign_of(r[j]) == 0) continue;
            BigInt q;
            mpz_fdiv_q(q.get_mpz_t(), r[j].get_mpz_t(), r[piv].get_mpz_t());
            if (sign_of(q) != 0) {
                r[j] -= q * r[piv];
                for (int t = 0; t < d; ++t) cols[j][t] -= q * cols[piv][t];
            }
            if (sign_of(r[j]) != 0) done = false;
        }
        if (done) {
            // unique nonzero entry must be +-1 for primitive a
            if (abs(r[piv]) != 1) throw std::invalid_argument("kernel_basis: input not primitive");
            LatticeBasis b;
            b.ambient_dim = d;
            for (int j = 0; j < d; ++j)
                if (j != piv) b.vectors.push_back(cols[j]);
            return b;
        }
    }
}

// nearest integer to a rational (ties toward +infinity)
inline BigInt round_nearest(const BigRational& q) {
    BigRational shifted = q + make_rational(1, 2);
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), shifted.get_num().get_mpz_t(), shifted.get_den().get_mpz_t());
    return r;
}

namespace detail {

// Lagrange/Gauss reduction for rank-2 integer lattices: returns a minimal
// basis (|y1| <= |y2| and 2|<y1,y2>| <= |y1|^2, so y1 is a shortest vector)
inline void gauss_reduce(std::vector<VecZ>& y) {
    auto norm2 = [](const VecZ& v) { return dot_z(v, v); };
    if (norm2(y[0]) > norm2(y[1])) std::swap(y[0], y[1]);
    while (true) {
        BigInt n0 = norm2(y[0]);
        if (sign_of(n0) == 0) throw std::logic_error("gauss_reduce: degenerate basis");
        BigInt t = round_nearest(make_rational(dot_z(y[0], y[1]), n0));
        if (sign_of(t) != 0)
            for (std::size_t j = 0; j < y[0].size(); ++j) y[1][j] -= t * y[0][j];
        if (norm2(y[1]) < n0) std::swap(y[0], y[1]);
        else break;
    }
}

// exact integer LLL (delta = 3/4) on the rows of y
inline void lll_reduce(std::vector<VecZ>& y) {
    int r = static_cast<int>(y.size());
    if (r <= 1) return;
    auto recompute = [&](std::vector<std::vector<BigRational>>& mu, std::vector<BigRational>& B) {
        std::vector<VecQ> gs(r);
        for (int i = 0; i < r; ++i) {
            gs[i].assign(y[i].size(), BigRational(0));
            for (std::size_t t = 0; t < y[i].size(); ++t) gs[i][t] = BigRational(y[i][t]);
            for (int j = 0; j < i; ++j) {
                BigRational num(0);
                for (std::size_t t = 0; t < y[i].size(); ++t) num += BigRational(y[i][t]) * gs[j][t];
                mu[i][j] = num / B[j];
                for (std::size_t t = 0; t < y[i].size(); ++t) gs[i][t] -= mu[i][j] * gs[j][t];
            }
            B[i] = dot_qq(gs[i], gs[i]);
        }
    };
    std::vector<std::vector<BigRational>> mu(r, std::vector<BigRational>(r, BigRational(0)));
    std::vector<BigRational> B(r, BigRational(0));
    recompute(mu, B);
    int k = 1;
    int guard = 0;
    while (k < r && ++guard < 100000) {
        for (int j = k - 1; j >= 0; --j) {
            BigInt q = round_nearest(mu[k][j]);
            if (sign_of(q) != 0) {
                for (std::size_t t = 0; t < y[k].size(); ++t) y[k][t] -= q * y[j][t];
                recompute(mu, B);
            }
        }
        BigRational lhs = B[k];
        BigRational rhs = (make_rational(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1];
        if (cmp(lhs, rhs) >= 0) {
            ++k;
        } else {
            std::swap(y[k], y[k - 1]);
            recompute(mu, B);
            k = std::max(1, k - 1);
        }
    }
}

inline BigInt rational_sqrt_floor(const BigRational& q) { // floor(sqrt(q)), q >= 0
    if (sign_of(q) < 0) throw std::domain_error("sqrt of negative");
    BigInt num = q.get_num(), den = q.get_den();
    // floor(sqrt(num/den)) = floor(sqrt(num*den)/den)
    BigInt s = isqrt_floor(num * den);
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), s.get_mpz_t(), den.get_mpz_t());
    return r;
}

} // namespace detail

// all nonzero lattice vectors v (up to sign: returns one of {v,-v}) with
// ||v||^2 <= bound_sq, by exact Fincke-Pohst enumeration over the GS frame
inline std::vector<VecZ> enumerate_short_vectors(const LatticeBasis& basis,
                                                 const BigRational& bound_sq) {
    int r = basis.rank();
    std::vector<std::vector<BigRational>> mu(r, std::vector<BigRational>(r, BigRational(0)));
    std::vector<BigRational> B(r, BigRational(0));
    {
        std::vector<VecQ> gs(r);
        for (int i = 0; i < r; ++i) {
            gs[i].assign(basis.vectors[i].size(), BigRational(0));
            for (std::size_t t = 0; t < gs[i].size(); ++t) gs[i][t] = BigRational(basis.vectors[i][t]);
            for (int j = 0; j < i; ++j) {
                BigRational num(0);
                for (std::size_t t = 0; t < gs[i].size(); ++t)
                    num += BigRational(basis.vectors[i][t]) * gs[j][t];
                mu[i][j] = num / B[j];
                for (std::size_t t = 0; t < gs[i].size(); ++t) gs[i][t] -= mu[i][j] * gs[j][t];
            }
            B[i] = dot_qq(gs[i], gs[i]);
        }
    }
    std::vector<VecZ> found;
    std::vector<BigRational> center(r, BigRational(0));
    std::vector<BigInt> z(r, BigInt(0));
    // enumerate from the last GS level down
    std::function<void(int, const BigRational&)> rec = [&](int i, const BigRational& remaining) {
        if (i < 0) {
            bool nonzero = false;
            for (const auto& c : z)
                if (sign_of(c) != 0) nonzero = true;
            if (!nonzero) return;
            // canonical sign: first nonzero coefficient positive
            for (const auto& c : z) {
                if (sign_of(c) > 0) break;
                if (sign_of(c) < 0) return;
            }
            VecZ v(basis.vectors[0].size(), BigInt(0));
            for (int t = 0; t < r; ++t)
                for (std::size_t s = 0; s < v.size(); ++s) v[s] += z[t] * basis.vectors[t][s];
            found.push_back(std::move(v));
            return;
        }
        BigRational c(0);
        for (int j = i + 1; j < r; ++j) c += mu[j][i] * BigRational(z[j]);
        // (z_i + c)^2 * B_i <= remaining
        BigRational rad = remaining / B[i];
        BigInt lo, hi;
        {
            BigInt fs = detail::rational_sqrt_floor(rad);
            // z_i in [ceil(-c - sqrt(rad)), floor(-c + sqrt(rad))]; widen by 1 and filter
            BigRational mc = -c;
            lo = round_nearest(mc) - fs - 2;
            hi = round_nearest(mc) + fs + 2;
        }
        for (BigInt t = lo; t <= hi; t += 1) {
            BigRational dv = BigRational(t) + c;
            BigRational used = dv * dv * B[i];
            if (cmp(used, remaining) > 0) continue;
            z[i] = t;
            rec(i - 1, remaining - used);
        }
        z[i] = 0;
    };
    rec(r - 1, bound_sq);
    return found;
}

struct ReducedBasis {
    LatticeBasis basis;
    bool theta_bound_ok = false;
    bool improved = false; // exhaustive short-vector improvement was applied
};

// theta_d^2 = rational_factor / pi^2
inline BigRational theta_sq_rational_factor(int d) {
    BigInt dpow;
    mpz_ui_pow_ui(dpow.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(3 * d));
    BigInt num = BigInt(128) * dpow;
    BigInt den = BigInt(6561) * d;
    BigInt dm1 = BigInt(d - 1);
    den *= dm1 * dm1 * dm1;
    return make_rational(num, den);
}

// certified check of prod ||y_i||^2 <= theta_d^2 * det(Gram)
inline bool theta_bound_holds(const LatticeBasis& b, int d) {
    BigInt prod(1);
    for (const auto& y : b.vectors) prod *= dot_z(y, y);
    BigRational factor = theta_sq_rational_factor(d);
    BigInt det = b.gram_det();
    // prod * pi^2 <= factor * det ?
    for (mpfr_prec_t p = IntervalScalar::kDefaultPrec; p <= IntervalScalar::kMaxPrec; p *= 2) {
        IntervalScalar pi = IntervalScalar::pi(p);
        IntervalScalar lhs = IntervalScalar::from_bigint(prod, p) * pi * pi;
        IntervalScalar rhs = IntervalScalar::from_rational(factor * BigRational(det), p);
        int s = (lhs - rhs).sign_certain();
        if (s != 0) return s < 0;
    }
    return false; // undecidable at max precision: report as not satisfied
}

inline ReducedBasis reduce_basis(const LatticeBasis& in, int d) {
    ReducedBasis out;
    out.basis = in;
    int r = in.rank();
    if (r == 2) {
        detail::gauss_reduce(out.basis.vectors);
    } else if (r >= 3) {
        detail::lll_reduce(out.basis.vectors);
    }
    out.theta_bound_ok = theta_bound_holds(out.basis, d);
    if (!out.theta_bound_ok && r >= 2 && r <= 4) {
        // exhaustive improvement: greedily pick shortest independent vectors
        BigInt maxn(0);
        for (const auto& y : out.basis.vectors) maxn = std::max(maxn, dot_z(y, y));
        auto shorts = enumerate_short_vectors(out.basis, BigRational(maxn));
        std::sort(shorts.begin(), shorts.end(), [](const VecZ& a, const VecZ& b) {
            return dot_z(a, a) < dot_z(b, b);
        });
        std::vector<VecZ> chosen;
        for (const auto& v : shorts) {
            std::vector<VecZ> trial = chosen;
            trial.push_back(v);
            LatticeBasis tb{in.ambient_dim, trial};
            if (sign_of(tb.gram_det()) != 0) chosen = trial;
            if (static_cast<int>(chosen.size()) == r) break;
        }
        if (static_cast<int>(chosen.size()) == r) {
            LatticeBasis cand{in.ambient_dim, chosen};
            // accept only a true basis (same covolume)
            if (cand.gram_det() == out.basis.gram_det()) {
                out.basis = cand;
                out.improved = true;
                out.theta_bound_ok = theta_bound_holds(out.basis, d);
            }
        }
    }
    return out;
}

// true iff no nonzero lattice vector has norm < bound
inline bool shortest_vector_at_least(const LatticeBasis& basis, long long bound) {
    if (bound < 1) throw std::invalid_argument("shortest_vector_at_least: bound >= 1");
    if (basis.rank() == 2) {
        std::vector<VecZ> y = basis.vectors;
        detail::gauss_reduce(y);
        return dot_z(y[0], y[0]) >= to_bigint((bound)) * static_cast<long>(bound);
    }
    auto v = enumerate_short_vectors(basis, BigRational(to_bigint((bound)) * static_cast<long>(bound) - 1));
    return v.empty();
}

// ---------------------------------------------------------------------------
// height vectors
// ---------------------------------------------------------------------------
struct HeightData {
    std::vector<VecQ> heights;          // h_i, exact rational vectors
    std::vector<BigRational> norm_sq;   // ||h_i||^2
};

namespace detail {

// solve the square rational system M c = rhs by Gaussian elimination
inline std::vector<BigRational> solve_rational(std::vector<std::vector<BigRational>> m,
                                               std::vector<BigRational> rhs) {
    int n = static_cast<int>(m.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        while (piv < n && sign_of(m[piv][col]) == 0) ++piv;
        if (piv == n) throw std::logic_error("solve_rational: singular system");
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col || sign_of(m[r][col]) == 0) continue;
            BigRational f = m[r][col] / m[col][col];
            for (int c = col; c < n; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<BigRational> x(n);
    for (int i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
    return x;
}

} // namespace detail

inline HeightData height_vectors(const LatticeBasis& b) {
    int r = b.rank();
    HeightData out;
    out.heights.resize(r);
    out.norm_sq.resize(r);
    auto gram = b.gram();
    for (int i = 0; i < r; ++i) {
        // project y_i off span(y_j, j != i)
        std::vector<std::vector<BigRational>> m;
        std::vector<BigRational> rhs;
        std::vector<int> others;
        for (int j = 0; j < r; ++j)
            if (j != i) others.push_back(j);
        for (int a : others) {
            std::vector<BigRational> row;
            for (int c : others) row.emplace_back(gram[a][c]);
            m.push_back(std::move(row));
            rhs.emplace_back(gram[a][i]);
        }
        VecQ h(b.vectors[i].size());
        for (std::size_t t = 0; t < h.size(); ++t) h[t] = BigRational(b.vectors[i][t]);
        if (!others.empty()) {
            auto coef = detail::solve_rational(m, rhs);
            for (std::size_t oi = 0; oi < others.size(); ++oi)
                for (std::size_t t = 0; t < h.size(); ++t)
                    h[t] -= coef[oi] * BigRational(b.vectors[others[oi]][t]);
        }
        out.norm_sq[i] = dot_qq(h, h);
        out.heights[i] = std::move(h);
    }
    return out;
}

// ---------------------------------------------------------------------------
// direction functions, tangent support, rotation, slice frames
// ---------------------------------------------------------------------------
struct DirectionFunction {
    enum class Kind { Integral, Rotated };
    Kind kind = Kind::Integral;
    VecZ base;   // h
    VecZ a0;     // integral direction vector (the a0 component for rotated)
    // rotated data: g(x) = nu*(height.(x-h)) + (a0.(x-h))*sqrt(mu_sq)
    VecQ height;
    BigRational nu;
    BigRational mu_sq;

    SurdScalar eval(const VecZ& x) const {
        VecZ delta(x.size());
        for (std::size_t t = 0; t < x.size(); ++t) delta[t] = x[t] - base[t];
        BigInt a0dot = dot_z(a0, delta);
        if (kind == Kind::Integral) return SurdScalar(BigRational(a0dot));
        BigRational u = nu * dot_qz(height, delta);
        return SurdScalar(u, BigRational(a0dot), mu_sq);
    }

    SurdScalar eval(const VecI& x) const { return eval(to_vecz(x)); }
};

struct TangentFrame {
    VecI a0;            // inward normal of the tight facet (primitive)
    VecI h;             // touching point of H
    VecQ t0;            // ray start (bounding-box center of [n]^d)
    VecI ray;           // the chosen shoot direction a'
    SurdScalar sigma;   // center = t0 - sigma * ray; sigma >= 0
    BigRational r_sq;   // circumscribed-sphere radius squared
    std::vector<VecI> tie_directions; // all facets tight at sigma (diagnostics)
};

// sign of (a.(t0 - sigma*ray) + r*||a|| - value): the supporting value of
// direction a at the translated sphere center, compared exactly against a
// rational. Zero certifies exact tangency of that facet.
inline int compare_support_value(const TangentFrame& f, const VecI& a, const BigRational& value) {
    BigRational adot_t0(0);
    for (std::size_t t = 0; t < a.size(); ++t) adot_t0 += f.t0[t] * BigRational(to_bigint(a[t]));
    long long aray = dot_ll(a, f.ray);
    SurdScalar center_part =
        SurdScalar(adot_t0 - value) - f.sigma * SurdScalar(BigRational(to_bigint(aray)));
    BigRational rad = f.r_sq * BigRational(to_bigint(norm_sq_ll(a)));
    SurdScalar r_norm(BigRational(0), BigRational(1), rad);
    // center_part lives in sigma's field, r_norm in its own; join the fields
    auto ctx = SurdTower::make_context({center_part.radicand(), r_norm.radicand()});
    return (SurdTower::from_surd(ctx, center_part) + SurdTower::from_surd(ctx, r_norm)).sign();
}

// Translate the circumscribed polytope of the sphere (radius^2 = r_sq, facets
// from `directions`) along -ray until a facet touches H. Exact rational/surd
// ray shooting; ties resolved lexicographically.
inline TangentFrame support_tangent(const std::vector<VecI>& H, const std::vector<VecI>& directions,
                                    int n, const BigRational& r_sq) {
    if (H.empty()) throw std::invalid_argument("support_tangent: empty point set");
    if (directions.empty()) throw std::invalid_argument("support_tangent: empty direction set");
    int d = static_cast<int>(H[0].size());

    // per-direction support values of H
    std::vector<long long> maxdot(directions.size());
    for (std::size_t i = 0; i < directions.size(); ++i) {
        const VecI& a = directions[i];
        long long m = dot_ll(a, H[0]);
        for (const VecI& x : H) m = std::max(m, dot_ll(a, x));
        maxdot[i] = m;
    }

    VecQ t0(d, make_rational(n + 1, 2));
    const VecI& ray = *std::min_element(directions.begin(), directions.end());

    // bound_i = (c_i + sqrt(r_sq * |a_i|^2)) / (a_i . ray), over a_i.ray > 0
    auto bound_of = [&](std::size_t i) -> SurdScalar {
        const VecI& a = directions[i];
        long long e = dot_ll(a, ray);
        BigRational c(0);
        for (int t = 0; t < d; ++t) c += t0[t] * BigRational(to_bigint((a[t])));
        c -= BigRational(to_bigint((maxdot[i])));
        BigRational rad = r_sq * BigRational(to_bigint((norm_sq_ll(a))));
        BigRational einv = make_rational(BigInt(1), to_bigint((e)));
        return SurdScalar(c * einv, einv, rad);
    };

    // double prefilter pass
    double best_approx = std::numeric_limits<double>::infinity();
    std::vector<double> approx(directions.size(), std::numeric_limits<double>::infinity());
    double r_d = std::sqrt(r_sq.get_d());
    for (std::size_t i = 0; i < directions.size(); ++i) {
        const VecI& a = directions[i];
        long long e = dot_ll(a, ray);
        if (e <= 0) continue;
        double c = 0;
        for (int t = 0; t < d; ++t) c += t0[t].get_d() * static_cast<double>(a[t]);
        c -= static_cast<double>(maxdot[i]);
        double val = (c + r_d * std::sqrt(static_cast<double>(norm_sq_ll(a)))) / static_cast<double>(e);
        approx[i] = val;
        best_approx = std::min(best_approx, val);
    }
    double tol = 1e-7 * (1.0 + std::abs(best_approx));

    std::optional<SurdScalar> best;
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < directions.size(); ++i) {
        if (!(approx[i] <= best_approx + tol)) continue;
        SurdScalar b = bound_of(i);
        if (!best) {
            best = b;
            ties = {i};
            continue;
        }
        int c = compare_mixed_surds(b, *best);
        if (c < 0) {
            best = b;
            ties = {i};
        } else if (c == 0) {
            ties.push_back(i);
        }
    }
    if (!best || best->sign() < 0)
        throw std::logic_error("support_tangent: infeasible start (enclosing sphere too small)");

    // lexicographically smallest among tying facets
    std::size_t bind = ties[0];
    for (std::size_t i : ties)
        if (directions[i] < directions[bind]) bind = i;

    TangentFrame f;
    f.ray = ray;
    f.t0 = std::move(t0);
    f.sigma = *best;
    f.r_sq = r_sq;
    for (std::size_t i : ties) f.tie_directions.push_back(directions[i]);
    // inward normal: H lies on the positive side
    f.a0.resize(d);
    for (int t = 0; t < d; ++t) f.a0[t] = -directions[bind][t];
    // touching point: lexicographically smallest maximizer of the facet direction
    const VecI& ab = directions[bind];
    long long m = maxdot[bind];
    std::optional<VecI> h;
    for (const VecI& x : H)
        if (dot_ll(ab, x) == m && (!h || x < *h)) h = x;
    f.h = *h;
    return f;
}

struct RotatedDirections {
    std::vector<DirectionFunction> g;   // d-1 rotated direction functions
    std::vector<bool> flipped;          // which basis vector was negated
};

// choose y_i from {y_i, -y_i} so the height points toward the tangency side,
// then rotate a0 toward each height. Mutates the basis in place (flips).
inline RotatedDirections rotate_directions(const VecI& a0, LatticeBasis& basis, HeightData& heights,
                                           const TangentFrame& frame) {
    int r = basis.rank();
    RotatedDirections out;
    out.flipped.assign(r, false);
    BigInt a0_norm_sq(static_cast<long>(norm_sq_ll(a0)));
    VecZ h_z = to_vecz(frame.h);
    for (int i = 0; i < r; ++i) {
        if (cmp(heights.norm_sq[i], BigRational(1)) <= 0)
            throw std::domain_error("rotate_directions: ||h_i|| <= 1 (degenerate rotation)");
        // orientation: h_i . (t_c - h) >= 0 with t_c = t0 - sigma*ray
        BigRational hdot_t0h(0);
        for (std::size_t t = 0; t < heights.heights[i].size(); ++t)
            hdot_t0h += heights.heights[i][t] * (frame.t0[t] - BigRational(h_z[t]));
        BigRational hdot_ray(0);
        for (std::size_t t = 0; t < heights.heights[i].size(); ++t)
            hdot_ray += heights.heights[i][t] * BigRational(to_bigint((frame.ray[t])));
        SurdScalar orient = SurdScalar(hdot_t0h) - frame.sigma * SurdScalar(hdot_ray);
        if (orient.sign() < 0) {
            out.flipped[i] = true;
            for (auto& c : basis.vectors[i]) c = -c;
            for (auto& c : heights.heights[i]) c = -c;
        }
        DirectionFunction g;
        g.kind = DirectionFunction::Kind::Rotated;
        g.base = h_z;
        g.a0 = to_vecz(a0);
        g.height = heights.heights[i];
        g.nu = BigRational(1) / heights.norm_sq[i];
        g.mu_sq = (BigRational(1) - g.nu) / BigRational(a0_norm_sq);
        out.g.push_back(std::move(g));
    }
    return out;
}

inline DirectionFunction integral_direction(const VecI& a0, const VecI& h) {
    DirectionFunction g;
    g.kind = DirectionFunction::Kind::Integral;
    g.base = to_vecz(h);
    g.a0 = to_vecz(a0);
    return g;
}

struct SliceFrame {
    BigInt k;                      // slice level
    VecZ origin;                   // o_k
    std::vector<SurdScalar> eps;   // eps_{ik} in (-1/2, 1/2], one per rotated i
};

// integer point of the slice g0 = k, reduced so every rotated value lands in
// (-1/2, 1/2]
inline SliceFrame slice_frame(const BigInt& k, const DirectionFunction& g0,
                              const LatticeBasis& basis,
                              const std::vector<DirectionFunction>& rotated) {
    SliceFrame f;
    f.k = k;
    VecZ y0 = solve_unit_dot(g0.a0);
    BigInt target = k + dot_z(g0.a0, g0.base);
    VecZ x(y0.size());
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = target * y0[t];
    // reduce with a_i . y_j = delta_ij
    for (std::size_t i = 0; i < rotated.size(); ++i) {
        SurdScalar v = rotated[i].eval(x);
        BigInt m = v.nearest_int_half_open();
        if (sign_of(m) != 0)
            for (std::size_t t = 0; t < x.size(); ++t) x[t] -= m * basis.vectors[i][t];
    }
    for (const auto& g : rotated) f.eps.push_back(g.eval(x));
    f.origin = std::move(x);
    return f;
}

// ---------------------------------------------------------------------------
// nearest lambda-patterned direction to a line through the origin
// ---------------------------------------------------------------------------
struct NearestDirectionResult {
    VecI b;
    BigInt norm_sq{0};
    BigRational dist_sq{0};      // squared distance from b to the line
    bool in_n_lambda_prime_sorted = false;
    std::string failed_step;     // empty on success

    bool ok() const { return failed_step.empty(); }
};

inline NearestDirectionResult nearest_direction(const VecQ& line, const DirectionParams& params) {
    NearestDirectionResult res;
    int d = params.d;
    long long lam = params.lambda;
    if (static_cast<int>(line.size()) != d) throw std::invalid_argument("nearest_direction: dim");
    std::vector<long long> lampow(d + 1, 1);
    for (int i = 1; i <= d; ++i) lampow[i] = lampow[i - 1] * lam;

    // sort |coordinates| descending, remember permutation and signs
    std::vector<int> perm(d);
    for (int i = 0; i < d; ++i) perm[i] = i;
    auto absq = [](const BigRational& q) { return sign_of(q) < 0 ? BigRational(-q) : q; };
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
        return cmp(absq(line[a]), absq(line[b])) > 0;
    });
    std::vector<int> sign(d, 1);
    VecQ u(d);
    for (int i = 0; i < d; ++i) {
        BigRational v = line[perm[i]];
        if (sign_of(v) < 0) {
            sign[i] = -1;
            v = -v;
        }
        u[i] = v;
    }
    if (sign_of(u[0]) == 0) {
        res.failed_step = "zero direction";
        return res;
    }

    // xbar1 = (R - 2 lam^{d-2}) * u1 / (lam^{d-2} * ||u||); prime p <= xbar1
    long long p_prime = 0;
    {
        BigRational uns = dot_qq(u, u);
        for (mpfr_prec_t prec = 256; prec <= IntervalScalar::kMaxPrec; prec *= 2) {
            IntervalScalar R = params.R_sq.eval_r2(prec).sqrt();
            IntervalScalar xbar1 =
                (R - IntervalScalar::from_long(2 * lampow[d - 2], prec)) *
                IntervalScalar::from_rational(u[0], prec) *
                IntervalScalar::from_rational(BigRational(1) / BigRational(to_bigint((lampow[d - 2]))), prec);
            IntervalScalar denom = IntervalScalar::from_rational(uns, prec).sqrt();
            // xbar1 / ||u||: conservative lower endpoint
            double lo = xbar1.lo_d() / denom.hi_d();
            if (lo >= 2.0) {
                p_prime = largest_prime_leq(static_cast<long long>(lo));
                break;
            }
            if (prec == IntervalScalar::kMaxPrec) {
                res.failed_step = "no prime <= xbar1 (n too small for this line)";
                return res;
            }
        }
    }

    // y on the line with y1 = lam^{d-2} * p
    VecQ y(d);
    BigRational scale = BigRational(to_bigint((lampow[d - 2] * p_prime))) / u[0];
    for (int i = 0; i < d; ++i) y[i] = u[i] * scale;
    // q = p * u2/u1; i0 in [1, p-1] with |i0 - q| <= 1
    BigRational q = BigRational(to_bigint((p_prime))) * u[1] / u[0];
    BigInt i0 = round_nearest(q);
    if (i0 < 1) i0 = 1;
    if (i0 > to_bigint(p_prime - 1)) i0 = to_bigint(p_prime - 1);
    if (i0 < 1) {
        res.failed_step = "p too small to pick i0 in [1, p-1]";
        return res;
    }
    if (cmp(absq(BigRational(i0) - q), BigRational(1)) > 0) {
        res.failed_step = "|i0 - q| > 1";
        return res;
    }

    VecI b(d, 0);
    b[0] = lampow[d - 2] * p_prime;
    b[1] = lampow[d - 2] * i0.get_si();
    for (int i = 3; i <= d; ++i) {
        long long sc = lampow[d - i];
        // floor(y_i / sc) + delta, delta in {0,1} with lam not dividing the digit
        BigRational ratio = y[i - 1] / BigRational(to_bigint((sc)));
        BigInt fl;
        mpz_fdiv_q(fl.get_mpz_t(), ratio.get_num().get_mpz_t(), ratio.get_den().get_mpz_t());
        BigInt digit = fl;
        if (digit % to_bigint(lam) == 0) digit += 1;
        b[i - 1] = sc * digit.get_si();
        // per-coordinate proof bound |b_i - y_i| <= lam^{d-i}
        if (cmp(absq(BigRational(to_bigint((b[i - 1]))) - y[i - 1]),
                BigRational(to_bigint((sc)))) > 0) {
            res.failed_step = "coordinate bound |b_i - y_i| > lam^{d-i}";
            return res;
        }
    }
    if (b[d - 1] % lam == 0) {
        res.failed_step = "lambda divides b_d";
        return res;
    }

    // membership in N'_lambda(R), checked against the verbatim conditions
    if (!in_n_lambda_prime(b, params)) {
        res.failed_step = "constructed b fails N'_lambda membership";
        res.b = b;
        return res;
    }
    res.in_n_lambda_prime_sorted = true;

    // permute and flip back
    VecI back(d, 0);
    for (int i = 0; i < d; ++i) back[perm[i]] = sign[i] * b[i];
    res.b = back;
    res.norm_sq = to_bigint((norm_sq_ll(back)));
    // distance^2 to the line spanned by `line`
    BigRational bu(0), uu = dot_qq(line, line);
    for (int i = 0; i < d; ++i) bu += line[i] * BigRational(to_bigint((back[i])));
    res.dist_sq = BigRational(res.norm_sq) - bu * bu / uu;
    return res;
}

} // namespace deckpoly
