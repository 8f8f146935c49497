#pragma once

// Exact arithmetic substrate: big rationals (GMP), quadratic surds and small
// surd towers, and directed-rounding intervals (MPFR) for certified strict
// inequalities.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace deckpoly {

using BigInt = mpz_class;
using BigRational = mpq_class;

inline int sign_of(const BigRational& q) { return mpq_sgn(q.get_mpq_t()); }
inline int sign_of(const BigInt& z) { return mpz_sgn(z.get_mpz_t()); }

inline BigRational make_rational(const BigInt& num, const BigInt& den) {
    if (sign_of(den) == 0) throw std::invalid_argument("make_rational: zero denominator");
    BigRational q(num, den);
    q.canonicalize();
    return q;
}

inline BigInt to_bigint(long long v) { return BigInt(static_cast<long>(v)); }

inline BigRational make_rational(long long num, long long den) {
    return make_rational(to_bigint(num), to_bigint(den));
}

inline BigRational rational_from_string(const std::string& s) {
    BigRational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
    q.canonicalize();
    return q;
}

inline std::string rational_to_string(const BigRational& q) { return q.get_str(); }

inline bool is_perfect_square(const BigInt& z) {
    return sign_of(z) >= 0 && mpz_perfect_square_p(z.get_mpz_t()) != 0;
}

inline BigInt isqrt_floor(const BigInt& z) {
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), z.get_mpz_t());
    return r;
}

// floor of z^(1/k); exact integer root test via mpz_root return value
inline BigInt iroot_floor(const BigInt& z, unsigned long k, bool* exact = nullptr) {
    BigInt r;
    int ex = mpz_root(r.get_mpz_t(), z.get_mpz_t(), k);
    if (exact) *exact = (ex != 0);
    return r;
}

// sqrt of a rational when it is an exact square of a rational
inline std::optional<BigRational> exact_sqrt(const BigRational& q) {
    if (sign_of(q) < 0) return std::nullopt;
    if (!is_perfect_square(q.get_num()) || !is_perfect_square(q.get_den())) return std::nullopt;
    return make_rational(isqrt_floor(q.get_num()), isqrt_floor(q.get_den()));
}

// ---------------------------------------------------------------------------
// SurdScalar: exact value u + v*sqrt(s) with rational u, v and rational s >= 0.
// Invariant: if v != 0 then s is not a perfect square of a rational; if v == 0
// then s == 0. Arithmetic stays within one radicand (commensurate radicands
// are aligned automatically: sqrt(8) folds onto sqrt(2)).
// ---------------------------------------------------------------------------
class SurdScalar {
public:
    SurdScalar() : u_(0), v_(0), s_(0) {}
    SurdScalar(const BigRational& r) : u_(r), v_(0), s_(0) {} // NOLINT implicit
    SurdScalar(long v) : u_(v), v_(0), s_(0) {}               // NOLINT implicit
    SurdScalar(BigRational u, BigRational v, BigRational s)
        : u_(std::move(u)), v_(std::move(v)), s_(std::move(s)) {
        normalize();
    }

    const BigRational& rational_part() const { return u_; }
    const BigRational& surd_coeff() const { return v_; }
    const BigRational& radicand() const { return s_; }
    bool is_rational() const { return sign_of(v_) == 0; }

    // exact value comparison against zero; total
    int sign() const {
        int su = sign_of(u_);
        if (is_rational()) return su;
        int sv = sign_of(v_);
        if (su == 0) return sv;
        if (su == sv) return su;
        BigRational lhs = u_ * u_;
        BigRational rhs = v_ * v_ * s_;
        int c = cmp(lhs, rhs);
        if (c == 0) throw std::logic_error("SurdScalar: radicand invariant violated");
        return c > 0 ? su : sv;
    }

    bool is_zero() const { return sign_of(u_) == 0 && sign_of(v_) == 0; }

    SurdScalar operator-() const {
        SurdScalar r(*this);
        r.u_ = -r.u_;
        r.v_ = -r.v_;
        return r;
    }

    SurdScalar& operator+=(const SurdScalar& o) {
        if (o.is_rational()) { u_ += o.u_; return *this; }
        if (is_rational()) { v_ = o.v_; s_ = o.s_; u_ += o.u_; return *this; }
        BigRational coef = aligned_coeff(o);
        u_ += o.u_;
        v_ += o.v_ * coef;
        normalize();
        return *this;
    }
    SurdScalar& operator-=(const SurdScalar& o) { return *this += -o; }

    SurdScalar& operator*=(const SurdScalar& o) {
        if (o.is_rational()) { u_ *= o.u_; v_ *= o.u_; if (is_rational()) s_ = 0; normalize(); return *this; }
        if (is_rational()) {
            BigRational u0 = u_;
            u_ = u0 * o.u_;
            v_ = u0 * o.v_;
            s_ = o.s_;
            normalize();
            return *this;
        }
        BigRational coef = aligned_coeff(o); // o = o.u + (o.v*coef) sqrt(s_)
        BigRational ov = o.v_ * coef;
        BigRational nu = u_ * o.u_ + v_ * ov * s_;
        BigRational nv = u_ * ov + v_ * o.u_;
        u_ = nu;
        v_ = nv;
        normalize();
        return *this;
    }

    friend SurdScalar operator+(SurdScalar a, const SurdScalar& b) { return a += b; }
    friend SurdScalar operator-(SurdScalar a, const SurdScalar& b) { return a -= b; }
    friend SurdScalar operator*(SurdScalar a, const SurdScalar& b) { return a *= b; }

    SurdScalar inverse() const {
        if (is_zero()) throw std::domain_error("SurdScalar: division by zero");
        if (is_rational()) return SurdScalar(BigRational(1) / u_, 0, 0);
        BigRational den = u_ * u_ - v_ * v_ * s_; // nonzero: s_ non-square
        return SurdScalar(u_ / den, -v_ / den, s_);
    }

    SurdScalar abs() const { return sign() >= 0 ? *this : -*this; }

    bool operator==(const SurdScalar& o) const { return (*this - o).is_zero(); }
    bool operator!=(const SurdScalar& o) const { return !(*this == o); }
    int compare(const SurdScalar& o) const { return (*this - o).sign(); }

    // unique integer m with value - m in (-1/2, 1/2]
    BigInt nearest_int_half_open() const;

    // exact floor
    BigInt floor() const;

    std::string str() const {
        if (is_rational()) return rational_to_string(u_);
        return rational_to_string(u_) + " + " + rational_to_string(v_) + "*sqrt(" +
               rational_to_string(s_) + ")";
    }

private:
    BigRational u_, v_, s_;

    void normalize() {
        if (sign_of(v_) == 0 || sign_of(s_) == 0) { v_ = 0; s_ = 0; return; }
        if (sign_of(s_) < 0) throw std::domain_error("SurdScalar: negative radicand");
        if (auto r = exact_sqrt(s_)) {
            u_ += v_ * *r;
            v_ = 0;
            s_ = 0;
        }
    }

    // returns c with sqrt(o.s_) = c*sqrt(s_); throws if incommensurate
    BigRational aligned_coeff(const SurdScalar& o) const {
        if (o.s_ == s_) return BigRational(1);
        BigRational ratio = o.s_ / s_;
        if (auto r = exact_sqrt(ratio)) return *r;
        throw std::logic_error("SurdScalar: incommensurate radicands " + rational_to_string(s_) +
                               " vs " + rational_to_string(o.s_));
    }
};

inline bool radicands_commensurate(const BigRational& a, const BigRational& b) {
    if (sign_of(a) == 0 || sign_of(b) == 0) return true;
    return exact_sqrt(a / b).has_value();
}

// ---------------------------------------------------------------------------
// IntervalScalar: [lo, hi] with arbitrary-precision endpoints and outward
// rounding. Every operation encloses the exact result.
// ---------------------------------------------------------------------------
class IntervalScalar {
public:
    static constexpr mpfr_prec_t kDefaultPrec = 128;
    static constexpr mpfr_prec_t kMaxPrec = 2048;

    explicit IntervalScalar(mpfr_prec_t prec = kDefaultPrec) : prec_(prec) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }
    IntervalScalar(const IntervalScalar& o) : prec_(o.prec_) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    IntervalScalar(IntervalScalar&& o) noexcept : prec_(o.prec_) {
        mpfr_init2(lo_, prec_);
        mpfr_init2(hi_, prec_);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
    }
    IntervalScalar& operator=(IntervalScalar o) noexcept {
        std::swap(prec_, o.prec_);
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
        return *this;
    }
    ~IntervalScalar() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }

    static IntervalScalar from_rational(const BigRational& q, mpfr_prec_t prec = kDefaultPrec) {
        IntervalScalar r(prec);
        mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    static IntervalScalar from_bigint(const BigInt& z, mpfr_prec_t prec = kDefaultPrec) {
        IntervalScalar r(prec);
        mpfr_set_z(r.lo_, z.get_mpz_t(), MPFR_RNDD);
        mpfr_set_z(r.hi_, z.get_mpz_t(), MPFR_RNDU);
        return r;
    }
    static IntervalScalar from_long(long v, mpfr_prec_t prec = kDefaultPrec) {
        IntervalScalar r(prec);
        mpfr_set_si(r.lo_, v, MPFR_RNDD);
        mpfr_set_si(r.hi_, v, MPFR_RNDU);
        return r;
    }
    static IntervalScalar hull(const BigRational& lo, const BigRational& hi,
                               mpfr_prec_t prec = kDefaultPrec) {
        IntervalScalar r(prec);
        mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
        if (!r.valid()) throw std::invalid_argument("hull: lo > hi");
        return r;
    }
    static IntervalScalar pi(mpfr_prec_t prec = kDefaultPrec) {
        IntervalScalar r(prec);
        mpfr_const_pi(r.lo_, MPFR_RNDD);
        mpfr_const_pi(r.hi_, MPFR_RNDU);
        return r;
    }
    // log2 of a positive big integer
    static IntervalScalar log2_of(const BigInt& z, mpfr_prec_t prec = kDefaultPrec) {
        if (sign_of(z) <= 0) throw std::domain_error("log2_of: nonpositive");
        IntervalScalar t = from_bigint(z, prec);
        IntervalScalar r(prec);
        mpfr_log2(r.lo_, t.lo_, MPFR_RNDD);
        mpfr_log2(r.hi_, t.hi_, MPFR_RNDU);
        return r;
    }

    mpfr_prec_t prec() const { return prec_; }
    const mpfr_t& lo() const { return lo_; }
    const mpfr_t& hi() const { return hi_; }

    bool valid() const { return mpfr_lessequal_p(lo_, hi_) != 0; }

    IntervalScalar operator-() const {
        IntervalScalar r(prec_);
        mpfr_neg(r.lo_, hi_, MPFR_RNDD);
        mpfr_neg(r.hi_, lo_, MPFR_RNDU);
        return r;
    }

    friend IntervalScalar operator+(const IntervalScalar& a, const IntervalScalar& b) {
        IntervalScalar r(std::max(a.prec_, b.prec_));
        mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
        mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
        return r;
    }
    friend IntervalScalar operator-(const IntervalScalar& a, const IntervalScalar& b) {
        return a + (-b);
    }
    friend IntervalScalar operator*(const IntervalScalar& a, const IntervalScalar& b) {
        IntervalScalar r(std::max(a.prec_, b.prec_));
        mpfr_t t;
        mpfr_init2(t, r.prec_);
        const mpfr_srcptr as[2] = {a.lo_, a.hi_};
        const mpfr_srcptr bs[2] = {b.lo_, b.hi_};
        bool first = true;
        for (auto x : as)
            for (auto y : bs) {
                mpfr_mul(t, x, y, MPFR_RNDD);
                if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
                mpfr_mul(t, x, y, MPFR_RNDU);
                if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
                first = false;
            }
        mpfr_clear(t);
        return r;
    }

    IntervalScalar& operator+=(const IntervalScalar& o) { return *this = *this + o; }

    IntervalScalar abs() const {
        IntervalScalar r(prec_);
        if (mpfr_sgn(lo_) >= 0) return *this;
        if (mpfr_sgn(hi_) <= 0) return -*this;
        mpfr_set_zero(r.lo_, 1);
        mpfr_neg(r.hi_, lo_, MPFR_RNDU);
        if (mpfr_less_p(r.hi_, hi_)) mpfr_set(r.hi_, hi_, MPFR_RNDU);
        return r;
    }

    IntervalScalar sqrt() const {
        IntervalScalar r(prec_);
        if (mpfr_sgn(hi_) < 0) throw std::domain_error("interval sqrt of negative");
        if (mpfr_sgn(lo_) <= 0)
            mpfr_set_zero(r.lo_, 1);
        else
            mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
        mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
        return r;
    }

    IntervalScalar rootn(unsigned long k) const {
        IntervalScalar r(prec_);
        if (mpfr_sgn(lo_) < 0) throw std::domain_error("interval rootn of negative");
        mpfr_rootn_ui(r.lo_, lo_, k, MPFR_RNDD);
        mpfr_rootn_ui(r.hi_, hi_, k, MPFR_RNDU);
        return r;
    }

    bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
    bool contains(const BigRational& q) const {
        return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
    }

    // certain sign: +1 / -1 when the interval excludes zero, 0 when undecided
    int sign_certain() const {
        if (mpfr_sgn(lo_) > 0) return 1;
        if (mpfr_sgn(hi_) < 0) return -1;
        return 0;
    }

    double lo_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
    double hi_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }

    std::string str(int digits = 8) const {
        char* a = nullptr;
        char* b = nullptr;
        mpfr_asprintf(&a, "%.*Rg", digits, lo_);
        mpfr_asprintf(&b, "%.*Rg", digits, hi_);
        std::string out = std::string("[") + a + ", " + b + "]";
        mpfr_free_str(a);
        mpfr_free_str(b);
        return out;
    }

private:
    mpfr_prec_t prec_;
    mpfr_t lo_, hi_;
};

inline IntervalScalar to_interval(const SurdScalar& x, mpfr_prec_t prec = IntervalScalar::kDefaultPrec) {
    IntervalScalar u = IntervalScalar::from_rational(x.rational_part(), prec);
    if (x.is_rational()) return u;
    IntervalScalar v = IntervalScalar::from_rational(x.surd_coeff(), prec);
    IntervalScalar s = IntervalScalar::from_rational(x.radicand(), prec);
    return u + v * s.sqrt();
}

enum class CompareDecision { GT, LE, UNDECIDED };

inline const char* to_string(CompareDecision d) {
    switch (d) {
        case CompareDecision::GT: return "GT";
        case CompareDecision::LE: return "LE";
        default: return "UNDECIDED";
    }
}

// decision on the given intervals: GT iff a.lo > b.hi, LE iff a.hi <= b.lo
inline CompareDecision certify_strict_gt(const IntervalScalar& a, const IntervalScalar& b) {
    if (mpfr_greater_p(a.lo(), b.hi())) return CompareDecision::GT;
    if (mpfr_lessequal_p(a.hi(), b.lo())) return CompareDecision::LE;
    return CompareDecision::UNDECIDED;
}

// escalating form: re-evaluates both sides on a doubling precision schedule
template <typename FA, typename FB>
    requires requires(FA f, FB g, mpfr_prec_t p) { f(p); g(p); }
CompareDecision certify_strict_gt(FA&& eval_a, FB&& eval_b,
                                  mpfr_prec_t start = IntervalScalar::kDefaultPrec,
                                  mpfr_prec_t max = IntervalScalar::kMaxPrec) {
    for (mpfr_prec_t p = start;; p *= 2) {
        CompareDecision d = certify_strict_gt(eval_a(p), eval_b(p));
        if (d != CompareDecision::UNDECIDED) return d;
        if (p >= max) return CompareDecision::UNDECIDED;
    }
}

// ---------------------------------------------------------------------------
// SurdTower: exact element of Q(sqrt(s_1),...,sqrt(s_m)), m <= 3, stored as
// 2^m rational components indexed by radicand subsets. Needed for products of
// the d-1 rotated factors when d <= 4.
// ---------------------------------------------------------------------------
class SurdTower {
public:
    using Context = std::shared_ptr<const std::vector<BigRational>>;

    // canonicalizes: drops rational radicands, merges commensurate ones
    static Context make_context(const std::vector<BigRational>& raw) {
        auto ctx = std::make_shared<std::vector<BigRational>>();
        for (const auto& s : raw) {
            if (sign_of(s) < 0) throw std::domain_error("SurdTower: negative radicand");
            if (sign_of(s) == 0 || exact_sqrt(s)) continue;
            bool merged = false;
            for (const auto& t : *ctx)
                if (radicands_commensurate(s, t)) { merged = true; break; }
            if (!merged) ctx->push_back(s);
        }
        if (ctx->size() > 3)
            throw std::domain_error("SurdTower: more than 3 independent radicands");
        return ctx;
    }

    SurdTower() = default;
    explicit SurdTower(Context ctx) : ctx_(std::move(ctx)), c_(std::size_t(1) << ctx_->size(), BigRational(0)) {}

    static SurdTower from_rational(const Context& ctx, const BigRational& q) {
        SurdTower t(ctx);
        t.c_[0] = q;
        return t;
    }

    static SurdTower from_surd(const Context& ctx, const SurdScalar& x) {
        SurdTower t(ctx);
        t.c_[0] = x.rational_part();
        if (!x.is_rational()) {
            std::size_t idx = ctx->size();
            BigRational coef;
            for (std::size_t i = 0; i < ctx->size(); ++i) {
                if (radicands_commensurate(x.radicand(), (*ctx)[i])) {
                    coef = *exact_sqrt(x.radicand() / (*ctx)[i]);
                    idx = i;
                    break;
                }
            }
            if (idx == ctx->size()) throw std::logic_error("SurdTower: radicand not in context");
            t.c_[std::size_t(1) << idx] = x.surd_coeff() * coef;
        }
        return t;
    }

    const Context& context() const { return ctx_; }
    const std::vector<BigRational>& components() const { return c_; }
    std::size_t arity() const { return ctx_ ? ctx_->size() : 0; }

    bool is_zero() const {
        for (const auto& c : c_)
            if (sign_of(c) != 0) return false;
        return true;
    }
    bool is_rational() const {
        for (std::size_t i = 1; i < c_.size(); ++i)
            if (sign_of(c_[i]) != 0) return false;
        return true;
    }
    const BigRational& rational_part() const { return c_[0]; }

    SurdTower operator-() const {
        SurdTower r(*this);
        for (auto& c : r.c_) c = -c;
        return r;
    }
    SurdTower& operator+=(const SurdTower& o) {
        check_ctx(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    SurdTower& operator-=(const SurdTower& o) { return *this += -o; }
    friend SurdTower operator+(SurdTower a, const SurdTower& b) { return a += b; }
    friend SurdTower operator-(SurdTower a, const SurdTower& b) { return a -= b; }

    friend SurdTower operator*(const SurdTower& a, const SurdTower& b) {
        a.check_ctx(b);
        SurdTower r(a.ctx_);
        const auto& rad = *a.ctx_;
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (sign_of(a.c_[i]) == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j) {
                if (sign_of(b.c_[j]) == 0) continue;
                BigRational term = a.c_[i] * b.c_[j];
                std::size_t common = i & j;
                for (std::size_t k = 0; k < rad.size(); ++k)
                    if (common & (std::size_t(1) << k)) term *= rad[k];
                r.c_[i ^ j] += term;
            }
        }
        return r;
    }
    SurdTower& operator*=(const SurdTower& o) { return *this = *this * o; }

    int sign() const { return sign_rec(c_.data(), c_.size(), ctx_ ? ctx_->data() : nullptr); }

    SurdTower abs() const { return sign() >= 0 ? *this : -*this; }

    IntervalScalar to_interval(mpfr_prec_t prec = IntervalScalar::kDefaultPrec) const {
        IntervalScalar acc = IntervalScalar::from_rational(c_[0], prec);
        for (std::size_t i = 1; i < c_.size(); ++i) {
            if (sign_of(c_[i]) == 0) continue;
            IntervalScalar term = IntervalScalar::from_rational(c_[i], prec);
            for (std::size_t k = 0; k < ctx_->size(); ++k)
                if (i & (std::size_t(1) << k))
                    term = term * IntervalScalar::from_rational((*ctx_)[k], prec).sqrt();
            acc += term;
        }
        return acc;
    }

private:
    Context ctx_;
    std::vector<BigRational> c_;

    void check_ctx(const SurdTower& o) const {
        if (ctx_ == o.ctx_) return;
        if (ctx_ && o.ctx_ && *ctx_ == *o.ctx_) return;
        throw std::logic_error("SurdTower: mixed contexts");
    }

    // sign of sum over subsets A of c[A] * prod_{i in A} sqrt(rad[i])
    static int sign_rec(const BigRational* c, std::size_t len, const BigRational* rad) {
        if (len == 1) return sign_of(c[0]);
        std::size_t half = len / 2;
        std::size_t top = 0;
        while ((std::size_t(1) << (top + 1)) < len) ++top; // index of top radicand
        int sa = sign_rec(c, half, rad);
        int sb = sign_rec(c + half, half, rad);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // compare a^2 vs b^2 * s_top within the smaller tower
        std::vector<BigRational> a2 = mul_vec(c, c, half, rad);
        std::vector<BigRational> b2 = mul_vec(c + half, c + half, half, rad);
        for (auto& x : b2) x *= rad[top];
        for (std::size_t i = 0; i < half; ++i) a2[i] -= b2[i];
        int cmp = sign_rec(a2.data(), half, rad);
        if (cmp == 0) throw std::logic_error("SurdTower: dependent radicands");
        return cmp > 0 ? sa : sb;
    }

    static std::vector<BigRational> mul_vec(const BigRational* a, const BigRational* b,
                                            std::size_t len, const BigRational* rad) {
        std::vector<BigRational> r(len, BigRational(0));
        for (std::size_t i = 0; i < len; ++i) {
            if (sign_of(a[i]) == 0) continue;
            for (std::size_t j = 0; j < len; ++j) {
                if (sign_of(b[j]) == 0) continue;
                BigRational term = a[i] * b[j];
                std::size_t common = i & j;
                for (std::size_t k = 0; common >> k; ++k)
                    if (common & (std::size_t(1) << k)) term *= rad[k];
                r[i ^ j] += term;
            }
        }
        return r;
    }
};

// exact comparison of two single-surd values with possibly different
// radicands, through the joint tower
inline int compare_mixed_surds(const SurdScalar& a, const SurdScalar& b) {
    if (a.is_rational() || b.is_rational() ||
        radicands_commensurate(a.radicand(), b.radicand()))
        return a.compare(b);
    auto ctx = SurdTower::make_context({a.radicand(), b.radicand()});
    return (SurdTower::from_surd(ctx, a) - SurdTower::from_surd(ctx, b)).sign();
}

// ---------------------------------------------------------------------------
// eval_poly: Horner evaluation of a rational-coefficient polynomial, exact for
// rational/surd/tower arguments, enclosing for intervals. coeffs[i] multiplies
// x^i.
// ---------------------------------------------------------------------------
inline BigRational eval_poly(const std::vector<BigRational>& coeffs, const BigRational& x) {
    BigRational acc(0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

inline SurdScalar eval_poly(const std::vector<BigRational>& coeffs, const SurdScalar& x) {
    SurdScalar acc;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + SurdScalar(*it);
    return acc;
}

inline SurdTower eval_poly(const std::vector<BigRational>& coeffs, const SurdTower& x) {
    SurdTower acc = SurdTower::from_rational(x.context(), BigRational(0));
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * x + SurdTower::from_rational(x.context(), *it);
    return acc;
}

inline IntervalScalar eval_poly(const std::vector<BigRational>& coeffs, const IntervalScalar& x) {
    IntervalScalar acc(x.prec());
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        acc = acc * x + IntervalScalar::from_rational(*it, x.prec());
    return acc;
}

inline BigInt SurdScalar::floor() const {
    if (is_rational()) {
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), u_.get_num().get_mpz_t(), u_.get_den().get_mpz_t());
        return q;
    }
    for (mpfr_prec_t p = IntervalScalar::kDefaultPrec; p <= IntervalScalar::kMaxPrec; p *= 2) {
        IntervalScalar iv = to_interval(*this, p);
        mpfr_t f;
        mpfr_init2(f, p);
        mpfr_floor(f, iv.lo());
        BigInt cand;
        mpfr_get_z(cand.get_mpz_t(), f, MPFR_RNDN);
        mpfr_clear(f);
        // candidate from the lower endpoint; verify exactly, adjusting if needed
        for (int step = 0; step < 3; ++step) {
            SurdScalar lo = *this - SurdScalar(BigRational(cand));
            SurdScalar hi = *this - SurdScalar(BigRational(cand + 1));
            if (lo.sign() >= 0 && hi.sign() < 0) return cand;
            if (lo.sign() < 0) cand -= 1;
            else cand += 1;
        }
    }
    throw std::logic_error("SurdScalar::floor failed to converge");
}

inline BigInt SurdScalar::nearest_int_half_open() const {
    // m with value - m in (-1/2, 1/2]  <=>  m = ceil(value - 1/2)
    SurdScalar shifted = *this - SurdScalar(make_rational(1, 2));
    BigInt m = shifted.floor();
    // ceil(x) = floor(x) unless x integral; verify the half-open window exactly
    for (int step = 0; step < 3; ++step) {
        SurdScalar lo = *this - SurdScalar(BigRational(m)); // needs lo in (-1/2, 1/2]
        int c_lo = (lo + SurdScalar(make_rational(1, 2))).sign();   // > 0
        int c_hi = (lo - SurdScalar(make_rational(1, 2))).sign();   // <= 0
        if (c_lo > 0 && c_hi <= 0) return m;
        if (c_lo <= 0) m -= 1;
        else m += 1;
    }
    throw std::logic_error("SurdScalar::nearest_int_half_open failed");
}

} // namespace deckpoly
