#pragma once

// Binary hypermatrices, decks (full and principal), deck sums, and the two
// exact basis formulas (beta for independent deletions, gamma for symmetric
// deletions).

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "numerics.hpp"
#include "prng.hpp"

namespace deckpoly {

inline BigInt binom(long n, long k) {
    if (k < 0 || n < 0 || k > n) return BigInt(0);
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

using Index = std::vector<int>; // 1-based, entries in [n]

inline std::size_t pow_size(int n, int d) {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) {
        if (s > (std::size_t(1) << 40) / static_cast<std::size_t>(n))
            throw std::length_error("hypermatrix too large");
        s *= static_cast<std::size_t>(n);
    }
    return s;
}

// row-major flat offset, last index fastest
inline std::size_t flat_offset(const Index& idx, int n) {
    std::size_t off = 0;
    for (int v : idx) {
        if (v < 1 || v > n) throw std::out_of_range("index out of [n]");
        off = off * static_cast<std::size_t>(n) + static_cast<std::size_t>(v - 1);
    }
    return off;
}

inline bool next_index(Index& idx, int n) { // odometer over [n]^d
    for (int j = static_cast<int>(idx.size()) - 1; j >= 0; --j) {
        if (idx[j] < n) {
            ++idx[j];
            for (std::size_t t = j + 1; t < idx.size(); ++t) idx[t] = 1;
            return true;
        }
    }
    return false;
}

class Hypermatrix {
public:
    Hypermatrix(int d, int n) : d_(d), n_(n), bits_(pow_size(n, d), 0) {
        if (d < 1 || n < 1) throw std::invalid_argument("need d >= 1, n >= 1");
    }

    static Hypermatrix from_bits(int d, int n, const std::string& bits) {
        Hypermatrix a(d, n);
        if (bits.size() != a.bits_.size()) throw std::invalid_argument("bit string length mismatch");
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] != '0' && bits[i] != '1') throw std::invalid_argument("bits must be 0/1");
            a.bits_[i] = bits[i] == '1';
        }
        return a;
    }

    static Hypermatrix random(int d, int n, Rng& rng) {
        Hypermatrix a(d, n);
        for (auto& b : a.bits_) b = rng.coin() ? 1 : 0;
        return a;
    }

    int dim() const { return d_; }
    int order() const { return n_; }
    std::size_t size() const { return bits_.size(); }

    int at_flat(std::size_t i) const { return bits_[i]; }
    void set_flat(std::size_t i, int v) { bits_[i] = static_cast<std::int8_t>(v != 0); }
    int at(const Index& idx) const { return bits_[flat_offset(idx, n_)]; }
    void set(const Index& idx, int v) { bits_[flat_offset(idx, n_)] = static_cast<std::int8_t>(v != 0); }

    long weight() const {
        long w = 0;
        for (auto b : bits_) w += b;
        return w;
    }

    std::string bit_string() const {
        std::string s(bits_.size(), '0');
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i]) s[i] = '1';
        return s;
    }

    bool operator==(const Hypermatrix& o) const {
        return d_ == o.d_ && n_ == o.n_ && bits_ == o.bits_;
    }

    // text format: first line "d n", second line n^d chars of {0,1}
    void write(std::ostream& os) const { os << d_ << ' ' << n_ << '\n' << bit_string() << '\n'; }

    static Hypermatrix read(std::istream& is) {
        int d = 0, n = 0;
        if (!(is >> d >> n)) throw std::runtime_error("hypermatrix header parse failure");
        std::string bits;
        if (!(is >> bits)) throw std::runtime_error("hypermatrix bits parse failure");
        return from_bits(d, n, bits);
    }

private:
    int d_, n_;
    std::vector<std::int8_t> bits_;
};

class DifferenceMatrix {
public:
    DifferenceMatrix(const Hypermatrix& a, const Hypermatrix& b)
        : d_(a.dim()), n_(a.order()), e_(a.size()) {
        if (a.dim() != b.dim() || a.order() != b.order())
            throw std::invalid_argument("difference of mismatched hypermatrices");
        for (std::size_t i = 0; i < e_.size(); ++i)
            e_[i] = static_cast<std::int8_t>(a.at_flat(i) - b.at_flat(i));
    }
    DifferenceMatrix(int d, int n) : d_(d), n_(n), e_(pow_size(n, d), 0) {}

    int dim() const { return d_; }
    int order() const { return n_; }
    std::size_t size() const { return e_.size(); }
    int at_flat(std::size_t i) const { return e_[i]; }
    void set_flat(std::size_t i, int v) {
        if (v < -1 || v > 1) throw std::invalid_argument("difference entries in {-1,0,1}");
        e_[i] = static_cast<std::int8_t>(v);
    }
    int at(const Index& idx) const { return e_[flat_offset(idx, n_)]; }

    std::vector<Index> support() const {
        std::vector<Index> out;
        Index idx(d_, 1);
        std::size_t flat = 0;
        do {
            if (e_[flat] != 0) out.push_back(idx);
            ++flat;
        } while (next_index(idx, n_));
        return out;
    }

private:
    int d_, n_;
    std::vector<std::int8_t> e_;
};

enum class DeckMode { Full, Principal };

inline const char* to_string(DeckMode m) { return m == DeckMode::Full ? "full" : "principal"; }

struct Deck {
    int d = 0;
    int n = 0;
    int k = 0;
    DeckMode mode = DeckMode::Full;
    std::map<std::string, BigInt> entries; // canonical row-major bit string -> multiplicity

    BigInt total_multiplicity() const {
        BigInt t(0);
        for (const auto& [_, m] : entries) t += m;
        return t;
    }
};

struct SumDeck {
    int d = 0;
    int k = 0;
    DeckMode mode = DeckMode::Full;
    std::vector<BigInt> entries; // k^d, row-major, last index fastest

    bool operator==(const SumDeck& o) const {
        return d == o.d && k == o.k && entries == o.entries;
    }
    const BigInt& at(const Index& u) const { return entries[flat_offset(u, k)]; }
};

namespace detail {

inline bool next_combination(std::vector<int>& c, int n) { // k-subsets of [n], lexicographic
    int k = static_cast<int>(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - (k - 1 - i)) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

inline std::vector<int> first_combination(int k) {
    std::vector<int> c(k);
    for (int i = 0; i < k; ++i) c[i] = i + 1;
    return c;
}

// visits every choice of per-dimension k-subsets; principal mode reuses one
// subset across dimensions
template <typename Visit>
void for_each_deletion(int d, int n, int k, DeckMode mode, Visit&& visit) {
    if (mode == DeckMode::Principal) {
        std::vector<int> c = first_combination(k);
        std::vector<const std::vector<int>*> subs(d, &c);
        do {
            visit(subs);
        } while (next_combination(c, n));
        return;
    }
    std::vector<std::vector<int>> cs(d, first_combination(k));
    std::vector<const std::vector<int>*> subs(d);
    for (int j = 0; j < d; ++j) subs[j] = &cs[j];
    while (true) {
        visit(subs);
        int j = d - 1;
        while (j >= 0 && !next_combination(cs[j], n)) {
            cs[j] = first_combination(k);
            --j;
        }
        if (j < 0) break;
    }
}

template <typename Source>
std::string extract_bits(const Source& a, int k, const std::vector<const std::vector<int>*>& subs) {
    int d = a.dim();
    std::string key(pow_size(k, d), '0');
    Index u(d, 1), src(d, 0);
    std::size_t flat = 0;
    do {
        for (int j = 0; j < d; ++j) src[j] = (*subs[j])[u[j] - 1];
        key[flat] = static_cast<char>('0' + a.at(src));
        ++flat;
    } while (next_index(u, k));
    return key;
}

} // namespace detail

inline BigInt deck_member_count(int d, int n, int k, DeckMode mode) {
    BigInt c = binom(n, k);
    if (mode == DeckMode::Principal) return c;
    BigInt r(1);
    for (int j = 0; j < d; ++j) r *= c;
    return r;
}

// full deck as an explicit multiset; guarded against runaway enumeration
inline Deck deck(const Hypermatrix& a, int k, DeckMode mode) {
    if (k < 1 || k > a.order()) throw std::invalid_argument("deck: k out of range");
    static const BigInt kGuard = BigInt(100000000); // 1e8 members
    if (deck_member_count(a.dim(), a.order(), k, mode) > kGuard)
        throw std::length_error("deck: too many members; use sum_deck_direct (streaming)");
    Deck out;
    out.d = a.dim();
    out.n = a.order();
    out.k = k;
    out.mode = mode;
    detail::for_each_deletion(a.dim(), a.order(), k, mode,
                              [&](const std::vector<const std::vector<int>*>& subs) {
                                  out.entries[detail::extract_bits(a, k, subs)] += 1;
                              });
    return out;
}

// entrywise sum of all deck members, streamed (never materializes the deck)
template <typename Source>
SumDeck sum_deck_direct(const Source& a, int k, DeckMode mode) {
    if (k < 1 || k > a.order()) throw std::invalid_argument("sum_deck: k out of range");
    int d = a.dim();
    SumDeck out;
    out.d = d;
    out.k = k;
    out.mode = mode;
    out.entries.assign(pow_size(k, d), BigInt(0));
    Index u(d, 1), src(d, 0);
    detail::for_each_deletion(d, a.order(), k, mode,
                              [&](const std::vector<const std::vector<int>*>& subs) {
                                  std::fill(u.begin(), u.end(), 1);
                                  std::size_t flat = 0;
                                  do {
                                      for (int j = 0; j < d; ++j) src[j] = (*subs[j])[u[j] - 1];
                                      int v = a.at(src);
                                      if (v != 0) out.entries[flat] += v;
                                      ++flat;
                                  } while (next_index(u, k));
                              });
    return out;
}

// beta_u(x) = C(x-1, u-1) * C(n-x, k-u)
inline BigInt beta_eval(int u, int x, int n, int k) {
    if (u < 1 || u > k || k > n || x < 1 || x > n) throw std::invalid_argument("beta_eval: domain");
    return binom(x - 1, u - 1) * binom(n - x, k - u);
}

// S_k(D)_u = sum_i beta_u1(i1)...beta_ud(id) * D_i, as a tensor contraction
// one dimension at a time
template <typename Source>
SumDeck sum_deck_via_beta(const Source& a, int k) {
    int d = a.dim(), n = a.order();
    if (k < 1 || k > n) throw std::invalid_argument("sum_deck_via_beta: k out of range");
    std::vector<std::vector<BigInt>> beta(k + 1, std::vector<BigInt>(n + 1));
    for (int u = 1; u <= k; ++u)
        for (int x = 1; x <= n; ++x) beta[u][x] = beta_eval(u, x, n, k);

    std::vector<BigInt> cur(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) cur[i] = a.at_flat(i);
    // before processing dim j (slowest first): shape k^j x n x n^(d-1-j)
    std::size_t lead = 1;
    std::size_t trail = pow_size(n, d - 1);
    for (int j = 0; j < d; ++j) {
        std::vector<BigInt> nxt(lead * static_cast<std::size_t>(k) * trail, BigInt(0));
        for (std::size_t l = 0; l < lead; ++l)
            for (int u = 1; u <= k; ++u)
                for (int x = 1; x <= n; ++x) {
                    const BigInt& b = beta[u][x];
                    if (sign_of(b) == 0) continue;
                    std::size_t src = (l * n + (x - 1)) * trail;
                    std::size_t dst = (l * k + (u - 1)) * trail;
                    for (std::size_t t = 0; t < trail; ++t)
                        if (sign_of(cur[src + t]) != 0) nxt[dst + t] += b * cur[src + t];
                }
        cur.swap(nxt);
        lead *= static_cast<std::size_t>(k);
        if (j + 1 < d) trail /= static_cast<std::size_t>(n);
    }
    SumDeck out;
    out.d = d;
    out.k = k;
    out.mode = DeckMode::Full;
    out.entries = std::move(cur);
    return out;
}

struct TauPattern {
    int r = 0;
    std::vector<int> tau;     // size d, values in [r], image exactly [r]
    std::vector<int> anchors; // size r; anchors[v-1] = smallest 0-based position with tau == v

    bool operator==(const TauPattern& o) const { return tau == o.tau; }
    bool operator!=(const TauPattern& o) const { return !(*this == o); }
};

// classification of an index tuple by the relative order of its digits
inline TauPattern pattern_of(const Index& i) {
    std::vector<int> sorted(i.begin(), i.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    TauPattern p;
    p.r = static_cast<int>(sorted.size());
    p.tau.resize(i.size());
    p.anchors.assign(p.r, -1);
    for (std::size_t j = 0; j < i.size(); ++j) {
        int rank = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), i[j]) -
                                    sorted.begin()) + 1;
        p.tau[j] = rank;
        if (p.anchors[rank - 1] < 0) p.anchors[rank - 1] = static_cast<int>(j);
    }
    return p;
}

// gamma_u(x): product of r+1 binomials over the anchored gaps
inline BigInt gamma_eval(const Index& u, const Index& x, const TauPattern& tau, int n, int k) {
    if (pattern_of(u) != tau || pattern_of(x) != tau)
        throw std::invalid_argument("gamma_eval: pattern mismatch");
    int r = tau.r;
    BigInt prod = binom(x[tau.anchors[0]] - 1, u[tau.anchors[0]] - 1);
    for (int t = 1; t < r; ++t)
        prod *= binom(x[tau.anchors[t]] - x[tau.anchors[t - 1]] - 1,
                      u[tau.anchors[t]] - u[tau.anchors[t - 1]] - 1);
    prod *= binom(n - x[tau.anchors[r - 1]], k - u[tau.anchors[r - 1]]);
    return prod;
}

// S_k^p(D)_u = sum over i in I_tau(u) of gamma_u(i) * D_i
template <typename Source>
SumDeck sum_deck_via_gamma(const Source& a, int k) {
    int d = a.dim(), n = a.order();
    if (k < 1 || k > n) throw std::invalid_argument("sum_deck_via_gamma: k out of range");

    // group the source indices by pattern
    std::map<std::vector<int>, std::vector<Index>> groups;
    {
        Index i(d, 1);
        do {
            if (a.at(i) != 0) groups[pattern_of(i).tau].push_back(i);
        } while (next_index(i, n));
    }
    SumDeck out;
    out.d = d;
    out.k = k;
    out.mode = DeckMode::Principal;
    out.entries.assign(pow_size(k, d), BigInt(0));
    Index u(d, 1);
    std::size_t flat = 0;
    do {
        TauPattern tu = pattern_of(u);
        auto it = groups.find(tu.tau);
        if (it != groups.end()) {
            BigInt acc(0);
            for (const Index& i : it->second) acc += gamma_eval(u, i, tu, n, k) * a.at(i);
            out.entries[flat] = acc;
        }
        ++flat;
    } while (next_index(u, k));
    return out;
}

} // namespace deckpoly
