#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deckpoly/hypermatrix.hpp>
#include <deckpoly/prng.hpp>

#include <sstream>

using namespace deckpoly;

namespace {

// exact rank of a rational matrix by fraction-free elimination
int rank_rational(std::vector<std::vector<BigRational>> m) {
    if (m.empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t piv = row;
        while (piv < rows && sign_of(m[piv][col]) == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[row]);
        for (std::size_t r = row + 1; r < rows; ++r) {
            if (sign_of(m[r][col]) == 0) continue;
            BigRational f = m[r][col] / m[row][col];
            for (std::size_t c = col; c < cols; ++c) m[r][c] -= f * m[row][c];
        }
        ++row;
        ++rank;
    }
    return rank;
}

Hypermatrix from_flat_word(int d, int n, unsigned long word) {
    Hypermatrix a(d, n);
    for (std::size_t i = 0; i < a.size(); ++i) a.set_flat(i, (word >> i) & 1u);
    return a;
}

} // namespace

TEST_CASE("deck examples") {
    Hypermatrix eye = Hypermatrix::from_bits(2, 2, "1001");
    Deck d1 = deck(eye, 1, DeckMode::Full);
    REQUIRE(d1.entries.size() == 2);
    CHECK(d1.entries.at("0") == 2);
    CHECK(d1.entries.at("1") == 2);
    CHECK(d1.total_multiplicity() == 4);

    // k = n keeps the whole hypermatrix once
    Deck dn = deck(eye, 2, DeckMode::Full);
    REQUIRE(dn.entries.size() == 1);
    CHECK(dn.entries.at("1001") == 1);

    Hypermatrix zero(2, 3);
    Deck dz = deck(zero, 2, DeckMode::Principal);
    REQUIRE(dz.entries.size() == 1);
    CHECK(dz.entries.at("0000") == 3); // C(3,2) identical pieces

    CHECK_THROWS(deck(eye, 3, DeckMode::Full));
    CHECK_THROWS(deck(eye, 0, DeckMode::Full));
}

TEST_CASE("deck multiplicity totals") {
    Rng rng(3);
    for (int t = 0; t < 10; ++t) {
        int d = 1 + static_cast<int>(rng.below(3));
        int n = 2 + static_cast<int>(rng.below(3));
        Hypermatrix a = Hypermatrix::random(d, n, rng);
        for (int k = 1; k <= n; ++k) {
            CHECK(deck(a, k, DeckMode::Full).total_multiplicity() ==
                  deck_member_count(d, n, k, DeckMode::Full));
            CHECK(deck(a, k, DeckMode::Principal).total_multiplicity() == binom(n, k));
        }
    }
}

TEST_CASE("sum_deck_direct examples") {
    Hypermatrix eye = Hypermatrix::from_bits(2, 2, "1001");
    SumDeck s1 = sum_deck_direct(eye, 1, DeckMode::Full);
    REQUIRE(s1.entries.size() == 1);
    CHECK(s1.entries[0] == 2); // sum of the 1-deck {1,0,0,1}

    Hypermatrix zero(3, 2);
    for (int k = 1; k <= 2; ++k) {
        SumDeck sz = sum_deck_direct(zero, k, DeckMode::Full);
        for (const auto& e : sz.entries) CHECK(e == 0);
    }

    // k = n: single deck member, S_n(A) = A
    Rng rng(5);
    Hypermatrix a = Hypermatrix::random(2, 3, rng);
    SumDeck sn = sum_deck_direct(a, 3, DeckMode::Full);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(sn.entries[i] == a.at_flat(i));
}

TEST_CASE("beta_eval examples") {
    CHECK(beta_eval(1, 1, 4, 2) == 3);          // C(0,0)*C(3,1)
    CHECK(beta_eval(2, 4, 4, 2) == binom(3, 1)); // u=k, x=n -> C(n-1,k-1)
    CHECK(beta_eval(2, 5, 5, 2) == binom(4, 1));
    CHECK(beta_eval(2, 1, 4, 2) == 0);          // x < u
    CHECK_THROWS(beta_eval(0, 1, 4, 2));
    CHECK_THROWS(beta_eval(3, 1, 4, 2));
}

TEST_CASE("sum_deck_via_beta: d=1 oracle value") {
    // 2-deck of "100" is {10, 10, 00}; columnwise sums (2, 0)
    Hypermatrix a = Hypermatrix::from_bits(1, 3, "100");
    SumDeck direct = sum_deck_direct(a, 2, DeckMode::Full);
    REQUIRE(direct.entries.size() == 2);
    CHECK(direct.entries[0] == 2);
    CHECK(direct.entries[1] == 0);
    CHECK(sum_deck_via_beta(a, 2) == direct);
}

TEST_CASE("formula/enumeration equivalence, exhaustive small sizes") {
    // all binary hypermatrices for (d,n) in {(1,<=6),(2,<=3),(3,<=2)} is the
    // acceptance-scale job; here a representative slice to keep unit tests fast
    for (int n = 1; n <= 5; ++n) {
        for (unsigned long w = 0; w < (1ul << n); ++w) {
            Hypermatrix a = from_flat_word(1, n, w);
            for (int k = 1; k <= n; ++k) {
                CHECK(sum_deck_via_beta(a, k) == sum_deck_direct(a, k, DeckMode::Full));
                SumDeck g = sum_deck_via_gamma(a, k);
                SumDeck p = sum_deck_direct(a, k, DeckMode::Principal);
                CHECK(g.entries == p.entries);
            }
        }
    }
    for (unsigned long w = 0; w < (1ul << 9); ++w) {
        Hypermatrix a = from_flat_word(2, 3, w);
        for (int k = 1; k <= 3; ++k) {
            CHECK(sum_deck_via_beta(a, k) == sum_deck_direct(a, k, DeckMode::Full));
            CHECK(sum_deck_via_gamma(a, k).entries ==
                  sum_deck_direct(a, k, DeckMode::Principal).entries);
        }
    }
    for (unsigned long w = 0; w < (1ul << 8); ++w) {
        Hypermatrix a = from_flat_word(3, 2, w);
        for (int k = 1; k <= 2; ++k) {
            CHECK(sum_deck_via_beta(a, k) == sum_deck_direct(a, k, DeckMode::Full));
            CHECK(sum_deck_via_gamma(a, k).entries ==
                  sum_deck_direct(a, k, DeckMode::Principal).entries);
        }
    }
}

TEST_CASE("formula/enumeration equivalence on random larger instances") {
    Rng rng(17);
    for (int t = 0; t < 60; ++t) {
        int d = 1 + static_cast<int>(rng.below(3));
        int n = 2 + static_cast<int>(rng.below(5));
        int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        Hypermatrix a = Hypermatrix::random(d, n, rng);
        CHECK(sum_deck_via_beta(a, k) == sum_deck_direct(a, k, DeckMode::Full));
        CHECK(sum_deck_via_gamma(a, k).entries ==
              sum_deck_direct(a, k, DeckMode::Principal).entries);
    }
}

TEST_CASE("difference-matrix sum decks agree with formulas too") {
    Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        int d = 1 + static_cast<int>(rng.below(2));
        int n = 2 + static_cast<int>(rng.below(3));
        Hypermatrix a = Hypermatrix::random(d, n, rng);
        Hypermatrix b = Hypermatrix::random(d, n, rng);
        DifferenceMatrix diff(a, b);
        for (int k = 1; k <= n; ++k) {
            SumDeck lhs = sum_deck_via_beta(diff, k);
            SumDeck sa = sum_deck_direct(a, k, DeckMode::Full);
            SumDeck sb = sum_deck_direct(b, k, DeckMode::Full);
            for (std::size_t i = 0; i < lhs.entries.size(); ++i)
                CHECK(lhs.entries[i] == sa.entries[i] - sb.entries[i]);
        }
    }
}

TEST_CASE("pattern_of examples") {
    TauPattern p = pattern_of({1, 2, 1});
    CHECK(p.r == 2);
    CHECK(p.tau == std::vector<int>{1, 2, 1});
    CHECK(p.anchors == std::vector<int>{0, 1});

    // I_tau for n=4 matches the published listing
    std::vector<Index> itau;
    Index i(3, 1);
    do {
        if (pattern_of(i) == p) itau.push_back(i);
    } while (next_index(i, 4));
    std::vector<Index> want = {{1, 2, 1}, {1, 3, 1}, {1, 4, 1}, {2, 3, 2}, {2, 4, 2}, {3, 4, 3}};
    CHECK(itau == want);

    CHECK(pattern_of({5, 5, 5}).tau == std::vector<int>{1, 1, 1});
    CHECK(pattern_of({5, 5, 5}).r == 1);
    CHECK(pattern_of({2, 7, 4}).tau == std::vector<int>{1, 3, 2});
    CHECK(pattern_of({2, 7, 4}).r == 3);
}

TEST_CASE("patterns partition [n]^d") {
    for (int d = 1; d <= 3; ++d)
        for (int n = 1; n <= 4; ++n) {
            std::size_t total = 0;
            std::map<std::vector<int>, std::size_t> sizes;
            Index i(d, 1);
            do {
                ++sizes[pattern_of(i).tau];
                ++total;
            } while (next_index(i, n));
            CHECK(total == pow_size(n, d));
            // each class size is C(n, r) for its rank
            for (const auto& [tau, cnt] : sizes) {
                int r = *std::max_element(tau.begin(), tau.end());
                CHECK(BigInt(static_cast<long>(cnt)) == binom(n, r));
            }
        }
}

TEST_CASE("gamma_eval examples") {
    // d=2, n=3, k=2: entry (1,3) placed at (1,2) by one symmetric deletion
    TauPattern t12 = pattern_of({1, 2});
    CHECK(gamma_eval({1, 2}, {1, 3}, t12, 3, 2) == 1);

    // d=1 degenerate: gamma == beta
    for (int n = 1; n <= 6; ++n)
        for (int k = 1; k <= n; ++k)
            for (int u = 1; u <= k; ++u)
                for (int x = 1; x <= n; ++x)
                    CHECK(gamma_eval({u}, {x}, pattern_of(Index{u}), n, k) == beta_eval(u, x, n, k));

    TauPattern t11 = pattern_of({1, 1});
    CHECK(gamma_eval({2, 2}, {1, 1}, t11, 3, 2) == 0); // impossible placement

    CHECK_THROWS(gamma_eval({1, 2}, {2, 2}, t12, 3, 2)); // pattern mismatch
}

TEST_CASE("deck refinement identity") {
    // merging k-decks of all members of M_l(A) = C(n-k, l-k)^d * M_k(A)
    Rng rng(31);
    for (int t = 0; t < 8; ++t) {
        int d = 1 + static_cast<int>(rng.below(2));
        int n = 3 + static_cast<int>(rng.below(2));
        Hypermatrix a = Hypermatrix::random(d, n, rng);
        for (int k = 1; k < n; ++k)
            for (int l = k; l <= n; ++l) {
                for (DeckMode mode : {DeckMode::Full, DeckMode::Principal}) {
                    Deck dl = deck(a, l, mode);
                    std::map<std::string, BigInt> merged;
                    for (const auto& [bits, mult] : dl.entries) {
                        Hypermatrix b = Hypermatrix::from_bits(d, l, bits);
                        Deck dk = deck(b, k, mode);
                        for (const auto& [bk, mk] : dk.entries) merged[bk] += mk * mult;
                    }
                    BigInt factor = deck_member_count(d, n - k, l - k, mode);
                    Deck dk_a = deck(a, k, mode);
                    std::map<std::string, BigInt> scaled;
                    for (const auto& [bk, mk] : dk_a.entries) scaled[bk] = mk * factor;
                    CHECK(merged == scaled);
                }
            }
    }
}

TEST_CASE("beta basis completeness: rank k for n <= 12") {
    for (int n = 1; n <= 12; ++n)
        for (int k = 1; k <= n; ++k) {
            std::vector<std::vector<BigRational>> m(k, std::vector<BigRational>(n));
            for (int u = 1; u <= k; ++u)
                for (int x = 1; x <= n; ++x) m[u - 1][x - 1] = BigRational(beta_eval(u, x, n, k));
            CHECK(rank_rational(m) == k);
        }
}

TEST_CASE("gamma basis independence: full rank C(k,r) on U_tau") {
    for (int d = 1; d <= 3; ++d)
        for (int k = 1; k <= 6; ++k) {
            // group U_tau within [k]^d
            std::map<std::vector<int>, std::vector<Index>> utau;
            Index u(d, 1);
            do {
                utau[pattern_of(u).tau].push_back(u);
            } while (next_index(u, k));
            for (const auto& [tau_vec, members] : utau) {
                TauPattern tau = pattern_of(members.front());
                BigInt expect = binom(k, tau.r);
                REQUIRE(BigInt(static_cast<long>(members.size())) == expect);
                // lexicographic substitution scheme: evaluate every gamma_u at
                // every member of U_tau (n := k suffices for the rank question)
                std::vector<std::vector<BigRational>> m(members.size(),
                                                        std::vector<BigRational>(members.size()));
                for (std::size_t r = 0; r < members.size(); ++r)
                    for (std::size_t c = 0; c < members.size(); ++c)
                        m[r][c] = BigRational(gamma_eval(members[r], members[c], tau, k, k));
                CHECK(rank_rational(m) == static_cast<int>(members.size()));
            }
        }
}

TEST_CASE("text round trip") {
    Rng rng(41);
    Hypermatrix a = Hypermatrix::random(2, 4, rng);
    std::stringstream ss;
    a.write(ss);
    Hypermatrix b = Hypermatrix::read(ss);
    CHECK(a == b);
}
