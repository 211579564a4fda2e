#include <doctest.h>

#include <map>
#include <random>

#include "orbispec/lattice.hpp"

using namespace orbispec;

namespace {

LatticeGram gram2(Rational a, Rational b, Rational c, Rational d) {
    QMat g(2, 2);
    g(0, 0) = a;
    g(0, 1) = b;
    g(1, 0) = c;
    g(1, 1) = d;
    return LatticeGram(2, g);
}

LatticeGram triangular2() { return gram2(Rational(1), Rational(1, 2), Rational(1, 2), Rational(1)); }

// Independent oracle: brute force over the enclosing integer box, testing
// v^T G* v <= bound exactly for every candidate.
std::map<Rational, std::vector<std::vector<long>>> brute_shells(const LatticeGram& L,
                                                                const Rational& bound) {
    QMat gstar = dual_gram(L);
    Rational trg = 0;
    for (int i = 0; i < L.d; ++i) trg += L.G(i, i);
    long M = floor_sqrt(bound * trg).convert_to<long>() + 1;
    std::map<Rational, std::vector<std::vector<long>>> shells;
    std::vector<long> v(L.d, -M);
    for (;;) {
        Rational q = 0;
        for (int i = 0; i < L.d; ++i)
            for (int j = 0; j < L.d; ++j) q += Rational(v[i]) * gstar(i, j) * Rational(v[j]);
        if (q <= bound) shells[q].push_back(v);
        int k = L.d - 1;
        while (k >= 0 && v[k] == M) v[k--] = -M;
        if (k < 0) break;
        ++v[k];
    }
    return shells;
}

} // namespace

TEST_CASE("dual gram examples") {
    CHECK(dual_gram(LatticeGram(3, QMat::identity(3))) == QMat::identity(3));
    QMat dt = dual_gram(triangular2());
    CHECK(dt(0, 0) == Rational(4, 3));
    CHECK(dt(0, 1) == Rational(-2, 3));
    QMat four(1, 1);
    four(0, 0) = Rational(4);
    CHECK(dual_gram(LatticeGram(1, four))(0, 0) == Rational(1, 4));
}

TEST_CASE("covolume") {
    CHECK(covolume(LatticeGram(4, QMat::identity(4))).value == doctest::Approx(1.0));
    Covolume c = covolume(triangular2());
    CHECK(c.det_gram == Rational(3, 4));
    CHECK(c.value == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
    QMat g(2, 2);
    g(0, 0) = Rational(4);
    g(1, 1) = Rational(1);
    CHECK(covolume(LatticeGram(2, g)).value == doctest::Approx(2.0));
}

TEST_CASE("circle shells") {
    QMat one(1, 1);
    one(0, 0) = Rational(1);
    DualShellTable t = enumerate_shells(LatticeGram(1, one), Rational(1));
    REQUIRE(t.shells.size() == 2);
    CHECK(t.count(Rational(0)) == 1);
    CHECK(t.count(Rational(1)) == 2);
    // lexicographic order within the shell
    CHECK(t.shells[Rational(1)] == std::vector<std::int32_t>{-1, 1});
}

TEST_CASE("square torus shells") {
    DualShellTable t = enumerate_shells(LatticeGram(2, QMat::identity(2)), Rational(2));
    CHECK(t.count(Rational(1)) == 4);
    CHECK(t.count(Rational(2)) == 4);
}

TEST_CASE("hexagonal first shell has six vectors") {
    DualShellTable t = enumerate_shells(triangular2(), Rational(4, 3));
    CHECK(t.count(Rational(4, 3)) == 6);
}

TEST_CASE("shell symmetry under negation") {
    DualShellTable t = enumerate_shells(triangular2(), Rational(5));
    for (const auto& [mu2, flat] : t.shells) {
        if (mu2 == 0) continue;
        const int d = t.d;
        for (std::size_t off = 0; off + d <= flat.size(); off += d) {
            std::vector<std::int32_t> neg(d);
            for (int i = 0; i < d; ++i) neg[i] = -flat[off + i];
            bool found = false;
            for (std::size_t o2 = 0; o2 + d <= flat.size(); o2 += d) {
                if (std::equal(neg.begin(), neg.end(), flat.begin() + o2)) {
                    found = true;
                    break;
                }
            }
            CHECK(found);
        }
    }
}

TEST_CASE("enumeration agrees with brute force on random Gram matrices") {
    std::mt19937 rng(2718);
    std::uniform_int_distribution<int> entry(-2, 2);
    std::uniform_int_distribution<int> denom(1, 3);
    std::uniform_int_distribution<int> dims(1, 3);
    int done = 0;
    while (done < 25) {
        int d = dims(rng);
        QMat a(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) a(i, j) = Rational(entry(rng));
        QMat spd = a.transpose() * a + QMat::identity(d);
        Rational scale = Rational(1, denom(rng));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) spd(i, j) *= scale;
        LatticeGram L(d, spd);
        Rational bound = Rational(1 + (done % 4));
        DualShellTable mine = enumerate_shells(L, bound);
        auto oracle = brute_shells(L, bound);
        REQUIRE(mine.shells.size() == oracle.size());
        for (const auto& [mu2, vecs] : oracle) {
            REQUIRE(mine.count(mu2) == vecs.size());
            const auto& flat = mine.shells[mu2];
            for (std::size_t i = 0; i < vecs.size(); ++i)
                for (int k = 0; k < d; ++k)
                    CHECK(flat[i * d + k] == vecs[i][k]);
        }
        ++done;
    }
}

TEST_CASE("monotonicity: larger bounds keep existing shells") {
    LatticeGram L = triangular2();
    DualShellTable small = enumerate_shells(L, Rational(2));
    DualShellTable large = enumerate_shells(L, Rational(4));
    for (const auto& [mu2, flat] : small.shells) {
        REQUIRE(large.shells.count(mu2) == 1);
        CHECK(large.shells.at(mu2) == flat);
    }
}

TEST_CASE("parallel enumeration matches serial") {
    LatticeGram L = triangular2();
    DualShellTable serial = enumerate_shells(L, Rational(8), {10'000'000, 1});
    DualShellTable parallel = enumerate_shells(L, Rational(8), {10'000'000, 4});
    REQUIRE(serial.shells.size() == parallel.shells.size());
    for (const auto& [mu2, flat] : serial.shells) CHECK(parallel.shells.at(mu2) == flat);
}

TEST_CASE("budget cap raises") {
    CHECK_THROWS_AS(enumerate_shells(LatticeGram(2, QMat::identity(2)), Rational(100), {10, 1}),
                    BudgetExceededError);
}
