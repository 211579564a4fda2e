#include <doctest.h>

#include <cmath>
#include <random>

#include "orbispec/catalog.hpp"
#include "orbispec/crystal.hpp"

using namespace orbispec;

namespace {

ZMat zmat(std::initializer_list<std::initializer_list<long>> rows) {
    ZMat m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (long v : row) m(i, j++) = Integer(v);
        ++i;
    }
    return m;
}

std::vector<Rational> zeros(int d) { return std::vector<Rational>(d, Rational(0)); }

// Independent oracle for tr_p: sum over p-subsets I of det(g[I, I]).
Integer exterior_trace(const ZMat& g, int p) {
    const int d = static_cast<int>(g.rows());
    std::vector<int> idx(p);
    for (int i = 0; i < p; ++i) idx[i] = i;
    if (p == 0) return 1;
    Integer total = 0;
    for (;;) {
        ZMat minor(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) minor(i, j) = g(idx[i], idx[j]);
        total += det(minor);
        int k = p - 1;
        while (k >= 0 && idx[k] == d - p + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int i = k + 1; i < p; ++i) idx[i] = idx[i - 1] + 1;
    }
    return total;
}

} // namespace

TEST_CASE("build_group closes the generators") {
    CrystalGroup torus = build_group(cubic_gram(2), {});
    CHECK(torus.order() == 1);

    CrystalGroup pillow = build_group(cubic_gram(2), {AffineElement(zmat({{0, -1}, {1, 0}}), zeros(2))});
    CHECK(pillow.order() == 4);

    CrystalGroup tri = build_group(triangular_gram(),
                                   {AffineElement(triangular_rotation(),
                                                  {Rational(0), Rational(0), Rational(1, 3)})});
    CHECK(tri.order() == 3);
}

TEST_CASE("group closure contains products and inverses") {
    CrystalGroup sq = build_group(
        cubic_gram(2),
        {AffineElement(zmat({{1, 0}, {0, -1}}), zeros(2)), AffineElement(zmat({{-1, 0}, {0, 1}}), zeros(2))});
    CHECK(sq.order() == 4);
    for (const auto& x : sq.elements)
        for (const auto& y : sq.elements) {
            AffineElement xy = compose(x, y);
            auto idx = sq.find(xy.g);
            REQUIRE(idx.has_value());
            CHECK(sq.elements[*idx].a == xy.a);
        }
    // every element has a listed inverse
    for (const auto& x : sq.elements) {
        bool has_inverse = false;
        for (const auto& y : sq.elements)
            if (compose(x, y).is_identity()) has_inverse = true;
        CHECK(has_inverse);
    }
}

TEST_CASE("build_group rejects bad generators") {
    CHECK_THROWS_AS(build_group(cubic_gram(2), {AffineElement(zmat({{1, 1}, {0, 1}}), zeros(2))}),
                    NotOrthogonalError);
    CHECK_THROWS_AS(build_group(cubic_gram(2), {AffineElement(zmat({{2, 0}, {0, 1}}), zeros(2))}),
                    NonInvertibleError);
    CHECK_THROWS_AS(build_group(cubic_gram(2),
                                {AffineElement(zmat({{0, -1}, {1, 0}}), zeros(2))}, 2),
                    OrderCapExceededError);
    CHECK_THROWS_AS(
        build_group(cubic_gram(2), {AffineElement(zmat({{0, -1}, {1, 0}}), zeros(2)),
                                    AffineElement(zmat({{0, -1}, {1, 0}}),
                                                  {Rational(1, 2), Rational(0)})}),
        InconsistentTranslationError);
}

TEST_CASE("tr_p examples") {
    CHECK(tr_p(zmat({{0, -1}, {1, 0}}), 0) == 1);
    CHECK(tr_p(zmat({{0, -1}, {1, 0}}), 1) == 0);
    CHECK(tr_p(zmat({{0, -1}, {1, 0}}), 2) == 1);
    ZMat g = ZMat::identity(6);
    for (int i = 0; i < 3; ++i) g(i, i) = -1;
    CHECK(tr_p(g, 3) == 0); // middle-degree zero at k = d/2
}

TEST_CASE("tr_p equals the exterior-power oracle") {
    std::mt19937 rng(555);
    std::uniform_int_distribution<int> dims(1, 4);
    for (int iter = 0; iter < 80; ++iter) {
        int d = dims(rng);
        // random signed permutation matrix: finite order, integer
        std::vector<int> perm(d);
        for (int i = 0; i < d; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        ZMat g(d, d);
        for (int i = 0; i < d; ++i) g(perm[i], i) = (rng() & 1) ? 1 : -1;
        for (int p = 0; p <= d; ++p) CHECK(tr_p(g, p) == exterior_trace(g, p));
    }
}

TEST_CASE("eigenvalue types") {
    EigenvalueType id = eigenvalue_type(ZMat::identity(3));
    CHECK(id.fixed_dim == 3);
    CHECK(id.r == 0);
    CHECK(id.s == 0);

    EigenvalueType rot = eigenvalue_type(zmat({{0, -1}, {1, 0}}));
    CHECK(rot.s == 1);
    CHECK(rot.r == 0);
    CHECK(rot.fixed_dim == 0);
    CHECK(rot.theta_turns == std::vector<Rational>{Rational(1, 4)});
    CHECK(rot.thetas[0] == doctest::Approx(M_PI / 2).epsilon(1e-15));

    ZMat gk = ZMat::identity(5);
    for (int i = 0; i < 3; ++i) gk(i, i) = -1;
    EigenvalueType refl = eigenvalue_type(gk);
    CHECK(refl.r == 3);
    CHECK(refl.s == 0);
    CHECK(refl.fixed_dim == 2);

    EigenvalueType tri = eigenvalue_type(triangular_rotation());
    CHECK(tri.s == 1);
    CHECK(tri.fixed_dim == 1);
    CHECK(tri.theta_turns == std::vector<Rational>{Rational(1, 3)});
}

TEST_CASE("eigenvalue type counts always add up") {
    std::mt19937 rng(31337);
    std::uniform_int_distribution<int> dims(1, 4);
    for (int iter = 0; iter < 60; ++iter) {
        int d = dims(rng);
        std::vector<int> perm(d);
        for (int i = 0; i < d; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        ZMat g(d, d);
        for (int i = 0; i < d; ++i) g(perm[i], i) = (rng() & 1) ? 1 : -1;
        EigenvalueType et = eigenvalue_type(g);
        CHECK(2 * et.s + et.r + et.fixed_dim == d);
    }
}

TEST_CASE("det_normal_factor") {
    CHECK(det_normal_factor(zmat({{0, -1}, {1, 0}})) == Rational(2));
    ZMat g = ZMat::identity(5);
    for (int i = 0; i < 3; ++i) g(i, i) = -1;
    CHECK(det_normal_factor(g) == Rational(8));
    CHECK(det_normal_factor(ZMat::identity(4)) == Rational(1));
}

TEST_CASE("det_normal_factor cross-validates against 2^r prod 4 sin^2(theta/2)") {
    std::vector<ZMat> samples = {zmat({{0, -1}, {1, 0}}), triangular_rotation(),
                                 zmat({{-1, 0}, {0, -1}}), zmat({{1, -1}, {1, 0}})};
    ZMat gk = ZMat::identity(6);
    for (int i = 0; i < 4; ++i) gk(i, i) = -1;
    samples.push_back(gk);
    for (const auto& g : samples) {
        EigenvalueType et = eigenvalue_type(g);
        double expected = std::pow(2.0, et.r);
        for (double theta : et.thetas) {
            double s = std::sin(theta / 2.0);
            expected *= 4.0 * s * s;
        }
        CHECK(to_double(det_normal_factor(g)) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("matrix_order detects infinite order") {
    CHECK(matrix_order(zmat({{0, -1}, {1, 0}})) == 4);
    CHECK_THROWS_AS(matrix_order(zmat({{1, 1}, {0, 1}}), 64), NotFiniteOrderError);
}
