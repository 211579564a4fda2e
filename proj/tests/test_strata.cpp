#include <doctest.h>

#include <cmath>

#include "orbispec/catalog.hpp"
#include "orbispec/strata.hpp"
#include "orbispec/trace.hpp"

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

// Independent oracle: count grid solutions of (I - g) x = a (mod Z^d) on the
// grid (1/(2L)) Z^d and divide by the per-component grid count (2L)^f. The
// grid test only plugs points into the congruence; it never touches the SNF
// solver.
long long grid_component_count(const CrystalGroup& grp, const AffineElement& el) {
    const int d = grp.dim();
    ZMat B = ZMat::identity(d) - el.g;
    Integer detfac = 1;
    {
        SNFDecomposition s = snf(B);
        for (const auto& di : s.diag)
            if (di != 0) detfac *= di;
    }
    Integer denoms = 1;
    for (const auto& x : el.a) denoms = boost::multiprecision::lcm(denoms, den(x));
    const long L = (denoms * detfac).convert_to<long>();
    const long step = 2 * L;
    const int f = fixed_dim(el.g);

    std::vector<long> idx(d, 0);
    long long solutions = 0;
    for (;;) {
        bool ok = true;
        for (int i = 0; i < d && ok; ++i) {
            Rational acc = -el.a[i];
            for (int j = 0; j < d; ++j)
                if (B(i, j) != 0) acc += Rational(B(i, j)) * Rational(idx[j], step);
            if (!is_integer(acc)) ok = false;
        }
        if (ok) ++solutions;
        int k = d - 1;
        while (k >= 0 && idx[k] == step - 1) idx[k--] = 0;
        if (k < 0) break;
        ++idx[k];
    }
    long long per_component = 1;
    for (int i = 0; i < f; ++i) per_component *= step;
    REQUIRE(solutions % per_component == 0);
    return solutions / per_component;
}

} // namespace

TEST_CASE("fixed set of the 1d involution") {
    CrystalGroup g = build_group(cubic_gram(1), {AffineElement(zmat({{-1}}), {Rational(0)})});
    auto comps = fixed_set(g, g.elements[1]);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].dim == 0);
    CHECK(comps[1].dim == 0);
    std::vector<Rational> bases = {comps[0].base_point[0], comps[1].base_point[0]};
    std::sort(bases.begin(), bases.end());
    CHECK(bases == std::vector<Rational>{Rational(0), Rational(1, 2)});
}

TEST_CASE("fixed set of gamma_2 in dimension four") {
    auto [o2, m2] = make_Ok_Mk(4, 2, 1);
    auto comps = fixed_set(o2.group, o2.group.elements[1]);
    REQUIRE(comps.size() == 4);
    for (const auto& c : comps) {
        CHECK(c.dim == 2);
        CHECK(c.volume_sq == Rational(1));
    }
    // the half-translated twin is fixed-point free
    CHECK(fixed_set(m2.group, m2.group.elements[1]).empty());
}

TEST_CASE("fixed sets match the grid oracle") {
    std::vector<CrystalGroup> groups;
    auto [pillow, square] = make_pillow_and_square();
    groups.push_back(pillow.group);
    groups.push_back(square.group);
    auto [to, tm] = make_triangular_pair();
    groups.push_back(to.group);
    groups.push_back(tm.group);
    auto [o1, m1] = make_Ok_Mk(2, 1, 1);
    groups.push_back(o1.group);
    groups.push_back(m1.group);
    groups.push_back(
        build_group(cubic_gram(2), {AffineElement(zmat({{-1, 0}, {0, -1}}),
                                                  {Rational(1, 2), Rational(0)})}));
    for (const auto& grp : groups)
        for (std::size_t e = 1; e < grp.order(); ++e) {
            long long expect = grid_component_count(grp, grp.elements[e]);
            CHECK(static_cast<long long>(fixed_set(grp, grp.elements[e]).size()) == expect);
        }
}

TEST_CASE("torus has no strata") {
    CHECK(strata(make_torus(2).group).empty());
    CHECK(primary_filter(strata(make_torus(2).group)).empty());
}

TEST_CASE("pillow strata: two cone points of order 4 and one of order 2") {
    auto [pillow, square] = make_pillow_and_square();
    std::vector<Stratum> st = strata(pillow.group);
    REQUIRE(st.size() == 3);
    int order4 = 0, order2 = 0;
    for (const auto& s : st) {
        CHECK(s.dim == 0);
        CHECK(s.codim == 2);
        CHECK(s.volume_sq == Rational(1));
        if (s.isotropy_order == 4) ++order4;
        if (s.isotropy_order == 2) ++order2;
        CHECK(s.primary());
    }
    CHECK(order4 == 2);
    CHECK(order2 == 1);
    // the order-2 point is the identified pair (1/2,0) ~ (0,1/2)
    for (const auto& s : st)
        if (s.isotropy_order == 2) CHECK(s.component_count_upstairs == 2);
    CHECK(primary_filter(st).size() == 3);
}

TEST_CASE("square strata: four mirrors and four corner points") {
    auto [pillow, square] = make_pillow_and_square();
    std::vector<Stratum> st = strata(square.group);
    REQUIRE(st.size() == 8);
    int mirrors = 0, corners = 0;
    for (const auto& s : st) {
        if (s.codim == 1) {
            ++mirrors;
            CHECK(s.isotropy_order == 2);
            CHECK(s.volume_sq == Rational(1, 4)); // quotient halves each unit circle
            CHECK(s.primary());
        } else {
            ++corners;
            CHECK(s.codim == 2);
            CHECK(s.isotropy_order == 4);
            REQUIRE(s.iso_max_types.size() == 1); // only -I fixes just the point
            CHECK(s.iso_max_types[0].r == 2);
        }
    }
    CHECK(mirrors == 4);
    CHECK(corners == 4);
}

TEST_CASE("O_k strata: 2^k components of codimension k") {
    for (auto [d, k] : std::vector<std::pair<int, int>>{{2, 1}, {4, 2}, {6, 3}}) {
        auto [ok, mk] = make_Ok_Mk(d, k, 1);
        std::vector<Stratum> st = strata(ok.group);
        REQUIRE(st.size() == static_cast<std::size_t>(1 << k));
        for (const auto& s : st) {
            CHECK(s.codim == k);
            CHECK(s.isotropy_order == 2);
            CHECK(s.volume_sq == Rational(1));
            CHECK(s.primary());
        }
        CHECK(strata(mk.group).empty());
    }
}

TEST_CASE("triangular orbifold strata") {
    auto [to, tm] = make_triangular_pair();
    std::vector<Stratum> st = strata(to.group);
    REQUIRE(st.size() == 3);
    for (const auto& s : st) {
        CHECK(s.codim == 2);
        CHECK(s.isotropy_order == 3);
        CHECK(s.volume_sq == Rational(1));
        REQUIRE(s.iso_max_types.size() == 2); // the rotation and its square
        CHECK(s.iso_max_types[0].theta_turns == std::vector<Rational>{Rational(1, 3)});
    }
    CHECK(strata(tm.group).empty());
}

TEST_CASE("isotropy consistency on catalog strata") {
    for (const auto& entry : standard_catalog()) {
        if (entry.group.dim() > 4) continue;
        for (const auto& s : strata(entry.group)) {
            for (std::size_t e : s.isotropy) {
                const AffineElement& el = entry.group.elements[e];
                // fixes the representative base point and kernel directions
                for (const auto& w : s.representative.kernel) {
                    std::vector<Integer> img(entry.group.dim(), Integer(0));
                    for (int i = 0; i < entry.group.dim(); ++i)
                        for (int j = 0; j < entry.group.dim(); ++j) img[i] += el.g(i, j) * w[j];
                    CHECK(img == w);
                }
                for (int i = 0; i < entry.group.dim(); ++i) {
                    Rational acc = s.representative.base[i] - el.a[i];
                    for (int j = 0; j < entry.group.dim(); ++j)
                        acc -= Rational(el.g(i, j)) * s.representative.base[j];
                    CHECK(mod1(acc) == Rational(0));
                }
            }
            for (std::size_t e : s.iso_max)
                CHECK(fixed_dim(entry.group.elements[e].g) == s.dim);
        }
    }
}

TEST_CASE("Klein four-group in dimension three: planes and lines") {
    CrystalGroup g =
        build_group(cubic_gram(3),
                    {AffineElement(zmat({{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), std::vector<Rational>(3)),
                     AffineElement(zmat({{1, 0, 0}, {0, -1, 0}, {0, 0, 1}}), std::vector<Rational>(3))});
    REQUIRE(g.order() == 4);
    std::vector<Stratum> st = strata(g);
    int planes = 0, lines = 0;
    for (const auto& s : st) {
        if (s.codim == 1) {
            ++planes;
            CHECK(s.isotropy_order == 2);
            CHECK(s.volume_sq == Rational(1, 4)); // each mirror plane halves
            CHECK(s.primary());
        } else {
            ++lines;
            CHECK(s.codim == 2);
            CHECK(s.isotropy_order == 4);
            CHECK(s.volume_sq == Rational(1));
            REQUIRE(s.iso_max.size() == 1); // only the rotation by pi fixes just the line
            CHECK(s.iso_max_types[0].r == 2);
        }
    }
    CHECK(planes == 4);
    CHECK(lines == 4);

    // two-route coefficient agreement doubles as an independent audit of the
    // stratum volumes
    ExpansionReport rep = validate_expansion(g, 0, {0.1, 0.05, 0.02}, {}, false);
    CHECK(rep.route_max_diff < 1e-12);
    AsymptoticExpansion exp = assemble_expansion(g, st, 0);
    CHECK(*exp.terms.at(-1).exact == Rational(1, 4)); // 4 lines * (1/4) / 4
    CHECK(*exp.terms.at(-2).exact == Rational(1, 2)); // 4 half-planes * (1/2) / 2
}

TEST_CASE("translated inversion: four cone points off the origin") {
    CrystalGroup g = build_group(
        cubic_gram(2),
        {AffineElement(zmat({{-1, 0}, {0, -1}}), {Rational(1, 2), Rational(0)})});
    std::vector<Stratum> st = strata(g);
    REQUIRE(st.size() == 4);
    for (const auto& s : st) {
        CHECK(s.dim == 0);
        CHECK(s.isotropy_order == 2);
        CHECK(s.volume_sq == Rational(1));
        CHECK(s.primary());
    }
    ExpansionReport rep = validate_expansion(g, 0, {0.1, 0.05, 0.02}, {}, false);
    CHECK(rep.route_max_diff < 1e-12);
}

TEST_CASE("catalog strata are all primary (structural remark holds vacuously)") {
    // a singular-set component containing a non-primary stratum must contain
    // at least three primary ones; in this catalog every stratum is primary,
    // which is asserted so any future regression would surface here
    for (const auto& entry : standard_catalog())
        for (const auto& s : strata(entry.group)) CHECK(s.primary());
}
