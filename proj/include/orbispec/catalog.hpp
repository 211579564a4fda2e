#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "orbispec/crystal.hpp"
#include "orbispec/errors.hpp"
#include "orbispec/krawtchouk.hpp"

namespace orbispec {

struct StrataExpectation {
    int count = 0;
    int codim = 0;
    int isotropy_order = 0;
    Rational volume_sq = Rational(1);
};

struct DistinguishingWitness {
    int p = 0;
    Rational mu2;
    long long mult_self = 0;
    long long mult_partner = 0;
};

// A named construction together with its machine-checkable expectations. The
// acceptance suite replays every claim through the spectrum, strata, and heat
// modules.
struct CatalogEntry {
    std::string name;
    std::string description;
    CrystalGroup group;
    std::optional<std::string> isospectral_to;
    std::vector<int> isospectral_p;
    Rational isospectral_bound = Rational(4);
    std::vector<StrataExpectation> expected_strata;
    bool expect_no_strata = false;
    std::optional<DistinguishingWitness> distinguishing;
    bool krawtchouk_zero_checked = true; // false when built with K_p^d(k) != 0
};

inline LatticeGram cubic_gram(int d) {
    return LatticeGram(d, QMat::identity(static_cast<std::size_t>(d)));
}

inline CatalogEntry make_torus(int d) {
    if (d < 1) throw SchemaError("torus dimension must be positive");
    CatalogEntry e;
    e.name = "torus-d" + std::to_string(d);
    e.description = "flat torus Z^" + std::to_string(d) + " with trivial holonomy";
    e.group = build_group(cubic_gram(d), {});
    e.group.name = e.name;
    e.expect_no_strata = true;
    return e;
}

// O_k (a = 0) and M_k (a = e_d / 2) over Z^d: the involution
// gamma_k = diag(-1 x k, 1 x (d-k)) with and without the half translation.
// They are p-isospectral whenever K_p^d(k) = 0.
inline std::pair<CatalogEntry, CatalogEntry> make_Ok_Mk(int d, int k, int p) {
    if (k < 1 || k >= d)
        throw InvalidCodimError("O_k/M_k need 1 <= k <= d-1 so the half translation avoids the "
                                "reflected block");
    const bool zero = krawtchouk(d, p, k) == 0;

    ZMat gk = reflection_matrix(d, k);
    std::vector<Rational> zero_a(static_cast<std::size_t>(d), Rational(0));
    std::vector<Rational> half_a = zero_a;
    half_a[static_cast<std::size_t>(d - 1)] = Rational(1, 2);

    CatalogEntry orb;
    orb.name = "O" + std::to_string(k) + "-d" + std::to_string(d);
    orb.description = "flat orbifold with 2^k codimension-" + std::to_string(k) +
                      " strata from the coordinate involution";
    orb.group = build_group(cubic_gram(d), {AffineElement(gk, zero_a)});
    orb.group.name = orb.name;
    orb.krawtchouk_zero_checked = zero;
    orb.isospectral_to = "M" + std::to_string(k) + "-d" + std::to_string(d);
    orb.isospectral_p = {p};
    StrataExpectation se;
    se.count = 1 << k;
    se.codim = k;
    se.isotropy_order = 2;
    se.volume_sq = Rational(1);
    orb.expected_strata = {se};

    CatalogEntry man;
    man.name = *orb.isospectral_to;
    man.description = "Bieberbach manifold from the same involution composed with a half "
                      "translation";
    man.group = build_group(cubic_gram(d), {AffineElement(gk, half_a)});
    man.group.name = man.name;
    man.krawtchouk_zero_checked = zero;
    man.isospectral_to = orb.name;
    man.isospectral_p = {p};
    man.expect_no_strata = true;
    return {std::move(orb), std::move(man)};
}

// Hexagonal-plane Gram in the basis {(1,0,0), (1/2, sqrt(3)/2, 0), (0,0,1)}
// and the order-3 rotation about the third axis written in lattice
// coordinates. The rotation sends b1 to b2 - b1 and b2 to -b1, which gives an
// integer matrix that preserves the Gram exactly.
inline LatticeGram triangular_gram() {
    QMat g(3, 3);
    g(0, 0) = 1;
    g(0, 1) = Rational(1, 2);
    g(1, 0) = Rational(1, 2);
    g(1, 1) = 1;
    g(2, 2) = 1;
    return LatticeGram(3, g);
}

inline ZMat triangular_rotation() {
    ZMat m(3, 3);
    m(0, 0) = -1;
    m(0, 1) = -1;
    m(1, 0) = 1;
    m(2, 2) = 1;
    return m;
}

// The 3D pair: orbifold (a = 0) vs manifold (a = (0,0,1/3)); 1-isospectral,
// distinguished by their 0-spectra at mu^2 = 1.
inline std::pair<CatalogEntry, CatalogEntry> make_triangular_pair() {
    LatticeGram L = triangular_gram();
    ZMat rot = triangular_rotation();
    std::vector<Rational> zero_a(3, Rational(0));
    std::vector<Rational> third_a = {Rational(0), Rational(0), Rational(1, 3)};

    CatalogEntry orb;
    orb.name = "triangular-orbifold";
    orb.description = "hexagonal torus times circle modulo an order-3 rotation";
    orb.group = build_group(L, {AffineElement(rot, zero_a)});
    orb.group.name = orb.name;
    orb.isospectral_to = "triangular-manifold";
    orb.isospectral_p = {1};
    StrataExpectation se;
    se.count = 3;
    se.codim = 2;
    se.isotropy_order = 3;
    se.volume_sq = Rational(1);
    orb.expected_strata = {se};
    DistinguishingWitness w;
    w.p = 0;
    w.mu2 = Rational(1);
    w.mult_self = 2;
    w.mult_partner = 0;
    orb.distinguishing = w;

    CatalogEntry man;
    man.name = "triangular-manifold";
    man.description = "the same rotation composed with a one-third vertical translation";
    man.group = build_group(L, {AffineElement(rot, third_a)});
    man.group.name = man.name;
    man.isospectral_to = orb.name;
    man.isospectral_p = {1};
    man.expect_no_strata = true;
    return {std::move(orb), std::move(man)};
}

// The flat 3-pillow (Z^2 rtimes C_4) and the square (Z^2 rtimes the Klein
// group of axis reflections): 1-isospectral, 0-spectra differ at mu^2 = 1.
inline std::pair<CatalogEntry, CatalogEntry> make_pillow_and_square() {
    LatticeGram L = cubic_gram(2);
    std::vector<Rational> zero_a(2, Rational(0));

    ZMat rot90(2, 2);
    rot90(0, 1) = -1;
    rot90(1, 0) = 1;

    CatalogEntry pillow;
    pillow.name = "pillow";
    pillow.description = "flat 3-pillow: square torus modulo the order-4 rotation";
    pillow.group = build_group(L, {AffineElement(rot90, zero_a)});
    pillow.group.name = pillow.name;
    pillow.isospectral_to = "square";
    pillow.isospectral_p = {1};
    StrataExpectation cone4;
    cone4.count = 2;
    cone4.codim = 2;
    cone4.isotropy_order = 4;
    cone4.volume_sq = Rational(1);
    StrataExpectation cone2;
    cone2.count = 1;
    cone2.codim = 2;
    cone2.isotropy_order = 2;
    cone2.volume_sq = Rational(1);
    pillow.expected_strata = {cone4, cone2};
    DistinguishingWitness w;
    w.p = 0;
    w.mu2 = Rational(1);
    w.mult_self = 1;
    w.mult_partner = 2;
    pillow.distinguishing = w;

    ZMat refl_x = ZMat::identity(2);
    refl_x(1, 1) = -1; // (x, y) -> (x, -y)
    ZMat refl_y = ZMat::identity(2);
    refl_y(0, 0) = -1;

    CatalogEntry square;
    square.name = "square";
    square.description = "square torus modulo the Klein group of axis reflections";
    square.group = build_group(L, {AffineElement(refl_x, zero_a), AffineElement(refl_y, zero_a)});
    square.group.name = square.name;
    square.isospectral_to = "pillow";
    square.isospectral_p = {1};
    StrataExpectation corners;
    corners.count = 4;
    corners.codim = 2;
    corners.isotropy_order = 4;
    corners.volume_sq = Rational(1);
    StrataExpectation mirrors;
    mirrors.count = 4;
    mirrors.codim = 1;
    mirrors.isotropy_order = 2;
    mirrors.volume_sq = Rational(1, 4);
    square.expected_strata = {mirrors, corners};
    return {std::move(pillow), std::move(square)};
}

// The curated list exercised by the acceptance suite. Families needed only at
// specific spectral bounds (the d = 9 four-way family) are built on demand via
// make_Ok_Mk to keep trace-level runs inside the enumeration cap.
inline std::vector<CatalogEntry> standard_catalog() {
    std::vector<CatalogEntry> out;
    out.push_back(make_torus(1));
    out.push_back(make_torus(2));
    out.push_back(make_torus(3));
    auto [o1, m1] = make_Ok_Mk(2, 1, 1);
    out.push_back(std::move(o1));
    out.push_back(std::move(m1));
    auto [o2, m2] = make_Ok_Mk(4, 2, 1);
    out.push_back(std::move(o2));
    out.push_back(std::move(m2));
    auto [o3, m3] = make_Ok_Mk(6, 3, 3);
    out.push_back(std::move(o3));
    out.push_back(std::move(m3));
    auto [to, tm] = make_triangular_pair();
    out.push_back(std::move(to));
    out.push_back(std::move(tm));
    auto [pi, sq] = make_pillow_and_square();
    out.push_back(std::move(pi));
    out.push_back(std::move(sq));
    return out;
}

inline std::optional<CatalogEntry> catalog_by_name(const std::string& name) {
    for (auto& e : standard_catalog())
        if (e.name == name) return e;
    return std::nullopt;
}

} // namespace orbispec
