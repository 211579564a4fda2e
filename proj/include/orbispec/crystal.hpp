#pragma once

#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "orbispec/errors.hpp"
#include "orbispec/lattice.hpp"
#include "orbispec/matrix.hpp"
#include "orbispec/rational.hpp"

namespace orbispec {

// One element of the point group together with its translation part, both in
// lattice coordinates. Translation entries are kept reduced to [0, 1) so that
// equality and lookup are canonical.
struct AffineElement {
    ZMat g;
    std::vector<Rational> a;

    AffineElement() = default;
    AffineElement(ZMat m, std::vector<Rational> t) : g(std::move(m)), a(std::move(t)) {
        reduce();
    }

    void reduce() {
        for (auto& x : a) x = mod1(x);
    }

    bool is_identity() const {
        for (std::size_t i = 0; i < g.rows(); ++i) {
            for (std::size_t j = 0; j < g.cols(); ++j)
                if (g(i, j) != (i == j ? 1 : 0)) return false;
            if (a[i] != 0) return false;
        }
        return true;
    }
};

// (g1,a1) * (g2,a2) = (g1 g2, g1 a2 + a1 mod 1)
inline AffineElement compose(const AffineElement& x, const AffineElement& y) {
    std::vector<Rational> t(x.a.size());
    for (std::size_t i = 0; i < x.a.size(); ++i) {
        Rational s = x.a[i];
        for (std::size_t j = 0; j < x.a.size(); ++j) s += Rational(x.g(i, j)) * y.a[j];
        t[i] = mod1(s);
    }
    return AffineElement(x.g * y.g, std::move(t));
}

inline bool is_gram_orthogonal(const ZMat& g, const QMat& G) {
    QMat gq = z_to_q(g);
    return gq.transpose() * G * gq == G;
}

namespace detail {

inline std::string matrix_key(const ZMat& m) {
    std::ostringstream os;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) os << m(i, j) << ',';
    return os.str();
}

} // namespace detail

// A crystallographic group in lattice coordinates: rational Gram matrix plus
// the complete holonomy list (identity first), one affine element per point
// group element.
struct CrystalGroup {
    LatticeGram L;
    std::vector<AffineElement> elements;   // identity first
    std::vector<AffineElement> generators; // as given, for round-tripping
    std::string name;

    int dim() const { return L.d; }
    std::size_t order() const { return elements.size(); }

    // Index of the element with the given matrix, if present.
    std::optional<std::size_t> find(const ZMat& g) const {
        auto key = detail::matrix_key(g);
        for (std::size_t i = 0; i < elements.size(); ++i)
            if (detail::matrix_key(elements[i].g) == key) return i;
        return std::nullopt;
    }
};

inline int matrix_order(const ZMat& g, int cap = 4096) {
    ZMat p = g;
    ZMat id = ZMat::identity(g.rows());
    for (int k = 1; k <= cap; ++k) {
        if (p == id) return k;
        p = p * g;
    }
    throw NotFiniteOrderError("matrix has no order below the cap");
}

// Closes the generators under composition and validates the group axioms
// demanded of a crystallographic quotient in lattice coordinates.
inline CrystalGroup build_group(const LatticeGram& L, const std::vector<AffineElement>& generators,
                                int order_cap = 1024) {
    const std::size_t d = static_cast<std::size_t>(L.d);
    for (const auto& gen : generators) {
        if (gen.g.rows() != d || gen.g.cols() != d || gen.a.size() != d)
            throw SchemaError("generator dimensions do not match the lattice");
        Integer dg = det(gen.g);
        if (dg != 1 && dg != -1)
            throw NonInvertibleError("generator matrix is not unimodular");
        if (!is_gram_orthogonal(gen.g, L.G))
            throw NotOrthogonalError("generator does not preserve the Gram matrix");
    }

    CrystalGroup grp;
    grp.L = L;
    grp.generators = generators;

    AffineElement id(ZMat::identity(d), std::vector<Rational>(d, Rational(0)));
    std::map<std::string, std::size_t> seen;
    grp.elements.push_back(id);
    seen[detail::matrix_key(id.g)] = 0;

    std::vector<AffineElement> frontier = {id};
    while (!frontier.empty()) {
        std::vector<AffineElement> next;
        for (const auto& x : frontier) {
            for (const auto& gen : generators) {
                AffineElement y = compose(x, gen);
                auto key = detail::matrix_key(y.g);
                auto it = seen.find(key);
                if (it != seen.end()) {
                    if (grp.elements[it->second].a != y.a)
                        throw InconsistentTranslationError(
                            "same point-group element appears with two translations; "
                            "the lattice is not the full translation lattice");
                    continue;
                }
                if (grp.elements.size() >= static_cast<std::size_t>(order_cap))
                    throw OrderCapExceededError("group closure exceeded the order cap");
                seen[key] = grp.elements.size();
                grp.elements.push_back(y);
                next.push_back(std::move(y));
            }
        }
        frontier = std::move(next);
    }
    // finite order of every element is implied by the closure being finite,
    // but assert it cheaply anyway
    for (const auto& el : grp.elements) (void)matrix_order(el.g, order_cap);
    return grp;
}

// Trace of the induced action on p-forms: the p-th elementary symmetric
// function of the eigenvalues, read exactly off the characteristic polynomial
// (coefficient of x^{d-p} times (-1)^p).
inline Integer tr_p(const ZMat& g, int p) {
    const int d = static_cast<int>(g.rows());
    if (p < 0 || p > d) throw SchemaError("form degree out of range");
    ZPoly cp = char_poly(g);
    Integer c = cp[static_cast<std::size_t>(p)];
    return (p % 2 == 0) ? c : -c;
}

// ---------------------------------------------------------------------------
// Eigenvalue types
// ---------------------------------------------------------------------------

// E(theta_1..theta_s; r): s complex pairs e^{+-i theta}, r eigenvalues -1, the
// remaining d - 2s - r eigenvalues +1. theta values are stored both as doubles
// and as exact fractions of a full turn (theta = 2*pi*turn).
struct EigenvalueType {
    int s = 0;
    std::vector<double> thetas;       // ascending, repeated by multiplicity
    std::vector<Rational> theta_turns; // exact theta / (2 pi), each in (0, 1/2)
    int r = 0;
    int fixed_dim = 0;

    std::string to_string() const {
        std::ostringstream os;
        os << "E(";
        for (std::size_t i = 0; i < theta_turns.size(); ++i) {
            if (i) os << ',';
            os << "2pi*" << orbispec::to_string(theta_turns[i]);
        }
        os << ';';
        if (r > 0) os << r;
        os << ')';
        return os.str();
    }

    bool operator==(const EigenvalueType& o) const {
        return s == o.s && r == o.r && fixed_dim == o.fixed_dim && theta_turns == o.theta_turns;
    }
};

namespace detail {

// Cyclotomic polynomial, descending coefficients, computed by exact division
// of x^n - 1 by all lower-order cyclotomic factors.
inline ZPoly cyclotomic(int n) {
    static std::map<int, ZPoly> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    ZPoly result;
    if (n == 1) {
        result = {Integer(1), Integer(-1)};
    } else {
        ZPoly xn1(static_cast<std::size_t>(n) + 1, Integer(0));
        xn1[0] = 1;
        xn1[static_cast<std::size_t>(n)] = -1;
        ZPoly acc = xn1;
        for (int m = 1; m < n; ++m)
            if (n % m == 0) acc = poly_div_exact(acc, cyclotomic(m));
        result = acc;
    }
    cache[n] = result;
    return result;
}

inline int euler_phi(int n) {
    int r = n;
    for (int p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            r -= r / p;
        }
    if (n > 1) r -= r / n;
    return r;
}

} // namespace detail

inline int fixed_dim(const ZMat& g) {
    const std::size_t d = g.rows();
    return static_cast<int>(d - rank(g - ZMat::identity(d)));
}

// Eigenvalue type of a finite-order integer matrix. Multiplicities of the
// eigenvalues 1 and -1 come from exact rank computations; the rotation angles
// come from the exact cyclotomic factorization of the characteristic
// polynomial (finite order forces such a factorization), so no floating-point
// root clustering is involved.
inline EigenvalueType eigenvalue_type(const ZMat& g, int order_cap = 4096) {
    const std::size_t d = g.rows();
    const int order = matrix_order(g, order_cap); // throws NotFiniteOrder
    EigenvalueType et;
    et.fixed_dim = fixed_dim(g);
    et.r = static_cast<int>(d - rank(g + ZMat::identity(d)));
    et.s = (static_cast<int>(d) - et.fixed_dim - et.r) / 2;

    ZPoly q = char_poly(g);
    if (et.fixed_dim > 0) {
        ZPoly lin = {Integer(1), Integer(-1)};
        for (int i = 0; i < et.fixed_dim; ++i) q = poly_div_exact(q, lin);
    }
    if (et.r > 0) {
        ZPoly lin = {Integer(1), Integer(1)};
        for (int i = 0; i < et.r; ++i) q = poly_div_exact(q, lin);
    }
    // q is now a product of cyclotomics Phi_n with n >= 3
    for (int n = 3; n <= order && q.size() > 1; ++n) {
        if (order % n != 0) continue;
        ZPoly phi = detail::cyclotomic(n);
        int mult = 0;
        while (q.size() >= phi.size() && poly_divides(phi, q)) {
            q = poly_div_exact(q, phi);
            ++mult;
        }
        if (mult == 0) continue;
        for (int k = 1; 2 * k < n; ++k) {
            if (std::gcd(k, n) != 1) continue;
            for (int m = 0; m < mult; ++m) et.theta_turns.push_back(Rational(k, n));
        }
    }
    if (q.size() != 1)
        throw InternalError("characteristic polynomial did not factor into cyclotomics");
    std::sort(et.theta_turns.begin(), et.theta_turns.end());
    for (const auto& turn : et.theta_turns)
        et.thetas.push_back(2.0 * M_PI * to_double(turn));
    if (static_cast<int>(et.theta_turns.size()) != et.s)
        throw InternalError("eigenvalue type inconsistency: 2s + r + fixed_dim != d");
    return et;
}

// |det(I - A)| where A is g restricted to the complement of its fixed
// subspace: write char_poly = (x-1)^f q(x) by exact division and return
// |q(1)|.
inline Rational det_normal_factor(const ZMat& g) {
    ZPoly q = char_poly(g);
    const int f = fixed_dim(g);
    ZPoly lin = {Integer(1), Integer(-1)};
    for (int i = 0; i < f; ++i) q = poly_div_exact(q, lin);
    Integer v = poly_eval(q, Integer(1));
    return Rational(abs(v));
}

} // namespace orbispec
