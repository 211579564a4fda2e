#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "orbispec/crystal.hpp"
#include "orbispec/errors.hpp"
#include "orbispec/lattice.hpp"
#include "orbispec/matrix.hpp"
#include "orbispec/rational.hpp"

namespace orbispec {

// ---------------------------------------------------------------------------
// Affine sub-tori of T^d = R^d / Z^d with rational base points and saturated
// integer direction lattices. These are the building blocks of fixed-point
// sets and singular strata.
// ---------------------------------------------------------------------------

struct SubTorus {
    int d = 0;
    int dim = 0;
    std::vector<Rational> base;                 // reduced mod 1
    std::vector<std::vector<Integer>> kernel;   // saturated basis of the direction lattice
    // Congruence description: x lies on the sub-torus iff A x = rhs (mod Z).
    ZMat A;                    // (d - dim) x d, rows primitive
    std::vector<Rational> rhs; // mod1(A * base)

    bool member(const std::vector<Rational>& x) const {
        for (std::size_t i = 0; i < A.rows(); ++i) {
            Rational s = 0;
            for (int j = 0; j < d; ++j) s += Rational(A(i, j)) * x[j];
            if (mod1(s) != rhs[i]) return false;
        }
        return true;
    }

    bool direction_in_span(const std::vector<Integer>& w) const {
        for (std::size_t i = 0; i < A.rows(); ++i) {
            Integer s = 0;
            for (int j = 0; j < d; ++j) s += A(i, j) * w[j];
            if (s != 0) return false;
        }
        return true;
    }

    bool contains(const SubTorus& o) const {
        if (o.dim > dim) return false;
        if (!member(o.base)) return false;
        for (const auto& w : o.kernel)
            if (!direction_in_span(w)) return false;
        return true;
    }

    bool same_as(const SubTorus& o) const { return dim == o.dim && contains(o); }
};

namespace detail {

inline SubTorus make_subtorus(int d, std::vector<Rational> base,
                              std::vector<std::vector<Integer>> kernel) {
    SubTorus s;
    s.d = d;
    s.dim = static_cast<int>(kernel.size());
    for (auto& x : base) x = mod1(x);
    s.base = std::move(base);
    s.kernel = std::move(kernel);
    if (s.dim == 0) {
        s.A = ZMat::identity(static_cast<std::size_t>(d));
    } else if (s.dim == d) {
        s.A = ZMat(0, static_cast<std::size_t>(d));
    } else {
        ZMat w(static_cast<std::size_t>(d), static_cast<std::size_t>(s.dim));
        for (int j = 0; j < s.dim; ++j)
            for (int i = 0; i < d; ++i) w(i, j) = s.kernel[j][i];
        SNFDecomposition sd = snf(w);
        s.A = ZMat(static_cast<std::size_t>(d - s.dim), static_cast<std::size_t>(d));
        for (int i = s.dim; i < d; ++i)
            for (int j = 0; j < d; ++j)
                s.A(static_cast<std::size_t>(i - s.dim), j) = sd.Uinv(i, j);
    }
    s.rhs.resize(s.A.rows());
    for (std::size_t i = 0; i < s.A.rows(); ++i) {
        Rational acc = 0;
        for (int j = 0; j < d; ++j) acc += Rational(s.A(i, j)) * s.base[j];
        s.rhs[i] = mod1(acc);
    }
    return s;
}

} // namespace detail

struct CongruenceSolution {
    bool solvable = false;
    std::vector<SubTorus> components;
};

// Solves B x = c (mod Z^n) on the torus R^d / Z^d via Smith normal form.
// With B = U D V and b = U^{-1} c the system becomes D y = b (mod Z^n) for
// y = V x: solvable iff b_i is an integer for every zero row; each nonzero
// diagonal entry d_i contributes d_i parallel sheets.
inline CongruenceSolution solve_congruence(const ZMat& B, const std::vector<Rational>& c) {
    const std::size_t n = B.rows();
    const int d = static_cast<int>(B.cols());
    SNFDecomposition sd = snf(B);
    const std::size_t m = sd.diag.size(); // min(n, d)

    std::vector<Rational> b(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (sd.Uinv(i, j) != 0) b[i] += Rational(sd.Uinv(i, j)) * c[j];

    CongruenceSolution out;
    std::vector<std::size_t> bound_rows;
    for (std::size_t i = 0; i < n; ++i) {
        bool zero_row = i >= m || sd.diag[i] == 0;
        if (zero_row) {
            if (!is_integer(b[i])) return out; // unsolvable
        } else {
            bound_rows.push_back(i);
        }
    }
    out.solvable = true;

    std::vector<int> free_cols;
    for (int j = 0; j < d; ++j)
        if (static_cast<std::size_t>(j) >= m || sd.diag[j] == 0) free_cols.push_back(j);

    std::vector<std::vector<Integer>> kernel;
    for (int j : free_cols) {
        std::vector<Integer> w(d);
        for (int i = 0; i < d; ++i) w[i] = sd.Vinv(i, j);
        kernel.push_back(std::move(w));
    }

    // Enumerate the sheet choices.
    Integer total = 1;
    for (std::size_t i : bound_rows) total *= sd.diag[i];
    if (total > 1'000'000)
        throw InternalError("fixed-point congruence has too many components");
    const long count = total.convert_to<long>();

    for (long idx = 0; idx < count; ++idx) {
        long rem = idx;
        std::vector<Rational> y(d, Rational(0));
        for (std::size_t i : bound_rows) {
            long di = sd.diag[i].convert_to<long>();
            long choice = rem % di;
            rem /= di;
            y[i] = mod1((b[i] + Rational(choice)) / Rational(sd.diag[i]));
        }
        std::vector<Rational> x(d, Rational(0));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (sd.Vinv(i, j) != 0) x[i] += Rational(sd.Vinv(i, j)) * y[j];
        out.components.push_back(detail::make_subtorus(d, std::move(x), kernel));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fixed-point sets
// ---------------------------------------------------------------------------

struct FixedComponent {
    AffineElement element;
    std::vector<Rational> base_point;
    std::vector<std::vector<Integer>> kernel_basis;
    int dim = 0;
    Rational volume_sq; // exact det of the kernel Gram under G
    double volume = 0.0;
};

namespace detail {

inline Rational kernel_volume_sq(const LatticeGram& L,
                                 const std::vector<std::vector<Integer>>& kernel) {
    const int f = static_cast<int>(kernel.size());
    if (f == 0) return Rational(1);
    QMat w(static_cast<std::size_t>(L.d), static_cast<std::size_t>(f));
    for (int j = 0; j < f; ++j)
        for (int i = 0; i < L.d; ++i) w(i, j) = Rational(kernel[j][i]);
    QMat gram = w.transpose() * L.G * w;
    return det(gram);
}

} // namespace detail

// Fix(gamma o L_a) on the torus: all solutions of (I - g) x = a (mod Z^d).
// An empty list is a valid return (fixed-point free elements).
inline std::vector<FixedComponent> fixed_set(const CrystalGroup& group, const AffineElement& element) {
    const int d = group.dim();
    ZMat B = ZMat::identity(static_cast<std::size_t>(d)) - element.g;
    CongruenceSolution sol = solve_congruence(B, element.a);
    std::vector<FixedComponent> out;
    if (!sol.solvable) return out;
    for (auto& st : sol.components) {
        FixedComponent fc;
        fc.element = element;
        fc.base_point = st.base;
        fc.kernel_basis = st.kernel;
        fc.dim = st.dim;
        fc.volume_sq = detail::kernel_volume_sq(group.L, st.kernel);
        fc.volume = std::sqrt(to_double(fc.volume_sq));
        out.push_back(std::move(fc));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Singular strata
// ---------------------------------------------------------------------------

struct Stratum {
    int dim = 0;
    int codim = 0;
    double volume = 0.0;     // volume of the identified stratum downstairs
    Rational volume_sq;      // exact square of the same
    int isotropy_order = 1;
    std::vector<std::size_t> isotropy;  // non-identity element indices in the group
    std::vector<std::size_t> iso_max;   // subset with fixed_dim == dim
    std::vector<EigenvalueType> iso_max_types;
    int component_count_upstairs = 1;
    SubTorus representative;

    bool primary() const { return !iso_max.empty(); }
};

namespace detail {

inline SubTorus apply_affine(const AffineElement& el, const SubTorus& s) {
    const int d = s.d;
    std::vector<Rational> base(d, Rational(0));
    for (int i = 0; i < d; ++i) {
        Rational acc = el.a[i];
        for (int j = 0; j < d; ++j)
            if (el.g(i, j) != 0) acc += Rational(el.g(i, j)) * s.base[j];
        base[i] = acc;
    }
    std::vector<std::vector<Integer>> kernel;
    for (const auto& w : s.kernel) {
        std::vector<Integer> img(d, Integer(0));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (el.g(i, j) != 0) img[i] += el.g(i, j) * w[j];
        kernel.push_back(std::move(img));
    }
    return make_subtorus(d, std::move(base), std::move(kernel));
}

// Does (g, a) fix the sub-torus pointwise? Exactly when it fixes the base
// point and every direction vector.
inline bool fixes_pointwise(const AffineElement& el, const SubTorus& s) {
    const int d = s.d;
    for (const auto& w : s.kernel) {
        for (int i = 0; i < d; ++i) {
            Integer acc = 0;
            for (int j = 0; j < d; ++j) acc += el.g(i, j) * w[j];
            if (acc != w[i]) return false;
        }
    }
    for (int i = 0; i < d; ++i) {
        Rational acc = s.base[i] - el.a[i];
        for (int j = 0; j < d; ++j)
            if (el.g(i, j) != 0) acc -= Rational(el.g(i, j)) * s.base[j];
        if (mod1(acc) != 0) return false;
    }
    return true;
}

} // namespace detail

// Assembles the singular strata of the quotient orbifold. Fixed components of
// all non-identity elements are collected on the torus cover, saturated under
// pairwise intersection so every locus of enlarged isotropy is present, and
// identified under the induced action of the group. Each surviving class
// carries the generic isotropy of its interior; the reported volume is the
// measure of the identified stratum downstairs.
inline std::vector<Stratum> strata(const CrystalGroup& group) {
    const int d = group.dim();
    const std::size_t order = group.order();

    std::vector<SubTorus> tori;
    auto add_torus = [&](SubTorus&& s) {
        for (const auto& t : tori)
            if (t.same_as(s)) return;
        tori.push_back(std::move(s));
    };

    for (std::size_t e = 1; e < order; ++e) {
        ZMat B = ZMat::identity(static_cast<std::size_t>(d)) - group.elements[e].g;
        CongruenceSolution sol = solve_congruence(B, group.elements[e].a);
        for (auto& st : sol.components) add_torus(std::move(st));
    }

    // Saturate under pairwise intersections so that every maximal locus of
    // larger isotropy appears as its own sub-torus.
    for (std::size_t i = 0; i < tori.size(); ++i) {
        if (tori.size() > 10'000)
            throw InternalError("stratum saturation exploded; group is outside desk scale");
        for (std::size_t j = 0; j < i; ++j) {
            if (tori[i].contains(tori[j]) || tori[j].contains(tori[i])) continue;
            const std::size_t na = tori[i].A.rows(), nb = tori[j].A.rows();
            ZMat B(na + nb, static_cast<std::size_t>(d));
            std::vector<Rational> c(na + nb);
            for (std::size_t r = 0; r < na; ++r) {
                for (int col = 0; col < d; ++col) B(r, col) = tori[i].A(r, col);
                c[r] = tori[i].rhs[r];
            }
            for (std::size_t r = 0; r < nb; ++r) {
                for (int col = 0; col < d; ++col) B(na + r, col) = tori[j].A(r, col);
                c[na + r] = tori[j].rhs[r];
            }
            CongruenceSolution sol = solve_congruence(B, c);
            if (!sol.solvable) continue;
            for (auto& st : sol.components) add_torus(std::move(st));
        }
    }

    // Generic isotropy of each sub-torus.
    std::vector<std::vector<std::size_t>> iso(tori.size());
    for (std::size_t i = 0; i < tori.size(); ++i)
        for (std::size_t e = 1; e < order; ++e)
            if (detail::fixes_pointwise(group.elements[e], tori[i])) iso[i].push_back(e);

    // Orbits under the induced group action.
    std::vector<std::size_t> parent(tori.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < tori.size(); ++i)
        for (std::size_t e = 1; e < order; ++e) {
            SubTorus img = detail::apply_affine(group.elements[e], tori[i]);
            bool found = false;
            for (std::size_t j = 0; j < tori.size(); ++j)
                if (tori[j].same_as(img)) {
                    parent[find(i)] = find(j);
                    found = true;
                    break;
                }
            if (!found)
                throw InternalError("group action left the saturated component list");
        }

    std::vector<Stratum> out;
    for (std::size_t i = 0; i < tori.size(); ++i) {
        if (find(i) != i) continue;
        std::size_t orbit = 0;
        for (std::size_t j = 0; j < tori.size(); ++j)
            if (find(j) == i) ++orbit;

        Stratum st;
        st.dim = tori[i].dim;
        st.codim = d - st.dim;
        st.isotropy = iso[i];
        st.isotropy_order = static_cast<int>(iso[i].size()) + 1;
        st.component_count_upstairs = static_cast<int>(orbit);
        Rational up = detail::kernel_volume_sq(group.L, tori[i].kernel);
        Rational factor(Integer(orbit) * Integer(st.isotropy_order), Integer(order));
        st.volume_sq = factor * factor * up;
        st.volume = std::sqrt(to_double(st.volume_sq));
        for (std::size_t e : iso[i])
            if (fixed_dim(group.elements[e].g) == st.dim) st.iso_max.push_back(e);
        for (std::size_t e : st.iso_max)
            st.iso_max_types.push_back(eigenvalue_type(group.elements[e].g));
        std::sort(st.iso_max_types.begin(), st.iso_max_types.end(),
                  [](const EigenvalueType& a, const EigenvalueType& b) {
                      if (a.r != b.r) return a.r < b.r;
                      return a.theta_turns < b.theta_turns;
                  });
        st.representative = tori[i];
        out.push_back(std::move(st));
    }

    std::sort(out.begin(), out.end(), [](const Stratum& a, const Stratum& b) {
        if (a.codim != b.codim) return a.codim < b.codim;
        if (a.isotropy_order != b.isotropy_order) return a.isotropy_order < b.isotropy_order;
        if (a.volume_sq != b.volume_sq) return a.volume_sq < b.volume_sq;
        return a.representative.base < b.representative.base;
    });
    return out;
}

inline std::vector<Stratum> primary_filter(const std::vector<Stratum>& all) {
    std::vector<Stratum> out;
    for (const auto& s : all)
        if (s.primary()) out.push_back(s);
    return out;
}

} // namespace orbispec
