#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "orbispec/crystal.hpp"
#include "orbispec/errors.hpp"
#include "orbispec/krawtchouk.hpp"
#include "orbispec/strata.hpp"

namespace orbispec {

// ---------------------------------------------------------------------------
// Per-element and per-stratum leading heat coefficients
// ---------------------------------------------------------------------------

// b_0^p of a single isotropy element: tr_p(g) / |det(I - A)| where A is g
// restricted to the complement of its fixed subspace. Exact.
inline Rational b0_p_element(const ZMat& g, int p) {
    return Rational(tr_p(g, p)) / det_normal_factor(g);
}

// b_0^1 from an eigenvalue type, evaluated in floating point:
//   (d - k - r + sum 2 cos theta_j) * (2^{-k} prod csc^2(theta_j / 2)),
// with the empty product equal to 1 and k = 2s + r the codimension.
inline double b0_1_eigentype(const EigenvalueType& et, int d) {
    const int k = 2 * et.s + et.r;
    double first = static_cast<double>(d - k - et.r);
    double second = std::pow(2.0, -k);
    for (double theta : et.thetas) {
        first += 2.0 * std::cos(theta);
        double s = std::sin(theta / 2.0);
        second /= s * s;
    }
    return first * second;
}

// Codimension-two stratum with cyclic isotropy of order m, per unit volume:
//   (d-2)(m^2-1)/12 + (m^2-6m+5)/6.
inline Rational b0_1_codim2_cyclic(int d, int m) {
    if (m < 1) throw SchemaError("isotropy order must be positive");
    if (m == 1) return Rational(0); // regular point, degenerate case
    Integer mm = Integer(m) * m;
    return Rational(Integer(d - 2) * (mm - 1), 12) + Rational(mm - 6 * m + 5, 6);
}

// Degree-zero analogue per unit volume: (m^2 - 1) / 12.
inline Rational b0_0_codim2_cyclic(int m) {
    if (m < 1) throw SchemaError("isotropy order must be positive");
    return Rational(Integer(m) * m - 1, 12);
}

// Order-three isotropy with s rotation planes, per unit volume: 2(d - 3s)/3^s.
inline Rational b0_1_order3(int d, int s) {
    return Rational(2 * Integer(d - 3 * s), int_pow(Integer(3), static_cast<unsigned>(s)));
}

// The four closed-form trigonometric sums over j = 1..m-1 of, in order,
// csc^2(pi j/m), cos(2pi j/m) csc^2(pi j/m), cos(2pi j/m) csc^4(pi j/m),
// csc^4(pi j/m).
struct TrigSums {
    Rational csc2;
    Rational cos_csc2;
    Rational cos_csc4;
    Rational csc4;
};

inline TrigSums trig_sums(int m) {
    if (m < 2) throw SchemaError("trig sums need m >= 2");
    Integer m2 = Integer(m) * m;
    Integer m4 = m2 * m2;
    TrigSums t;
    t.csc2 = Rational(m2 - 1, 3);
    t.cos_csc2 = Rational(m2 - 6 * m + 5, 3);
    t.cos_csc4 = Rational(m4 - 20 * m2 + 19, 45);
    t.csc4 = Rational(m4 + 10 * m2 - 11, 45);
    return t;
}

// Companion direct floating-point evaluation of the same four series.
inline std::array<double, 4> trig_sums_direct(int m) {
    std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
    for (int j = 1; j < m; ++j) {
        double s = std::sin(M_PI * j / m);
        double c = std::cos(2.0 * M_PI * j / m);
        double csc2 = 1.0 / (s * s);
        out[0] += csc2;
        out[1] += c * csc2;
        out[2] += c * csc2 * csc2;
        out[3] += csc2 * csc2;
    }
    return out;
}

// Codimension-four stratum whose cyclic isotropy is generated by an equal-angle
// double rotation of order m, per unit volume.
inline Rational b0_1_codim4_constant_angle(int d, int m) {
    if (m < 2 || d < 4) throw SchemaError("constant-angle formula needs m >= 2, d >= 4");
    Integer m2 = Integer(m) * m;
    Integer m4 = m2 * m2;
    return Rational(4 * (m4 - 20 * m2 + 19) + Integer(d - 4) * (m4 + 10 * m2 - 11), 720);
}

struct StratumB0 {
    double value = 0.0;
    std::optional<Rational> exact; // present when the stratum volume is rational
};

// b_0^p(N) = vol(N) * sum over Iso^max(N) of b_0^p(gamma).
inline StratumB0 stratum_b0(const CrystalGroup& group, const Stratum& st, int p) {
    Rational coeff = 0;
    for (std::size_t e : st.iso_max) coeff += b0_p_element(group.elements[e].g, p);
    StratumB0 out;
    out.value = st.volume * to_double(coeff);
    if (auto v = sqrt_exact(st.volume_sq)) out.exact = (*v) * coeff;
    return out;
}

// ---------------------------------------------------------------------------
// Parity invariants
// ---------------------------------------------------------------------------

struct ParityInvariant {
    char epsilon = '+';
    std::optional<int> codim; // minimal primary codimension of this parity
    double value = 0.0;
    std::optional<Rational> exact;
};

struct ParityInvariants {
    ParityInvariant minus;
    ParityInvariant plus;
};

// B_eps^p = sum over primary strata of minimal codimension per parity of
// b_0^p(N) / |Iso(N)|; zero when no strata of that parity exist.
inline ParityInvariants parity_invariants(const CrystalGroup& group,
                                          const std::vector<Stratum>& all, int p) {
    std::vector<Stratum> primary = primary_filter(all);
    ParityInvariants out;
    out.minus.epsilon = '-';
    out.plus.epsilon = '+';
    for (ParityInvariant* inv : {&out.minus, &out.plus}) {
        const bool odd = inv->epsilon == '-';
        int kmin = -1;
        for (const auto& st : primary) {
            if ((st.codim % 2 == 1) != odd) continue;
            if (kmin < 0 || st.codim < kmin) kmin = st.codim;
        }
        if (kmin < 0) continue; // stays zero
        inv->codim = kmin;
        double acc = 0.0;
        std::optional<Rational> exact = Rational(0);
        for (const auto& st : primary) {
            if (st.codim != kmin || ((st.codim % 2 == 1) != odd)) continue;
            StratumB0 b = stratum_b0(group, st, p);
            acc += b.value / st.isotropy_order;
            if (exact && b.exact)
                *exact += *b.exact / Rational(st.isotropy_order);
            else
                exact.reset();
        }
        inv->value = acc;
        inv->exact = exact;
    }
    return out;
}

// 2^{k+1} B_- / K_p^d(k): the (d-k)-volume of the singular set recovered from
// the parity invariant; only valid when k is odd and the Krawtchouk value is
// nonzero.
inline double singular_volume_from_B(double B_minus, int d, int k, int p) {
    if (k % 2 == 0) throw KrawtchoukZeroError("volume recovery needs odd codimension");
    Integer kv = krawtchouk(d, p, k);
    if (kv == 0)
        throw KrawtchoukZeroError("Krawtchouk value vanishes; volume is not determined");
    return std::pow(2.0, k + 1) * B_minus / to_double(kv);
}

inline Rational singular_volume_from_B_exact(const Rational& B_minus, int d, int k, int p) {
    if (k % 2 == 0) throw KrawtchoukZeroError("volume recovery needs odd codimension");
    Integer kv = krawtchouk(d, p, k);
    if (kv == 0)
        throw KrawtchoukZeroError("Krawtchouk value vanishes; volume is not determined");
    return Rational(int_pow(Integer(2), static_cast<unsigned>(k + 1))) * B_minus / Rational(kv);
}

// ---------------------------------------------------------------------------
// Heat-trace expansion for flat quotients
// ---------------------------------------------------------------------------

// Finite expansion: term at half-integer exponent e = key/2 contributes
// coefficient * (4 pi t)^{e}. Coefficients are stored without any 4 pi
// normalization; it is applied at evaluation time.
struct ExpansionTerm {
    double coefficient = 0.0;
    std::optional<Rational> exact; // set when derivable exactly
};

struct AsymptoticExpansion {
    int d = 0;
    int p = 0;
    std::map<int, ExpansionTerm> terms; // key = 2 * exponent

    double evaluate(double t) const {
        double acc = 0.0;
        for (const auto& [te, term] : terms)
            acc += term.coefficient * std::pow(4.0 * M_PI * t, 0.5 * te);
        return acc;
    }
};

inline std::string exponent_string(int twice_exponent) {
    std::ostringstream os;
    if (twice_exponent % 2 == 0)
        os << twice_exponent / 2;
    else
        os << twice_exponent << "/2";
    return os.str();
}

// a_0^p = C(d,p) vol and the curvature coefficient of a_1^p, with the
// convention that binomials with negative lower argument vanish. For flat
// metrics the total scalar curvature is zero, so a_1^p = 0.
struct ACoefficients {
    Rational a0_coeff; // C(d, p)
    Rational a1_coeff; // C(d,p)/6 - C(d-2, p-1)
    double a0 = 0.0;
    double a1 = 0.0;
};

inline ACoefficients a_coefficients(int d, int p, double vol, double total_scalar_curvature) {
    ACoefficients out;
    out.a0_coeff = Rational(binomial(d, p));
    out.a1_coeff = Rational(binomial(d, p), 6) - Rational(binomial(d - 2, p - 1));
    out.a0 = to_double(out.a0_coeff) * vol;
    out.a1 = to_double(out.a1_coeff) * total_scalar_curvature;
    return out;
}

// Flat heat-trace expansion: I_0^p truncates at its leading term
// C(d,p) vol(O) (4 pi t)^{-d/2}, and every stratum N contributes
// b_0^p(N)/|Iso(N)| at exponent -dim(N)/2. All higher flat terms vanish.
inline AsymptoticExpansion assemble_expansion(const CrystalGroup& group,
                                              const std::vector<Stratum>& all, int p) {
    AsymptoticExpansion exp;
    exp.d = group.dim();
    exp.p = p;

    Covolume cov = covolume(group.L);
    double vol_orbifold = cov.value / static_cast<double>(group.order());
    ExpansionTerm lead;
    lead.coefficient = to_double(binomial(exp.d, p)) * vol_orbifold;
    if (auto sq = sqrt_exact(cov.det_gram))
        lead.exact = Rational(binomial(exp.d, p)) * (*sq) / Rational(Integer(group.order()));
    exp.terms[-exp.d] = lead;

    for (const auto& st : all) {
        if (!st.primary()) continue; // I_N vanishes for non-primary strata
        StratumB0 b = stratum_b0(group, st, p);
        auto& term = exp.terms[-st.dim];
        bool existed = term.coefficient != 0.0 || term.exact.has_value();
        term.coefficient += b.value / st.isotropy_order;
        if (!existed) {
            term.exact = b.exact ? std::optional<Rational>(*b.exact / st.isotropy_order)
                                 : std::nullopt;
        } else if (term.exact && b.exact) {
            *term.exact += *b.exact / Rational(st.isotropy_order);
        } else {
            term.exact.reset();
        }
    }
    // Drop exact zeros contributed by strata whose Krawtchouk factor vanishes,
    // keeping the term map minimal but stable: a term that is exactly zero and
    // not the leading one carries no information.
    for (auto it = exp.terms.begin(); it != exp.terms.end();) {
        if (it->first != -exp.d && it->second.exact && *it->second.exact == 0 &&
            it->second.coefficient == 0.0)
            it = exp.terms.erase(it);
        else
            ++it;
    }
    return exp;
}

// ---------------------------------------------------------------------------
// Manifold discriminator
// ---------------------------------------------------------------------------

struct DiscriminatorVerdict {
    enum class Kind {
        NoSingularSet,       // nothing to certify
        OddCodimPrimary,     // primary stratum of odd codimension <= 3
        Codim2MarginPositive,// joint (0,1) heat-invariant certificate
        NotApplicable        // singular set codimension > 3
    };
    Kind kind = Kind::NoSingularSet;
    double margin = 0.0;               // sum of per-stratum margins / |Iso|
    std::optional<Rational> exact_margin;
    std::string detail;
};

// Certifies that the orbifold cannot be isospectral to a closed manifold,
// either through a primary stratum of odd codimension (0-spectrum route), or
// through the joint (0,1) certificate c_2^1 - (d-6) c_2^0 > 0 for singular
// sets of codimension two with cyclic isotropy. The two expansions are used to
// cross-check the margin against the assembled coefficients.
inline DiscriminatorVerdict manifold_discriminator(const CrystalGroup& group,
                                                   const std::vector<Stratum>& all,
                                                   const AsymptoticExpansion& exp0,
                                                   const AsymptoticExpansion& exp1) {
    const int d = group.dim();
    DiscriminatorVerdict out;
    std::vector<Stratum> primary = primary_filter(all);
    if (all.empty()) {
        out.kind = DiscriminatorVerdict::Kind::NoSingularSet;
        out.detail = "no singular strata";
        return out;
    }
    int min_codim = d + 1;
    for (const auto& st : all) min_codim = std::min(min_codim, st.codim);
    for (const auto& st : primary) {
        if (st.codim % 2 == 1 && st.codim <= 3) {
            out.kind = DiscriminatorVerdict::Kind::OddCodimPrimary;
            out.detail = "primary stratum of odd codimension " + std::to_string(st.codim) +
                         "; the 0-spectrum alone excludes manifolds";
            return out;
        }
    }
    if (min_codim > 3) {
        out.kind = DiscriminatorVerdict::Kind::NotApplicable;
        out.detail = "singular set has codimension > 3";
        return out;
    }
    // Remaining case: the minimal codimension is two. Only codimension-two
    // strata feed the coefficient pair being compared; they must have cyclic
    // isotropy (no other finite subgroup of O(2) acts freely off the origin).
    Rational margin = 0;
    bool exact_ok = true;
    for (const auto& st : all) {
        if (st.codim != 2 || !st.primary()) continue;
        const int m = st.isotropy_order;
        bool cyclic = false;
        for (std::size_t e : st.isotropy)
            if (matrix_order(group.elements[e].g) == m) cyclic = true;
        if (!cyclic) throw InternalError("codimension-two stratum with non-cyclic isotropy");
        Rational per_unit = Rational(3 * (Integer(m) * m) - 6 * m + 3, 6);
        if (auto v = sqrt_exact(st.volume_sq))
            margin += per_unit * (*v) / Rational(st.isotropy_order);
        else
            exact_ok = false;
        out.margin += to_double(per_unit) *
                      st.volume / st.isotropy_order;
    }
    if (exact_ok) out.exact_margin = margin;
    // Cross-check against the assembled expansions: the coefficient pair at
    // exponent -(d-2)/2 must reproduce the same margin.
    double c1 = 0.0, c0 = 0.0;
    if (auto it = exp1.terms.find(-(d - 2)); it != exp1.terms.end()) c1 = it->second.coefficient;
    if (auto it = exp0.terms.find(-(d - 2)); it != exp0.terms.end()) c0 = it->second.coefficient;
    double via_exp = c1 - (d - 6) * c0;
    if (std::abs(via_exp - out.margin) > 1e-9 * std::max(1.0, std::abs(out.margin)))
        throw InternalError("discriminator margin disagrees with expansion coefficients");
    out.kind = DiscriminatorVerdict::Kind::Codim2MarginPositive;
    out.detail = "codimension-two margin is positive; joint (0,1) spectra exclude manifolds";
    return out;
}

} // namespace orbispec
