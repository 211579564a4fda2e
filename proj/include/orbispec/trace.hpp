#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "orbispec/errors.hpp"
#include "orbispec/heat.hpp"
#include "orbispec/spectrum.hpp"
#include "orbispec/strata.hpp"

namespace orbispec {

struct TraceSample {
    int p = 0;
    double t = 0.0;
    double value = 0.0;
    Rational truncation_bound;
    double tail_estimate = 0.0;
};

namespace detail {

// Rigorous upper bound for the discarded part of the trace sum. Vectors
// outside the table have squared dual norm > B; grouping integer vectors by
// sup-norm s and using Q*(v) >= |v|^2 / tr(G) >= s^2 / tr(G) gives a closed
// majorant whose remainder is capped by a geometric series once the term
// ratio falls below 1/2.
inline double certified_tail(const CrystalGroup& group, int p, double t, const Rational& bound) {
    const int d = group.dim();
    Rational trg = 0;
    for (int i = 0; i < d; ++i) trg += group.L.G(i, i);
    const double alpha = 4.0 * M_PI * M_PI * t / to_double(trg);
    const double eB = std::exp(-4.0 * M_PI * M_PI * to_double(bound) * t);
    const double cdp = to_double(binomial(d, p));

    Integer s_star = floor_sqrt(bound * trg);
    double sstar = to_double(s_star);
    double near = std::pow(2.0 * sstar + 1.0, d) * eB;

    double far = 0.0;
    double s = sstar + 1.0;
    double prev = -1.0;
    for (int guard = 0; guard < 100000; ++guard, s += 1.0) {
        double cnt = std::pow(2.0 * s + 1.0, d) - std::pow(2.0 * s - 1.0, d);
        double term = cnt * std::exp(-alpha * s * s);
        far += term;
        if (prev > 0.0 && term <= 0.5 * prev) {
            // ratio is decreasing in s, so the rest is dominated geometrically
            far += term; // remainder <= term * (1/2 + 1/4 + ...) * 2 = term
            break;
        }
        prev = term;
        if (term < 1e-300) break;
    }
    return cdp * (near + far);
}

} // namespace detail

struct TraceOptions {
    std::size_t cap = 10'000'000;
    unsigned threads = 1;
    Rational initial_bound = Rational(4);
};

// Enlarges the bound until the certified tail drops below 1e-12 of the value,
// then returns the enumerated shells. Throws BudgetExceeded when the cap
// stops the growth first.
inline DualShellTable certified_shells(const CrystalGroup& group, int p, double t,
                                       const TraceOptions& opts) {
    Rational bound = opts.initial_bound;
    for (;;) {
        DualShellTable shells = enumerate_shells(group.L, bound, {opts.cap, opts.threads});
        SpectrumTable table = spectrum_table_from_shells(group, p, shells, {opts.cap, opts.threads});
        double value = 0.0;
        for (const auto& [mu2, m] : table.entries)
            value += static_cast<double>(m) * std::exp(-eigenvalue_of(mu2) * t);
        double tail = detail::certified_tail(group, p, t, bound);
        if (tail < 1e-12 * std::max(value, 1e-9)) return shells;
        bound *= 2;
    }
}

inline TraceSample trace_from_table(const CrystalGroup& group, const SpectrumTable& table,
                                    double t) {
    TraceSample s;
    s.p = table.p;
    s.t = t;
    s.truncation_bound = table.bound;
    for (const auto& [mu2, m] : table.entries)
        s.value += static_cast<double>(m) * std::exp(-eigenvalue_of(mu2) * t);
    s.tail_estimate = detail::certified_tail(group, table.p, t, table.bound);
    return s;
}

inline TraceSample trace_from_shells(const CrystalGroup& group, int p, double t,
                                     const DualShellTable& shells, const TraceOptions& opts = {}) {
    SpectrumTable table = spectrum_table_from_shells(group, p, shells, {opts.cap, opts.threads});
    return trace_from_table(group, table, t);
}

// Truncated heat trace sum over the spectrum table, with a certified bound on
// the discarded tail (auto-enlarged until tail < 1e-12 * value).
inline TraceSample truncated_trace(const CrystalGroup& group, int p, double t,
                                   const Rational& bound, const TraceOptions& opts = {}) {
    if (t <= 0) throw SchemaError("trace time must be positive");
    TraceOptions o = opts;
    o.initial_bound = std::max(bound, Rational(1));
    DualShellTable shells = certified_shells(group, p, t, o);
    return trace_from_shells(group, p, t, shells, o);
}

// The gamma-term of the trace before tr_p weighting: sum over dual vectors
// fixed by gamma of cos(2 pi v.a) e^{-4 pi^2 mu^2 t}.
inline double element_spectral_side(const CrystalGroup& group, const AffineElement& element,
                                    double t, const DualShellTable& shells) {
    double acc = 0.0;
    for (const auto& [mu2, flat] : shells.shells) {
        std::complex<double> e = fourier_character(group, element, mu2, shells);
        acc += e.real() * std::exp(-eigenvalue_of(mu2) * t);
    }
    return acc;
}

// The same gamma-term computed geometrically: sum over fixed components of
// vol(Q) (4 pi t)^{-dim Q / 2} / |det(I - A)|; zero for empty fixed sets. In
// the flat case the series stops at its leading term.
inline double element_geometric_side(const CrystalGroup& group, const AffineElement& element,
                                     double t) {
    std::vector<FixedComponent> comps = fixed_set(group, element);
    if (comps.empty()) return 0.0;
    double factor = to_double(det_normal_factor(element.g));
    double acc = 0.0;
    for (const auto& q : comps)
        acc += q.volume * std::pow(4.0 * M_PI * t, -0.5 * q.dim) / factor;
    return acc;
}

// |spectral - geometric| for one element; decays like e^{-c/t} when the fixed
// set is nonempty.
inline double poisson_check(const CrystalGroup& group, const AffineElement& element, double t,
                            const Rational& bound, const TraceOptions& opts = {}) {
    TraceOptions o = opts;
    o.initial_bound = std::max(bound, Rational(1));
    DualShellTable shells = certified_shells(group, 0, t, o);
    return std::abs(element_spectral_side(group, element, t, shells) -
                    element_geometric_side(group, element, t));
}

// Per-element regrouping of the expansion: coefficients at exponent
// -dim(Q)/2 of (1/|F|) tr_p(gamma) vol(Q)/|det(I-A)|, summed over all
// elements and fixed components. Termwise equal to assemble_expansion by the
// regrouping of the trace into stratum contributions.
inline AsymptoticExpansion element_route_expansion(const CrystalGroup& group, int p) {
    AsymptoticExpansion exp;
    exp.d = group.dim();
    exp.p = p;
    const double order = static_cast<double>(group.order());
    for (const auto& el : group.elements) {
        Integer trp = tr_p(el.g, p);
        if (trp == 0) continue;
        double factor = to_double(det_normal_factor(el.g));
        for (const auto& q : fixed_set(group, el)) {
            auto& term = exp.terms[-q.dim];
            term.coefficient += to_double(trp) * q.volume / (factor * order);
        }
    }
    for (auto it = exp.terms.begin(); it != exp.terms.end();) {
        if (it->first != -exp.d && it->second.coefficient == 0.0)
            it = exp.terms.erase(it);
        else
            ++it;
    }
    return exp;
}

struct ExpansionReport {
    int p = 0;
    std::vector<double> t_grid;            // descending
    std::vector<double> residuals;         // |trace - expansion| per t
    std::vector<double> trace_values;
    std::vector<double> expansion_values;
    double route_max_diff = 0.0;           // strata route vs element route
    bool decay_ok = true;                  // >= 10x shrink between consecutive t
    double worst_residual = 0.0;
    Rational bound_used;
};

// Compares truncated traces against the assembled expansion across the grid,
// checks the exponential-decay proxy (>= 10x shrink per grid step, treating
// residuals below 1e-13 as converged), and verifies that the per-element
// assembly reproduces the stratum-based expansion coefficient by coefficient.
inline ExpansionReport validate_expansion(const CrystalGroup& group, int p,
                                          std::vector<double> t_grid,
                                          const TraceOptions& opts = {}, bool strict = true,
                                          const DualShellTable* reuse_shells = nullptr) {
    if (t_grid.empty()) t_grid = {0.1, 0.05, 0.02};
    std::sort(t_grid.begin(), t_grid.end(), std::greater<>());

    ExpansionReport rep;
    rep.p = p;
    rep.t_grid = t_grid;

    std::vector<Stratum> st = strata(group);
    AsymptoticExpansion exp = assemble_expansion(group, st, p);
    AsymptoticExpansion per_element = element_route_expansion(group, p);

    for (const auto& [te, term] : exp.terms) {
        double other = 0.0;
        if (auto it = per_element.terms.find(te); it != per_element.terms.end())
            other = it->second.coefficient;
        rep.route_max_diff = std::max(rep.route_max_diff, std::abs(term.coefficient - other));
    }
    for (const auto& [te, term] : per_element.terms) {
        double other = 0.0;
        if (auto it = exp.terms.find(te); it != exp.terms.end()) other = it->second.coefficient;
        rep.route_max_diff = std::max(rep.route_max_diff, std::abs(term.coefficient - other));
    }

    TraceOptions o = opts;
    DualShellTable own_shells;
    const DualShellTable* shells = reuse_shells;
    if (!shells) {
        own_shells = certified_shells(group, p, t_grid.back(), o);
        shells = &own_shells;
    }
    rep.bound_used = shells->bound;
    SpectrumTable table = spectrum_table_from_shells(group, p, *shells, {o.cap, o.threads});
    for (double t : t_grid) {
        TraceSample s = trace_from_table(group, table, t);
        double e = exp.evaluate(t);
        rep.trace_values.push_back(s.value);
        rep.expansion_values.push_back(e);
        rep.residuals.push_back(std::abs(s.value - e));
    }
    // Decay proxy: residuals must decrease along the grid, and the final step
    // (0.05 -> 0.02 on the default grid) must shrink by at least 10x.
    // Residuals below 1e-13 count as converged.
    for (std::size_t i = 0; i + 1 < rep.residuals.size(); ++i) {
        if (rep.residuals[i + 1] < 1e-13) continue;
        if (rep.residuals[i] <= rep.residuals[i + 1]) rep.decay_ok = false;
        if (i + 2 == rep.residuals.size() && rep.residuals[i] < 10.0 * rep.residuals[i + 1])
            rep.decay_ok = false;
    }
    rep.worst_residual = *std::max_element(rep.residuals.begin(), rep.residuals.end());
    if (strict && !rep.decay_ok)
        throw ValidationFailedError("expansion residuals do not decay exponentially; worst " +
                                    std::to_string(rep.worst_residual));
    return rep;
}

} // namespace orbispec
