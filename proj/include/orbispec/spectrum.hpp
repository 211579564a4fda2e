#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "orbispec/crystal.hpp"
#include "orbispec/errors.hpp"
#include "orbispec/lattice.hpp"
#include "orbispec/parallel.hpp"

namespace orbispec {

// Exact p-spectrum table: map from rational squared dual norm mu^2 to the
// multiplicity of the eigenvalue 4 pi^2 mu^2. Zero multiplicities are omitted
// but compare as zero.
struct SpectrumTable {
    int p = 0;
    Rational bound;
    std::map<Rational, long long> entries;
    std::string group_id;

    long long multiplicity_at(const Rational& mu2) const {
        auto it = entries.find(mu2);
        return it == entries.end() ? 0 : it->second;
    }
};

inline double eigenvalue_of(const Rational& mu2) {
    return 4.0 * M_PI * M_PI * to_double(mu2);
}

namespace detail {

// Cached per-element data for the hot loops: transposed matrix in machine
// integers (entries of point-group matrices are tiny).
struct ElementScan {
    std::vector<long long> gt; // row-major transpose
    int d;

    explicit ElementScan(const AffineElement& el)
        : gt(), d(static_cast<int>(el.g.rows())) {
        gt.resize(static_cast<std::size_t>(d) * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                gt[static_cast<std::size_t>(i) * d + j] = el.g(j, i).convert_to<long long>();
    }

    // g^T v == v, the exact fixed-vector test for the dual action.
    bool fixes(const std::int32_t* v) const {
        for (int i = 0; i < d; ++i) {
            long long s = 0;
            for (int j = 0; j < d; ++j) s += gt[static_cast<std::size_t>(i) * d + j] * v[j];
            if (s != v[i]) return false;
        }
        return true;
    }
};

} // namespace detail

// Character sum e_{mu,Sigma}(gamma) = sum over shell vectors fixed by the dual
// action of e^{2 pi i v.a}. Phases v.a are exact rationals; only the final
// exponential is floating point. The imaginary part must cancel (vectors pair
// v with -v) and is asserted.
inline std::complex<double> fourier_character(const CrystalGroup& group, const AffineElement& element,
                                              const Rational& mu2, const DualShellTable& shells) {
    if (mu2 > shells.bound) throw BoundMismatchError("mu2 exceeds the shell table bound");
    auto it = shells.shells.find(mu2);
    if (it == shells.shells.end())
        throw BoundMismatchError("mu2 is not a shell key of the table");
    const int d = shells.d;
    detail::ElementScan scan(element);
    double re = 0.0, im = 0.0;
    const auto& flat = it->second;
    for (std::size_t off = 0; off + d <= flat.size(); off += d) {
        const std::int32_t* v = flat.data() + off;
        if (!scan.fixes(v)) continue;
        Rational phase = 0;
        for (int i = 0; i < d; ++i)
            if (v[i] != 0) phase += Rational(v[i]) * element.a[i];
        phase = mod1(phase);
        double ang = 2.0 * M_PI * to_double(phase);
        re += std::cos(ang);
        im += std::sin(ang);
    }
    if (std::abs(im) > 1e-9)
        throw ToleranceViolationError("character sum has non-vanishing imaginary part");
    (void)group;
    return {re, im};
}

// Multiplicity of the eigenvalue 4 pi^2 mu^2 in the p-spectrum:
//   m_{p,mu} = (1/|F|) sum_gamma tr_p(gamma) e_{mu,Sigma}(gamma).
// The value must land within 1e-6 of a nonnegative integer; anything else
// signals a bug or an invalid group.
inline long long multiplicity(const CrystalGroup& group, int p, const Rational& mu2,
                              const DualShellTable& shells) {
    double acc = 0.0;
    for (const auto& el : group.elements) {
        Integer trp = tr_p(el.g, p);
        if (trp == 0) continue;
        std::complex<double> e = fourier_character(group, el, mu2, shells);
        acc += to_double(trp) * e.real();
    }
    acc /= static_cast<double>(group.order());
    long long rounded = std::llround(acc);
    if (std::abs(acc - static_cast<double>(rounded)) > 1e-6 || rounded < 0)
        throw ToleranceViolationError("multiplicity is not a nonnegative integer within 1e-6");
    return rounded;
}

struct SpectrumOptions {
    std::size_t cap = 10'000'000;
    unsigned threads = 1;
};

// Table assembly from a precomputed shell table (shells are independent of p,
// so callers can reuse one enumeration across degrees).
inline SpectrumTable spectrum_table_from_shells(const CrystalGroup& group, int p,
                                                const DualShellTable& shells,
                                                const SpectrumOptions& opts = {}) {
    SpectrumTable table;
    table.p = p;
    table.bound = shells.bound;
    table.group_id = group.name;

    std::vector<Rational> keys;
    keys.reserve(shells.shells.size());
    for (const auto& [k, v] : shells.shells) keys.push_back(k);

    auto work = [&](std::size_t b, std::size_t e) {
        std::vector<std::pair<Rational, long long>> local;
        for (std::size_t i = b; i < e; ++i) {
            long long m = multiplicity(group, p, keys[i], shells);
            if (m != 0) local.emplace_back(keys[i], m);
        }
        return local;
    };
    auto partials =
        parallel_chunks<std::vector<std::pair<Rational, long long>>>(keys.size(), opts.threads, work);
    for (const auto& part : partials)
        for (const auto& [k, m] : part) table.entries.emplace(k, m);
    return table;
}

inline SpectrumTable spectrum_table(const CrystalGroup& group, int p, const Rational& bound,
                                    const SpectrumOptions& opts = {}) {
    if (bound < 0) throw SchemaError("spectrum bound must be nonnegative");
    DualShellTable shells = enumerate_shells(group.L, bound, {opts.cap, opts.threads});
    return spectrum_table_from_shells(group, p, shells, opts);
}

struct CompareResult {
    bool equal = true;
    // populated when not equal: smallest differing key and both multiplicities
    Rational mu2;
    long long mult_a = 0;
    long long mult_b = 0;
};

// Exact key-by-key comparison of two tables with the same degree and bound.
inline CompareResult isospectral_compare(const SpectrumTable& a, const SpectrumTable& b) {
    if (a.p != b.p) throw BoundMismatchError("tables have different form degrees");
    if (a.bound != b.bound) throw BoundMismatchError("tables have different bounds");
    std::map<Rational, std::pair<long long, long long>> merged;
    for (const auto& [k, m] : a.entries) merged[k].first = m;
    for (const auto& [k, m] : b.entries) merged[k].second = m;
    for (const auto& [k, pair] : merged) {
        if (pair.first != pair.second) {
            CompareResult r;
            r.equal = false;
            r.mu2 = k;
            r.mult_a = pair.first;
            r.mult_b = pair.second;
            return r;
        }
    }
    return CompareResult{};
}

} // namespace orbispec
