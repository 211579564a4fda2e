#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "orbispec/errors.hpp"
#include "orbispec/matrix.hpp"
#include "orbispec/parallel.hpp"
#include "orbispec/rational.hpp"

namespace orbispec {

// A rank-d lattice described entirely by its rational Gram matrix: coordinates
// are always taken in a fixed lattice basis, so the lattice itself is Z^d and
// the geometry is carried by G.
struct LatticeGram {
    int d = 0;
    QMat G;

    LatticeGram() = default;
    LatticeGram(int dim, QMat gram) : d(dim), G(std::move(gram)) { validate(); }

    void validate() const {
        if (d <= 0 || G.rows() != static_cast<std::size_t>(d) || G.cols() != static_cast<std::size_t>(d))
            throw SchemaError("Gram matrix has inconsistent dimensions");
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (G(i, j) != G(j, i)) throw SchemaError("Gram matrix is not symmetric");
        // positive definiteness via leading principal minors, exactly
        for (int k = 1; k <= d; ++k) {
            QMat lead(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) lead(i, j) = G(i, j);
            if (det(lead) <= 0) throw SchemaError("Gram matrix is not positive definite");
        }
    }
};

// Exact dual Gram G* = G^{-1}; dual vectors in dual coordinates have squared
// norm v^T G* v.
inline QMat dual_gram(const LatticeGram& L) { return inverse(L.G); }

struct Covolume {
    Rational det_gram; // exact det G
    double value;      // sqrt(det G)
};

inline Covolume covolume(const LatticeGram& L) {
    Rational dg = det(L.G);
    return Covolume{dg, std::sqrt(to_double(dg))};
}

// All integer dual vectors with v^T G* v <= bound, grouped by exact squared
// norm. Vectors are stored flattened (d entries each), lexicographically
// sorted within each shell; v and -v always appear together for mu2 > 0.
struct DualShellTable {
    int d = 0;
    Rational bound;
    std::map<Rational, std::vector<std::int32_t>> shells;

    std::size_t count(const Rational& mu2) const {
        auto it = shells.find(mu2);
        return it == shells.end() ? 0 : it->second.size() / d;
    }

    std::size_t total_vectors() const {
        std::size_t n = 0;
        for (const auto& [k, v] : shells) n += v.size() / d;
        return n;
    }
};

namespace detail {

struct ShellEnumerator {
    int d;
    const QuadraticCompletion& qc;
    Rational bound;
    std::map<Rational, std::vector<std::int32_t>>* out;
    std::atomic<std::size_t>* counter;
    std::size_t cap;

    std::vector<Integer> v;

    // Assign coordinates from level d-1 down to 0; `used` is the exact value
    // already accumulated by the outer levels.
    void recurse(int level, const Rational& used) {
        Rational budget = bound - used;
        // center for this level from already-assigned outer coordinates
        Rational c = 0;
        for (int j = level + 1; j < d; ++j)
            if (qc.C(level, j) != 0) c += qc.C(level, j) * Rational(v[j]);
        // Feasible x: D[level] * (x + c)^2 <= budget, an interval. Start one
        // step beyond a floor_sqrt estimate of each endpoint and tighten with
        // exact checks; everything between the tightened ends is feasible.
        Integer radius = floor_sqrt(budget / qc.D[level]);
        Integer lo = ceil_rational(-c - Rational(radius)) - 1;
        Integer hi = floor_rational(-c + Rational(radius)) + 1;
        auto feasible = [&](const Integer& x) {
            Rational s = Rational(x) + c;
            return qc.D[level] * s * s <= budget;
        };
        while (lo <= hi && !feasible(lo)) ++lo;
        while (hi >= lo && !feasible(hi)) --hi;
        for (Integer x = lo; x <= hi; ++x) {
            v[level] = x;
            Rational s = Rational(x) + c;
            Rational term = qc.D[level] * s * s;
            if (level == 0) {
                emit(used + term);
            } else {
                recurse(level - 1, used + term);
            }
        }
    }

    void emit(const Rational& mu2) {
        if (counter->fetch_add(1, std::memory_order_relaxed) + 1 > cap)
            throw BudgetExceededError("shell enumeration exceeded the vector cap");
        auto& shell = (*out)[mu2];
        for (int i = 0; i < d; ++i)
            shell.push_back(static_cast<std::int32_t>(v[i].convert_to<long>()));
    }
};

inline void sort_shell_vectors(int d, std::vector<std::int32_t>& flat) {
    const std::size_t n = flat.size() / d;
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const std::int32_t* pa = flat.data() + a * d;
        const std::int32_t* pb = flat.data() + b * d;
        return std::lexicographical_compare(pa, pa + d, pb, pb + d);
    });
    std::vector<std::int32_t> sorted;
    sorted.reserve(flat.size());
    for (std::size_t i : idx)
        sorted.insert(sorted.end(), flat.begin() + i * d, flat.begin() + (i + 1) * d);
    flat = std::move(sorted);
}

} // namespace detail

struct EnumerationOptions {
    std::size_t cap = 10'000'000;
    unsigned threads = 1;
};

// Exact Fincke-Pohst-style enumeration of all dual vectors with squared norm
// <= bound. The recursion uses a rational quadratic completion of the dual
// Gram matrix, so no vector is ever misclassified. The outermost coordinate
// range may be split across workers; shells merge by exact key, giving output
// identical to a serial run.
inline DualShellTable enumerate_shells(const LatticeGram& L, const Rational& bound,
                                       const EnumerationOptions& opts = {}) {
    if (bound < 0) throw SchemaError("enumeration bound must be nonnegative");
    DualShellTable table;
    table.d = L.d;
    table.bound = bound;

    QMat gstar = dual_gram(L);
    QuadraticCompletion qc = quadratic_completion(gstar);
    const int d = L.d;

    // Range of the outermost coordinate v_{d-1}: D[d-1] * v^2 <= bound.
    Integer radius = floor_sqrt(bound / qc.D[d - 1]);
    const long lo = (-radius).convert_to<long>();
    const long hi = radius.convert_to<long>();
    const std::size_t span = static_cast<std::size_t>(hi - lo + 1);

    std::atomic<std::size_t> counter{0};

    auto work = [&](std::size_t b, std::size_t e) {
        std::map<Rational, std::vector<std::int32_t>> local;
        detail::ShellEnumerator en{d, qc, bound, &local, &counter, opts.cap,
                                   std::vector<Integer>(d)};
        for (std::size_t k = b; k < e; ++k) {
            Integer x = Integer(lo + static_cast<long>(k));
            Rational term = qc.D[d - 1] * Rational(x) * Rational(x);
            if (term > bound) continue;
            en.v[d - 1] = x;
            if (d == 1)
                en.emit(term);
            else
                en.recurse(d - 2, term);
        }
        return local;
    };

    auto partials = parallel_chunks<std::map<Rational, std::vector<std::int32_t>>>(
        span, opts.threads, work);
    for (auto& part : partials)
        for (auto& [key, vecs] : part) {
            auto& dst = table.shells[key];
            dst.insert(dst.end(), vecs.begin(), vecs.end());
        }
    for (auto& [key, vecs] : table.shells) detail::sort_shell_vectors(d, vecs);
    return table;
}

} // namespace orbispec
