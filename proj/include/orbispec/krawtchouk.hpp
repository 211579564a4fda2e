#pragma once

#include <utility>
#include <vector>

#include "orbispec/crystal.hpp"
#include "orbispec/errors.hpp"
#include "orbispec/rational.hpp"

namespace orbispec {

// Binary Krawtchouk polynomial K_p^d evaluated at an integer argument:
//   K_p^d(k) = sum_{j=0}^p (-1)^j C(k, j) C(d-k, p-j)
// with C(m, n) = 0 for n > m or n < 0.
inline Integer krawtchouk(int d, int p, int k) {
    if (d < 1 || p < 0 || p > d || k < 0 || k > d)
        throw SchemaError("krawtchouk arguments out of range");
    Integer sum = 0;
    for (int j = 0; j <= p; ++j) {
        Integer term = binomial(k, j) * binomial(d - k, p - j);
        sum += (j % 2 == 0) ? term : -term;
    }
    return sum;
}

// All integer arguments k in [0, d] where K_p^d vanishes.
inline std::vector<int> integer_zeros(int d, int p) {
    std::vector<int> zeros;
    for (int k = 0; k <= d; ++k)
        if (krawtchouk(d, p, k) == 0) zeros.push_back(k);
    return zeros;
}

// diag(-1 x k, 1 x (d-k))
inline ZMat reflection_matrix(int d, int k) {
    ZMat g = ZMat::identity(static_cast<std::size_t>(d));
    for (int i = 0; i < k; ++i) g(i, i) = -1;
    return g;
}

// The p-form trace of a k-fold reflection computed two ways: through the
// characteristic polynomial, and through the Krawtchouk value. Callers assert
// the pair is equal.
inline std::pair<Integer, Integer> reflection_trace_check(int d, int k, int p) {
    return {tr_p(reflection_matrix(d, k), p), krawtchouk(d, p, k)};
}

} // namespace orbispec
