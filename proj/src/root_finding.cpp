#include "dmr/root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmr/errors.hpp"

namespace dmr {

double root_solve_monotone(const std::function<double(double)>& g,
                           Bracket seed, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("root_solve_monotone: tol must be positive");

    double lo = std::min(seed.lo, seed.hi);
    double hi = std::max(seed.lo, seed.hi);
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }

    double glo = g(lo);
    double ghi = g(hi);
    double width = hi - lo;
    int expansions = 0;
    while (glo > 0.0 || ghi < 0.0) {
        if (++expansions > 64)
            throw RootBracketFailure("root_solve_monotone: no sign change after 64 expansions");
        width *= 2.0;
        if (glo > 0.0) {
            lo -= width;
            glo = g(lo);
        }
        if (ghi < 0.0) {
            hi += width;
            ghi = g(hi);
        }
    }

    if (std::abs(glo) <= tol) return lo;
    if (std::abs(ghi) <= tol) return hi;

    // Plain bisection; the constraint functions are only bi-Lipschitz, so no
    // derivative-based refinement is attempted.
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (std::abs(gm) <= tol) return mid;
        if (gm > 0.0)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 0.0) break;
    }
    return mid;
}

}  // namespace dmr
