#pragma once

#include <functional>

namespace dmr {

struct Bracket {
    double lo;
    double hi;
};

// Root of a strictly increasing function by bisection. The seed bracket is
// expanded geometrically (doubling outward, at most 64 times) until it
// straddles the root; RootBracketFailure otherwise. Returns x* with
// |g(x*)| <= tol.
double root_solve_monotone(const std::function<double(double)>& g,
                           Bracket seed, double tol);

}  // namespace dmr
