#pragma once

#include "gansmooth/common.hpp"

namespace gansmooth {

struct TransportResult {
    double cost = 0.0;
    Mat plan;         // supply x demand
    int pivots = 0;
};

/// Exact balanced transportation problem solved with the primal transportation
/// simplex (north-west corner start, MODI pricing, tree-cycle pivots).
/// Supplies and demands are rescaled to a common total before solving.
TransportResult solve_transport(const Vec& supply, const Vec& demand, const Mat& cost,
                                double pivot_tol = 1e-12);

}  // namespace gansmooth
