#pragma once

#include "gansmooth/kernel.hpp"
#include "gansmooth/measures.hpp"

#include <vector>

namespace gansmooth {

/// f = sum_i c_i K(x_i, .) for 1-D centers.
struct EmbeddingFn {
    Vec centers;
    Vec coeffs;
    KernelSpec kernel = KernelSpec::critical();

    double operator()(double x) const;
    /// k-th derivative, computed from the Hermite recursion (critical kernel only).
    double derivative(int k, double x) const;
    /// Gram form sum_ij c_i c_j K(x_i, x_j).
    double norm_sq() const;
};

/// Mean embedding of a 1-D measure.
EmbeddingFn embed(const SignedMeasure& xi, KernelSpec kernel = KernelSpec::critical());

/// Double Gram sum of a signed measure; coincides with mmd_sq for xi = mu - nu.
double embedding_norm_sq(const SignedMeasure& xi, const KernelSpec& k);

inline constexpr int kMaxSeriesOrder = 30;
inline constexpr double kDefaultQuadStep = 1e-3;

struct QuadratureGrid {
    double lo = 0.0;
    double hi = 0.0;
    double step = kDefaultQuadStep;
};

/// Interval wide enough for the order-K integrands around the centers.
QuadratureGrid default_quadrature(const EmbeddingFn& f, int order);

/// Partial sums S_0..S_K of sum_k (4 pi)^{-k} / k! * ||f^(k)||^2_{L2}.
std::vector<double> truncated_series_norm(const EmbeddingFn& f, int order, const QuadratureGrid& quad);
std::vector<double> truncated_series_norm(const EmbeddingFn& f, int order);

/// sum_i w_i (phi_i^2 + |grad phi_i|^2 / (4 pi)); grads has one row per point.
double gp_penalty(const Vec& values, const Mat& grads, const Vec& weights);

}  // namespace gansmooth
