#pragma once

#include "gansmooth/common.hpp"

namespace gansmooth {

/// Gaussian kernel K(x,y) = c * exp(-|x-y|^2 / (2 sigma^2)), where c = 1 unless
/// `normalized`, in which case c = (2 pi sigma^2)^{-d/2}.
struct KernelSpec {
    double sigma_sq = 1.0 / (2.0 * kPi);
    bool normalized = false;

    KernelSpec() = default;
    KernelSpec(double sigma_sq_, bool normalized_ = false);

    /// K(x,y) = exp(-pi |x-y|^2), the dimension-free kernel with 1/sigma^2 = 2 pi.
    static KernelSpec critical() { return KernelSpec(1.0 / (2.0 * kPi), false); }

    double inv_sigma_sq() const { return 1.0 / sigma_sq; }
    double prefactor(int dim) const;

    double operator()(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) const;
    /// Gradient in the first argument: -(x-y)/sigma^2 * K(x,y).
    Vec grad_x(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) const;
};

/// sum_ij a_i b_j K(p_i, q_j)
double gram_sum(const KernelSpec& k, const Mat& p, const Vec& a, const Mat& q, const Vec& b);

}  // namespace gansmooth
