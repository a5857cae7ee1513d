#include "gansmooth/kernel.hpp"

namespace gansmooth {

KernelSpec::KernelSpec(double sigma_sq_, bool normalized_) : sigma_sq(sigma_sq_), normalized(normalized_) {
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq))
        throw Error(ErrorCode::PreconditionViolated, "kernel bandwidth sigma^2 must be positive");
}

double KernelSpec::prefactor(int dim) const {
    return normalized ? std::pow(2.0 * kPi * sigma_sq, -0.5 * dim) : 1.0;
}

double KernelSpec::operator()(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) const {
    return prefactor(static_cast<int>(x.size())) * std::exp(-(x - y).squaredNorm() / (2.0 * sigma_sq));
}

Vec KernelSpec::grad_x(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) const {
    const Vec r = x - y;
    return (-(*this)(x, y) / sigma_sq) * r;
}

double gram_sum(const KernelSpec& k, const Mat& p, const Vec& a, const Mat& q, const Vec& b) {
    if (p.cols() != q.cols()) throw Error(ErrorCode::DimensionMismatch, "gram_sum dimension");
    const double c = k.prefactor(static_cast<int>(p.cols()));
    const double inv2s = 1.0 / (2.0 * k.sigma_sq);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        if (a[i] == 0.0) continue;
        double row = 0.0;
        for (Eigen::Index j = 0; j < q.rows(); ++j)
            row += b[j] * std::exp(-(p.row(i) - q.row(j)).squaredNorm() * inv2s);
        acc += a[i] * row;
    }
    return c * acc;
}

}  // namespace gansmooth
