#include "gansmooth/rkhs.hpp"

#include <algorithm>

namespace gansmooth {

namespace {

void require_critical(const KernelSpec& k) {
    if (std::abs(k.sigma_sq * 2.0 * kPi - 1.0) > 1e-12)
        throw Error(ErrorCode::PreconditionViolated, "derivative series needs the critical bandwidth 1/(2 pi)");
}

void require_shape(const EmbeddingFn& f) {
    if (f.centers.size() != f.coeffs.size())
        throw Error(ErrorCode::LengthMismatch, "embedding centers and coefficients differ in length");
}

// P_k(t) with d^k/dx^k exp(-pi t^2) = P_k(t) exp(-pi t^2), t = x - c.
void hermite_table(double t, int order, std::vector<double>& out) {
    out.assign(order + 1, 0.0);
    out[0] = 1.0;
    if (order >= 1) out[1] = -2.0 * kPi * t;
    for (int k = 1; k < order; ++k) out[k + 1] = -2.0 * kPi * (t * out[k] + k * out[k - 1]);
}

}  // namespace

double EmbeddingFn::operator()(double x) const {
    require_shape(*this);
    double acc = 0.0;
    const Vec xv = Vec::Constant(1, x);
    for (Eigen::Index i = 0; i < centers.size(); ++i) acc += coeffs[i] * kernel(xv, Vec::Constant(1, centers[i]));
    return acc;
}

double EmbeddingFn::derivative(int k, double x) const {
    require_shape(*this);
    require_critical(kernel);
    const double c = kernel.prefactor(1);
    std::vector<double> p;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < centers.size(); ++i) {
        const double t = x - centers[i];
        hermite_table(t, k, p);
        acc += coeffs[i] * c * p[k] * std::exp(-kPi * t * t);
    }
    return acc;
}

double EmbeddingFn::norm_sq() const {
    require_shape(*this);
    const Mat p = centers;
    return std::max(0.0, gram_sum(kernel, p, coeffs, p, coeffs));
}

EmbeddingFn embed(const SignedMeasure& xi, KernelSpec kernel) {
    if (xi.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "embedding functions are 1-D");
    return EmbeddingFn{xi.points().col(0), xi.weights(), kernel};
}

double embedding_norm_sq(const SignedMeasure& xi, const KernelSpec& k) {
    if (xi.dim() < 1 || xi.dim() > 2) throw Error(ErrorCode::DimensionMismatch, "embedding norm is for 1-D or 2-D measures");
    if (xi.size() == 0) return 0.0;
    return std::max(0.0, gram_sum(k, xi.points(), xi.weights(), xi.points(), xi.weights()));
}

QuadratureGrid default_quadrature(const EmbeddingFn& f, int order) {
    require_shape(f);
    const double sigma = std::sqrt(f.kernel.sigma_sq);
    const double pad = 6.0 * sigma + std::sqrt((2.0 * order + 1.0) / kPi);
    double lo = 0.0, hi = 0.0;
    if (f.centers.size() > 0) {
        lo = f.centers.minCoeff();
        hi = f.centers.maxCoeff();
    }
    const double h = kDefaultQuadStep;
    return {h * std::floor((lo - pad) / h), h * std::ceil((hi + pad) / h), h};
}

std::vector<double> truncated_series_norm(const EmbeddingFn& f, int order, const QuadratureGrid& quad) {
    require_shape(f);
    require_critical(f.kernel);
    if (order < 0 || order > kMaxSeriesOrder) throw Error(ErrorCode::OrderTooLarge, "series order must lie in [0, 30]");
    if (!(quad.step > 0.0) || !(quad.hi > quad.lo))
        throw Error(ErrorCode::QuadratureDomainTooSmall, "empty quadrature interval");
    if (f.centers.size() > 0) {
        const double reach = 6.0 * std::sqrt(f.kernel.sigma_sq);
        if (quad.lo > f.centers.minCoeff() - reach || quad.hi < f.centers.maxCoeff() + reach)
            throw Error(ErrorCode::QuadratureDomainTooSmall, "quadrature must cover centers +- 6 bandwidths");
    }

    const long n = static_cast<long>(std::ceil((quad.hi - quad.lo) / quad.step - 1e-9));
    const double h = (quad.hi - quad.lo) / n;
    const double c = f.kernel.prefactor(1);
    std::vector<double> integral(order + 1, 0.0);
    std::vector<double> p, deriv(order + 1);
    for (long j = 0; j <= n; ++j) {
        const double x = quad.lo + h * j;
        std::fill(deriv.begin(), deriv.end(), 0.0);
        for (Eigen::Index i = 0; i < f.centers.size(); ++i) {
            const double t = x - f.centers[i];
            const double g = f.coeffs[i] * c * std::exp(-kPi * t * t);
            if (g == 0.0) continue;
            hermite_table(t, order, p);
            for (int k = 0; k <= order; ++k) deriv[k] += p[k] * g;
        }
        const double w = (j == 0 || j == n) ? 0.5 * h : h;
        for (int k = 0; k <= order; ++k) integral[k] += w * deriv[k] * deriv[k];
    }

    std::vector<double> sums(order + 1);
    double acc = 0.0;
    for (int k = 0; k <= order; ++k) {
        if (integral[k] > 0.0) acc += std::exp(std::log(integral[k]) - k * std::log(4.0 * kPi) - std::lgamma(k + 1.0));
        sums[k] = acc;
    }
    return sums;
}

std::vector<double> truncated_series_norm(const EmbeddingFn& f, int order) {
    return truncated_series_norm(f, order, default_quadrature(f, order));
}

double gp_penalty(const Vec& values, const Mat& grads, const Vec& weights) {
    if (values.size() != weights.size() || grads.rows() != values.size())
        throw Error(ErrorCode::LengthMismatch, "penalty inputs differ in length");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (weights[i] < 0.0) throw Error(ErrorCode::NegativeWeight, "penalty weights must be nonnegative");
        acc += weights[i] * (values[i] * values[i] + grads.row(i).squaredNorm() / (4.0 * kPi));
    }
    return acc;
}

}  // namespace gansmooth
