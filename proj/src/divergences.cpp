#include "gansmooth/divergences.hpp"

#include "gansmooth/transport.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace gansmooth {

LossTag parse_loss_tag(std::string_view name) {
    if (name == "js" || name == "minimax" || name == "minimax_js") return LossTag::minimax_js;
    if (name == "ns" || name == "non_saturating_kl" || name == "ns_kl") return LossTag::non_saturating_kl;
    if (name == "w1" || name == "wasserstein1") return LossTag::wasserstein1;
    if (name == "mmd" || name == "mmd_sq_half") return LossTag::mmd_sq_half;
    throw Error(ErrorCode::UnknownKind, "unknown loss '" + std::string(name) + "'");
}

std::string_view to_string(LossTag tag) {
    switch (tag) {
        case LossTag::minimax_js: return "js";
        case LossTag::non_saturating_kl: return "ns";
        case LossTag::wasserstein1: return "w1";
        case LossTag::mmd_sq_half: return "mmd";
    }
    return "unknown";
}

LossKind::LossKind(LossTag tag, DiscreteMeasure reference, std::optional<KernelSpec> kernel)
    : tag_(tag), reference_(std::move(reference)), kernel_(kernel) {
    if ((tag == LossTag::mmd_sq_half) != kernel_.has_value())
        throw Error(ErrorCode::ConfigError, "a kernel is required for, and only for, the MMD loss");
}

namespace {

// Integral over the line of |cumulative sum| for a 1-D signed atom list.
double integral_abs_cdf(const Mat& points, const Vec& weights) {
    const auto n = points.rows();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return points(a, 0) < points(b, 0); });
    double acc = 0.0;
    double cdf = 0.0;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        cdf += weights[order[k]];
        acc += std::abs(cdf) * (points(order[k + 1], 0) - points(order[k], 0));
    }
    return acc;
}

void require_same_dim(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "measures differ in dimension");
}

double kl_aligned(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] <= 0.0) continue;
        if (b[i] <= 0.0) return kInf;
        acc += a[i] * std::log(a[i] / b[i]);
    }
    return std::max(acc, 0.0);
}

}  // namespace

double w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    if (mu.dim() != 1 || nu.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "w1_1d needs 1-D measures");
    const SignedMeasure xi = diff(mu, nu);
    return integral_abs_cdf(xi.points(), xi.weights());
}

double w1_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require_same_dim(mu, nu);
    const long cells = static_cast<long>(mu.size()) * nu.size();
    if (cells > kMaxTransportCells)
        throw Error(ErrorCode::ProblemTooLarge, "transport LP limited to 1e6 cells");
    Mat cost(mu.size(), nu.size());
    for (int i = 0; i < mu.size(); ++i)
        for (int j = 0; j < nu.size(); ++j) cost(i, j) = (mu.points().row(i) - nu.points().row(j)).norm();
    return solve_transport(mu.weights(), nu.weights(), cost).cost;
}

double w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require_same_dim(mu, nu);
    return mu.dim() == 1 ? w1_1d(mu, nu) : w1_lp(mu, nu);
}

double kr_norm_1d(const SignedMeasure& xi) {
    if (xi.dim() != 1) throw Error(ErrorCode::DimensionMismatch, "kr_norm_1d needs a 1-D measure");
    if (!xi.mass_zero())
        throw Error(ErrorCode::NonZeroMass, "KR norm is infinite for measures with nonzero total mass");
    return integral_abs_cdf(xi.points(), xi.weights());
}

double kl(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    require_same_dim(mu, nu);
    const auto al = align(mu.points(), mu.weights(), nu.points(), nu.weights());
    return kl_aligned(al.a, al.b);
}

double js(const DiscreteMeasure& mu, const DiscreteMeasure& mu0) {
    require_same_dim(mu, mu0);
    const auto al = align(mu.points(), mu.weights(), mu0.points(), mu0.weights());
    const Vec m = 0.5 * (al.a + al.b);
    return std::min(0.5 * kl_aligned(al.a, m) + 0.5 * kl_aligned(al.b, m), std::log(2.0));
}

double ns_kl(const DiscreteMeasure& mu, const DiscreteMeasure& mu0) {
    require_same_dim(mu, mu0);
    const auto al = align(mu.points(), mu.weights(), mu0.points(), mu0.weights());
    return kl_aligned(0.5 * (al.a + al.b), al.b);
}

double mmd_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const KernelSpec& k) {
    require_same_dim(mu, nu);
    const SignedMeasure xi = diff(mu, nu);
    return std::max(0.0, gram_sum(k, xi.points(), xi.weights(), xi.points(), xi.weights()));
}

double loss_eval(const LossKind& kind, const DiscreteMeasure& mu) {
    const auto& ref = kind.reference();
    switch (kind.tag()) {
        case LossTag::minimax_js: return js(mu, ref);
        case LossTag::non_saturating_kl: return ns_kl(mu, ref);
        case LossTag::wasserstein1: return w1(mu, ref);
        case LossTag::mmd_sq_half: return 0.5 * mmd_sq(mu, ref, *kind.kernel());
    }
    return 0.0;
}

}  // namespace gansmooth
