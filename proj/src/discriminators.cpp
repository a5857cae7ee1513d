#include "gansmooth/discriminators.hpp"

#include <algorithm>
#include <numeric>

namespace gansmooth {

namespace {

double mean_kernel(const DiscreteMeasure& m, const KernelSpec& k, const Eigen::Ref<const Vec>& x) {
    double acc = 0.0;
    for (int i = 0; i < m.size(); ++i) acc += m.weights()[i] * k(x, m.points().row(i).transpose());
    return acc;
}

Vec mean_kernel_grad(const DiscreteMeasure& m, const KernelSpec& k, const Eigen::Ref<const Vec>& x) {
    Vec g = Vec::Zero(x.size());
    for (int i = 0; i < m.size(); ++i) g += m.weights()[i] * k.grad_x(x, m.points().row(i).transpose());
    return g;
}

void check_point(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const Eigen::Ref<const Vec>& x) {
    if (mu.dim() != mu0.dim() || x.size() != mu.dim())
        throw Error(ErrorCode::DimensionMismatch, "discriminator query dimension");
}

// Weight of the atom at x (0 if x is not an atom).
double mass_at(const DiscreteMeasure& m, const Eigen::Ref<const Vec>& x) {
    for (int i = 0; i < m.size(); ++i)
        if ((m.points().row(i).transpose() - x).cwiseAbs().maxCoeff() <= kMergeTol) return m.weights()[i];
    return 0.0;
}

}  // namespace

double phi_mmd(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const KernelSpec& k,
               const Eigen::Ref<const Vec>& x) {
    check_point(mu, mu0, x);
    return mean_kernel(mu, k, x) - mean_kernel(mu0, k, x);
}

Vec grad_phi_mmd(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const KernelSpec& k,
                 const Eigen::Ref<const Vec>& x) {
    check_point(mu, mu0, x);
    return mean_kernel_grad(mu, k, x) - mean_kernel_grad(mu0, k, x);
}

double phi_minimax(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const Eigen::Ref<const Vec>& x) {
    check_point(mu, mu0, x);
    const double a = mass_at(mu, x);
    const double b = mass_at(mu0, x);
    if (a + b <= 0.0) throw Error(ErrorCode::PointOffSupport, "minimax discriminator queried off support");
    return a > 0.0 ? 0.5 * std::log(a / (a + b)) : -kInf;
}

double phi_ns(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const Eigen::Ref<const Vec>& x) {
    check_point(mu, mu0, x);
    const double a = mass_at(mu, x);
    const double b = mass_at(mu0, x);
    if (a + b <= 0.0) throw Error(ErrorCode::PointOffSupport, "non-saturating discriminator queried off support");
    return b > 0.0 ? -0.5 * std::log(b / (a + b)) : kInf;
}

KantorovichPotential1D::KantorovichPotential1D(const DiscreteMeasure& mu, const DiscreteMeasure& mu0) {
    if (mu.dim() != 1 || mu0.dim() != 1)
        throw Error(ErrorCode::DimensionMismatch, "Kantorovich potential is 1-D only");
    const SignedMeasure xi = diff(mu, mu0);
    const auto n = xi.size();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](auto a, auto b) { return xi.points()(a, 0) < xi.points()(b, 0); });
    double cdf = 0.0;
    for (auto idx : order) {
        breaks_.push_back(xi.points()(idx, 0));
        cdf += xi.weights()[idx];
        const double s = std::abs(cdf) <= kMassTol ? 0.0 : (cdf > 0.0 ? -1.0 : 1.0);
        sign_.push_back(s);
    }
    // Past the last atom the cdf difference is exactly zero.
    sign_.back() = 0.0;
    prim_.assign(breaks_.size(), 0.0);
    for (std::size_t k = 1; k < breaks_.size(); ++k)
        prim_[k] = prim_[k - 1] + sign_[k - 1] * (breaks_[k] - breaks_[k - 1]);
    offset_ = primitive(0.0);
}

double KantorovichPotential1D::primitive(double x) const {
    if (x <= breaks_.front()) return 0.0;
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    const auto k = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    return prim_[k] + sign_[k] * (x - breaks_[k]);
}

double KantorovichPotential1D::operator()(double x) const { return primitive(x) - offset_; }

double KantorovichPotential1D::slope(double x) const {
    if (x < breaks_.front()) return 0.0;
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    return sign_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
}

double phi_w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, double x) {
    return KantorovichPotential1D(mu, mu0)(x);
}

DiscOracle::DiscOracle(const LossKind& kind, DiscreteMeasure mu) : kind_(kind), mu_(std::move(mu)) {
    if (mu_.dim() != kind_.reference().dim())
        throw Error(ErrorCode::DimensionMismatch, "oracle measure dimension differs from reference");
    if (kind_.tag() == LossTag::wasserstein1) {
        if (mu_.dim() != 1)
            throw Error(ErrorCode::DimensionMismatch, "Kantorovich potentials are available in 1-D only");
        potential_.emplace(mu_, kind_.reference());
    }
}

bool DiscOracle::supports_gradient() const {
    return kind_.tag() == LossTag::mmd_sq_half || kind_.tag() == LossTag::wasserstein1;
}

double DiscOracle::value(const Eigen::Ref<const Vec>& x) const {
    switch (kind_.tag()) {
        case LossTag::mmd_sq_half: return phi_mmd(mu_, kind_.reference(), *kind_.kernel(), x);
        case LossTag::wasserstein1: return (*potential_)(x[0]);
        case LossTag::minimax_js: return phi_minimax(mu_, kind_.reference(), x);
        case LossTag::non_saturating_kl: return phi_ns(mu_, kind_.reference(), x);
    }
    return 0.0;
}

Vec DiscOracle::grad(const Eigen::Ref<const Vec>& x) const {
    switch (kind_.tag()) {
        case LossTag::mmd_sq_half: return grad_phi_mmd(mu_, kind_.reference(), *kind_.kernel(), x);
        case LossTag::wasserstein1: return Vec::Constant(1, potential_->slope(x[0]));
        default: break;
    }
    throw Error(ErrorCode::GradientUnsupported, "density-ratio discriminators have no spatial gradient");
}

}  // namespace gansmooth
