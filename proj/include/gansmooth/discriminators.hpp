#pragma once

#include "gansmooth/divergences.hpp"

#include <vector>

namespace gansmooth {

/// E_{y~mu} K(x,y) - E_{y~mu0} K(x,y)
double phi_mmd(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const KernelSpec& k,
               const Eigen::Ref<const Vec>& x);
Vec grad_phi_mmd(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const KernelSpec& k,
                 const Eigen::Ref<const Vec>& x);

/// Density-ratio discriminators; defined only on atoms of mu or mu0.
double phi_minimax(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const Eigen::Ref<const Vec>& x);
double phi_ns(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, const Eigen::Ref<const Vec>& x);

/// 1-D Kantorovich potential psi(x) = -int_0^x sign(F_mu - F_mu0) dt.
/// psi is 1-Lipschitz, psi(0) = 0 and int psi d(mu - mu0) = W1(mu, mu0).
class KantorovichPotential1D {
public:
    KantorovichPotential1D(const DiscreteMeasure& mu, const DiscreteMeasure& mu0);

    double operator()(double x) const;
    /// Right derivative: -sign(F_mu - F_mu0)(x), in {-1, 0, 1}.
    double slope(double x) const;

private:
    double primitive(double x) const;  // integral from the first breakpoint

    std::vector<double> breaks_;
    std::vector<double> sign_;    // slope on [breaks_[k], breaks_[k+1])
    std::vector<double> prim_;    // primitive at breaks_[k]
    double offset_ = 0.0;
};

double phi_w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& mu0, double x);

/// Optimal discriminator Phi_mu for a loss kind, frozen at a generator distribution mu.
class DiscOracle {
public:
    DiscOracle(const LossKind& kind, DiscreteMeasure mu);

    const LossKind& kind() const { return kind_; }
    const DiscreteMeasure& mu() const { return mu_; }

    bool supports_gradient() const;
    double value(const Eigen::Ref<const Vec>& x) const;
    /// Spatial gradient; the W1 potential reports its right derivative.
    /// Throws GradientUnsupported for density-ratio kinds.
    Vec grad(const Eigen::Ref<const Vec>& x) const;

private:
    LossKind kind_;
    DiscreteMeasure mu_;
    std::optional<KantorovichPotential1D> potential_;
};

}  // namespace gansmooth
