#pragma once

#include "gansmooth/discriminators.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>

namespace gansmooth {

inline constexpr double kSaturation = 1e6;

/// Sup-sampled lower bound on a regularity constant.
struct Estimate {
    double value = 0.0;
    bool saturated = false;  // some sampled ratio exceeded kSaturation
    long samples = 0;        // ratios actually evaluated
};

/// A family of optimal discriminators {Phi_mu} indexed by sampled (mu, mu0).
/// Each trial draws its measures from an Rng seeded by derive_seed(seed, trial),
/// so estimates over a longer trial list are sups over a superset.
class OracleFamily {
public:
    using Sampler = std::function<DiscreteMeasure(Rng&)>;

    /// mu and mu0 both random (k in {2..8} uniform atoms, Dirichlet weights).
    static OracleFamily random(LossTag tag, const BoxDomain& domain, KernelSpec kernel = KernelSpec::critical());
    /// A single fixed generator distribution and reference.
    static OracleFamily fixed(LossTag tag, DiscreteMeasure mu, DiscreteMeasure mu0,
                              KernelSpec kernel = KernelSpec::critical());

    LossTag tag() const { return tag_; }
    const KernelSpec& kernel() const { return kernel_; }
    const BoxDomain& domain() const { return domain_; }
    bool is_fixed() const { return fixed_; }

    /// (mu, mu0) for one trial.
    std::pair<DiscreteMeasure, DiscreteMeasure> draw(Rng& rng) const;
    DiscOracle oracle(const DiscreteMeasure& mu, const DiscreteMeasure& mu0) const;

private:
    OracleFamily(LossTag tag, KernelSpec kernel, BoxDomain domain, Sampler mu, Sampler mu0, bool fixed);

    LossTag tag_;
    KernelSpec kernel_;
    BoxDomain domain_;
    Sampler mu_;
    Sampler mu0_;
    bool fixed_;
};

/// (D1): sup ||grad_x Phi_mu|| over sampled mu and query points. For the W1
/// potential the max adjacent finite-difference slope on the grid is used.
Estimate estimate_alpha(const OracleFamily& family, const BoxDomain& domain, int n_measures, int grid_pts,
                        std::uint64_t seed);

/// (D2): sup ||grad Phi(x) - grad Phi(y)|| / ||x - y|| over random close pairs
/// and, in 1-D with grid_pts >= 2, adjacent grid nodes.
Estimate estimate_beta1(const OracleFamily& family, const BoxDomain& domain, int n_measures, int n_point_pairs,
                        std::uint64_t seed, int grid_pts = 0);

/// (D3): sup over pairs (mu, nu) of sup_x ||grad Phi_mu(x) - grad Phi_nu(x)|| / W1(mu, nu).
/// Pairs cycle through three constructions: independent draws, per-atom
/// jitter of mu, and a rigid translation of mu. Identical pairs are skipped.
Estimate estimate_beta2(const OracleFamily& family, const BoxDomain& domain, int n_measure_pairs, int grid_pts,
                        std::uint64_t seed);

/// J(nu) - J(mu) - int Phi_mu d(nu - mu); +infinity when the pairing diverges.
double bregman(const LossKind& kind, const DiscreteMeasure& nu, const DiscreteMeasure& mu);

struct MeasurePair {
    DiscreteMeasure nu;
    DiscreteMeasure mu;
};

struct BregmanBoundResult {
    double worst_ratio = 0.0;  // max D_J(nu, mu) / (||mu - nu||_KR^2 / 2)
    bool unbounded = false;    // some Bregman divergence was +infinity
    bool within_bound = true;  // worst_ratio <= beta2
    int used = 0;
    int excluded = 0;          // pairs with nu == mu
};

/// Checks D_J(nu, mu) <= beta2/2 ||mu - nu||_KR^2 on 1-D pairs.
BregmanBoundResult bregman_kr_bound_check(const LossKind& kind, std::span<const MeasurePair> pairs, double beta2);

/// Operator norm of grad_x grad_y K(x,y) from its two analytic eigenvalues.
double kernel_cross_hessian_norm(const KernelSpec& k, const Eigen::Ref<const Vec>& x,
                                 const Eigen::Ref<const Vec>& y);

struct SmoothnessReport {
    std::string loss;
    int dim = 1;
    Estimate alpha;
    Estimate beta1;
    Estimate beta2;
    int n_trials = 0;
    double grid_step = 0.0;
    std::uint64_t seed = 0;
};

/// Runs all three estimators on the random family over [-1,1]^dim.
/// beta2 uses n_trials pairs in 1-D and n_trials / 5 in higher dimension.
SmoothnessReport smoothness_report(LossTag tag, int dim, int n_trials, std::uint64_t seed,
                                   KernelSpec kernel = KernelSpec::critical(), int grid_pts = 101);

std::string to_json(const SmoothnessReport& report);

}  // namespace gansmooth
