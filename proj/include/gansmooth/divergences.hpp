#pragma once

#include "gansmooth/kernel.hpp"
#include "gansmooth/measures.hpp"

#include <optional>
#include <string_view>

namespace gansmooth {

enum class LossTag { minimax_js, non_saturating_kl, wasserstein1, mmd_sq_half };

LossTag parse_loss_tag(std::string_view name);
std::string_view to_string(LossTag tag);

/// A GAN loss J(mu) relative to a reference distribution mu0.
/// `kernel` is present exactly when tag == mmd_sq_half.
class LossKind {
public:
    LossKind(LossTag tag, DiscreteMeasure reference, std::optional<KernelSpec> kernel = std::nullopt);

    static LossKind mmd(DiscreteMeasure reference, KernelSpec kernel = KernelSpec::critical()) {
        return LossKind(LossTag::mmd_sq_half, std::move(reference), kernel);
    }

    LossTag tag() const { return tag_; }
    const DiscreteMeasure& reference() const { return reference_; }
    const std::optional<KernelSpec>& kernel() const { return kernel_; }

private:
    LossTag tag_;
    DiscreteMeasure reference_;
    std::optional<KernelSpec> kernel_;
};

/// W1 on the line: exact integral of |F_mu - F_nu|.
double w1_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

inline constexpr long kMaxTransportCells = 1000000;

/// W1 with Euclidean ground cost via the exact transport LP.
double w1_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// W1 using the 1-D closed form when possible, the LP otherwise.
double w1(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Kantorovich-Rubinstein norm of a mass-zero 1-D signed measure: integral of |F_xi|.
double kr_norm_1d(const SignedMeasure& xi);

/// KL(mu || nu); +infinity when mu is not absolutely continuous w.r.t. nu.
double kl(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Jensen-Shannon divergence, in [0, log 2].
double js(const DiscreteMeasure& mu, const DiscreteMeasure& mu0);

/// Non-saturating loss KL(mu/2 + mu0/2 || mu0).
double ns_kl(const DiscreteMeasure& mu, const DiscreteMeasure& mu0);

/// Squared MMD as the Gram double sum over (mu - nu) x (mu - nu).
double mmd_sq(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const KernelSpec& k);

/// J(mu) for the given loss kind.
double loss_eval(const LossKind& kind, const DiscreteMeasure& mu);

}  // namespace gansmooth
