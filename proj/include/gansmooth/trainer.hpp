#pragma once

#include "gansmooth/kernel.hpp"
#include "gansmooth/measures.hpp"
#include "gansmooth/nnsmooth.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gansmooth {

/// Row i of theta is the image of latent index i; mu_theta weighs rows by 1/N.
/// Lipschitz constants in expectation: A = 1/sqrt(N), B = 0.
struct ParticleGenerator {
    Mat theta;

    int n() const { return static_cast<int>(theta.rows()); }
    int dim() const { return static_cast<int>(theta.cols()); }
    double lipschitz_a() const { return 1.0 / std::sqrt(static_cast<double>(n())); }
    DiscreteMeasure measure() const;
};

/// J(theta) = 1/2 MMD^2(mu_theta, mu0).
double mmd_particle_loss(const ParticleGenerator& gen, const DiscreteMeasure& mu0, const KernelSpec& k);
/// dJ/dtheta: row i = (1/N) grad_x Phi_{mu_theta}(theta_i).
Mat mmd_particle_grad(const ParticleGenerator& gen, const DiscreteMeasure& mu0, const KernelSpec& k);

/// 1 / (alpha B + A^2 (beta1 + beta2)).
double theoretical_lr(double a, double b, double alpha, double beta1, double beta2);

namespace flags {
inline constexpr unsigned clamped = 1u;
inline constexpr unsigned diverged = 2u;
}  // namespace flags

std::string flags_to_string(unsigned f);
unsigned parse_flags(const std::string& s);

inline constexpr double kDivergenceThreshold = 1e6;

struct StepRecord {
    int step = 0;
    double loss = 0.0;       // J before the update
    double grad_norm = 0.0;  // Frobenius norm of the gradient at this iterate
    double step_size = 0.0;
    unsigned flags = 0;
};

struct TrainTrace {
    std::vector<StepRecord> steps;
    double final_loss = 0.0;  // J after the last update
    double lipschitz_l = 0.0; // L used for the nominal step 1/L
    bool diverged = false;
    bool realizable = true;   // particle count equals the target's atom count
    std::vector<double> disc_norms;  // gan2d only: max layer norm after each step

    double initial_loss() const { return steps.empty() ? final_loss : steps.front().loss; }
    double min_grad_norm() const;
    /// Fraction of steps whose update increased the loss.
    double nonmonotone_fraction() const;
    /// J0 when inf J = 0 is attainable, else J0 - min_k J_k (surrogate).
    double bound_reference() const;
};

struct TrainConfig {
    DiscreteMeasure target = dirac(Vec::Zero(2));
    KernelSpec kernel = KernelSpec::critical();
    int n_particles = 64;
    double lr_ratio = 1.0;
    int n_steps = 1000;
    std::uint64_t seed = 0;
    double beta1_bound = 4.0 * kPi;
    double beta2_bound = 2.0 * kPi;
    bool init_at_target = false;  // otherwise uniform in the target's box
};

/// Gradient descent on J with step lr_ratio / L, L = A^2 (beta1 + beta2);
/// iterates are clamped to the target's box.
TrainTrace train_particles(const TrainConfig& cfg);

struct StationarityCheck {
    bool holds = true;
    double worst_ratio = 0.0;  // max over n of min_{k<n} g_k^2 / ((2L/n) J0)
    int worst_n = 0;
};

/// min_{k<n} g_k^2 <= (2L/n) J0 (1 + 1e-9) for every prefix length n.
StationarityCheck stationarity_bound(const TrainTrace& trace, double l, double j0);
bool check_stationarity_bound(const TrainTrace& trace, double l, double j0);

/// max_k J_{k+1} - (J_k - g_k^2 / (2L)); nonpositive when every step descends.
double descent_violation(const TrainTrace& trace, double l);

struct GanLoopConfig {
    DiscreteMeasure target = dirac(Vec::Zero(2));
    int n_particles = 16;
    bool init_at_target = true;
    int disc_depth = 3;
    int disc_width = 16;
    double alpha = 1.0;  // final_scale of the discriminator
    double beta2 = 2.0 * kPi;
    int disc_steps_per_gen = 2;
    bool interpolation = true;
    int penalty_samples = 0;  // 0: one interpolate per particle
    double disc_lr = 0.05;
    double gen_lr = 0.0;      // 0: N / (k alpha + beta2)
    double fd_step = 1e-4;
    int n_steps = 100;
    std::uint64_t seed = 0;
};

inline constexpr int kMaxDiscParams = 500;

GanLoopConfig gan_config_from_json(const std::string& text);
std::string to_json(const GanLoopConfig& cfg);

/// Alternating loop on the penalized objective
///   E_mu phi - E_mu0 phi - (pi / beta2) E_tilde[phi^2 + |grad phi|^2 / (4 pi)].
/// Trace loss is that objective; grad_norm is the generator gradient norm.
TrainTrace train_gan2d(const GanLoopConfig& cfg);

void write_trace_csv(std::ostream& os, const TrainTrace& trace);
TrainTrace read_trace_csv(std::istream& is);

struct SweepRow {
    double ratio = 0.0;
    std::uint64_t seed = 0;
    double min_grad_norm = 0.0;
    double final_loss = 0.0;
    bool diverged = false;
};

/// One particle run per (ratio, seed) on the given target kind.
std::vector<SweepRow> lr_sweep(const std::vector<double>& ratios, int n_seeds, std::uint64_t base_seed,
                               TargetKind target, int n_particles, int n_steps);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace gansmooth
