#pragma once

#include "gansmooth/measures.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gansmooth {

enum class Activation { elu, sigmoid, relu };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a);

struct DenseLayer {
    Mat weight;  // out x in
    Vec bias;
};

/// f(x) = final_scale * A_k s(A_{k-1} ... s(A_1 x + b_1) ...) + final_scale * b_k,
/// with the activation s applied after every layer but the last; scalar output.
struct MlpNet {
    std::vector<DenseLayer> layers;
    Activation activation = Activation::elu;
    double final_scale = 1.0;

    /// Throws DimensionMismatch unless the layer shapes chain to a scalar output.
    void validate() const;
    int input_dim() const;
    int depth() const { return static_cast<int>(layers.size()); }
    int n_params() const;

    /// Weights (row-major) then bias for each layer in order.
    Vec params() const;
    void set_params(const Vec& p);
};

/// `depth` linear layers with hidden width `width`, entries uniform in
/// [-1/sqrt(fan_in), 1/sqrt(fan_in)]; spectrally normalized when `normalize`.
MlpNet make_mlp(int input_dim, int width, int depth, Activation act, double final_scale, std::uint64_t seed,
                bool normalize = true);

double mlp_forward(const MlpNet& net, const Eigen::Ref<const Vec>& x);
Vec mlp_input_grad(const MlpNet& net, const Eigen::Ref<const Vec>& x);

struct PowerIterState {
    Vec u;
    Vec v;
    int n_iters = 0;
    double estimate = 0.0;  // |W v|, a lower bound on the top singular value
    bool zero = false;      // W is the zero matrix
};

/// Starts from a seeded random v; continues from `state` when given a warm start.
PowerIterState power_iteration(const Mat& w, int iters, std::uint64_t seed);
PowerIterState power_iteration(const Mat& w, int iters, PowerIterState state);
double power_iteration_specnorm(const Mat& w, int iters, std::uint64_t seed);

inline constexpr double kSpecNormSafety = 1e-6;

/// Divides each weight by its converged power-iteration estimate times
/// (1 + 1e-6); zero layers are left as they are. Biases are untouched.
MlpNet spectral_normalize(const MlpNet& net, std::uint64_t seed = 0);
/// Indices of all-zero weight matrices (the layers spectral_normalize skips).
std::vector<int> zero_layers(const MlpNet& net);
/// Largest exact (SVD) operator norm over the weight matrices.
double max_layer_norm(const MlpNet& net);

double empirical_lipschitz(const MlpNet& net, const BoxDomain& domain, int n_pairs, std::uint64_t seed);
/// Requires a smooth activation (elu or sigmoid).
double empirical_smoothness(const MlpNet& net, const BoxDomain& domain, int n_pairs, std::uint64_t seed);

std::string to_json(const MlpNet& net);
MlpNet mlp_from_json(const std::string& text);

}  // namespace gansmooth
