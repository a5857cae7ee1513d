#pragma once

#include "gansmooth/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace gansmooth {

/// Axis-aligned compact box [lo, hi] in R^d.
struct BoxDomain {
    Vec lo;
    Vec hi;

    BoxDomain(Vec lo_, Vec hi_);

    /// [-1, 1]^d
    static BoxDomain unit(int dim);

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Eigen::Ref<const Vec>& x, double tol = 1e-12) const;
    Vec clamp(const Eigen::Ref<const Vec>& x) const;
};

inline constexpr double kMergeTol = 1e-12;
inline constexpr double kMassTol = 1e-12;

/// Finitely supported probability measure. Rows of `points()` are atoms.
/// Immutable after construction; build through make_discrete.
class DiscreteMeasure {
public:
    const Mat& points() const { return points_; }
    const Vec& weights() const { return weights_; }
    const BoxDomain& domain() const { return domain_; }
    int dim() const { return static_cast<int>(points_.cols()); }
    int size() const { return static_cast<int>(points_.rows()); }
    Vec atom(int i) const { return points_.row(i).transpose(); }

private:
    DiscreteMeasure(Mat points, Vec weights, BoxDomain domain)
        : points_(std::move(points)), weights_(std::move(weights)), domain_(std::move(domain)) {}

    friend DiscreteMeasure make_discrete(const Mat&, const Vec&, std::optional<BoxDomain>);

    Mat points_;
    Vec weights_;
    BoxDomain domain_;
};

/// Finitely supported signed measure (typically a difference mu - nu).
class SignedMeasure {
public:
    SignedMeasure(Mat points, Vec weights);

    const Mat& points() const { return points_; }
    const Vec& weights() const { return weights_; }
    double total_mass() const { return total_mass_; }
    bool mass_zero() const { return std::abs(total_mass_) <= kMassTol; }
    int dim() const { return static_cast<int>(points_.cols()); }
    int size() const { return static_cast<int>(points_.rows()); }

private:
    Mat points_;
    Vec weights_;
    double total_mass_;
};

/// Validates, merges atoms closer than kMergeTol (sup-norm, weights added,
/// first-occurrence order kept) and renormalizes weights to sum 1.
/// Without an explicit domain the box is [-1,1]^d enlarged to contain the atoms.
DiscreteMeasure make_discrete(const Mat& points, const Vec& weights,
                              std::optional<BoxDomain> domain = std::nullopt);

/// Equal-weight measure on the given rows.
DiscreteMeasure make_uniform(const Mat& points, std::optional<BoxDomain> domain = std::nullopt);

/// Point mass at x.
DiscreteMeasure dirac(const Vec& x);
DiscreteMeasure dirac(double x);

/// mu - nu on the union of supports (coinciding atoms combined).
SignedMeasure diff(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

SignedMeasure to_signed(const DiscreteMeasure& mu);
SignedMeasure add(const SignedMeasure& a, const SignedMeasure& b);
SignedMeasure scale(const SignedMeasure& a, double c);

/// Right-continuous cumulative distribution at x (1-D only).
double cdf_1d(const DiscreteMeasure& m, double x);
double cdf_1d(const SignedMeasure& m, double x);

/// Weights of both measures on the union of their supports
/// (atoms matched with kMergeTol).
struct AlignedWeights {
    Mat points;
    Vec a;
    Vec b;
};
AlignedWeights align(const Mat& pa, const Vec& wa, const Mat& pb, const Vec& wb);

enum class TargetKind { ring, gaussian_mixture, grid_uniform };

TargetKind parse_target_kind(std::string_view name);
std::string_view to_string(TargetKind kind);

/// Deterministic desk-scale target inside [-1,1]^dim with equal weights 1/n.
/// ring: radius 0.5 circle in the first two coordinates (random angles).
/// gaussian_mixture: four Gaussians (std 0.1) centred at (+-0.5, +-0.5).
/// grid_uniform: first n nodes of a cell-centred regular grid.
DiscreteMeasure sample_target(TargetKind kind, int n, std::uint64_t seed, int dim = 2);

/// Random measure with k in [min_atoms, max_atoms] atoms uniform in the box
/// and Dirichlet(1,...,1) weights.
DiscreteMeasure random_measure(Rng& rng, const BoxDomain& domain, int min_atoms = 2,
                               int max_atoms = 8);

/// CSV: header x_1,..,x_d,w then one row per atom.
void write_measure_csv(std::ostream& os, const DiscreteMeasure& m);
DiscreteMeasure read_measure_csv(std::istream& is);
DiscreteMeasure read_measure_csv_file(const std::string& path);

}  // namespace gansmooth
