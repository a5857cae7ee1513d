#pragma once

#include "gansmooth/measures.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace gansmooth {

/// Function sampled on the uniform lattice lo + step * i of a 1-D or 2-D box.
/// +infinity entries encode indicator constraints. 2-D values are stored
/// row-major with the first coordinate as the slow index.
class GridFn {
public:
    GridFn(BoxDomain domain, double step, Vec values);

    /// Samples f on the lattice of `domain`; `step` must divide every side.
    static GridFn sample(const BoxDomain& domain, double step, const std::function<double(const Vec&)>& f);

    const BoxDomain& domain() const { return domain_; }
    double step() const { return step_; }
    int dim() const { return domain_.dim(); }
    int extent(int axis) const { return extent_[axis]; }
    int size() const { return static_cast<int>(values_.size()); }
    const Vec& values() const { return values_; }
    double operator[](int i) const { return values_[i]; }

    Vec node(int flat) const;
    int flat(int i, int j = 0) const { return dim() == 1 ? i : i * extent_[1] + j; }
    /// True when the node lies on the outer ring of the lattice.
    bool on_boundary(int flat, int margin = 1) const;
    bool same_grid(const GridFn& other) const;

private:
    BoxDomain domain_;
    double step_;
    int extent_[2] = {1, 1};
    Vec values_;
};

inline constexpr long kMaxInfConvPairs = 1000000000L;

/// (f (+) g)(x) = min_z f(z) + g(x - z), exact over the lattice.
/// Requires identical grids whose lattice contains the origin.
GridFn inf_conv(const GridFn& f, const GridFn& g);

/// f (+) alpha |.|: the alpha-Lipschitz envelope.
GridFn pasch_hausdorff(const GridFn& f, double alpha);

/// f (+) (beta/2) |.|^2: envelope with beta-Lipschitz gradient.
GridFn moreau(const GridFn& f, double beta);

/// Discrete conjugate f*(z) = max_x <x, z> - f(x) on `dual` (default: the
/// primal box) with the primal step. Values whose maximizer sits only on the
/// primal boundary are reported as +infinity (the sup is cut off by the grid).
GridFn legendre(const GridFn& f, std::optional<BoxDomain> dual = std::nullopt);

/// max over interior dual nodes of |(f (+) g)* - (f* + g*)|, skipping nodes
/// where any side is +infinity.
double conjugate_sum_identity_check(const GridFn& f, const GridFn& g, std::optional<BoxDomain> dual = std::nullopt);

/// True iff min and argmin (value tolerance 1e-9) of f (+) g match those of f.
/// Requires g(0) = 0 and min g = 0.
bool minimizer_invariance_check(const GridFn& f, const GridFn& g);

/// max |v_{i+1} - v_i| / step over adjacent finite nodes (1-D).
double max_slope(const GridFn& f);
/// max |v_{i+1} - 2 v_i + v_{i-1}| / step^2 over interior finite nodes (1-D).
double max_second_difference(const GridFn& f, int margin = 1);

/// CSV with columns x[,y],value; "inf" marks +infinity.
void write_gridfn_csv(std::ostream& os, const GridFn& f);
GridFn read_gridfn_csv(std::istream& is);
GridFn read_gridfn_csv_file(const std::string& path);

}  // namespace gansmooth
