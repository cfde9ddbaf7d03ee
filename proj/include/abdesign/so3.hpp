#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "abdesign/rng.hpp"

namespace abdesign {

/// Proper rotation matrix: R^T R = I, det(R) = 1.
using Rotation = Eigen::Matrix3d;

struct AxisAngle {
    Eigen::Vector3d axis;  // unit vector
    double angle = 0.0;    // in [0, pi]
};

namespace so3 {

bool is_rotation(const Rotation& r, double tol = 1e-9);

/// Nearest rotation to an arbitrary 3x3 matrix (polar factor via SVD, with
/// the determinant sign fixed to +1).
Rotation project_to_rotation(const Eigen::Matrix3d& m);

/// Inverse of the exponential map. angle = atan2 of the skew part against the
/// trace, which stays accurate over the whole of [0, pi]. A zero rotation
/// reports the +z axis; an angle-pi rotation reports one of the two valid
/// antipodal axes.
AxisAngle to_axis_angle(const Rotation& r);

/// Rodrigues formula.
Rotation from_axis_angle(const AxisAngle& a);
Rotation from_axis_angle(const Eigen::Vector3d& axis, double angle);

/// Scale the rotation angle by `scale` in [0, 1], keeping the axis fixed.
Rotation scale_rot(double scale, const Rotation& r);

/// Geodesic distance: the rotation angle of a^T b, in [0, pi].
double geodesic_distance(const Rotation& a, const Rotation& b);

/// Default series truncation for the isotropic Gaussian: small concentration
/// parameters need many more terms for the tail sums to settle.
inline int default_series_terms(double epsilon) { return epsilon < 0.1 ? 2000 : 100; }

/// Marginal rotation-angle density of the isotropic Gaussian on SO(3) with
/// concentration epsilon:
///
///   f(w) = (1 - cos w)/pi * sum_{l=0}^{L} (2l+1) exp(-l(l+1) eps)
///                                          * sin((l+1/2) w) / sin(w/2)
///
/// The (1 - cos w)/pi factor is the Haar angle marginal, so f integrates to 1
/// for every truncation L. Throws std::domain_error for epsilon <= 0.
double igso3_density(double omega, double epsilon, int series_terms);

/// The same series without the Haar factor: the density of a rotation at
/// geodesic angle omega from the mean, relative to Haar measure. This is the
/// quantity that enters likelihood ratios.
double igso3_point_density(double omega, double epsilon, int series_terms);

struct IgSo3Params {
    Rotation mean = Rotation::Identity();
    double epsilon = 1.0;
    int series_terms = 0;  // 0 = pick by default_series_terms(epsilon)
    int grid_size = 8192;
};

/// Tabulated angle distribution for one concentration value: an inverse-CDF
/// table over a uniform grid on [0, pi] (linear interpolation between knots)
/// plus a log point-density table for likelihood evaluation. Immutable after
/// construction and safe to share across threads.
class IgSo3Table {
public:
    IgSo3Table(double epsilon, int series_terms = 0, int grid_size = 8192);

    double epsilon() const { return epsilon_; }

    /// Draw a rotation angle by inverse-CDF lookup.
    double sample_angle(Rng& rng) const;

    /// CDF of the angle marginal at omega (linear interpolation).
    double cdf(double omega) const;

    /// log of igso3_point_density at omega (linear interpolation, floored).
    double log_point_density(double omega) const;

    int grid_size() const { return static_cast<int>(cdf_.size()); }

private:
    double epsilon_;
    double step_;
    std::vector<double> cdf_;
    std::vector<double> log_point_;
};

/// Sample from IGSO3(mean, epsilon): draw the angle from the tabulated
/// marginal, the axis uniformly on the sphere, and compose the noise on the
/// right of the mean. The right-composition convention is used everywhere
/// (forward noising, reverse steps, the prior).
Rotation sample_igso3(const IgSo3Params& p, Rng& rng);
Rotation sample_igso3(const Rotation& mean, const IgSo3Table& table, Rng& rng);

/// Lazily built, shared tables keyed by concentration. A sampling chain hits
/// the same epsilon values (the schedule coefficients) at every step, so the
/// cost of building a table is paid once per schedule.
class IgSo3TableCache {
public:
    const IgSo3Table& get(double epsilon);

private:
    std::mutex mu_;
    std::map<double, std::unique_ptr<IgSo3Table>> tables_;
};

}  // namespace so3
}  // namespace abdesign
