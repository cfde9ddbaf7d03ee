#include "abdesign/so3.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace abdesign {
namespace so3 {

bool is_rotation(const Rotation& r, double tol) {
    Eigen::Matrix3d ortho = r.transpose() * r - Eigen::Matrix3d::Identity();
    if (ortho.cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(r.determinant() - 1.0) <= tol;
}

Rotation project_to_rotation(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = svd.matrixU();
    Eigen::Matrix3d v = svd.matrixV();
    Eigen::Vector3d d(1.0, 1.0, (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
    return u * d.asDiagonal() * v.transpose();
}

AxisAngle to_axis_angle(const Rotation& r) {
    // Skew part gives 2 sin(theta) * axis; trace gives 1 + 2 cos(theta).
    Eigen::Vector3d skew(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    double s = 0.5 * skew.norm();                 // sin(theta), >= 0
    double c = 0.5 * (r.trace() - 1.0);           // cos(theta)
    double angle = std::atan2(s, c);

    AxisAngle out;
    out.angle = std::clamp(angle, 0.0, M_PI);
    if (s > 1e-6) {
        out.axis = skew / (2.0 * s);
        out.axis.normalize();
    } else if (c < 0.0) {
        // Angle at or near pi: R + I = 2 a a^T, so the largest column of
        // R + I is parallel to the axis.
        Eigen::Matrix3d b = r + Eigen::Matrix3d::Identity();
        int col;
        b.colwise().norm().maxCoeff(&col);
        out.axis = b.col(col).normalized();
    } else {
        out.axis = Eigen::Vector3d::UnitZ();
    }
    return out;
}

Rotation from_axis_angle(const Eigen::Vector3d& axis, double angle) {
    Eigen::Vector3d a = axis.normalized();
    Eigen::Matrix3d k;
    k << 0, -a.z(), a.y(), a.z(), 0, -a.x(), -a.y(), a.x(), 0;
    return Eigen::Matrix3d::Identity() + std::sin(angle) * k +
           (1.0 - std::cos(angle)) * (k * k);
}

Rotation from_axis_angle(const AxisAngle& a) { return from_axis_angle(a.axis, a.angle); }

Rotation scale_rot(double scale, const Rotation& r) {
    AxisAngle aa = to_axis_angle(r);
    aa.angle *= scale;
    return from_axis_angle(aa);
}

double geodesic_distance(const Rotation& a, const Rotation& b) {
    return to_axis_angle(Rotation(a.transpose() * b)).angle;
}

namespace {

// Character ratio sin((l+1/2)w)/sin(w/2), with a series expansion below
// w = 1e-4 where the direct quotient loses precision.
double character_ratio(int l, double omega) {
    double a = l + 0.5;
    if (omega < 1e-4) {
        double w2 = omega * omega;
        return (2 * l + 1) * (1.0 - (a * a - 0.25) * w2 / 6.0);
    }
    return std::sin(a * omega) / std::sin(0.5 * omega);
}

double igso3_series(double omega, double epsilon, int series_terms) {
    if (!(epsilon > 0.0)) throw std::domain_error("igso3: epsilon must be > 0");
    if (series_terms <= 0) series_terms = default_series_terms(epsilon);
    double sum = 0.0;
    for (int l = 0; l <= series_terms; ++l) {
        double damp = std::exp(-static_cast<double>(l) * (l + 1) * epsilon);
        sum += (2 * l + 1) * damp * character_ratio(l, omega);
        // Remaining terms are bounded by (2l+1)^2 damp; stop once negligible.
        if (damp * (2.0 * l + 1.0) * (2.0 * l + 1.0) < 1e-15 * std::max(1.0, std::abs(sum)))
            break;
    }
    return sum;
}

}  // namespace

double igso3_point_density(double omega, double epsilon, int series_terms) {
    return igso3_series(omega, epsilon, series_terms);
}

double igso3_density(double omega, double epsilon, int series_terms) {
    return (1.0 - std::cos(omega)) / M_PI * igso3_series(omega, epsilon, series_terms);
}

IgSo3Table::IgSo3Table(double epsilon, int series_terms, int grid_size) : epsilon_(epsilon) {
    if (!(epsilon > 0.0)) throw std::domain_error("igso3: epsilon must be > 0");
    if (grid_size < 64) grid_size = 64;
    if (series_terms <= 0) series_terms = default_series_terms(epsilon);

    const int n = grid_size;
    step_ = M_PI / static_cast<double>(n - 1);

    std::vector<double> density(static_cast<std::size_t>(n));
    log_point_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double omega = step_ * i;
        double point = igso3_series(omega, epsilon, series_terms);
        // Truncation can leave tiny negative oscillations in the far tail.
        double clamped = std::max(point, 0.0);
        density[static_cast<std::size_t>(i)] = (1.0 - std::cos(omega)) / M_PI * clamped;
        log_point_[static_cast<std::size_t>(i)] = std::log(std::max(clamped, 1e-300));
    }

    cdf_.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i < n; ++i) {
        cdf_[static_cast<std::size_t>(i)] =
            cdf_[static_cast<std::size_t>(i - 1)] +
            0.5 * step_ *
                (density[static_cast<std::size_t>(i - 1)] + density[static_cast<std::size_t>(i)]);
    }
    double total = cdf_.back();
    if (!(total > 0.0)) throw std::domain_error("igso3: degenerate angle density");
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
}

double IgSo3Table::sample_angle(Rng& rng) const {
    double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return 0.0;
    if (it == cdf_.end()) return M_PI;
    std::size_t hi = static_cast<std::size_t>(it - cdf_.begin());
    std::size_t lo = hi - 1;
    double span = cdf_[hi] - cdf_[lo];
    double frac = span > 0.0 ? (u - cdf_[lo]) / span : 0.0;
    return step_ * (static_cast<double>(lo) + frac);
}

double IgSo3Table::cdf(double omega) const {
    if (omega <= 0.0) return 0.0;
    if (omega >= M_PI) return 1.0;
    double pos = omega / step_;
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= cdf_.size()) return 1.0;
    return cdf_[lo] + frac * (cdf_[lo + 1] - cdf_[lo]);
}

double IgSo3Table::log_point_density(double omega) const {
    double pos = std::clamp(omega, 0.0, M_PI) / step_;
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= log_point_.size()) return log_point_.back();
    double frac = pos - static_cast<double>(lo);
    return log_point_[lo] + frac * (log_point_[lo + 1] - log_point_[lo]);
}

Rotation sample_igso3(const Rotation& mean, const IgSo3Table& table, Rng& rng) {
    double omega = table.sample_angle(rng);
    Eigen::Vector3d axis = sample_unit_sphere(rng);
    return mean * from_axis_angle(axis, omega);
}

Rotation sample_igso3(const IgSo3Params& p, Rng& rng) {
    IgSo3Table table(p.epsilon, p.series_terms, p.grid_size);
    return sample_igso3(p.mean, table, rng);
}

const IgSo3Table& IgSo3TableCache::get(double epsilon) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = tables_.find(epsilon);
    if (it == tables_.end())
        it = tables_.emplace(epsilon, std::make_unique<IgSo3Table>(epsilon)).first;
    return *it->second;
}

}  // namespace so3
}  // namespace abdesign
