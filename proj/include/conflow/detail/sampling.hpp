#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace conflow::detail {

/// Deterministic 64-bit generator (splitmix64). Used everywhere instead of
/// std::uniform_real_distribution so that seeded runs replay bit-exactly.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal, Box-Muller.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Eigen::VectorXd normal_vector(int dim) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = normal();
        return v;
    }

  private:
    std::uint64_t state_;
};

inline double halton(std::uint64_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

/// Low-discrepancy points in a box; the seed offsets the Halton index so
/// distinct seeds give distinct but reproducible sequences.
inline std::vector<Eigen::VectorXd> lowdisc_box(const Eigen::VectorXd& lo,
                                                const Eigen::VectorXd& hi,
                                                int count, std::uint64_t seed) {
    static const int bases[] = {2, 3, 5, 7, 11, 13, 17, 19};
    const int dim = static_cast<int>(lo.size());
    if (dim > 8) throw std::invalid_argument("lowdisc_box: dim > 8");
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    const std::uint64_t offset = 31 + seed * 7919;
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXd x(dim);
        for (int d = 0; d < dim; ++d)
            x(d) = lo(d) + (hi(d) - lo(d)) * halton(offset + k, bases[d]);
        out.push_back(std::move(x));
    }
    return out;
}

/// Full tensor grid, counts(i) points per axis, endpoints included.
inline std::vector<Eigen::VectorXd> grid_box(const Eigen::VectorXd& lo,
                                             const Eigen::VectorXd& hi,
                                             const std::vector<int>& counts) {
    const int dim = static_cast<int>(lo.size());
    if (static_cast<int>(counts.size()) != dim)
        throw std::invalid_argument("grid_box: counts/dim mismatch");
    long total = 1;
    for (int c : counts) {
        if (c < 1) throw std::invalid_argument("grid_box: counts must be >= 1");
        total *= c;
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(total);
    std::vector<int> idx(dim, 0);
    for (long k = 0; k < total; ++k) {
        Eigen::VectorXd x(dim);
        for (int d = 0; d < dim; ++d) {
            x(d) = counts[d] == 1
                       ? 0.5 * (lo(d) + hi(d))
                       : lo(d) + (hi(d) - lo(d)) * idx[d] / double(counts[d] - 1);
        }
        out.push_back(std::move(x));
        for (int d = dim - 1; d >= 0; --d) {
            if (++idx[d] < counts[d]) break;
            idx[d] = 0;
        }
    }
    return out;
}

/// Points on the sphere of given radius (normalized Gaussians).
inline std::vector<Eigen::VectorXd> sphere_points(const Eigen::VectorXd& center,
                                                  double radius, int count,
                                                  std::uint64_t seed) {
    const int dim = static_cast<int>(center.size());
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    if (dim == 1) {
        for (int k = 0; k < count; ++k) {
            Eigen::VectorXd x(1);
            x(0) = center(0) + (k % 2 == 0 ? radius : -radius);
            out.push_back(std::move(x));
        }
        return out;
    }
    Rng rng(seed);
    for (int k = 0; k < count; ++k) {
        Eigen::VectorXd v = rng.normal_vector(dim);
        double n = v.norm();
        while (n < 1e-12) {
            v = rng.normal_vector(dim);
            n = v.norm();
        }
        out.push_back(center + (radius / n) * v);
    }
    return out;
}

/// Low-discrepancy points in a ball, by rejection from the bounding box.
inline std::vector<Eigen::VectorXd> lowdisc_ball(const Eigen::VectorXd& center,
                                                 double radius, int count,
                                                 std::uint64_t seed) {
    const int dim = static_cast<int>(center.size());
    static const int bases[] = {2, 3, 5, 7, 11, 13, 17, 19};
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    const std::uint64_t offset = 31 + seed * 7919;
    std::uint64_t k = 0;
    while (static_cast<int>(out.size()) < count) {
        Eigen::VectorXd x(dim);
        for (int d = 0; d < dim; ++d)
            x(d) = -radius + 2.0 * radius * halton(offset + k, bases[d]);
        ++k;
        if (x.norm() <= radius) out.push_back(center + x);
        if (k > 100ull * count + 1000) break;  // dim too high for rejection
    }
    return out;
}

/// Symmetric (or one-sided) logarithmically spaced 1-D points.
inline std::vector<Eigen::VectorXd> log_axis_points(double min_abs, double max_abs,
                                                    int per_side, bool negative_side,
                                                    bool include_zero) {
    if (!(0 < min_abs && min_abs < max_abs))
        throw std::invalid_argument("log_axis_points: need 0 < min_abs < max_abs");
    std::vector<Eigen::VectorXd> out;
    auto push = [&out](double v) {
        Eigen::VectorXd x(1);
        x(0) = v;
        out.push_back(std::move(x));
    };
    const double l0 = std::log(min_abs), l1 = std::log(max_abs);
    if (negative_side)
        for (int i = per_side - 1; i >= 0; --i)
            push(-std::exp(l0 + (l1 - l0) * i / double(std::max(1, per_side - 1))));
    if (include_zero) push(0.0);
    for (int i = 0; i < per_side; ++i)
        push(std::exp(l0 + (l1 - l0) * i / double(std::max(1, per_side - 1))));
    return out;
}

}  // namespace conflow::detail
