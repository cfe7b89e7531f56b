#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace conflow::detail {

enum class Extrapolation { Error, ConstantValue };

/// Cubic Hermite table on sorted nodes with prescribed node derivatives.
/// Evaluation between nodes uses the standard Hermite basis; the derivative
/// is the derivative of that interpolant, so (value, deriv) stay consistent.
class HermiteTable {
  public:
    HermiteTable() = default;
    HermiteTable(std::vector<double> x, std::vector<double> y,
                 std::vector<double> d, Extrapolation mode = Extrapolation::Error)
        : x_(std::move(x)), y_(std::move(y)), d_(std::move(d)), mode_(mode) {
        if (x_.size() != y_.size() || x_.size() != d_.size() || x_.size() < 2)
            throw std::invalid_argument("HermiteTable: bad sizes");
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("HermiteTable: nodes must increase");
    }

    double front_x() const { return x_.front(); }
    double back_x() const { return x_.back(); }
    double front_y() const { return y_.front(); }
    double back_y() const { return y_.back(); }
    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& values() const { return y_; }
    const std::vector<double>& slopes() const { return d_; }

    bool covers(double s) const { return s >= x_.front() && s <= x_.back(); }

    double eval(double s) const {
        if (s <= x_.front()) return y_.front();  // flat start
        if (s >= x_.back()) {
            if (s > x_.back()) clamp_high(s);
            return y_.back();
        }
        const auto [i, t, h] = locate(s);
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
        const double h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t);
        const double h11 = t * t * (t - 1);
        return h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
    }

    double deriv(double s) const {
        if (s <= x_.front()) return 0.0;
        if (s >= x_.back()) {
            if (s == x_.back()) return d_.back();
            clamp_high(s);
            return 0.0;
        }
        const auto [i, t, h] = locate(s);
        const double g00 = 6 * t * (t - 1) / h;
        const double g10 = (1 - t) * (1 - 3 * t);
        const double g01 = -g00;
        const double g11 = t * (3 * t - 2);
        return g00 * y_[i] + g10 * d_[i] + g01 * y_[i + 1] + g11 * d_[i + 1];
    }

  private:
    struct Loc {
        std::size_t i;
        double t, h;
    };
    Loc locate(double s) const {
        const auto it = std::upper_bound(x_.begin(), x_.end(), s);
        std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        i = std::min(i, x_.size() - 2);
        const double h = x_[i + 1] - x_[i];
        return {i, (s - x_[i]) / h, h};
    }
    void clamp_high(double s) const {
        if (mode_ == Extrapolation::Error)
            throw std::out_of_range("HermiteTable: " + std::to_string(s) +
                                    " beyond table end " + std::to_string(x_.back()));
    }

    std::vector<double> x_, y_, d_;
    Extrapolation mode_ = Extrapolation::Error;
};

}  // namespace conflow::detail
