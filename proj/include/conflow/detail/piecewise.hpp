#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace conflow::detail {

/// Dense polynomial, coefficients in ascending powers.
class Poly {
  public:
    Poly() : c_(Eigen::VectorXd::Zero(1)) {}
    explicit Poly(Eigen::VectorXd coeffs) : c_(std::move(coeffs)) {
        if (c_.size() == 0) c_ = Eigen::VectorXd::Zero(1);
    }
    static Poly constant(double v) {
        Eigen::VectorXd c(1);
        c << v;
        return Poly(c);
    }

    const Eigen::VectorXd& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    double operator()(double x) const {
        double r = 0.0;
        for (int i = degree(); i >= 0; --i) r = r * x + c_(i);
        return r;
    }

    Poly derivative() const {
        if (c_.size() == 1) return constant(0.0);
        Eigen::VectorXd d(c_.size() - 1);
        for (int i = 1; i < c_.size(); ++i) d(i - 1) = i * c_(i);
        return Poly(d);
    }

    /// Antiderivative with value `value_at_zero` at x = 0.
    Poly antiderivative(double value_at_zero = 0.0) const {
        Eigen::VectorXd a(c_.size() + 1);
        a(0) = value_at_zero;
        for (int i = 0; i < c_.size(); ++i) a(i + 1) = c_(i) / (i + 1);
        return Poly(a);
    }

    Poly operator+(const Poly& o) const {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(std::max(c_.size(), o.c_.size()));
        s.head(c_.size()) += c_;
        s.head(o.c_.size()) += o.c_;
        return Poly(s);
    }
    Poly operator-(const Poly& o) const { return *this + (o * -1.0); }
    Poly operator*(double k) const { return Poly(c_ * k); }
    Poly operator*(const Poly& o) const {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(c_.size() + o.c_.size() - 1);
        for (int i = 0; i < c_.size(); ++i)
            for (int j = 0; j < o.c_.size(); ++j) p(i + j) += c_(i) * o.c_(j);
        return Poly(p);
    }

    /// p(alpha + beta*x) expanded as a polynomial in x.
    Poly compose_affine(double alpha, double beta) const {
        Poly result = constant(0.0);
        Eigen::VectorXd lin(2);
        lin << alpha, beta;
        const Poly aff(lin);
        Poly power = constant(1.0);
        for (int i = 0; i < c_.size(); ++i) {
            result = result + power * c_(i);
            if (i + 1 < c_.size()) power = power * aff;
        }
        return result;
    }

  private:
    Eigen::VectorXd c_;
};

/// Piecewise polynomial on [breaks.front(), breaks.back()], each piece in the
/// local coordinate (x - left break) for conditioning. Evaluation beyond the
/// ends extends the first/last piece.
class PiecewisePoly {
  public:
    PiecewisePoly() = default;
    PiecewisePoly(std::vector<double> breaks, std::vector<Poly> pieces)
        : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
        if (breaks_.size() != pieces_.size() + 1 || pieces_.empty())
            throw std::invalid_argument("PiecewisePoly: size mismatch");
        for (std::size_t i = 1; i < breaks_.size(); ++i)
            if (!(breaks_[i] > breaks_[i - 1]))
                throw std::invalid_argument("PiecewisePoly: breaks must increase");
    }

    const std::vector<double>& breaks() const { return breaks_; }

    double operator()(double x) const {
        const std::size_t i = piece_index(x);
        return pieces_[i](x - breaks_[i]);
    }

    PiecewisePoly derivative() const {
        std::vector<Poly> d;
        d.reserve(pieces_.size());
        for (const auto& p : pieces_) d.push_back(p.derivative());
        return PiecewisePoly(breaks_, std::move(d));
    }

    /// Continuous antiderivative with the given value at breaks.front().
    PiecewisePoly antiderivative(double value_at_start = 0.0) const {
        std::vector<Poly> a;
        a.reserve(pieces_.size());
        double running = value_at_start;
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            Poly ai = pieces_[i].antiderivative(running);
            a.push_back(ai);
            running = ai(breaks_[i + 1] - breaks_[i]);
        }
        return PiecewisePoly(breaks_, std::move(a));
    }

  private:
    std::size_t piece_index(double x) const {
        if (x <= breaks_.front()) return 0;
        if (x >= breaks_.back()) return pieces_.size() - 1;
        const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        return static_cast<std::size_t>(it - breaks_.begin()) - 1;
    }

    std::vector<double> breaks_;
    std::vector<Poly> pieces_;
};

}  // namespace conflow::detail
