#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace elastonp {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using CVecX = Eigen::VectorXcd;
using CMatX = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Counter-clockwise rotation by theta.
inline Mat2 rotation(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    Mat2 u;
    u << c, -s, s, c;
    return u;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

/// Least-squares straight line through (x_i, y_i).
LinearFit fit_line(const VecX& x, const VecX& y);

/// Number of worker threads used by row-parallel loops (>= 1).
int thread_count();
void set_thread_count(int n);

/// Runs body(i) for i in [0, n), chunked over thread_count() threads.
/// Writes from different iterations must not alias.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace elastonp
