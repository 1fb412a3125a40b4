#pragma once

#include <Eigen/Core>

namespace qmr::fit {

struct LinearFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd residuals;
    double max_residual = 0.0;
    double rms_residual = 0.0;
};

/// Least squares for y ~ X coef via column-pivoted QR. Throws
/// CollinearityError when the (column-scaled) design is numerically rank
/// deficient.
LinearFit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

}  // namespace qmr::fit
