#include "qmr/regression.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>

#include "qmr/errors.hpp"

namespace qmr::fit {

LinearFit least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
    if (design.rows() != y.size()) throw DimensionError("design rows and observations differ");
    if (design.rows() < design.cols())
        throw CollinearityError("regression has " + std::to_string(design.rows()) + " observations for " +
                                std::to_string(design.cols()) + " unknowns");
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (!std::isfinite(y[i])) throw DataError("non-finite observation in regression");

    // Scale columns so the rank test is not fooled by units.
    Eigen::VectorXd scale(design.cols());
    for (Eigen::Index c = 0; c < design.cols(); ++c) {
        const double n = design.col(c).norm();
        if (n == 0.0) throw CollinearityError("regression column " + std::to_string(c) + " is identically zero");
        scale[c] = n;
    }
    const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.cols())
        throw CollinearityError("regression design is degenerate (rank " + std::to_string(qr.rank()) + " of " +
                                std::to_string(design.cols()) + ")");
    LinearFit out;
    out.coef = qr.solve(y).cwiseQuotient(scale);
    out.residuals = y - design * out.coef;
    out.max_residual = out.residuals.cwiseAbs().maxCoeff();
    out.rms_residual = std::sqrt(out.residuals.squaredNorm() / static_cast<double>(y.size()));
    return out;
}

}  // namespace qmr::fit
