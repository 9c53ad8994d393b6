#include "plateau/linalg.hpp"

#include <cmath>

namespace plateau {

namespace {

void require_finite(const Mat& a) {
    if (!a.allFinite()) {
        throw NumericalError("non-finite matrix entry");
    }
}

}  // namespace

SymmetricEigen symmetric_eigen(const Mat& a) {
    require_finite(a);
    const auto n = a.rows();
    SymmetricEigen out;
    if (n == 1) {
        out.values = Vec::Constant(1, a(0, 0));
        out.vectors = Mat::Identity(1, 1);
        return out;
    }
    if (n == 2) {
        const double p = a(0, 0);
        const double q = a(1, 1);
        const double c = 0.5 * (a(0, 1) + a(1, 0));
        const double mean = 0.5 * (p + q);
        const double radius = std::hypot(0.5 * (p - q), c);
        double hi = mean + radius;
        double lo = mean - radius;
        // recover the smaller-magnitude root from the determinant when the
        // larger one is well separated from zero
        if (mean >= 0.0 && hi > 0.0) {
            lo = (p * q - c * c) / hi;
        } else if (mean < 0.0 && lo < 0.0) {
            hi = (p * q - c * c) / lo;
        }
        const double angle = 0.5 * std::atan2(2.0 * c, p - q);
        const double cs = std::cos(angle);
        const double sn = std::sin(angle);
        out.values.resize(2);
        out.values << lo, hi;
        out.vectors.resize(2, 2);
        out.vectors << -sn, cs, cs, sn;
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Mat> solver(a);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolver failed");
    }
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    return out;
}

Vec symmetric_eigenvalues(const Mat& a) { return symmetric_eigen(a).values; }

Vec generalized_eigenvalues(const Mat& h, const Mat& g) {
    require_finite(h);
    require_finite(g);
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("metric is not positive definite");
    }
    const Mat lower = llt.matrixL();
    Mat c = lower.triangularView<Eigen::Lower>().solve(h);
    c = lower.triangularView<Eigen::Lower>().solve(c.transpose().eval());
    c = 0.5 * (c + c.transpose()).eval();
    return symmetric_eigenvalues(c);
}

}  // namespace plateau
