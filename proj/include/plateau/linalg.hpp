#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace plateau {

/// Curvature algebra supports small general n; grids only n = 1, 2.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Eigen-decomposition of a symmetric matrix with ascending eigenvalues.
struct SymmetricEigen {
    Vec values;
    Mat vectors;  // columns
};

/// Closed form for n <= 2, Eigen's solver otherwise.  Throws NumericalError
/// on non-finite input.
SymmetricEigen symmetric_eigen(const Mat& a);

/// Ascending eigenvalues only.
Vec symmetric_eigenvalues(const Mat& a);

/// Eigenvalues of the pencil (h, g), g positive definite, via Cholesky
/// reduction g = L L^T, C = L^{-1} h L^{-T}.
Vec generalized_eigenvalues(const Mat& h, const Mat& g);

}  // namespace plateau
