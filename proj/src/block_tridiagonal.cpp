#include "plateau/block_tridiagonal.hpp"

#include <cmath>

namespace plateau {

BlockTridiagonal::BlockTridiagonal(int blocks, int block_size)
    : blocks_(blocks),
      size_(block_size),
      diag_(blocks, Eigen::MatrixXd::Zero(block_size, block_size)),
      lower_(blocks, Eigen::MatrixXd::Zero(block_size, block_size)),
      upper_(blocks, Eigen::MatrixXd::Zero(block_size, block_size)) {}

Eigen::VectorXd BlockTridiagonal::multiply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows());
    for (int j = 0; j < blocks_; ++j) {
        auto yj = y.segment(j * size_, size_);
        yj.noalias() += diag_[j] * x.segment(j * size_, size_);
        if (j > 0) {
            yj.noalias() += lower_[j] * x.segment((j - 1) * size_, size_);
        }
        if (j + 1 < blocks_) {
            yj.noalias() += upper_[j] * x.segment((j + 1) * size_, size_);
        }
    }
    return y;
}

Eigen::VectorXd BlockTridiagonal::solve(const Eigen::VectorXd& rhs) const {
    // Forward sweep: S_j = D_j - L_j S_{j-1}^{-1} U_{j-1}.
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> pivots;
    pivots.reserve(blocks_);
    std::vector<Eigen::MatrixXd> carried(blocks_);  // S_j^{-1} U_j
    Eigen::VectorXd z = rhs;
    for (int j = 0; j < blocks_; ++j) {
        Eigen::MatrixXd schur = diag_[j];
        auto zj = z.segment(j * size_, size_);
        if (j > 0) {
            schur.noalias() -= lower_[j] * carried[j - 1];
            zj.noalias() -= lower_[j] * z.segment((j - 1) * size_, size_);
        }
        pivots.emplace_back(schur);
        const double rcond = pivots.back().rcond();
        if (!(rcond > 1e-15)) {
            throw SingularJacobian("singular pivot block " + std::to_string(j));
        }
        zj = pivots.back().solve(Eigen::VectorXd(zj));
        if (j + 1 < blocks_) {
            carried[j] = pivots.back().solve(upper_[j]);
        }
    }
    for (int j = blocks_ - 2; j >= 0; --j) {
        z.segment(j * size_, size_).noalias() -= carried[j] * z.segment((j + 1) * size_, size_);
    }
    if (!z.allFinite()) {
        throw SingularJacobian("non-finite solution of block system");
    }
    return z;
}

Eigen::MatrixXd BlockTridiagonal::to_dense() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows(), rows());
    for (int j = 0; j < blocks_; ++j) {
        a.block(j * size_, j * size_, size_, size_) = diag_[j];
        if (j > 0) {
            a.block(j * size_, (j - 1) * size_, size_, size_) = lower_[j];
        }
        if (j + 1 < blocks_) {
            a.block(j * size_, (j + 1) * size_, size_, size_) = upper_[j];
        }
    }
    return a;
}

}  // namespace plateau
