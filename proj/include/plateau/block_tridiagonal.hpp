#pragma once

#include "plateau/linalg.hpp"

#include <vector>

namespace plateau {

class SingularJacobian : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Square matrix with dense square blocks on the three central block
/// diagonals.  Row block j couples to blocks j-1 (lower), j (diag), j+1
/// (upper).  Solved by block LU without pivoting across blocks.
class BlockTridiagonal {
public:
    BlockTridiagonal(int blocks, int block_size);

    [[nodiscard]] int blocks() const { return blocks_; }
    [[nodiscard]] int block_size() const { return size_; }
    [[nodiscard]] int rows() const { return blocks_ * size_; }

    Eigen::MatrixXd& diag(int j) { return diag_[j]; }
    Eigen::MatrixXd& lower(int j) { return lower_[j]; }
    Eigen::MatrixXd& upper(int j) { return upper_[j]; }
    [[nodiscard]] const Eigen::MatrixXd& diag(int j) const { return diag_[j]; }
    [[nodiscard]] const Eigen::MatrixXd& lower(int j) const { return lower_[j]; }
    [[nodiscard]] const Eigen::MatrixXd& upper(int j) const { return upper_[j]; }

    [[nodiscard]] Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;

    /// Throws SingularJacobian when a pivot block is numerically singular.
    [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

    [[nodiscard]] Eigen::MatrixXd to_dense() const;

private:
    int blocks_;
    int size_;
    std::vector<Eigen::MatrixXd> diag_;
    std::vector<Eigen::MatrixXd> lower_;
    std::vector<Eigen::MatrixXd> upper_;
};

}  // namespace plateau
