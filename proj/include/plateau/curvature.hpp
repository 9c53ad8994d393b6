#pragma once

// Curvature functions f on the positive cone K_n^+ = {kappa_i > 0}: the
// normalized symmetric means H_k^{1/k}, the quotients (H_n/H_l)^{1/(n-l)},
// the blend theta H_n^{1/n} + (1 - theta) f, and the dual
// f*(kappa) = 1 / f(1/kappa_1, ..., 1/kappa_n).  Every member is symmetric,
// increasing in each argument, concave, homogeneous of degree one and
// normalized so that f(1, ..., 1) = 1.

#include "plateau/linalg.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plateau {

/// Argument outside K_n^+ (some kappa_i <= 0 or non-finite).
class DomainViolation : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class CurvatureSpec {
public:
    enum class Kind { PowerMean, Quotient, Blend, Dual };

    static CurvatureSpec mean(int n) { return power_mean(n, 1); }
    static CurvatureSpec gauss(int n) { return power_mean(n, n); }
    static CurvatureSpec power_mean(int n, int k);
    static CurvatureSpec quotient(int n, int l);
    static CurvatureSpec blend(double theta, const CurvatureSpec& inner);
    static CurvatureSpec dual(const CurvatureSpec& inner);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] int dim() const { return n_; }
    [[nodiscard]] int k() const { return k_; }
    [[nodiscard]] int l() const { return l_; }
    [[nodiscard]] double theta() const { return theta_; }
    [[nodiscard]] const CurvatureSpec& inner() const { return *inner_; }

    /// f = H_n^{1/n}, for which the blend is the identity.
    [[nodiscard]] bool is_gauss() const;
    /// Config-string form, accepted back by parse_curvature.
    [[nodiscard]] std::string name() const;

private:
    CurvatureSpec(Kind kind, int n) : kind_(kind), n_(n) {}

    Kind kind_;
    int n_;
    int k_ = 1;
    int l_ = 0;
    double theta_ = 0.0;
    std::shared_ptr<const CurvatureSpec> inner_;
};

/// "mean", "gauss", "power_mean:k", "quotient:n,l", "blend:theta,inner",
/// "dual:inner".  Throws std::invalid_argument with a description.
CurvatureSpec parse_curvature(std::string_view text, int n);

/// Elementary symmetric polynomial e_k by the product recurrence.
double elementary_symmetric(const Vec& kappa, int k);
/// H_k = e_k / binom(n, k).
double normalized_symmetric(const Vec& kappa, int k);

struct CurvatureValue {
    double value = 0.0;
    Vec gradient;
};

CurvatureValue eval_f(const CurvatureSpec& spec, const Vec& kappa);

/// The dual spec; dual_f(dual_f(f)) is f itself.
CurvatureSpec dual_f(const CurvatureSpec& spec);

/// Closed form of the dual of a quotient: H_{n-l}^{1/(n-l)}.
double dual_quotient_closed_form(const CurvatureSpec& quotient, const Vec& kappa);

struct MatrixDerivative {
    double value = 0.0;   // F(A) = f(lambda(A))
    Mat derivative;       // F^{ij}(A) = dF / da_ij
    Vec eigenvalues;
};

/// Relative eigenvalue gap below which the symmetric limit is used.
inline constexpr double kRepeatedEigenvalueGap = 1e-8;

MatrixDerivative matrix_derivative(const CurvatureSpec& spec, const Mat& a);

struct StructureViolation {
    std::string property;
    std::vector<double> kappa;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct StructureReport {
    int samples = 0;
    std::vector<StructureViolation> violations;
    double boundary_value = 0.0;  // f(1e-6, 1, ..., 1)
    bool vanishes_on_boundary = false;
};

/// Randomized check over K_n^+ of monotonicity, homogeneity, midpoint
/// concavity and normalization.  Vanishing on the cone boundary is reported
/// separately since the means H_k^{1/k}, k < n, do not vanish there.
StructureReport structure_check(const CurvatureSpec& spec, int samples, std::uint64_t seed);

}  // namespace plateau
