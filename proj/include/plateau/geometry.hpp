#pragma once

// Star-shaped domains, mapped polar grids, grid differentiation, and the
// pointwise Euclidean/hyperbolic geometry of a vertical graph (x, u(x)) in
// the upper half-space model.

#include "plateau/linalg.hpp"

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace plateau {

class InvalidDomain : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Boundary curve r = rho(phi) of a domain star-shaped about the origin.
class RadialProfile {
public:
    struct Sample {
        double value;
        double first;
        double second;
    };

    static RadialProfile circle(double radius);
    /// rho = a_0 + sum_k a_k cos(k phi) + b_k sin(k phi); sin_coeffs[0] unused.
    static RadialProfile fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs = {});
    static RadialProfile star(double base, double amplitude, int mode);
    static RadialProfile ellipse(double semi_x, double semi_y);

    [[nodiscard]] Sample sample(double phi) const;
    [[nodiscard]] double operator()(double phi) const { return sample(phi).value; }
    [[nodiscard]] bool is_circle() const;
    [[nodiscard]] std::string describe() const;

private:
    struct Fourier {
        std::vector<double> cos_coeffs;
        std::vector<double> sin_coeffs;
    };
    struct Ellipse {
        double semi_x;
        double semi_y;
    };
    explicit RadialProfile(std::variant<Fourier, Ellipse> shape) : shape_(std::move(shape)) {}
    std::variant<Fourier, Ellipse> shape_;
};

struct Domain {
    int dim = 2;
    RadialProfile rho = RadialProfile::circle(1.0);
    double half_width = 1.0;  // n = 1
    int n_r = 32;
    int n_phi = 64;

    static Domain disk(double radius, int n_r, int n_phi);
    static Domain star(double base, double amplitude, int mode, int n_r, int n_phi);
    static Domain ellipse(double semi_x, double semi_y, int n_r, int n_phi);
    static Domain interval(double half_width, int n_r);

    /// Full invariant check used by the solver: N_r >= 8, N_phi even and
    /// >= 16, rho bounded away from zero.
    void validate() const;

    [[nodiscard]] double max_radius() const;
    [[nodiscard]] double min_radius() const;
    /// Cartesian radial spacing, the mesh size of the finite-difference
    /// direction.
    [[nodiscard]] double mesh_size() const;
    [[nodiscard]] Domain with_grid(int n_r, int n_phi) const;
};

/// Number of jet slots: n first derivatives then the upper triangle of the
/// Hessian, row major.
constexpr int jet_size(int dim) { return dim + dim * (dim + 1) / 2; }
inline constexpr int kJetStride = 5;

/// Tensor grid over a domain.  Interior nodes come first (indices
/// 0..interior_count-1), boundary nodes last.
///
/// n = 2: nodes (r_j, phi_m), r_j = (j - 1/2)/(N_r - 1/2), j = 1..N_r,
/// phi_m = 2 pi m / N_phi; node index (j-1) N_phi + m, so ring N_r is the
/// boundary.  The ring inside r_1 is the parity image u(-r, phi) =
/// u(r, phi + pi).  Positions x = R(r, phi) (cos phi, sin phi) with
/// R = r rho_e + r^2 rho_o, rho_e and rho_o the parts of rho even and odd
/// under phi -> phi + pi; the parity image is then a true grid point.
///
/// n = 1: x_i = -d + i d/N_r, i = 0..2N_r; interior i = 1..2N_r-1 stored at
/// i-1, left end at 2N_r-1, right end at 2N_r.
struct GridTopology {
    int dim = 2;
    int n_r = 0;
    int n_phi = 0;
    double dr = 0.0;  // spacing of the radial parameter (n = 1: of x)
    int node_count = 0;
    int interior_count = 0;
    std::vector<double> r;
    std::vector<double> phi;
    std::vector<double> coords;           // node_count * dim
    std::vector<double> boundary_normal;  // outward unit normal, boundary nodes only
    std::vector<double> boundary_mean_curvature;
    // Maps parameter derivatives (u_r, u_phi, u_rr, u_rphi, u_phiphi) to the
    // Cartesian jet, row-major 5x5 per node.  n = 1: identity on 2 slots.
    std::vector<std::array<double, 25>> transform;
    Eigen::MatrixXd d1_phi;
    Eigen::MatrixXd d2_phi;
    double mesh_size = 0.0;

    [[nodiscard]] bool is_boundary(int p) const { return p >= interior_count; }
    [[nodiscard]] Vec position(int p) const;
    [[nodiscard]] Vec outward_normal(int p) const;
    [[nodiscard]] int node(int j, int m) const { return (j - 1) * n_phi + m; }
    [[nodiscard]] int blocks() const { return dim == 2 ? n_r - 1 : interior_count; }
    [[nodiscard]] int block_size() const { return dim == 2 ? n_phi : 1; }
    [[nodiscard]] int boundary_count() const { return node_count - interior_count; }
};

/// Rejects non-positive rho and grids too small for the stencils (N_r >= 4,
/// N_phi even and >= 4); the tighter solver limits live in Domain::validate.
GridTopology build_grid(const Domain& domain);

struct GridFunction {
    std::vector<double> values;
    double boundary_value = 0.0;
};

GridFunction constant_function(const GridTopology& topo, double value);

/// Cartesian jets of a grid function at every node, stride kJetStride.
struct GridDerivatives {
    int dim = 2;
    std::vector<double> data;

    [[nodiscard]] Vec gradient(int p) const;
    [[nodiscard]] Mat hessian(int p) const;
};

/// Parameter-space derivatives (stride kJetStride) at every node: centered
/// differences in r (one-sided at r = 1), Fourier collocation in phi.
std::vector<double> parameter_derivatives(const GridTopology& topo, std::span<const double> u);

GridDerivatives differentiate(const GridTopology& topo, std::span<const double> u);

/// Same layout, fourth-order radial stencils: centred where the parity ghosts
/// allow, shifted inward near r = 1.
std::vector<double> parameter_derivatives_fourth(const GridTopology& topo, std::span<const double> u);

GridDerivatives differentiate_fourth(const GridTopology& topo, std::span<const double> u);

struct ShapeMatrices {
    double w = 1.0;
    Mat gamma;    // inverse square root of the Euclidean first fundamental form
    Mat shape_e;  // Euclidean shape matrix, eigenvalues kappa^e
    Mat shape;    // hyperbolic shape matrix A[u], eigenvalues kappa
};

ShapeMatrices shape_matrices(double u, const Vec& du, const Mat& d2u);

/// Ascending eigenvalues of a symmetric shape matrix.
Vec principal_curvatures(const Mat& shape);
/// Ascending eigenvalues of the pencil (second form, metric).
Vec principal_curvatures(const Mat& second_form, const Mat& metric);

struct PointGeometry {
    Vec x;
    double u = 0.0;
    Vec du;
    Mat d2u;
    double w = 1.0;
    double nu = 1.0;  // vertical component of the upward unit normal, 1/w
    Mat gamma;
    Mat shape_e;
    Mat shape;
    Vec kappa_e;
    Vec kappa;
};

PointGeometry point_geometry(const Vec& x, double u, const Vec& du, const Mat& d2u);

/// All nodes, including the boundary ring.
std::vector<PointGeometry> geometry_field(const GridTopology& topo, std::span<const double> u);

/// Induced hyperbolic metric, second fundamental form and Christoffel
/// symbols of the graph in graph coordinates.
struct SurfaceTensors {
    double u = 0.0;
    double w = 1.0;
    Mat metric;
    Mat second_form;
    std::vector<Mat> christoffel;  // christoffel[k](i, j) = Gamma^k_ij
};

SurfaceTensors surface_tensors(double u, const Vec& du, const Mat& d2u);

/// nabla_ij phi = d_ij phi - Gamma^k_ij d_k phi.  Throws NumericalError when
/// the metric is not positive definite.
Mat intrinsic_hessian(const Vec& dphi, const Mat& d2phi, const SurfaceTensors& tensors);

/// Intrinsic Hessian of a grid field at interior nodes, both phi and the
/// tensors differentiated on the grid.
std::vector<Mat> intrinsic_hessian_field(const GridTopology& topo, std::span<const double> phi,
                                         std::span<const double> u);

}  // namespace plateau
