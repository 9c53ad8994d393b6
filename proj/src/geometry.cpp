#include "plateau/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace plateau {

// ---------------------------------------------------------------------------
// RadialProfile

RadialProfile RadialProfile::circle(double radius) { return fourier({radius}); }

RadialProfile RadialProfile::fourier(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs) {
    if (cos_coeffs.empty()) {
        throw InvalidDomain("radial profile needs a constant term");
    }
    sin_coeffs.resize(std::max(sin_coeffs.size(), cos_coeffs.size()), 0.0);
    cos_coeffs.resize(sin_coeffs.size(), 0.0);
    return RadialProfile(Fourier{std::move(cos_coeffs), std::move(sin_coeffs)});
}

RadialProfile RadialProfile::star(double base, double amplitude, int mode) {
    if (mode < 1) {
        throw InvalidDomain("star mode must be >= 1");
    }
    std::vector<double> a(static_cast<std::size_t>(mode) + 1, 0.0);
    a[0] = base;
    a[static_cast<std::size_t>(mode)] = amplitude;
    return fourier(std::move(a));
}

RadialProfile RadialProfile::ellipse(double semi_x, double semi_y) {
    if (!(semi_x > 0.0) || !(semi_y > 0.0)) {
        throw InvalidDomain("ellipse semi-axes must be positive");
    }
    return RadialProfile(Ellipse{semi_x, semi_y});
}

RadialProfile::Sample RadialProfile::sample(double phi) const {
    if (const auto* f = std::get_if<Fourier>(&shape_)) {
        Sample s{f->cos_coeffs[0], 0.0, 0.0};
        for (std::size_t k = 1; k < f->cos_coeffs.size(); ++k) {
            const double kk = static_cast<double>(k);
            const double c = std::cos(kk * phi);
            const double sn = std::sin(kk * phi);
            const double a = f->cos_coeffs[k];
            const double b = f->sin_coeffs[k];
            s.value += a * c + b * sn;
            s.first += kk * (-a * sn + b * c);
            s.second += -kk * kk * (a * c + b * sn);
        }
        return s;
    }
    const auto& e = std::get<Ellipse>(shape_);
    const double a2 = e.semi_x * e.semi_x;
    const double b2 = e.semi_y * e.semi_y;
    const double sn = std::sin(phi);
    const double q = b2 + (a2 - b2) * sn * sn;
    const double dq = (a2 - b2) * std::sin(2.0 * phi);
    const double d2q = 2.0 * (a2 - b2) * std::cos(2.0 * phi);
    const double ab = e.semi_x * e.semi_y;
    return {ab / std::sqrt(q), -0.5 * ab * std::pow(q, -1.5) * dq,
            ab * (0.75 * std::pow(q, -2.5) * dq * dq - 0.5 * std::pow(q, -1.5) * d2q)};
}

bool RadialProfile::is_circle() const {
    if (const auto* f = std::get_if<Fourier>(&shape_)) {
        for (std::size_t k = 1; k < f->cos_coeffs.size(); ++k) {
            if (f->cos_coeffs[k] != 0.0 || f->sin_coeffs[k] != 0.0) {
                return false;
            }
        }
        return true;
    }
    const auto& e = std::get<Ellipse>(shape_);
    return e.semi_x == e.semi_y;
}

std::string RadialProfile::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (const auto* f = std::get_if<Fourier>(&shape_)) {
        os << "fourier(cos=[";
        for (std::size_t k = 0; k < f->cos_coeffs.size(); ++k) {
            os << (k ? "," : "") << f->cos_coeffs[k];
        }
        os << "],sin=[";
        for (std::size_t k = 0; k < f->sin_coeffs.size(); ++k) {
            os << (k ? "," : "") << f->sin_coeffs[k];
        }
        os << "])";
    } else {
        const auto& e = std::get<Ellipse>(shape_);
        os << "ellipse(" << e.semi_x << "," << e.semi_y << ")";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Domain

Domain Domain::disk(double radius, int n_r, int n_phi) {
    return Domain{2, RadialProfile::circle(radius), radius, n_r, n_phi};
}

Domain Domain::star(double base, double amplitude, int mode, int n_r, int n_phi) {
    return Domain{2, RadialProfile::star(base, amplitude, mode), base, n_r, n_phi};
}

Domain Domain::ellipse(double semi_x, double semi_y, int n_r, int n_phi) {
    return Domain{2, RadialProfile::ellipse(semi_x, semi_y), std::max(semi_x, semi_y), n_r, n_phi};
}

Domain Domain::interval(double half_width, int n_r) {
    return Domain{1, RadialProfile::circle(half_width), half_width, n_r, 0};
}

namespace {

constexpr int kProfileOversample = 8;

// Node map x = R(r, phi) e(phi) with R = r rho_e + r^2 rho_o, where rho_e and
// rho_o are the parts of rho even and odd under phi -> phi + pi.  Then
// R(-r, phi) = -R(r, phi + pi), so the ghost ring across the pole is the
// physical point the parity identification takes it to, and R(1, phi) = rho.
struct RadialMap {
    double value;
    double r;
    double rr;
    double phi;
    double rphi;
    double phiphi;
};

RadialMap radial_map(const RadialProfile& rho, double r, double phi) {
    const auto a = rho.sample(phi);
    const auto b = rho.sample(phi + std::numbers::pi);
    const double e0 = 0.5 * (a.value + b.value);
    const double e1 = 0.5 * (a.first + b.first);
    const double e2 = 0.5 * (a.second + b.second);
    const double o0 = 0.5 * (a.value - b.value);
    const double o1 = 0.5 * (a.first - b.first);
    const double o2 = 0.5 * (a.second - b.second);
    return {r * e0 + r * r * o0, e0 + 2.0 * r * o0, 2.0 * o0, r * e1 + r * r * o1, e1 + 2.0 * r * o1,
            r * e2 + r * r * o2};
}

// Largest and smallest dR/dr over the unit parameter disk (R_r is affine in r).
std::pair<double, double> radial_stretch(const Domain& d) {
    const int samples = std::max(d.n_phi, 16) * kProfileOversample;
    double hi = -1e300;
    double lo = 1e300;
    for (int m = 0; m < samples; ++m) {
        const double phi = 2.0 * std::numbers::pi * m / samples;
        for (double r : {0.0, 1.0}) {
            const double v = radial_map(d.rho, r, phi).r;
            hi = std::max(hi, v);
            lo = std::min(lo, v);
        }
    }
    return {lo, hi};
}

double profile_extreme(const Domain& d, bool want_max) {
    if (d.dim == 1) {
        return d.half_width;
    }
    const int samples = std::max(d.n_phi, 16) * kProfileOversample;
    double best = want_max ? -1e300 : 1e300;
    for (int m = 0; m < samples; ++m) {
        const double v = d.rho(2.0 * std::numbers::pi * m / samples);
        best = want_max ? std::max(best, v) : std::min(best, v);
    }
    return best;
}

void check_structural(const Domain& d) {
    if (d.dim == 1) {
        if (!(d.half_width > 0.0)) {
            throw InvalidDomain("interval half-width must be positive");
        }
        if (d.n_r < 4) {
            throw InvalidDomain("grid too small: N_r must be >= 4");
        }
        return;
    }
    if (d.dim != 2) {
        throw InvalidDomain("grids support dimension 1 or 2 only");
    }
    if (d.n_r < 4 || d.n_phi < 4 || d.n_phi % 2 != 0) {
        throw InvalidDomain("grid too small: need N_r >= 4 and even N_phi >= 4");
    }
    if (!(profile_extreme(d, false) > 0.0)) {
        throw InvalidDomain("radial profile must be positive (domain not star-shaped)");
    }
    if (!(radial_stretch(d).first > 0.0)) {
        throw InvalidDomain("radial profile too far from pi-periodic: the polar node map folds");
    }
}

}  // namespace

void Domain::validate() const {
    check_structural(*this);
    if (n_r < 8) {
        throw InvalidDomain("N_r must be >= 8");
    }
    if (dim == 2 && (n_phi < 16 || n_phi % 2 != 0)) {
        throw InvalidDomain("N_phi must be even and >= 16");
    }
}

double Domain::max_radius() const { return profile_extreme(*this, true); }
double Domain::min_radius() const { return profile_extreme(*this, false); }

double Domain::mesh_size() const {
    if (dim == 1) {
        return half_width / n_r;
    }
    return radial_stretch(*this).second / (n_r - 0.5);
}

Domain Domain::with_grid(int nr, int nphi) const {
    Domain d = *this;
    d.n_r = nr;
    d.n_phi = nphi;
    return d;
}

// ---------------------------------------------------------------------------
// Grid

namespace {

Eigen::MatrixXd fourier_first(int n) {
    const double h = 2.0 * std::numbers::pi / n;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) {
                const int k = i - j;
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                d(i, j) = 0.5 * sign / std::tan(0.5 * k * h);
            }
        }
    }
    return d;
}

Eigen::MatrixXd fourier_second(int n) {
    const double h = 2.0 * std::numbers::pi / n;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                d(i, j) = -std::numbers::pi * std::numbers::pi / (3.0 * h * h) - 1.0 / 6.0;
            } else {
                const int k = i - j;
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                const double s = std::sin(0.5 * k * h);
                d(i, j) = -0.5 * sign / (s * s);
            }
        }
    }
    return d;
}

// Cartesian jet from parameter derivatives at a polar node.
std::array<double, 25> polar_transform(double phi, const RadialMap& m) {
    const Eigen::Vector2d e(std::cos(phi), std::sin(phi));
    const Eigen::Vector2d ep(-e.y(), e.x());
    Eigen::Matrix2d jac;
    jac.col(0) = m.r * e;
    jac.col(1) = m.phi * e + m.value * ep;
    const Eigen::Vector2d x_rr = m.rr * e;
    const Eigen::Vector2d x_rphi = m.rphi * e + m.r * ep;
    const Eigen::Vector2d x_phiphi = m.phiphi * e + 2.0 * m.phi * ep - m.value * e;
    // second[k] = Hessian of x_k in (r, phi)
    std::array<Eigen::Matrix2d, 2> second;
    for (int k = 0; k < 2; ++k) {
        second[k] << x_rr(k), x_rphi(k), x_rphi(k), x_phiphi(k);
    }
    const Eigen::PartialPivLU<Eigen::Matrix2d> lut(jac.transpose());

    std::array<double, 25> t{};
    for (int col = 0; col < 5; ++col) {
        double p[5] = {0, 0, 0, 0, 0};
        p[col] = 1.0;
        const Eigen::Vector2d g(p[0], p[1]);
        Eigen::Matrix2d h;
        h << p[2], p[3], p[3], p[4];
        // J^T Du = g ; J^T D2u J = H - sum_k u_k X^k
        const Eigen::Vector2d du = lut.solve(g);
        const Eigen::Matrix2d rhs = h - du(0) * second[0] - du(1) * second[1];
        const Eigen::Matrix2d left = lut.solve(rhs);                           // J^{-T} rhs
        const Eigen::Matrix2d d2u = lut.solve(left.transpose()).transpose();  // (J^{-T} rhs) J^{-1}
        const double out[5] = {du(0), du(1), d2u(0, 0), 0.5 * (d2u(0, 1) + d2u(1, 0)), d2u(1, 1)};
        for (int row = 0; row < 5; ++row) {
            t[row * 5 + col] = out[row];
        }
    }
    return t;
}

double boundary_curvature(const RadialProfile::Sample& s) {
    const double num = s.value * s.value + 2.0 * s.first * s.first - s.value * s.second;
    return num / std::pow(s.value * s.value + s.first * s.first, 1.5);
}

}  // namespace

GridTopology build_grid(const Domain& domain) {
    check_structural(domain);
    GridTopology g;
    g.dim = domain.dim;
    g.n_r = domain.n_r;
    g.mesh_size = domain.mesh_size();
    if (domain.dim == 1) {
        const int count = 2 * domain.n_r + 1;
        const double h = domain.half_width / domain.n_r;
        g.n_phi = 0;
        g.dr = h;
        g.node_count = count;
        g.interior_count = count - 2;
        g.r.resize(count);
        g.phi.assign(count, 0.0);
        g.coords.resize(count);
        auto place = [&](int p, int i) {
            const double x = -domain.half_width + i * h;
            g.coords[p] = x;
            g.r[p] = x / domain.half_width;
        };
        for (int i = 1; i < count - 1; ++i) {
            place(i - 1, i);
        }
        place(count - 2, 0);
        place(count - 1, count - 1);
        // exact endpoints
        g.coords[count - 2] = -domain.half_width;
        g.coords[count - 1] = domain.half_width;
        g.boundary_normal = {-1.0, 1.0};
        g.boundary_mean_curvature = {0.0, 0.0};
        std::array<double, 25> id{};
        id[0] = 1.0;
        id[6] = 1.0;
        g.transform.assign(count, id);
        return g;
    }

    const int nr = domain.n_r;
    const int np = domain.n_phi;
    g.n_phi = np;
    g.dr = 1.0 / (nr - 0.5);
    g.node_count = nr * np;
    g.interior_count = (nr - 1) * np;
    g.r.resize(g.node_count);
    g.phi.resize(g.node_count);
    g.coords.resize(2 * static_cast<std::size_t>(g.node_count));
    g.transform.resize(g.node_count);
    g.boundary_normal.resize(2 * static_cast<std::size_t>(np));
    g.boundary_mean_curvature.resize(np);
    g.d1_phi = fourier_first(np);
    g.d2_phi = fourier_second(np);
    for (int m = 0; m < np; ++m) {
        const double phi = 2.0 * std::numbers::pi * m / np;
        const auto s = domain.rho.sample(phi);
        const double c = std::cos(phi);
        const double sn = std::sin(phi);
        for (int j = 1; j <= nr; ++j) {
            const double r = (j == nr) ? 1.0 : (j - 0.5) * g.dr;  // r_N = 1 exactly
            const int p = g.node(j, m);
            g.r[p] = r;
            g.phi[p] = phi;
            const auto map = radial_map(domain.rho, r, phi);
            g.coords[2 * p] = map.value * c;
            g.coords[2 * p + 1] = map.value * sn;
            g.transform[p] = polar_transform(phi, map);
        }
        // outward normal: tangent (rho' e + rho e_perp) rotated clockwise
        const double nx = s.value * c + s.first * sn;
        const double ny = s.value * sn - s.first * c;
        const double len = std::hypot(nx, ny);
        g.boundary_normal[2 * m] = nx / len;
        g.boundary_normal[2 * m + 1] = ny / len;
        g.boundary_mean_curvature[m] = boundary_curvature(s);
    }
    return g;
}

Vec GridTopology::position(int p) const {
    Vec x(dim);
    for (int k = 0; k < dim; ++k) {
        x(k) = coords[static_cast<std::size_t>(p) * dim + k];
    }
    return x;
}

Vec GridTopology::outward_normal(int p) const {
    const int b = p - interior_count;
    Vec n(dim);
    for (int k = 0; k < dim; ++k) {
        n(k) = boundary_normal[static_cast<std::size_t>(b) * dim + k];
    }
    return n;
}

GridFunction constant_function(const GridTopology& topo, double value) {
    return GridFunction{std::vector<double>(topo.node_count, value), value};
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

// f(k) is the value k steps inward from the boundary node.
template <class F>
double one_sided_first(F f, double h) {
    return (25.0 * f(0) - 48.0 * f(1) + 36.0 * f(2) - 16.0 * f(3) + 3.0 * f(4)) / (12.0 * h);
}

template <class F>
double one_sided_second(F f, double h) {
    return (35.0 * f(0) - 104.0 * f(1) + 114.0 * f(2) - 56.0 * f(3) + 11.0 * f(4)) / (12.0 * h * h);
}

}  // namespace

std::vector<double> parameter_derivatives(const GridTopology& topo, std::span<const double> u) {
    if (static_cast<int>(u.size()) != topo.node_count) {
        throw std::invalid_argument("grid function size does not match topology");
    }
    std::vector<double> out(static_cast<std::size_t>(topo.node_count) * kJetStride, 0.0);
    const double h = topo.dr;

    if (topo.dim == 1) {
        const int count = topo.node_count;
        // natural ordering value access: i = 0..count-1
        auto val = [&](int i) {
            if (i == 0) return u[count - 2];
            if (i == count - 1) return u[count - 1];
            return u[i - 1];
        };
        auto slot = [&](int i) -> double* {
            const int p = (i == 0) ? count - 2 : (i == count - 1 ? count - 1 : i - 1);
            return &out[static_cast<std::size_t>(p) * kJetStride];
        };
        for (int i = 1; i < count - 1; ++i) {
            double* s = slot(i);
            s[0] = (val(i + 1) - val(i - 1)) / (2.0 * h);
            s[1] = (val(i + 1) - 2.0 * val(i) + val(i - 1)) / (h * h);
        }
        const int e = count - 1;
        double* right = slot(e);
        right[0] = one_sided_first([&](int k) { return val(e - k); }, h);
        right[1] = one_sided_second([&](int k) { return val(e - k); }, h);
        double* left = slot(0);
        left[0] = -one_sided_first([&](int k) { return val(k); }, h);
        left[1] = one_sided_second([&](int k) { return val(k); }, h);
        return out;
    }

    const int nr = topo.n_r;
    const int np = topo.n_phi;
    const int half = np / 2;
    const Eigen::Map<const Eigen::MatrixXd> rings(u.data(), np, nr);
    // Ring means carry no angular information; removing them keeps the
    // round-off of the collocation sums proportional to the angular
    // variation, which matters near the pole where 1/r^2 amplifies it.
    const Eigen::MatrixXd centred = rings.rowwise() - rings.colwise().mean();
    const Eigen::MatrixXd u_phi = topo.d1_phi * centred;
    const Eigen::MatrixXd u_phiphi = topo.d2_phi * centred;
    auto at = [&](const auto& field, int j, int m) {
        return j <= 0 ? field((m + half) % np, -j) : field(m, j - 1);
    };
    for (int j = 1; j <= nr; ++j) {
        for (int m = 0; m < np; ++m) {
            double* s = &out[static_cast<std::size_t>(topo.node(j, m)) * kJetStride];
            s[1] = u_phi(m, j - 1);
            s[4] = u_phiphi(m, j - 1);
            if (j < nr) {
                s[0] = (at(rings, j + 1, m) - at(rings, j - 1, m)) / (2.0 * h);
                s[2] = (at(rings, j + 1, m) - 2.0 * at(rings, j, m) + at(rings, j - 1, m)) / (h * h);
                s[3] = (at(u_phi, j + 1, m) - at(u_phi, j - 1, m)) / (2.0 * h);
            } else {
                auto ring = [&](int k) { return at(rings, j - k, m); };
                s[0] = one_sided_first(ring, h);
                s[2] = one_sided_second(ring, h);
                s[3] = one_sided_first([&](int k) { return at(u_phi, j - k, m); }, h);
            }
        }
    }
    return out;
}

namespace {

// Fornberg weights for derivatives 0..2 at x0 from the given nodes.
std::array<std::vector<double>, 3> fd_weights(double x0, const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::array<std::vector<double>, 3> c;
    for (auto& row : c) {
        row.assign(n, 0.0);
    }
    c[0][0] = 1.0;
    double c1 = 1.0;
    for (int i = 1; i < n; ++i) {
        double c2 = 1.0;
        const int mn = std::min(i, 2);
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            for (int k = mn; k >= 0; --k) {
                if (j == i - 1) {
                    c[k][i] = c1 * ((k > 0 ? k * c[k - 1][i - 1] : 0.0) - (x[i - 1] - x0) * c[k][i - 1]) / c2;
                }
                c[k][j] = ((x[i] - x0) * c[k][j] - (k > 0 ? k * c[k - 1][j] : 0.0)) / c3;
            }
        }
        c1 = c2;
    }
    return c;
}

struct Stencil {
    int first = 0;  // offset of the leftmost node
    std::vector<double> d1;
    std::vector<double> d2;
};

// Stencil at index i of a uniform line with unit spacing; nodes lo..hi exist.
// Five nodes for first derivatives, six off-centre for second derivatives.
Stencil fourth_order_stencil(int i, int lo, int hi) {
    const int start5 = std::clamp(i - 2, lo, hi - 4);
    const int start6 = start5 == i - 2 ? start5 : std::clamp(i - 3, lo, hi - 5);
    const int width = start5 == i - 2 ? 5 : 6;
    auto nodes = [](int start, int n) {
        std::vector<double> x(n);
        for (int k = 0; k < n; ++k) {
            x[k] = start + k;
        }
        return x;
    };
    Stencil s;
    s.first = start6 - i;
    s.d2 = fd_weights(i, nodes(start6, width))[2];
    const auto w5 = fd_weights(i, nodes(start5, 5))[1];
    s.d1.assign(width, 0.0);
    for (int k = 0; k < 5; ++k) {
        s.d1[start5 - start6 + k] = w5[k];
    }
    return s;
}

}  // namespace

std::vector<double> parameter_derivatives_fourth(const GridTopology& topo, std::span<const double> u) {
    if (static_cast<int>(u.size()) != topo.node_count) {
        throw std::invalid_argument("grid function size does not match topology");
    }
    std::vector<double> out(static_cast<std::size_t>(topo.node_count) * kJetStride, 0.0);
    const double h = topo.dr;

    if (topo.dim == 1) {
        const int count = topo.node_count;
        auto index = [&](int i) { return i == 0 ? count - 2 : (i == count - 1 ? count - 1 : i - 1); };
        for (int i = 0; i < count; ++i) {
            const auto st = fourth_order_stencil(i, 0, count - 1);
            double* s = &out[static_cast<std::size_t>(index(i)) * kJetStride];
            for (std::size_t k = 0; k < st.d1.size(); ++k) {
                const double v = u[index(i + st.first + static_cast<int>(k))];
                s[0] += st.d1[k] * v / h;
                s[1] += st.d2[k] * v / (h * h);
            }
        }
        return out;
    }

    const int nr = topo.n_r;
    const int np = topo.n_phi;
    const int half = np / 2;
    const Eigen::Map<const Eigen::MatrixXd> rings(u.data(), np, nr);
    const Eigen::MatrixXd centred = rings.rowwise() - rings.colwise().mean();
    const Eigen::MatrixXd u_phi = topo.d1_phi * centred;
    const Eigen::MatrixXd u_phiphi = topo.d2_phi * centred;
    auto at = [&](const auto& field, int j, int m) {
        return j <= 0 ? field((m + half) % np, -j) : field(m, j - 1);
    };
    for (int j = 1; j <= nr; ++j) {
        const auto st = fourth_order_stencil(j, -nr + 1, nr);
        for (int m = 0; m < np; ++m) {
            double* s = &out[static_cast<std::size_t>(topo.node(j, m)) * kJetStride];
            s[1] = u_phi(m, j - 1);
            s[4] = u_phiphi(m, j - 1);
            for (std::size_t k = 0; k < st.d1.size(); ++k) {
                const int jj = j + st.first + static_cast<int>(k);
                s[0] += st.d1[k] * at(rings, jj, m) / h;
                s[2] += st.d2[k] * at(rings, jj, m) / (h * h);
                s[3] += st.d1[k] * at(u_phi, jj, m) / h;
            }
        }
    }
    return out;
}

namespace {

GridDerivatives to_cartesian(const GridTopology& topo, const std::vector<double>& params) {
    GridDerivatives d;
    d.dim = topo.dim;
    d.data.assign(params.size(), 0.0);
    const int slots = jet_size(topo.dim);
    for (int p = 0; p < topo.node_count; ++p) {
        const auto& t = topo.transform[p];
        const double* in = &params[static_cast<std::size_t>(p) * kJetStride];
        double* out = &d.data[static_cast<std::size_t>(p) * kJetStride];
        for (int row = 0; row < slots; ++row) {
            double acc = 0.0;
            for (int col = 0; col < slots; ++col) {
                acc += t[row * 5 + col] * in[col];
            }
            out[row] = acc;
        }
    }
    return d;
}

}  // namespace

GridDerivatives differentiate(const GridTopology& topo, std::span<const double> u) {
    return to_cartesian(topo, parameter_derivatives(topo, u));
}

GridDerivatives differentiate_fourth(const GridTopology& topo, std::span<const double> u) {
    return to_cartesian(topo, parameter_derivatives_fourth(topo, u));
}

Vec GridDerivatives::gradient(int p) const {
    const double* s = &data[static_cast<std::size_t>(p) * kJetStride];
    Vec g(dim);
    for (int k = 0; k < dim; ++k) {
        g(k) = s[k];
    }
    return g;
}

Mat GridDerivatives::hessian(int p) const {
    const double* s = &data[static_cast<std::size_t>(p) * kJetStride];
    Mat h(dim, dim);
    if (dim == 1) {
        h(0, 0) = s[1];
    } else {
        h << s[2], s[3], s[3], s[4];
    }
    return h;
}

// ---------------------------------------------------------------------------
// Pointwise geometry

ShapeMatrices shape_matrices(double u, const Vec& du, const Mat& d2u) {
    const auto n = du.size();
    ShapeMatrices s;
    s.w = std::sqrt(1.0 + du.squaredNorm());
    const Mat id = Mat::Identity(n, n);
    s.gamma = id - du * du.transpose() / (s.w * (1.0 + s.w));
    s.shape_e = s.gamma * d2u * s.gamma / s.w;
    s.shape_e = 0.5 * (s.shape_e + s.shape_e.transpose()).eval();
    s.shape = u * s.shape_e + id / s.w;
    return s;
}

Vec principal_curvatures(const Mat& shape) { return symmetric_eigenvalues(shape); }

Vec principal_curvatures(const Mat& second_form, const Mat& metric) {
    return generalized_eigenvalues(second_form, metric);
}

PointGeometry point_geometry(const Vec& x, double u, const Vec& du, const Mat& d2u) {
    PointGeometry g;
    g.x = x;
    g.u = u;
    g.du = du;
    g.d2u = d2u;
    auto s = shape_matrices(u, du, d2u);
    g.w = s.w;
    g.nu = 1.0 / s.w;
    g.kappa_e = principal_curvatures(s.shape_e);
    g.kappa = principal_curvatures(s.shape);
    g.gamma = std::move(s.gamma);
    g.shape_e = std::move(s.shape_e);
    g.shape = std::move(s.shape);
    return g;
}

std::vector<PointGeometry> geometry_field(const GridTopology& topo, std::span<const double> u) {
    const auto d = differentiate(topo, u);
    std::vector<PointGeometry> out(topo.node_count);
    int failed = -1;
#pragma omp parallel for schedule(static)
    for (int p = 0; p < topo.node_count; ++p) {
        try {
            out[p] = point_geometry(topo.position(p), u[p], d.gradient(p), d.hessian(p));
        } catch (const NumericalError&) {
#pragma omp critical
            failed = p;
        }
    }
    if (failed >= 0) {
        throw NumericalError("non-finite geometry at node " + std::to_string(failed));
    }
    return out;
}

SurfaceTensors surface_tensors(double u, const Vec& du, const Mat& d2u) {
    const auto n = du.size();
    SurfaceTensors t;
    t.u = u;
    t.w = std::sqrt(1.0 + du.squaredNorm());
    const Mat id = Mat::Identity(n, n);
    const Mat first = id + du * du.transpose();
    t.metric = first / (u * u);
    t.second_form = (first + u * d2u) / (u * u * t.w);
    // dg[k](i, j) = d_k g_ij
    std::vector<Mat> dg(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                dg[k](i, j) = (d2u(i, k) * du(j) + du(i) * d2u(j, k)) / (u * u) -
                              2.0 * du(k) * first(i, j) / (u * u * u);
            }
        }
    }
    const Mat inverse = t.metric.inverse();
    t.christoffel.assign(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int l = 0; l < n; ++l) {
                    acc += inverse(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                }
                t.christoffel[k](i, j) = 0.5 * acc;
            }
        }
    }
    return t;
}

Mat intrinsic_hessian(const Vec& dphi, const Mat& d2phi, const SurfaceTensors& tensors) {
    if (Eigen::LLT<Mat>(tensors.metric).info() != Eigen::Success) {
        throw NumericalError("metric is not positive definite");
    }
    Mat out = d2phi;
    for (int k = 0; k < dphi.size(); ++k) {
        out -= tensors.christoffel[k] * dphi(k);
    }
    return out;
}

std::vector<Mat> intrinsic_hessian_field(const GridTopology& topo, std::span<const double> phi,
                                         std::span<const double> u) {
    const auto dphi = differentiate(topo, phi);
    const auto du = differentiate(topo, u);
    std::vector<Mat> out(topo.interior_count);
    for (int p = 0; p < topo.interior_count; ++p) {
        const auto tensors = surface_tensors(u[p], du.gradient(p), du.hessian(p));
        out[p] = intrinsic_hessian(dphi.gradient(p), dphi.hessian(p), tensors);
    }
    return out;
}

}  // namespace plateau
