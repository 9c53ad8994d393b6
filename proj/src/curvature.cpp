#include "plateau/curvature.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace plateau {

namespace {

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) {
        b = b * (n - k + i) / i;
    }
    return b;
}

/// e_0..e_n of kappa with entry `skip` removed (skip < 0: none removed).
std::vector<double> symmetric_table(const Vec& kappa, int skip) {
    const auto n = static_cast<int>(kappa.size());
    std::vector<double> e(static_cast<std::size_t>(n) + 1, 0.0);
    e[0] = 1.0;
    int used = 0;
    for (int m = 0; m < n; ++m) {
        if (m == skip) {
            continue;
        }
        ++used;
        for (int k = used; k >= 1; --k) {
            e[k] += kappa(m) * e[k - 1];
        }
    }
    return e;
}

void require_cone(const Vec& kappa) {
    for (int i = 0; i < kappa.size(); ++i) {
        if (!(kappa(i) > 0.0) || !std::isfinite(kappa(i))) {
            std::ostringstream os;
            os << "curvature argument outside the positive cone: kappa_" << i << " = " << kappa(i);
            throw DomainViolation(os.str());
        }
    }
}

CurvatureValue eval_power_mean(int k, const Vec& kappa) {
    const auto n = static_cast<int>(kappa.size());
    const double norm = binomial(n, k);
    const auto e = symmetric_table(kappa, -1);
    const double hk = e[k] / norm;
    CurvatureValue out;
    out.value = (k == 1) ? hk : std::pow(hk, 1.0 / k);
    out.gradient.resize(n);
    // d/dkappa_i H_k^{1/k} = (1/k) H_k^{1/k - 1} e_{k-1}(kappa | i) / binom
    const double outer = (k == 1) ? 1.0 : out.value / (k * hk);
    for (int i = 0; i < n; ++i) {
        out.gradient(i) = outer * symmetric_table(kappa, i)[k - 1] / norm;
    }
    return out;
}

CurvatureValue eval_quotient(int l, const Vec& kappa) {
    const auto n = static_cast<int>(kappa.size());
    const auto e = symmetric_table(kappa, -1);
    const double hn = e[n];
    const double hl = e[l] / binomial(n, l);
    const double ratio = hn / hl;
    CurvatureValue out;
    out.value = std::pow(ratio, 1.0 / (n - l));
    out.gradient.resize(n);
    for (int i = 0; i < n; ++i) {
        double dlog = 1.0 / kappa(i);
        if (l > 0) {
            dlog -= symmetric_table(kappa, i)[l - 1] / e[l];
        }
        out.gradient(i) = out.value * dlog / (n - l);
    }
    return out;
}

CurvatureValue eval_unchecked(const CurvatureSpec& spec, const Vec& kappa) {
    switch (spec.kind()) {
        case CurvatureSpec::Kind::PowerMean:
            return eval_power_mean(spec.k(), kappa);
        case CurvatureSpec::Kind::Quotient:
            return eval_quotient(spec.l(), kappa);
        case CurvatureSpec::Kind::Blend: {
            const double t = spec.theta();
            const auto g = eval_power_mean(static_cast<int>(kappa.size()), kappa);
            const auto f = eval_unchecked(spec.inner(), kappa);
            return {t * g.value + (1.0 - t) * f.value, t * g.gradient + (1.0 - t) * f.gradient};
        }
        case CurvatureSpec::Kind::Dual: {
            const Vec inv = kappa.cwiseInverse();
            const auto f = eval_unchecked(spec.inner(), inv);
            CurvatureValue out;
            out.value = 1.0 / f.value;
            out.gradient = f.gradient.cwiseProduct(inv.cwiseProduct(inv)) / (f.value * f.value);
            return out;
        }
    }
    throw std::logic_error("unknown curvature kind");
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

int parse_int(std::string_view s, std::string_view what) {
    const std::string t = trim(s);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw std::invalid_argument("bad integer for " + std::string(what) + ": '" + t + "'");
    }
    return v;
}

double parse_double(std::string_view s, std::string_view what) {
    const std::string t = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw std::invalid_argument("bad number for " + std::string(what) + ": '" + t + "'");
    }
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------

CurvatureSpec CurvatureSpec::power_mean(int n, int k) {
    if (n < 1 || n > kMaxDim) {
        throw std::invalid_argument("curvature dimension out of range");
    }
    if (k < 1 || k > n) {
        throw std::invalid_argument("power_mean index must satisfy 1 <= k <= n");
    }
    CurvatureSpec s(Kind::PowerMean, n);
    s.k_ = k;
    return s;
}

CurvatureSpec CurvatureSpec::quotient(int n, int l) {
    if (n < 1 || n > kMaxDim) {
        throw std::invalid_argument("curvature dimension out of range");
    }
    if (l < 0 || l >= n) {
        throw std::invalid_argument("quotient index must satisfy 0 <= l < n");
    }
    CurvatureSpec s(Kind::Quotient, n);
    s.l_ = l;
    return s;
}

CurvatureSpec CurvatureSpec::blend(double theta, const CurvatureSpec& inner) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw std::invalid_argument("blend weight must lie in [0,1]");
    }
    CurvatureSpec s(Kind::Blend, inner.dim());
    s.theta_ = theta;
    s.inner_ = std::make_shared<const CurvatureSpec>(inner);
    return s;
}

CurvatureSpec CurvatureSpec::dual(const CurvatureSpec& inner) {
    CurvatureSpec s(Kind::Dual, inner.dim());
    s.inner_ = std::make_shared<const CurvatureSpec>(inner);
    return s;
}

bool CurvatureSpec::is_gauss() const {
    switch (kind_) {
        case Kind::PowerMean:
            return k_ == n_;
        case Kind::Quotient:
            return l_ == 0;
        case Kind::Blend:
            return theta_ == 1.0 || inner_->is_gauss();
        case Kind::Dual:
            return inner_->is_gauss();
    }
    return false;
}

std::string CurvatureSpec::name() const {
    std::ostringstream os;
    switch (kind_) {
        case Kind::PowerMean:
            if (k_ == 1) {
                os << "mean";
            } else if (k_ == n_) {
                os << "gauss";
            } else {
                os << "power_mean:" << k_;
            }
            break;
        case Kind::Quotient:
            os << "quotient:" << n_ << "," << l_;
            break;
        case Kind::Blend:
            os.precision(17);
            os << "blend:" << theta_ << "," << inner_->name();
            break;
        case Kind::Dual:
            os << "dual:" << inner_->name();
            break;
    }
    return os.str();
}

CurvatureSpec parse_curvature(std::string_view text, int n) {
    const std::string t = trim(text);
    const auto colon = t.find(':');
    const std::string head = t.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : t.substr(colon + 1);
    if (head == "mean" && colon == std::string::npos) {
        return CurvatureSpec::mean(n);
    }
    if (head == "gauss" && colon == std::string::npos) {
        return CurvatureSpec::gauss(n);
    }
    if (head == "power_mean" && !rest.empty()) {
        return CurvatureSpec::power_mean(n, parse_int(rest, "power_mean index"));
    }
    if (head == "quotient" && !rest.empty()) {
        const auto comma = rest.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("quotient needs 'quotient:n,l'");
        }
        const int qn = parse_int(rest.substr(0, comma), "quotient n");
        if (qn != n) {
            throw std::invalid_argument("quotient dimension " + std::to_string(qn) +
                                        " does not match problem dimension " + std::to_string(n));
        }
        return CurvatureSpec::quotient(n, parse_int(rest.substr(comma + 1), "quotient l"));
    }
    if (head == "blend" && !rest.empty()) {
        const auto comma = rest.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("blend needs 'blend:theta,inner'");
        }
        return CurvatureSpec::blend(parse_double(rest.substr(0, comma), "blend weight"),
                                    parse_curvature(rest.substr(comma + 1), n));
    }
    if (head == "dual" && !rest.empty()) {
        return CurvatureSpec::dual(parse_curvature(rest, n));
    }
    throw std::invalid_argument("unknown curvature function '" + t + "'");
}

double elementary_symmetric(const Vec& kappa, int k) {
    if (k < 0 || k > kappa.size()) {
        return 0.0;
    }
    return symmetric_table(kappa, -1)[k];
}

double normalized_symmetric(const Vec& kappa, int k) {
    return elementary_symmetric(kappa, k) / binomial(static_cast<int>(kappa.size()), k);
}

CurvatureValue eval_f(const CurvatureSpec& spec, const Vec& kappa) {
    if (kappa.size() != spec.dim()) {
        throw std::invalid_argument("curvature vector has wrong dimension");
    }
    require_cone(kappa);
    return eval_unchecked(spec, kappa);
}

CurvatureSpec dual_f(const CurvatureSpec& spec) {
    if (spec.kind() == CurvatureSpec::Kind::Dual) {
        return spec.inner();
    }
    return CurvatureSpec::dual(spec);
}

double dual_quotient_closed_form(const CurvatureSpec& quotient, const Vec& kappa) {
    if (quotient.kind() != CurvatureSpec::Kind::Quotient) {
        throw std::invalid_argument("closed-form dual is defined for quotients only");
    }
    require_cone(kappa);
    const int m = quotient.dim() - quotient.l();
    return std::pow(normalized_symmetric(kappa, m), 1.0 / m);
}

MatrixDerivative matrix_derivative(const CurvatureSpec& spec, const Mat& a) {
    const auto eig = symmetric_eigen(a);
    const auto value = eval_f(spec, eig.values);
    const auto n = eig.values.size();
    Vec grad = value.gradient;
    // average the gradient over clusters of (nearly) repeated eigenvalues;
    // f is symmetric so this is the limit of Q diag(f_i) Q^T
    const double scale = eig.values.cwiseAbs().maxCoeff();
    const double gap = kRepeatedEigenvalueGap * std::max(scale, 1e-300);
    for (int begin = 0; begin < n;) {
        int end = begin + 1;
        while (end < n && eig.values(end) - eig.values(end - 1) < gap) {
            ++end;
        }
        if (end - begin > 1) {
            const double avg = grad.segment(begin, end - begin).mean();
            grad.segment(begin, end - begin).setConstant(avg);
        }
        begin = end;
    }
    MatrixDerivative out;
    out.value = value.value;
    out.eigenvalues = eig.values;
    out.derivative = eig.vectors * grad.asDiagonal() * eig.vectors.transpose();
    return out;
}

StructureReport structure_check(const CurvatureSpec& spec, int samples, std::uint64_t seed) {
    const int n = spec.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_kappa(-3.0, 3.0);
    std::uniform_real_distribution<double> log_scale(-2.0, 2.0);
    auto draw = [&] {
        Vec k(n);
        for (int i = 0; i < n; ++i) {
            k(i) = std::exp(log_kappa(rng));
        }
        return k;
    };
    auto record = [](StructureReport& r, std::string what, const Vec& k, double lhs, double rhs) {
        r.violations.push_back({std::move(what), std::vector<double>(k.data(), k.data() + k.size()), lhs, rhs});
    };

    StructureReport report;
    report.samples = samples;
    const Vec ones = Vec::Ones(n);
    const double at_one = eval_f(spec, ones).value;
    if (std::abs(at_one - 1.0) > 1e-13) {
        record(report, "normalization", ones, at_one, 1.0);
    }
    for (int s = 0; s < samples; ++s) {
        const Vec k = draw();
        const Vec m = draw();
        const double t = std::exp(log_scale(rng));
        const auto fk = eval_f(spec, k);
        for (int i = 0; i < n; ++i) {
            if (!(fk.gradient(i) > 0.0)) {
                record(report, "monotonicity", k, fk.gradient(i), 0.0);
            }
        }
        const double scaled = eval_f(spec, Vec(t * k)).value;
        if (std::abs(scaled - t * fk.value) > 1e-11 * std::max(1.0, t * fk.value)) {
            record(report, "homogeneity", k, scaled, t * fk.value);
        }
        const double mid = eval_f(spec, Vec(0.5 * (k + m))).value;
        const double chord = 0.5 * (fk.value + eval_f(spec, m).value);
        if (mid < chord - 1e-12) {
            record(report, "concavity", k, mid, chord);
        }
    }
    Vec edge = ones;
    edge(0) = 1e-6;
    report.boundary_value = eval_f(spec, edge).value;
    report.vanishes_on_boundary = report.boundary_value < 2e-3;
    return report;
}

}  // namespace plateau
