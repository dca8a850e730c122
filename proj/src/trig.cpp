#include "braidforge/trig.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace braidforge {

namespace {

constexpr double kDuplicateAngleTol = 1e-9;
constexpr double kConditionLimit = 1e12;

void check_distinct_angles(std::vector<double> angles) {
    for (double& a : angles) a = wrap_angle(a);
    std::sort(angles.begin(), angles.end());
    const size_t n = angles.size();
    for (size_t i = 0; i + 1 < n; ++i) {
        if (angles[i + 1] - angles[i] < kDuplicateAngleTol)
            throw std::invalid_argument("interpolation nodes coincide");
    }
    if (n >= 2 && (angles.front() + kTau) - angles.back() < kDuplicateAngleTol)
        throw std::invalid_argument("interpolation nodes coincide");
}

}  // namespace

TrigPoly TrigPoly::harmonic_cos(int k, double a) {
    TrigPoly p;
    if (k == 0) {
        p.a0_ = a;
    } else {
        p.ensure(k);
        p.cos_[k - 1] = a;
    }
    return p;
}

TrigPoly TrigPoly::harmonic_sin(int k, double b) {
    TrigPoly p;
    if (k == 0) return p;
    p.ensure(k);
    p.sin_[k - 1] = b;
    return p;
}

void TrigPoly::ensure(int k) {
    if (k > static_cast<int>(cos_.size())) {
        cos_.resize(k, 0.0);
        sin_.resize(k, 0.0);
    }
}

double TrigPoly::cos_coeff(int k) const {
    return (k >= 1 && k <= degree()) ? cos_[k - 1] : 0.0;
}

double TrigPoly::sin_coeff(int k) const {
    return (k >= 1 && k <= degree()) ? sin_[k - 1] : 0.0;
}

void TrigPoly::set_cos(int k, double v) {
    ensure(k);
    cos_[k - 1] = v;
}

void TrigPoly::set_sin(int k, double v) {
    ensure(k);
    sin_[k - 1] = v;
}

double TrigPoly::eval(double t) const {
    // Recur on e^{ikt} instead of calling sin/cos per harmonic.
    NeumaierSum acc;
    acc.add(a0_);
    const std::complex<double> w(std::cos(t), std::sin(t));
    std::complex<double> wk = w;
    for (int k = 1; k <= degree(); ++k) {
        acc.add(cos_[k - 1] * wk.real());
        acc.add(sin_[k - 1] * wk.imag());
        wk *= w;
    }
    return acc.value();
}

TrigPoly TrigPoly::derivative() const {
    TrigPoly d;
    d.ensure(degree());
    for (int k = 1; k <= degree(); ++k) {
        // d/dt [a cos kt + b sin kt] = b k cos kt - a k sin kt
        d.cos_[k - 1] = k * sin_[k - 1];
        d.sin_[k - 1] = -k * cos_[k - 1];
    }
    return d;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& o) {
    ensure(o.degree());
    a0_ += o.a0_;
    for (int k = 1; k <= o.degree(); ++k) {
        cos_[k - 1] += o.cos_[k - 1];
        sin_[k - 1] += o.sin_[k - 1];
    }
    return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& o) {
    ensure(o.degree());
    a0_ -= o.a0_;
    for (int k = 1; k <= o.degree(); ++k) {
        cos_[k - 1] -= o.cos_[k - 1];
        sin_[k - 1] -= o.sin_[k - 1];
    }
    return *this;
}

TrigPoly& TrigPoly::operator*=(double s) {
    a0_ *= s;
    for (double& v : cos_) v *= s;
    for (double& v : sin_) v *= s;
    return *this;
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
    TrigPoly r = *this;
    r += o;
    return r;
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const {
    TrigPoly r = *this;
    r -= o;
    return r;
}

TrigPoly TrigPoly::operator*(double s) const {
    TrigPoly r = *this;
    r *= s;
    return r;
}

std::vector<std::complex<double>> TrigPoly::spectrum() const {
    const int d = degree();
    std::vector<std::complex<double>> c(2 * d + 1);
    c[d] = a0_;
    for (int k = 1; k <= d; ++k) {
        const std::complex<double> ck(cos_[k - 1] / 2.0, -sin_[k - 1] / 2.0);
        c[d + k] = ck;
        c[d - k] = std::conj(ck);
    }
    return c;
}

TrigPoly TrigPoly::from_spectrum(const std::vector<std::complex<double>>& c) {
    if (c.size() % 2 == 0) throw std::invalid_argument("spectrum must have odd length");
    const int d = static_cast<int>(c.size() / 2);
    TrigPoly p;
    p.ensure(d);
    p.a0_ = c[d].real();
    for (int k = 1; k <= d; ++k) {
        const std::complex<double> sym = c[d + k] + std::conj(c[d - k]);
        p.cos_[k - 1] = sym.real();
        p.sin_[k - 1] = -sym.imag();
    }
    return p;
}

TrigPoly TrigPoly::operator*(const TrigPoly& o) const {
    const auto a = spectrum();
    const auto b = o.spectrum();
    const int da = degree(), db = o.degree();
    const int d = da + db;
    std::vector<std::complex<double>> c(2 * d + 1, 0.0);
    for (int i = 0; i < static_cast<int>(a.size()); ++i) {
        if (a[i] == std::complex<double>(0.0)) continue;
        for (int j = 0; j < static_cast<int>(b.size()); ++j) {
            c[i + j] += a[i] * b[j];
        }
    }
    return from_spectrum(c);
}

double TrigPoly::max_abs_coeff() const {
    double m = std::abs(a0_);
    for (double v : cos_) m = std::max(m, std::abs(v));
    for (double v : sin_) m = std::max(m, std::abs(v));
    return m;
}

void TrigPoly::trim(double rel_tol) {
    const double cut = rel_tol * max_abs_coeff();
    int d = degree();
    while (d > 0 && std::abs(cos_[d - 1]) <= cut && std::abs(sin_[d - 1]) <= cut) --d;
    cos_.resize(d);
    sin_.resize(d);
}

TrigPoly trig_interpolate(const std::vector<double>& angles,
                          const std::vector<double>& values) {
    if (angles.size() != values.size())
        throw std::invalid_argument("angle/value count mismatch");
    if (angles.empty()) throw std::invalid_argument("no interpolation nodes");
    check_distinct_angles(angles);

    const int n = static_cast<int>(angles.size());
    const int m = (n - 1 + 1) / 2;  // ceil((n-1)/2)
    const int cols = 2 * m + 1;

    Eigen::MatrixXd B(n, cols);
    for (int i = 0; i < n; ++i) {
        const double t = angles[i];
        B(i, 0) = 1.0;
        for (int k = 1; k <= m; ++k) {
            B(i, 2 * k - 1) = std::cos(k * t);
            B(i, 2 * k) = std::sin(k * t);
        }
    }
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(values.data(), n);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0 || sv(0) / smin > kConditionLimit)
        throw std::runtime_error("interpolation system is numerically singular");

    Eigen::VectorXd coeff(cols);
    if (n == cols) {
        coeff = Eigen::PartialPivLU<Eigen::MatrixXd>(B).solve(b);
    } else {
        // Minimum-norm solution of the underdetermined system: c = B^T y with
        // (B B^T) y = b.
        Eigen::MatrixXd G = B * B.transpose();
        Eigen::VectorXd y = Eigen::PartialPivLU<Eigen::MatrixXd>(G).solve(b);
        coeff = B.transpose() * y;
    }

    TrigPoly p(coeff(0));
    for (int k = 1; k <= m; ++k) {
        p.set_cos(k, coeff(2 * k - 1));
        p.set_sin(k, coeff(2 * k));
    }
    return p;
}

TrigPoly trig_hermite_interpolate(const std::vector<HermiteNode>& nodes) {
    if (nodes.empty()) throw std::invalid_argument("no interpolation nodes");
    std::vector<double> angles;
    angles.reserve(nodes.size());
    for (const auto& nd : nodes) angles.push_back(nd.angle);
    check_distinct_angles(angles);

    const int n = static_cast<int>(nodes.size());
    TrigPoly result;
    for (int i = 0; i < n; ++i) {
        const double ti = nodes[i].angle;
        // U_i(t) = prod_{k != i} (sin((t - t_k)/2) / sin((t_i - t_k)/2))^2.
        // sin^2((t - t_k)/2) = (1 - cos(t - t_k)) / 2, a degree-1 factor.
        TrigPoly u(1.0);
        double slope_sum = 0.0;  // sum_k cot((t_i - t_k)/2)
        for (int k = 0; k < n; ++k) {
            if (k == i) continue;
            const double tk = nodes[k].angle;
            TrigPoly factor(0.5);
            factor.set_cos(1, -0.5 * std::cos(tk));
            factor.set_sin(1, -0.5 * std::sin(tk));
            const double denom = std::sin((ti - tk) / 2.0);
            u = u * (factor * (1.0 / (denom * denom)));
            slope_sum += std::cos((ti - tk) / 2.0) / denom;
        }
        // sin(t - t_i) as a trig polynomial.
        TrigPoly sin_shift;
        sin_shift.set_sin(1, std::cos(ti));
        sin_shift.set_cos(1, -std::sin(ti));

        // h0 matches value 1 / slope 0 at t_i; h1 matches value 0 / slope 1.
        TrigPoly h0 = (TrigPoly(1.0) - sin_shift * slope_sum) * u;
        TrigPoly h1 = sin_shift * u;
        result += h0 * nodes[i].value + h1 * nodes[i].slope;
    }
    result.trim();
    return result;
}

TorusTrigPoly::TorusTrigPoly(double constant) {
    if (constant != 0.0) c_[{0, 0}] = constant;
}

TorusTrigPoly TorusTrigPoly::from_phi_poly(const TrigPoly& f) {
    TorusTrigPoly p;
    const auto spec = f.spectrum();
    const int d = f.degree();
    for (int k = -d; k <= d; ++k) {
        const auto c = spec[k + d];
        if (c != std::complex<double>(0.0)) p.c_[{k, 0}] = c;
    }
    return p;
}

TorusTrigPoly TorusTrigPoly::harmonic_cos_chi(int n) {
    TorusTrigPoly p;
    if (n == 0) {
        p.c_[{0, 0}] = 1.0;
    } else {
        p.c_[{0, n}] = 0.5;
        p.c_[{0, -n}] = 0.5;
    }
    return p;
}

TorusTrigPoly TorusTrigPoly::harmonic_sin_chi(int n) {
    TorusTrigPoly p;
    if (n != 0) {
        p.c_[{0, n}] = std::complex<double>(0.0, -0.5);
        p.c_[{0, -n}] = std::complex<double>(0.0, 0.5);
    }
    return p;
}

void TorusTrigPoly::add_term(int m, int n, std::complex<double> c) {
    auto& slot = c_[{m, n}];
    slot += c;
    if (slot == std::complex<double>(0.0)) c_.erase({m, n});
}

TorusTrigPoly TorusTrigPoly::operator+(const TorusTrigPoly& o) const {
    TorusTrigPoly r = *this;
    for (const auto& [k, v] : o.c_) r.add_term(k.first, k.second, v);
    return r;
}

TorusTrigPoly TorusTrigPoly::operator-(const TorusTrigPoly& o) const {
    TorusTrigPoly r = *this;
    for (const auto& [k, v] : o.c_) r.add_term(k.first, k.second, -v);
    return r;
}

TorusTrigPoly TorusTrigPoly::operator*(const TorusTrigPoly& o) const {
    TorusTrigPoly r;
    for (const auto& [ka, va] : c_)
        for (const auto& [kb, vb] : o.c_)
            r.add_term(ka.first + kb.first, ka.second + kb.second, va * vb);
    return r;
}

std::complex<double> TorusTrigPoly::eval_complex(double phi, double chi) const {
    NeumaierComplexSum acc;
    for (const auto& [k, v] : c_) {
        const double arg = k.first * phi + k.second * chi;
        acc.add(v * std::complex<double>(std::cos(arg), std::sin(arg)));
    }
    return acc.value();
}

double TorusTrigPoly::eval(double phi, double chi) const {
    const auto v = eval_complex(phi, chi);
    return v.real();
}

bool TorusTrigPoly::is_real(double tol) const {
    double maxc = 0.0;
    for (const auto& [k, v] : c_) maxc = std::max(maxc, std::abs(v));
    for (const auto& [k, v] : c_) {
        auto it = c_.find({-k.first, -k.second});
        const std::complex<double> mirror =
            (it == c_.end()) ? std::complex<double>(0.0) : it->second;
        if (std::abs(mirror - std::conj(v)) > tol * std::max(1.0, maxc)) return false;
    }
    return true;
}

int TorusTrigPoly::degree_phi() const {
    int d = 0;
    for (const auto& [k, v] : c_) d = std::max(d, std::abs(k.first));
    return d;
}

int TorusTrigPoly::degree_chi() const {
    int d = 0;
    for (const auto& [k, v] : c_) d = std::max(d, std::abs(k.second));
    return d;
}

void TorusTrigPoly::prune(double rel_tol) {
    double maxc = 0.0;
    for (const auto& [k, v] : c_) maxc = std::max(maxc, std::abs(v));
    const double cut = rel_tol * maxc;
    for (auto it = c_.begin(); it != c_.end();) {
        if (std::abs(it->second) <= cut)
            it = c_.erase(it);
        else
            ++it;
    }
}

}  // namespace braidforge
