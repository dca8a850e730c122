#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "braidforge/util.hpp"

namespace braidforge {

// Real trigonometric polynomial a0 + sum_k (a_k cos(k t) + b_k sin(k t)).
class TrigPoly {
  public:
    TrigPoly() = default;
    explicit TrigPoly(double constant) : a0_(constant) {}

    static TrigPoly harmonic_cos(int k, double a);
    static TrigPoly harmonic_sin(int k, double b);

    int degree() const { return static_cast<int>(cos_.size()); }
    double constant_term() const { return a0_; }
    double cos_coeff(int k) const;  // k >= 1
    double sin_coeff(int k) const;
    void set_constant(double v) { a0_ = v; }
    void set_cos(int k, double v);
    void set_sin(int k, double v);

    double eval(double t) const;
    TrigPoly derivative() const;

    TrigPoly& operator+=(const TrigPoly& o);
    TrigPoly& operator-=(const TrigPoly& o);
    TrigPoly& operator*=(double s);
    TrigPoly operator+(const TrigPoly& o) const;
    TrigPoly operator-(const TrigPoly& o) const;
    TrigPoly operator*(double s) const;
    TrigPoly operator*(const TrigPoly& o) const;  // exact product, degree adds

    double max_abs_coeff() const;
    // Drop trailing harmonics whose coefficients are below tol * max_abs_coeff.
    void trim(double rel_tol = 1e-12);

    // Complex spectrum c_{-d}..c_d with f(t) = sum c_k e^{ikt}; index k+d.
    std::vector<std::complex<double>> spectrum() const;
    static TrigPoly from_spectrum(const std::vector<std::complex<double>>& c);

  private:
    double a0_ = 0.0;
    std::vector<double> cos_;  // cos_[k-1] * cos((k) t)
    std::vector<double> sin_;

    void ensure(int k);
};

// Minimum-norm trigonometric interpolation through (angle, value) pairs.
// Harmonics up to ceil((N-1)/2); for even N the square-free system is solved
// in least-norm form so the top harmonic is determined by the data alone.
// Throws std::invalid_argument on duplicate angles (distance < 1e-9 mod 2*pi)
// and std::runtime_error when the system's condition number exceeds 1e12.
TrigPoly trig_interpolate(const std::vector<double>& angles,
                          const std::vector<double>& values);

struct HermiteNode {
    double angle = 0.0;
    double value = 0.0;
    double slope = 0.0;
};

// Trigonometric Hermite interpolation matching value and first derivative at
// each node. Exact construction from the squared-sine cardinal basis.
TrigPoly trig_hermite_interpolate(const std::vector<HermiteNode>& nodes);

// Bivariate trigonometric polynomial on the torus, stored as a sparse complex
// spectrum c_{m,n} e^{i(m phi + n chi)}.
class TorusTrigPoly {
  public:
    using Key = std::pair<int, int>;

    TorusTrigPoly() = default;
    explicit TorusTrigPoly(double constant);

    static TorusTrigPoly from_phi_poly(const TrigPoly& f);
    static TorusTrigPoly harmonic_cos_chi(int n);
    static TorusTrigPoly harmonic_sin_chi(int n);

    void add_term(int m, int n, std::complex<double> c);
    const std::map<Key, std::complex<double>>& terms() const { return c_; }

    TorusTrigPoly operator+(const TorusTrigPoly& o) const;
    TorusTrigPoly operator-(const TorusTrigPoly& o) const;
    TorusTrigPoly operator*(const TorusTrigPoly& o) const;

    std::complex<double> eval_complex(double phi, double chi) const;
    double eval(double phi, double chi) const;  // requires near-real value
    bool is_real(double tol = 1e-9) const;      // hermitian-symmetric spectrum
    int degree_phi() const;
    int degree_chi() const;
    void prune(double rel_tol = 1e-14);

  private:
    std::map<Key, std::complex<double>> c_;
};

}  // namespace braidforge
