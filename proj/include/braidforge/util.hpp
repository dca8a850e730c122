#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace braidforge {

inline constexpr double kTau = 2.0 * std::numbers::pi;

// Reduce an angle to [0, 2*pi).
inline double wrap_angle(double t) {
    double r = std::fmod(t, kTau);
    if (r < 0.0) r += kTau;
    // fmod can return kTau - ulp; snap that back to 0.
    if (r >= kTau) r -= kTau;
    return r;
}

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

// Compensated (Neumaier) accumulator: keeps a running correction term so that
// long alternating sums of large terms do not lose the small residual.
class NeumaierSum {
  public:
    void add(double v) {
        double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class NeumaierComplexSum {
  public:
    void add(std::complex<double> v) {
        re_.add(v.real());
        im_.add(v.imag());
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

  private:
    NeumaierSum re_, im_;
};

// Deterministic RNG: one stream per (seed, salt) pair so retries and parallel
// call sites stay reproducible independent of evaluation order.
inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t salt) {
    std::seed_seq seq{seed, salt};
    return std::mt19937_64(seq);
}

}  // namespace braidforge
