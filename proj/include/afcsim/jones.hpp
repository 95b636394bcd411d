#pragma once

// Jones calculus on the |H>/|V> basis, with H parallel to the crystals'
// c axis. Passive elements only: norms never grow.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace afcsim {

struct JonesVector {
    std::complex<double> h{0.0, 0.0};
    std::complex<double> v{0.0, 0.0};

    double norm2() const { return std::norm(h) + std::norm(v); }
    double norm() const { return std::sqrt(norm2()); }

    JonesVector normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::domain_error("JonesVector: cannot normalize zero vector");
        return {h / n, v / n};
    }
};

inline std::complex<double> inner(const JonesVector& a, const JonesVector& b) {
    return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

// |<a|b>|^2 for unit vectors: projection fidelity of polarization states.
inline double state_fidelity(const JonesVector& a, const JonesVector& b) {
    const double na = a.norm2(), nb = b.norm2();
    if (na == 0.0 || nb == 0.0) throw std::domain_error("state_fidelity: zero vector");
    return std::norm(inner(a, b)) / (na * nb);
}

namespace pol {
inline const JonesVector H{1.0, 0.0};
inline const JonesVector V{0.0, 1.0};
inline const JonesVector D{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
inline const JonesVector A{1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)};
inline const JonesVector sigma_plus{1.0 / std::sqrt(2.0), std::complex<double>(0.0, 1.0) / std::sqrt(2.0)};
inline const JonesVector sigma_minus{1.0 / std::sqrt(2.0), std::complex<double>(0.0, -1.0) / std::sqrt(2.0)};
} // namespace pol

struct JonesMatrix {
    // row-major: [hh hv; vh vv]
    std::complex<double> hh{1.0, 0.0}, hv{0.0, 0.0}, vh{0.0, 0.0}, vv{1.0, 0.0};

    JonesVector operator*(const JonesVector& s) const {
        return {hh * s.h + hv * s.v, vh * s.h + vv * s.v};
    }
    JonesMatrix operator*(const JonesMatrix& o) const {
        return {hh * o.hh + hv * o.vh, hh * o.hv + hv * o.vv,
                vh * o.hh + vv * o.vh, vh * o.hv + vv * o.vv};
    }
    bool is_unitary(double tol = 1e-12) const {
        const auto a = std::norm(hh) + std::norm(vh);
        const auto b = std::norm(hv) + std::norm(vv);
        const auto c = std::conj(hh) * hv + std::conj(vh) * vv;
        return std::abs(a - 1.0) < tol && std::abs(b - 1.0) < tol && std::abs(c) < tol;
    }
};

inline JonesVector apply_jones(const JonesMatrix& m, const JonesVector& s) { return m * s; }

inline JonesMatrix identity_jones() { return {}; }

// Linear retarder with the given phase between fast and slow axes,
// fast axis at `theta` from H. Unitary by construction.
inline JonesMatrix retarder(double phase_rad, double theta_rad) {
    const std::complex<double> e = std::exp(std::complex<double>(0.0, phase_rad));
    const double c = std::cos(theta_rad), s = std::sin(theta_rad);
    // R(theta) diag(1, e^{i phase}) R(-theta)
    return {c * c + e * s * s, c * s * (1.0 - e),
            c * s * (1.0 - e), s * s + e * c * c};
}

constexpr double pi_v = 3.14159265358979323846;

inline JonesMatrix half_wave_plate(double fast_axis_rad) { return retarder(pi_v, fast_axis_rad); }
inline JonesMatrix quarter_wave_plate(double fast_axis_rad) { return retarder(pi_v / 2.0, fast_axis_rad); }

// Fixed relative phase on V, used for the compensation phase plate.
inline JonesMatrix hv_phase(double phase_rad) {
    return {1.0, 0.0, 0.0, std::exp(std::complex<double>(0.0, phase_rad))};
}

// Idempotent Hermitian projector onto the axis at `theta` from H
// (a PBS output port preceded by nothing).
inline JonesMatrix polarizer(double theta_rad) {
    const double c = std::cos(theta_rad), s = std::sin(theta_rad);
    return {c * c, c * s, c * s, s * s};
}

inline JonesMatrix pbs_h_port() { return polarizer(0.0); }
inline JonesMatrix pbs_v_port() { return polarizer(pi_v / 2.0); }

} // namespace afcsim
