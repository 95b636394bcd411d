#pragma once

// Radix-2 FFT and helpers used by the spectral substrate. Self-contained so
// the library stays header-only; sizes are restricted to powers of two.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace afcsim {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative in-place Cooley-Tukey, decimation in time.
// sign = -1: forward (freq analysis), sign = +1: inverse kernel (no 1/N).
inline void fft_inplace(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
    if (n < 2) return;

    // bit reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    constexpr double pi = 3.14159265358979323846;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * pi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

} // namespace detail

// Unitary transform pair: both directions scale by 1/sqrt(N), so
// sum |x|^2 is preserved exactly up to rounding.
inline void fft_unitary(std::vector<cplx>& a) {
    detail::fft_inplace(a, -1);
    const double s = 1.0 / std::sqrt(static_cast<double>(a.size()));
    for (auto& v : a) v *= s;
}

inline void ifft_unitary(std::vector<cplx>& a) {
    detail::fft_inplace(a, +1);
    const double s = 1.0 / std::sqrt(static_cast<double>(a.size()));
    for (auto& v : a) v *= s;
}

// Swap halves so index N/2 (grid center) moves to index 0.
inline void ifftshift(std::vector<cplx>& a) {
    const std::size_t h = a.size() / 2;
    for (std::size_t i = 0; i < h; ++i) std::swap(a[i], a[i + h]);
}

inline void fftshift(std::vector<cplx>& a) { ifftshift(a); } // even sizes only

// Discrete Hilbert pair: given samples of a real spectrum R(f) in centered
// order, return the complex spectrum whose time kernel is causal (one-sided)
// and whose real part reproduces R. This is the Kramers-Kronig construction
// used for absorption profiles.
inline std::vector<cplx> causal_complex_spectrum(const std::vector<double>& real_centered) {
    const std::size_t n = real_centered.size();
    if (!detail::is_pow2(n)) throw std::invalid_argument("causal_complex_spectrum: power-of-two size required");
    std::vector<cplx> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = real_centered[i];
    ifftshift(a);
    detail::fft_inplace(a, +1); // to time kernel (unnormalized)
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& v : a) v *= inv_n;
    // keep t>=0 half, double interior, zero the negative-time half
    a[0] *= 1.0;
    for (std::size_t i = 1; i < n / 2; ++i) a[i] *= 2.0;
    // leave the Nyquist sample as is; halves shared between +/- time
    for (std::size_t i = n / 2 + 1; i < n; ++i) a[i] = 0.0;
    detail::fft_inplace(a, -1); // back to frequency
    fftshift(a);
    return a;
}

} // namespace afcsim
