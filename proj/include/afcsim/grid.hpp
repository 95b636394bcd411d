#pragma once

// Frequency/time grids and complex spectra. Everything runs in complex
// baseband around the memory line: frequencies are detunings in GHz, times
// in ns, so 1/GHz = ns and no unit constants appear in the transforms.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fft.hpp"

namespace afcsim {

struct WarningLog {
    std::vector<std::string> messages;
    void add(std::string m) { messages.push_back(std::move(m)); }
    bool empty() const { return messages.empty(); }
};

inline void warn(WarningLog* log, const std::string& m) {
    if (log) log->add(m);
}

// Uniform grid of n points centered on the carrier. Point k sits at
// detuning (k - n/2) * resolution. n must be a power of two, >= 2.
struct FrequencyGrid {
    double center_abs_ghz = 0.0; // absolute carrier, metadata only
    double span_ghz = 4.0;
    std::size_t n_points = 1u << 20;

    FrequencyGrid() = default;
    FrequencyGrid(double span, std::size_t n, double center_abs = 0.0)
        : center_abs_ghz(center_abs), span_ghz(span), n_points(n) {
        validate();
    }

    void validate() const {
        if (n_points < 2 || !detail::is_pow2(n_points))
            throw std::invalid_argument("FrequencyGrid: n_points must be a power of two >= 2");
        if (!(span_ghz > 0.0)) throw std::invalid_argument("FrequencyGrid: span must be positive");
    }

    double resolution_ghz() const { return span_ghz / static_cast<double>(n_points); }
    double time_window_ns() const { return static_cast<double>(n_points) / span_ghz; }
    double time_step_ns() const { return 1.0 / span_ghz; }
    double detuning_at(std::size_t k) const {
        return (static_cast<double>(k) - static_cast<double>(n_points) / 2.0) * resolution_ghz();
    }
    std::size_t index_near(double detuning_ghz) const {
        const double k = detuning_ghz / resolution_ghz() + static_cast<double>(n_points) / 2.0;
        const auto i = static_cast<std::int64_t>(std::llround(k));
        if (i < 0 || i >= static_cast<std::int64_t>(n_points))
            throw std::domain_error("FrequencyGrid: detuning outside grid");
        return static_cast<std::size_t>(i);
    }
    bool contains(double detuning_ghz) const {
        return std::abs(detuning_ghz) <= span_ghz / 2.0;
    }
    bool operator==(const FrequencyGrid& o) const {
        return span_ghz == o.span_ghz && n_points == o.n_points && center_abs_ghz == o.center_abs_ghz;
    }
};

// Complex amplitude per grid point, stored in centered (monotonic detuning)
// order. Immutable by convention: operations return new fields.
struct SpectralField {
    FrequencyGrid grid;
    std::vector<cplx> amplitude;

    SpectralField() = default;
    explicit SpectralField(const FrequencyGrid& g) : grid(g), amplitude(g.n_points, cplx(0.0, 0.0)) {}
    SpectralField(const FrequencyGrid& g, std::vector<cplx> amp) : grid(g), amplitude(std::move(amp)) {
        if (amplitude.size() != grid.n_points)
            throw std::invalid_argument("SpectralField: amplitude size != grid points");
    }

    double energy() const {
        double e = 0.0;
        for (const auto& v : amplitude) e += std::norm(v);
        return e;
    }
};

// Time-domain counterpart. Sample n lives at t = n * dt with the periodic
// wrap at the window end; "negative" times occupy the upper half.
struct TimeTrace {
    FrequencyGrid grid;
    std::vector<cplx> amplitude;

    double time_at(std::size_t n) const { return static_cast<double>(n) * grid.time_step_ns(); }
    double energy() const {
        double e = 0.0;
        for (const auto& v : amplitude) e += std::norm(v);
        return e;
    }
    // Energy inside [t0, t1) ns.
    double energy_in(double t0, double t1) const {
        const double dt = grid.time_step_ns();
        double e = 0.0;
        const auto n = amplitude.size();
        std::size_t i0 = t0 <= 0.0 ? 0 : static_cast<std::size_t>(t0 / dt);
        std::size_t i1 = t1 <= 0.0 ? 0 : static_cast<std::size_t>(t1 / dt);
        if (i1 > n) i1 = n;
        for (std::size_t i = i0; i < i1; ++i) e += std::norm(amplitude[i]);
        return e;
    }
    std::size_t argmax_intensity(double t0, double t1) const {
        const double dt = grid.time_step_ns();
        std::size_t best = static_cast<std::size_t>(t0 / dt);
        double bv = -1.0;
        std::size_t i1 = static_cast<std::size_t>(t1 / dt);
        if (i1 > amplitude.size()) i1 = amplitude.size();
        for (std::size_t i = static_cast<std::size_t>(t0 / dt); i < i1; ++i) {
            const double v = std::norm(amplitude[i]);
            if (v > bv) { bv = v; best = i; }
        }
        return best;
    }
};

// Unitary transforms: energy is identical in both domains.
inline TimeTrace to_time_domain(const SpectralField& f) {
    TimeTrace out;
    out.grid = f.grid;
    out.amplitude = f.amplitude;
    ifftshift(out.amplitude);
    ifft_unitary(out.amplitude);
    return out;
}

inline SpectralField to_frequency_domain(const TimeTrace& t) {
    SpectralField out(t.grid);
    out.amplitude = t.amplitude;
    fft_unitary(out.amplitude);
    fftshift(out.amplitude);
    return out;
}

enum class LineKind { lorentzian, gaussian };

// Real non-negative profile with unit peak at `center` and the requested
// FWHM. Throws if the center is off-grid; warns when the grid cannot
// resolve the line.
inline SpectralField line_shape(LineKind kind, double center_ghz, double fwhm_ghz,
                                const FrequencyGrid& grid, WarningLog* log = nullptr) {
    if (!(fwhm_ghz > 0.0)) throw std::invalid_argument("line_shape: fwhm must be positive");
    if (!grid.contains(center_ghz)) throw std::domain_error("line_shape: center outside grid span");
    if (fwhm_ghz < 2.0 * grid.resolution_ghz())
        warn(log, "line_shape: fwhm under-resolved by grid");
    SpectralField f(grid);
    const double ln2 = 0.69314718055994530942;
    for (std::size_t k = 0; k < grid.n_points; ++k) {
        const double x = grid.detuning_at(k) - center_ghz;
        double v;
        if (kind == LineKind::lorentzian) {
            const double h = fwhm_ghz / 2.0;
            v = h * h / (h * h + x * x);
        } else {
            v = std::exp(-4.0 * ln2 * x * x / (fwhm_ghz * fwhm_ghz));
        }
        f.amplitude[k] = v;
    }
    return f;
}

// Spectral amplitude of a photon wavepacket that starts at t = 0 and decays
// with intensity lifetime tau: E(t) = exp(-t/(2 tau)) e^{-2 pi i d t}, which
// is a Lorentzian line of FWHM 1/(2 pi tau) centered at detuning d.
inline SpectralField exponential_wavepacket(double lifetime_ns, double detuning_ghz,
                                            const FrequencyGrid& grid) {
    if (!(lifetime_ns > 0.0)) throw std::invalid_argument("exponential_wavepacket: lifetime must be positive");
    SpectralField f(grid);
    const double g2 = 1.0 / (2.0 * lifetime_ns); // field decay rate
    constexpr double two_pi = 6.28318530717958647692;
    for (std::size_t k = 0; k < grid.n_points; ++k) {
        const double w = two_pi * (grid.detuning_at(k) - detuning_ghz);
        f.amplitude[k] = 1.0 / cplx(g2, w);
    }
    // unit energy
    const double e = f.energy();
    const double s = 1.0 / std::sqrt(e);
    for (auto& v : f.amplitude) v *= s;
    return f;
}

} // namespace afcsim
