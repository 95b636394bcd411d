#pragma once

// Atomic-frequency-comb memory as a complex linear filter. The absorption
// profile carries a real optical depth D(nu) >= 0; the dispersive part is
// the Kramers-Kronig partner obtained from the causal-kernel construction.
// The field transfer is H(nu) = exp(-D_hat(nu)/2), whose impulse response is
// the transmitted spike at t=0 followed by echoes at multiples of 1/Delta.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "jones.hpp"

namespace afcsim {

struct PumpSequenceSpec {
    double sweep_span_mhz = 100.0;     // AOM sweep per cycle
    double cycle_duration_us = 200.0;
    double comb_period_mhz = 25.0;     // Delta
    double sideband_driver_mhz = 100.0;
    int sideband_orders = 2;           // copies per side; total band = sweep*(2*orders+1)
    double preparation_duration_ms = 11.5;
    double tooth_fwhm_mhz = 8.0;       // realized tooth width (pump-quality limited)

    double bandwidth_mhz() const { return sweep_span_mhz * (2.0 * sideband_orders + 1.0); }
    double storage_time_ns() const { return 1.0e3 / comb_period_mhz; }

    void validate() const {
        if (!(comb_period_mhz > 0.0) || !(sweep_span_mhz > 0.0))
            throw std::invalid_argument("PumpSequenceSpec: frequencies must be positive");
        if (sideband_orders < 0) throw std::invalid_argument("PumpSequenceSpec: negative sideband order");
        if (sideband_driver_mhz != sweep_span_mhz)
            throw std::invalid_argument("PumpSequenceSpec: sideband driver must equal the sweep span so comb copies tile without detuning");
    }
};

struct MaterialSpec {
    double aux_lifetime_ms = 42.9;     // ground/aux state relaxation
    double line_center_nm = 879.7;
    double min_tooth_fwhm_mhz = 0.1;   // technical floor for the pumped teeth
    double peak_depth = 4.2;           // unpumped optical depth at line center
    double background_depth = 0.05;    // un-burnable background d0
    double inhomogeneous_fwhm_ghz = 2.0;

    void validate() const {
        if (!(aux_lifetime_ms > 0.0)) throw std::invalid_argument("MaterialSpec: lifetime must be positive");
        if (peak_depth < 0.0 || background_depth < 0.0)
            throw std::invalid_argument("MaterialSpec: depths must be non-negative");
    }
};

enum class ToothShape { gaussian, lorentzian, square };

struct AbsorptionProfile {
    double comb_period_mhz = 25.0;   // Delta
    double tooth_fwhm_mhz = 8.0;     // gamma
    double peak_depth = 4.2;         // d, tooth peak above background
    double background_depth = 0.05;  // d0
    double bandwidth_mhz = 500.0;
    ToothShape tooth_shape = ToothShape::gaussian;
    double inhomogeneous_fwhm_ghz = 2.0; // envelope of the unpumped line; 0 = flat
    FrequencyGrid grid;
    std::vector<double> depth;       // Re D(nu), centered order

    double finesse() const { return comb_period_mhz / tooth_fwhm_mhz; }
    double storage_time_ns() const { return 1.0e3 / comb_period_mhz; }
};

namespace detail {

inline double tooth_value(ToothShape shape, double x_over_gamma) {
    const double ln2 = 0.69314718055994530942;
    switch (shape) {
        case ToothShape::gaussian:
            return std::exp(-4.0 * ln2 * x_over_gamma * x_over_gamma);
        case ToothShape::lorentzian:
            return 1.0 / (1.0 + 4.0 * x_over_gamma * x_over_gamma);
        case ToothShape::square:
            return std::abs(x_over_gamma) <= 0.5 ? 1.0 : 0.0;
    }
    return 0.0;
}

} // namespace detail

// Sample the comb absorption onto a grid. Teeth of width gamma and peak
// depth d sit every Delta inside the pumped band; outside the band the line
// keeps its full unpumped depth (times the inhomogeneous envelope).
inline AbsorptionProfile sample_comb(double comb_period_mhz, double tooth_fwhm_mhz, double peak_depth,
                                     double background_depth, double bandwidth_mhz, ToothShape shape,
                                     double inhomogeneous_fwhm_ghz, const FrequencyGrid& grid) {
    AbsorptionProfile p;
    p.comb_period_mhz = comb_period_mhz;
    p.tooth_fwhm_mhz = tooth_fwhm_mhz;
    p.peak_depth = peak_depth;
    p.background_depth = background_depth;
    p.bandwidth_mhz = bandwidth_mhz;
    p.tooth_shape = shape;
    p.inhomogeneous_fwhm_ghz = inhomogeneous_fwhm_ghz;
    p.grid = grid;
    p.depth.resize(grid.n_points);

    const double delta = comb_period_mhz * 1e-3;  // GHz
    const double gamma = tooth_fwhm_mhz * 1e-3;
    const double half_band = bandwidth_mhz * 0.5e-3;
    const double ln2 = 0.69314718055994530942;
    for (std::size_t k = 0; k < grid.n_points; ++k) {
        const double nu = grid.detuning_at(k);
        double env = 1.0;
        if (inhomogeneous_fwhm_ghz > 0.0)
            env = std::exp(-4.0 * ln2 * nu * nu / (inhomogeneous_fwhm_ghz * inhomogeneous_fwhm_ghz));
        if (std::abs(nu) <= half_band) {
            const double n_near = std::round(nu / delta);
            double teeth = 0.0;
            for (int off = -3; off <= 3; ++off) {
                const double x = (nu - (n_near + off) * delta) / gamma;
                teeth += detail::tooth_value(shape, x);
            }
            p.depth[k] = peak_depth * env * std::min(teeth, 1.0) + background_depth;
        } else {
            p.depth[k] = peak_depth * env + background_depth;
        }
    }
    return p;
}

// Build the comb the pump sequence produces. Delta must tile the sweep span;
// tooth width below the material floor is clamped with a warning.
inline AbsorptionProfile prepare_comb(const PumpSequenceSpec& pump, const MaterialSpec& material,
                                      const FrequencyGrid& grid, WarningLog* log = nullptr) {
    pump.validate();
    material.validate();
    const double teeth_per_sweep = pump.sweep_span_mhz / pump.comb_period_mhz;
    if (std::abs(teeth_per_sweep - std::round(teeth_per_sweep)) > 1e-9)
        throw std::invalid_argument("prepare_comb: comb period must divide the sweep span");
    double gamma = pump.tooth_fwhm_mhz;
    if (gamma < material.min_tooth_fwhm_mhz) {
        warn(log, "prepare_comb: tooth width clamped to material floor");
        gamma = material.min_tooth_fwhm_mhz;
    }
    return sample_comb(pump.comb_period_mhz, gamma, material.peak_depth, material.background_depth,
                       pump.bandwidth_mhz(), ToothShape::gaussian, material.inhomogeneous_fwhm_ghz, grid);
}

// Complex amplitude transfer H(nu) = exp(-D_hat/2) with the causal phase.
inline SpectralField memory_transfer_function(const AbsorptionProfile& profile) {
    if (profile.depth.size() != profile.grid.n_points)
        throw std::invalid_argument("memory_transfer_function: profile not sampled");
    const auto Dc = causal_complex_spectrum(profile.depth);
    SpectralField H(profile.grid);
    for (std::size_t k = 0; k < Dc.size(); ++k)
        H.amplitude[k] = std::exp(-0.5 * Dc[k]);
    return H;
}

// Kramers-Kronig partner of the sampled depth (for dumps and tests).
inline std::vector<cplx> complex_depth(const AbsorptionProfile& profile) {
    return causal_complex_spectrum(profile.depth);
}

struct SandwichSpec {
    double depth_share_h = 0.8;        // fraction of the comb depth seen by |H> per strong pass
    double depth_share_v = 0.2;        // weak-axis share; shares sum to 1 for identical crystals
    double inter_crystal_phase_rad = 0.0; // birefringent H/V phase between the crystals
    double hwp_angle_rad = pi_v / 4.0; // 45 deg nominal
    double crystal2_depth_scale = 1.0; // mismatch knob; 1 = identical crystals

    void validate() const {
        if (!(depth_share_h > depth_share_v) || depth_share_v < 0.0)
            throw std::invalid_argument("SandwichSpec: need depth_h > depth_v >= 0");
    }
};

// Jones-resolved transfer of the two-crystal sandwich. Each polarization
// component makes exactly one strong-absorption pass: crystal1 acts with
// (H,V) depths, the mid HWP swaps the components, crystal2 acts again. The
// output port folds the deterministic swap back (the phase plate and
// analyzer orientation absorb it in the experiment), so an ideal sandwich
// returns the input polarization for every input state.
struct SandwichTransfer {
    SpectralField hh, hv, vh, vv; // full 2x2 amplitude transfer per frequency
};

inline SandwichTransfer sandwich_transfer(const AbsorptionProfile& profile, const SandwichSpec& sw) {
    sw.validate();
    const auto Dc = causal_complex_spectrum(profile.depth);
    SandwichTransfer T{SpectralField(profile.grid), SpectralField(profile.grid),
                       SpectralField(profile.grid), SpectralField(profile.grid)};
    const double c2 = std::cos(2.0 * sw.hwp_angle_rad);
    const double s2 = std::sin(2.0 * sw.hwp_angle_rad);
    const cplx ph = std::exp(cplx(0.0, sw.inter_crystal_phase_rad));
    for (std::size_t k = 0; k < Dc.size(); ++k) {
        const cplx a1 = std::exp(-0.5 * sw.depth_share_h * Dc[k]);
        const cplx b1 = std::exp(-0.5 * sw.depth_share_v * Dc[k]);
        const cplx a2 = std::exp(-0.5 * sw.depth_share_h * sw.crystal2_depth_scale * Dc[k]);
        const cplx b2 = std::exp(-0.5 * sw.depth_share_v * sw.crystal2_depth_scale * Dc[k]);
        // M0 = diag(a2, b2 ph) * [[c2, s2],[s2, -c2]] * diag(a1, b1)
        const cplx m00 = a2 * c2 * a1;
        const cplx m01 = a2 * s2 * b1;
        const cplx m10 = b2 * ph * s2 * a1;
        const cplx m11 = -b2 * ph * c2 * b1;
        // output relabel X * M0
        T.hh.amplitude[k] = m10;
        T.hv.amplitude[k] = m11;
        T.vh.amplitude[k] = m00;
        T.vv.amplitude[k] = m01;
    }
    return T;
}

struct StoreRetrieveResult {
    TimeTrace trace_h;
    TimeTrace trace_v;
    double input_energy = 0.0;
    double transmitted_energy = 0.0;
    double echo_energy = 0.0;        // first-order window (0.5/Delta, 1.5/Delta)
    double second_echo_energy = 0.0; // (1.5/Delta, 2.5/Delta)
    JonesVector echo_polarization;   // at the echo maximum
    double echo_peak_time_ns = 0.0;
};

// Propagate an input field through the comb (optionally the polarization
// sandwich) and report the windowed energies. Polarization components share
// the same scalar profile for the ideal sandwich.
inline StoreRetrieveResult store_retrieve(const SpectralField& input, const AbsorptionProfile& profile,
                                          const std::optional<SandwichSpec>& sandwich,
                                          const JonesVector& input_polarization,
                                          WarningLog* log = nullptr) {
    if (!(input.grid == profile.grid))
        throw std::invalid_argument("store_retrieve: input and profile grids differ");
    // warn when input spectral content leaks past the comb band
    {
        const double half_band = profile.bandwidth_mhz * 0.5e-3;
        double inside = 0.0, total = 0.0;
        for (std::size_t k = 0; k < input.amplitude.size(); ++k) {
            const double e = std::norm(input.amplitude[k]);
            total += e;
            if (std::abs(input.grid.detuning_at(k)) <= half_band) inside += e;
        }
        if (total > 0.0 && inside / total < 0.9)
            warn(log, "store_retrieve: input band exceeds comb bandwidth; uncombed content passes unstored");
    }

    StoreRetrieveResult r;
    r.input_energy = input.energy() * input_polarization.norm2();

    SpectralField fh(profile.grid), fv(profile.grid);
    if (sandwich) {
        const auto T = sandwich_transfer(profile, *sandwich);
        for (std::size_t k = 0; k < input.amplitude.size(); ++k) {
            const cplx e = input.amplitude[k];
            fh.amplitude[k] = e * (T.hh.amplitude[k] * input_polarization.h +
                                   T.hv.amplitude[k] * input_polarization.v);
            fv.amplitude[k] = e * (T.vh.amplitude[k] * input_polarization.h +
                                   T.vv.amplitude[k] * input_polarization.v);
        }
    } else {
        const auto th = memory_transfer_function(profile);
        for (std::size_t k = 0; k < input.amplitude.size(); ++k) {
            fh.amplitude[k] = input.amplitude[k] * input_polarization.h * th.amplitude[k];
            fv.amplitude[k] = input.amplitude[k] * input_polarization.v * th.amplitude[k];
        }
    }
    r.trace_h = to_time_domain(fh);
    r.trace_v = to_time_domain(fv);

    const double T_storage = profile.storage_time_ns();
    const double mid = 0.5 * T_storage;
    auto window_energy = [&](double t0, double t1) {
        return r.trace_h.energy_in(t0, t1) + r.trace_v.energy_in(t0, t1);
    };
    r.transmitted_energy = window_energy(0.0, mid);
    r.echo_energy = window_energy(mid, mid + T_storage);
    r.second_echo_energy = window_energy(mid + T_storage, mid + 2.0 * T_storage);

    // echo polarization read off at the echo intensity maximum
    std::size_t best = 0;
    double bv = -1.0;
    const double dt = profile.grid.time_step_ns();
    const auto i0 = static_cast<std::size_t>(mid / dt);
    const auto i1 = std::min(static_cast<std::size_t>((mid + T_storage) / dt), r.trace_h.amplitude.size());
    for (std::size_t i = i0; i < i1; ++i) {
        const double v = std::norm(r.trace_h.amplitude[i]) + std::norm(r.trace_v.amplitude[i]);
        if (v > bv) { bv = v; best = i; }
    }
    r.echo_peak_time_ns = static_cast<double>(best) * dt;
    r.echo_polarization = {r.trace_h.amplitude[best], r.trace_v.amplitude[best]};
    return r;
}

// Closed-form first-echo efficiency for gaussian teeth:
//   eta = dt^2 exp(-dt) exp(-7/F^2) exp(-d0),  dt = (d/F) sqrt(pi/(4 ln 2)).
inline double echo_efficiency_analytic(const AbsorptionProfile& profile) {
    if (profile.tooth_shape != ToothShape::gaussian)
        throw std::invalid_argument("echo_efficiency_analytic: gaussian teeth only; use the numeric path");
    const double F = profile.finesse();
    const double ln2 = 0.69314718055994530942;
    const double dt = (profile.peak_depth / F) * std::sqrt(pi_v / (4.0 * ln2));
    return dt * dt * std::exp(-dt) * std::exp(-7.0 / (F * F)) * std::exp(-profile.background_depth);
}

inline double echo_efficiency_analytic(double peak_depth, double finesse, double background_depth) {
    const double ln2 = 0.69314718055994530942;
    const double dt = (peak_depth / finesse) * std::sqrt(pi_v / (4.0 * ln2));
    return dt * dt * std::exp(-dt) * std::exp(-7.0 / (finesse * finesse)) * std::exp(-background_depth);
}

// First-echo efficiency measured on the Fourier path with a narrowband
// gaussian probe well inside the comb band.
inline double echo_efficiency_numeric(const AbsorptionProfile& profile, double probe_fwhm_ghz = 0.1) {
    SpectralField probe(profile.grid);
    const double ln2 = 0.69314718055994530942;
    for (std::size_t k = 0; k < profile.grid.n_points; ++k) {
        const double nu = profile.grid.detuning_at(k);
        probe.amplitude[k] = std::exp(-2.0 * ln2 * nu * nu / (probe_fwhm_ghz * probe_fwhm_ghz));
    }
    const auto r = store_retrieve(probe, profile, std::nullopt, pol::H, nullptr);
    return r.echo_energy / r.input_energy;
}

// Relax the comb toward its in-band mean: contrast scales by
// exp(-elapsed/T1) while the mean absorption is preserved.
inline AbsorptionProfile comb_decay(const AbsorptionProfile& profile, double elapsed_ms,
                                    const MaterialSpec& material) {
    if (elapsed_ms < 0.0) throw std::invalid_argument("comb_decay: negative elapsed time");
    if (elapsed_ms == 0.0) return profile;
    AbsorptionProfile out = profile;
    const double k = std::exp(-elapsed_ms / material.aux_lifetime_ms);
    const double half_band = profile.bandwidth_mhz * 0.5e-3;
    double mean = 0.0;
    std::size_t n_in = 0;
    for (std::size_t i = 0; i < profile.depth.size(); ++i) {
        if (std::abs(profile.grid.detuning_at(i)) <= half_band) {
            mean += profile.depth[i];
            ++n_in;
        }
    }
    if (n_in == 0) return out;
    mean /= static_cast<double>(n_in);
    for (std::size_t i = 0; i < profile.depth.size(); ++i) {
        if (std::abs(profile.grid.detuning_at(i)) <= half_band)
            out.depth[i] = mean + (profile.depth[i] - mean) * k;
    }
    return out;
}

// Contrast relaxation factor after `elapsed`; echo efficiency scales as its
// square under the mean-preserving decay model.
inline double comb_contrast_factor(double elapsed_ms, const MaterialSpec& material) {
    return std::exp(-elapsed_ms / material.aux_lifetime_ms);
}

} // namespace afcsim
