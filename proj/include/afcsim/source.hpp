#pragma once

// Quantum-dot source model: pulsed deterministic single-photon emitter with
// measured lifetime, spectrally diffused line, heating-based wavelength
// tuning and trion polarization statistics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "jones.hpp"
#include "rng.hpp"

namespace afcsim {

enum class HeatingLaser { nm910, nm1550 };

struct HeatingAnchor {
    double power_mw = 0.0;
    double wavelength_nm = 0.0;
};

enum class SourceStatistics { single_photon, poissonian };

struct EmitterSpec {
    double lifetime_ns = 0.849;
    double intrinsic_center_nm = 879.5;     // emission at zero heating power
    double diffusion_fwhm_ghz = 25.0;       // spectrally diffused linewidth
    double power_law_slope = 1.235;
    double cw_count_rate_per_s = 5.0e5;
    double pol_weight_a1 = 1.0;             // analyzer-chain weights, A2/A1 = 0.801 measured
    double pol_weight_a2 = 0.801;
    std::vector<HeatingAnchor> heating_910;  // monotone non-decreasing wavelength vs power
    std::vector<HeatingAnchor> heating_1550;
    SourceStatistics statistics = SourceStatistics::single_photon;
    double poisson_mean_per_pulse = 0.0;     // only for poissonian statistics

    static EmitterSpec paper_defaults() {
        EmitterSpec s;
        s.heating_910 = {{0.0, 879.5}, {24.0, 879.7}};
        s.heating_1550 = {{0.0, 879.5}, {300.0, 879.7}};
        return s;
    }

    double natural_linewidth_ghz() const { return 1.0 / (2.0 * pi_v * lifetime_ns); }

    void validate() const {
        if (!(lifetime_ns > 0.0)) throw std::invalid_argument("EmitterSpec: lifetime must be positive");
        if (diffusion_fwhm_ghz < natural_linewidth_ghz())
            throw std::invalid_argument("EmitterSpec: diffused linewidth below natural linewidth");
        if (!(power_law_slope > 0.0)) throw std::invalid_argument("EmitterSpec: power-law slope must be positive");
        if (pol_weight_a1 < 0.0 || pol_weight_a2 < 0.0)
            throw std::invalid_argument("EmitterSpec: polarization weights must be non-negative");
        for (const auto* cal : {&heating_910, &heating_1550}) {
            for (std::size_t i = 1; i < cal->size(); ++i) {
                if ((*cal)[i].power_mw <= (*cal)[i - 1].power_mw)
                    throw std::invalid_argument("EmitterSpec: heating anchors must have increasing power");
                if ((*cal)[i].wavelength_nm < (*cal)[i - 1].wavelength_nm)
                    throw std::invalid_argument("EmitterSpec: heating shifts red only");
            }
        }
    }
};

struct ExcitationPulseSpec {
    double pulse_width_ns = 0.8;     // T_expw
    double period_ns = 400.0;        // T_period
    std::size_t n_modes = 1;
    double mode_separation_ns = 4.8;
    double excitation_probability = 1.0;

    void validate(double retrieval_window_ns = 0.0) const {
        if (!(pulse_width_ns > 0.0) || !(period_ns > 0.0))
            throw std::invalid_argument("ExcitationPulseSpec: widths must be positive");
        if (n_modes == 0) throw std::invalid_argument("ExcitationPulseSpec: n_modes must be >= 1");
        if (excitation_probability < 0.0 || excitation_probability > 1.0)
            throw std::invalid_argument("ExcitationPulseSpec: probability outside [0,1]");
        if (n_modes > 1 && retrieval_window_ns > 0.0 &&
            static_cast<double>(n_modes) * mode_separation_ns > retrieval_window_ns)
            throw std::invalid_argument("ExcitationPulseSpec: modes do not fit the retrieval window");
    }
};

struct PhotonRecord {
    double timestamp_ns = 0.0;       // excitation instant + exponential delay
    double excitation_ns = 0.0;      // start of the wavepacket
    std::uint64_t pulse_index = 0;
    std::uint32_t mode_index = 0;
    double detuning_ghz = 0.0;       // static per-photon detuning from the diffused line
    JonesVector polarization;
};

// Piecewise-linear heating curve through the measured anchors; extrapolation
// continues the last segment's slope. Red shift only.
inline double emission_wavelength(double heating_power_mw, HeatingLaser laser, const EmitterSpec& spec) {
    if (heating_power_mw < 0.0) throw std::domain_error("emission_wavelength: negative heating power");
    const auto& cal = laser == HeatingLaser::nm910 ? spec.heating_910 : spec.heating_1550;
    if (cal.size() < 2) throw std::invalid_argument("emission_wavelength: need >= 2 anchors");
    std::size_t i = 1;
    while (i + 1 < cal.size() && heating_power_mw > cal[i].power_mw) ++i;
    const auto& a = cal[i - 1];
    const auto& b = cal[i];
    const double t = (heating_power_mw - a.power_mw) / (b.power_mw - a.power_mw);
    const double wl = a.wavelength_nm + t * (b.wavelength_nm - a.wavelength_nm);
    return std::max(wl, spec.intrinsic_center_nm);
}

inline double relative_intensity(double excitation_power_mw, double reference_power_mw,
                                 const EmitterSpec& spec) {
    if (!(excitation_power_mw > 0.0) || !(reference_power_mw > 0.0))
        throw std::domain_error("relative_intensity: powers must be positive");
    return std::pow(excitation_power_mw / reference_power_mw, spec.power_law_slope);
}

inline double natural_linewidth_ghz(const EmitterSpec& spec) { return spec.natural_linewidth_ghz(); }

// Polarization-dependent detected intensity of the sigma+/- trion mixture.
// Without a QWP the spectrum is flat in analyzer angle; with the QWP it
// follows A1 cos^2(theta-theta0) + A2 sin^2(theta-theta0).
inline double polarized_detection_intensity(double polarizer_angle_rad, bool qwp_present,
                                            double qwp_offset_rad, const EmitterSpec& spec) {
    if (!qwp_present) return 0.5 * (spec.pol_weight_a1 + spec.pol_weight_a2);
    const double c = std::cos(polarizer_angle_rad - qwp_offset_rad);
    const double s = std::sin(polarizer_angle_rad - qwp_offset_rad);
    return spec.pol_weight_a1 * c * c + spec.pol_weight_a2 * s * s;
}

// Emit a photon train. One Bernoulli trial per excitation pulse (and mode):
// at most one photon per pulse in the single-photon regime. Excitation time
// is uniform across the square drive pulse; the radiative delay is
// exponential; the detuning is drawn from the diffused line; polarization is
// an even sigma+/- mixture.
inline std::vector<PhotonRecord> emit_train(const ExcitationPulseSpec& pulses, const EmitterSpec& spec,
                                            std::uint64_t n_pulses, Rng rng) {
    pulses.validate();
    spec.validate();
    std::vector<PhotonRecord> out;
    const double sigma_det = spec.diffusion_fwhm_ghz / 2.3548200450309493;
    const bool poissonian = spec.statistics == SourceStatistics::poissonian;
    for (std::uint64_t k = 0; k < n_pulses; ++k) {
        for (std::uint32_t m = 0; m < pulses.n_modes; ++m) {
            const double t0 = static_cast<double>(k) * pulses.period_ns +
                              static_cast<double>(m) * pulses.mode_separation_ns;
            std::uint64_t n_phot = 0;
            if (poissonian) {
                n_phot = rng.poisson(spec.poisson_mean_per_pulse);
            } else {
                n_phot = rng.bernoulli(pulses.excitation_probability) ? 1 : 0;
            }
            for (std::uint64_t p = 0; p < n_phot; ++p) {
                PhotonRecord r;
                r.pulse_index = k;
                r.mode_index = m;
                r.excitation_ns = t0 + rng.uniform(0.0, pulses.pulse_width_ns);
                r.timestamp_ns = r.excitation_ns + rng.exponential(spec.lifetime_ns);
                r.detuning_ghz = rng.gaussian(0.0, sigma_det);
                r.polarization = rng.bernoulli(0.5) ? pol::sigma_plus : pol::sigma_minus;
                out.push_back(r);
            }
        }
    }
    return out;
}

} // namespace afcsim
