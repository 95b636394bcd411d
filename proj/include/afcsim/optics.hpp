#pragma once

// Passive optics between the dot and the detector: etalons (lossy
// Fabry-Perot with the physical Airy phase), the DBR cavity weighting, the
// broadband bandpass filter, fiber loss and the wetting-layer background
// leakage integral.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "jones.hpp"

namespace afcsim {

struct EtalonSpec {
    double fsr_ghz = 50.0;
    double bandwidth_ghz = 0.7;
    double peak_transmission = 0.95;
    double lock_detuning_ghz = 0.0; // offset of the nearest peak from the memory line

    void validate() const {
        if (!(bandwidth_ghz > 0.0) || !(bandwidth_ghz < fsr_ghz))
            throw std::invalid_argument("EtalonSpec: need 0 < bandwidth < FSR");
        if (!(peak_transmission > 0.0) || peak_transmission > 1.0)
            throw std::invalid_argument("EtalonSpec: peak transmission outside (0,1]");
    }
    double finesse() const { return fsr_ghz / bandwidth_ghz; }
    // Mirror reflectivity solving finesse = pi sqrt(R)/(1-R).
    double mirror_reflectivity() const {
        const double f = finesse();
        const double s = (std::sqrt(pi_v * pi_v + 4.0 * f * f) - pi_v) / (2.0 * f);
        return s * s;
    }
};

struct CavitySpec {
    double center_nm = 880.0;
    double fwhm_nm = 3.0;

    double q_factor() const { return center_nm / fwhm_nm; }
    void validate() const {
        if (!(fwhm_nm > 0.0)) throw std::invalid_argument("CavitySpec: fwhm must be positive");
    }
};

struct BackgroundSpec {
    double wetting_center_nm = 860.0;
    double wetting_fwhm_nm = 25.0;
    double relative_power_density_per_ghz = 0.0; // vs in-band signal power

    void validate() const {
        if (relative_power_density_per_ghz < 0.0)
            throw std::invalid_argument("BackgroundSpec: density must be non-negative");
    }
};

// Complex amplitude transmission of a lossy Fabry-Perot at the given
// detuning from the memory line. |t|^2 is the Airy function
// T_peak / (1 + (2F/pi)^2 sin^2(pi delta / FSR)).
inline std::complex<double> etalon_transfer(double detuning_ghz, const EtalonSpec& e) {
    e.validate();
    const double R = e.mirror_reflectivity();
    const double beta = pi_v * (detuning_ghz - e.lock_detuning_ghz) / e.fsr_ghz;
    const std::complex<double> num = (1.0 - R) * std::exp(std::complex<double>(0.0, beta));
    const std::complex<double> den = 1.0 - R * std::exp(std::complex<double>(0.0, 2.0 * beta));
    // |t|^2 = T_peak / (1 + (2F/pi)^2 sin^2(beta)); the phase is the
    // physical single-cavity response.
    return std::sqrt(e.peak_transmission) * num / den;
}

// A scalar chain element: anything polarization-independent.
struct ChainElement {
    enum class Kind { etalon, bandpass, cavity, attenuator } kind = Kind::attenuator;
    EtalonSpec etalon;
    // bandpass: super-gaussian in absolute wavelength
    double band_center_nm = 879.7;
    double band_fwhm_nm = 20.0;
    double band_transmission = 0.99;
    int band_order = 2;
    CavitySpec cavity;
    double attenuation = 1.0; // power transmission for attenuator kind
    std::string label;
};

// Conversions around the working point. Detunings are GHz offsets from the
// memory line at `line_nm`.
inline double nm_to_detuning_ghz(double wavelength_nm, double line_nm = 879.7) {
    const double c_nm_ghz = 2.99792458e8; // c in nm*GHz
    return c_nm_ghz / wavelength_nm - c_nm_ghz / line_nm;
}
inline double detuning_ghz_to_nm(double detuning_ghz, double line_nm = 879.7) {
    const double c_nm_ghz = 2.99792458e8;
    return c_nm_ghz / (c_nm_ghz / line_nm + detuning_ghz);
}

inline std::complex<double> element_transfer(double detuning_ghz, const ChainElement& el,
                                             double line_nm = 879.7) {
    using Kind = ChainElement::Kind;
    switch (el.kind) {
        case Kind::etalon:
            return etalon_transfer(detuning_ghz, el.etalon);
        case Kind::bandpass: {
            const double wl = detuning_ghz_to_nm(detuning_ghz, line_nm);
            const double x = 2.0 * (wl - el.band_center_nm) / el.band_fwhm_nm;
            const double ln2 = 0.69314718055994530942;
            const double p = std::pow(x * x, el.band_order);
            return std::sqrt(el.band_transmission * std::exp(-ln2 * p));
        }
        case Kind::cavity: {
            const double wl = detuning_ghz_to_nm(detuning_ghz, line_nm);
            const double h = el.cavity.fwhm_nm / 2.0;
            const double x = wl - el.cavity.center_nm;
            return std::sqrt(h * h / (h * h + x * x));
        }
        case Kind::attenuator:
            return std::sqrt(el.attenuation);
    }
    return 1.0;
}

// Product of the element transfers. Scalar elements commute, so the order
// only matters for bookkeeping.
inline std::complex<double> filter_chain_transfer(double detuning_ghz,
                                                  const std::vector<ChainElement>& elements,
                                                  double line_nm = 879.7) {
    if (elements.empty()) throw std::invalid_argument("filter_chain_transfer: empty chain");
    std::complex<double> t(1.0, 0.0);
    for (const auto& el : elements) t *= element_transfer(detuning_ghz, el, line_nm);
    return t;
}

// Integrated wetting-layer leakage through the chain, relative to the
// in-band signal. Brute-force integral of the background density times the
// chain power transmission over the wetting band.
inline double background_leakage_rate(const BackgroundSpec& b, const std::vector<ChainElement>& chain,
                                      double line_nm = 879.7, double step_ghz = 0.01) {
    b.validate();
    bool has_etalon = false;
    for (const auto& el : chain) has_etalon |= el.kind == ChainElement::Kind::etalon;
    if (!has_etalon) throw std::invalid_argument("background_leakage_rate: chain needs an etalon");
    if (b.relative_power_density_per_ghz == 0.0) return 0.0;

    const double center = nm_to_detuning_ghz(b.wetting_center_nm, line_nm);
    const double fwhm = std::abs(nm_to_detuning_ghz(b.wetting_center_nm + b.wetting_fwhm_nm / 2.0, line_nm) -
                                 nm_to_detuning_ghz(b.wetting_center_nm - b.wetting_fwhm_nm / 2.0, line_nm));
    const double ln2 = 0.69314718055994530942;
    // Integrate over +-3 fwhm of the wetting line, in chunks aligned with
    // etalon peaks would be cheaper; dense sampling keeps this an oracle.
    const double lo = center - 3.0 * fwhm;
    const double hi = center + 3.0 * fwhm;
    double acc = 0.0;
    const std::size_t n = static_cast<std::size_t>((hi - lo) / step_ghz);
    for (std::size_t i = 0; i < n; ++i) {
        const double nu = lo + (static_cast<double>(i) + 0.5) * step_ghz;
        const double w = std::exp(-4.0 * ln2 * (nu - center) * (nu - center) / (fwhm * fwhm));
        acc += w * std::norm(filter_chain_transfer(nu, chain, line_nm));
    }
    return b.relative_power_density_per_ghz * acc * step_ghz;
}

enum class WaveplateKind { half, quarter };

inline JonesMatrix waveplate(WaveplateKind kind, double fast_axis_rad) {
    return kind == WaveplateKind::half ? half_wave_plate(fast_axis_rad)
                                       : quarter_wave_plate(fast_axis_rad);
}

} // namespace afcsim
