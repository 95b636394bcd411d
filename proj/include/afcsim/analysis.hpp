#pragma once

// Estimators for every fitted quantity the experiment reports: lifetime,
// pulse widths, line centers / fine-structure splitting, power-law slope,
// polarization visibility and fidelity, g2(0), SNR, mode counting and
// transmitted/stored mode correspondence.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "detection.hpp"
#include "fitting.hpp"

namespace afcsim {

// Planck constant in microeV per GHz.
inline constexpr double microev_per_ghz = 4.135667696;

inline double ghz_to_microev(double f_ghz) { return f_ghz * microev_per_ghz; }
inline double nm_split_to_microev(double d_nm, double wavelength_nm) {
    const double hc_ev_nm = 1239.8419843320026;
    return hc_ev_nm / (wavelength_nm * wavelength_nm) * d_nm * 1e6;
}

namespace anadetail {

inline FitData histogram_points(const Histogram& h, double t_min, double t_max) {
    FitData d;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double t = h.bin_center(i);
        if (t < t_min || t >= t_max) continue;
        d.x.push_back(t);
        d.y.push_back(static_cast<double>(h.counts[i]));
        d.w.push_back(1.0 / std::max(static_cast<double>(h.counts[i]), 1.0)); // Poisson
    }
    return d;
}

} // namespace anadetail

// Weighted fit of A exp(-t/tau) + c to the histogram tail after t_min.
// parameters: [A, tau, c]
inline FitResult fit_exponential(const Histogram& h, double t_min) {
    auto d = anadetail::histogram_points(h, t_min, h.end_ns());
    std::size_t populated = 0;
    for (const double y : d.y) populated += y > 0.0 ? 1 : 0;
    if (populated < 5) throw std::invalid_argument("fit_exponential: need >= 5 populated bins after t_min");
    const double ymax = *std::max_element(d.y.begin(), d.y.end());
    const double ymin = *std::min_element(d.y.begin(), d.y.end());
    // crude tau from the first decade of decay
    double tau0 = 1.0;
    {
        const auto imax = std::max_element(d.y.begin(), d.y.end()) - d.y.begin();
        for (std::size_t i = imax; i < d.y.size(); ++i) {
            if (d.y[i] < ymin + (ymax - ymin) / std::exp(1.0)) {
                tau0 = std::max(d.x[i] - d.x[imax], d.x[1] - d.x[0]);
                break;
            }
        }
    }
    auto r = levenberg_marquardt(model_exponential, d, {ymax - ymin, tau0, ymin}, "exponential");
    if (!(r.parameters[1] > 0.0) || !std::isfinite(r.residual_norm)) r.converged = false;
    return r;
}

// Gaussian peak fit inside the window; parameters [A, mu, sigma, c].
// fwhm() = 2 sqrt(2 ln 2) sigma.
struct GaussianPeakFit {
    FitResult fit;
    double center() const { return fit.parameters[1]; }
    double fwhm() const { return std::abs(fit.parameters[2]) * fwhm_from_sigma; }
    double fwhm_uncertainty() const { return fit.uncertainties[2] * fwhm_from_sigma; }
};

inline GaussianPeakFit fit_gaussian_peak(const Histogram& h, double window_lo, double window_hi) {
    auto d = anadetail::histogram_points(h, window_lo, window_hi);
    if (d.x.size() < 5) throw std::invalid_argument("fit_gaussian_peak: too few bins in window");
    const auto imax = std::max_element(d.y.begin(), d.y.end()) - d.y.begin();
    const double ymax = d.y[imax];
    const double c0 = *std::min_element(d.y.begin(), d.y.end());
    // half-max extent estimate
    double lo = d.x.front(), hi = d.x.back();
    for (std::size_t i = imax; i-- > 0;)
        if (d.y[i] - c0 < (ymax - c0) / 2.0) { lo = d.x[i]; break; }
    for (std::size_t i = imax; i < d.x.size(); ++i)
        if (d.y[i] - c0 < (ymax - c0) / 2.0) { hi = d.x[i]; break; }
    const double s0 = std::max((hi - lo) / fwhm_from_sigma, (d.x[1] - d.x[0]) / 2.0);
    GaussianPeakFit out;
    out.fit = levenberg_marquardt(model_gaussian, d, {ymax - c0, d.x[imax], s0, c0}, "gaussian");
    return out;
}

// Same, but the window is chosen from the data: the fit covers the peak core
// (+- core_half_widths times the half-max extent around the maximum). This
// mirrors fitting "the peak" rather than the full trace with its tails.
inline GaussianPeakFit fit_gaussian_peak_auto(const Histogram& h, double search_lo, double search_hi,
                                              double core_half_widths = 1.25) {
    auto d = anadetail::histogram_points(h, search_lo, search_hi);
    if (d.x.size() < 5) throw std::invalid_argument("fit_gaussian_peak_auto: too few bins");
    const auto imax = std::max_element(d.y.begin(), d.y.end()) - d.y.begin();
    const double ymax = d.y[imax];
    double lo = d.x.front(), hi = d.x.back();
    for (std::size_t i = imax; i-- > 0;)
        if (d.y[i] < ymax / 2.0) { lo = d.x[i]; break; }
    for (std::size_t i = imax; i < d.x.size(); ++i)
        if (d.y[i] < ymax / 2.0) { hi = d.x[i]; break; }
    const double half = core_half_widths * (hi - lo);
    return fit_gaussian_peak(h, d.x[imax] - half, d.x[imax] + half);
}

// Lorentzian fit; parameters [A, x0, fwhm, c].
inline FitResult fit_lorentzian(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 5)
        throw std::invalid_argument("fit_lorentzian: need matched x/y with >= 5 points");
    FitData d;
    d.x = x;
    d.y = y;
    d.w.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) d.w[i] = 1.0 / std::max(y[i], 1.0);
    const auto imax = std::max_element(d.y.begin(), d.y.end()) - d.y.begin();
    const double c0 = *std::min_element(d.y.begin(), d.y.end());
    const double ymax = d.y[imax];
    double lo = d.x.front(), hi = d.x.back();
    for (std::size_t i = imax; i-- > 0;)
        if (d.y[i] - c0 < (ymax - c0) / 2.0) { lo = d.x[i]; break; }
    for (std::size_t i = imax; i < d.x.size(); ++i)
        if (d.y[i] - c0 < (ymax - c0) / 2.0) { hi = d.x[i]; break; }
    return levenberg_marquardt(model_lorentzian, d,
                               {ymax - c0, d.x[imax], std::max(hi - lo, (x[1] - x[0]) * 2.0), c0},
                               "lorentzian");
}

struct FssResult {
    FitResult fit_x, fit_y;
    double splitting_ghz = 0.0;
    double splitting_microev = 0.0;
    double uncertainty_microev = 0.0;
};

// Fine-structure splitting: independent Lorentzian fits of the two
// polarization-resolved spectra on a common frequency axis (GHz), center
// difference converted to microeV.
inline FssResult fit_lorentzian_pair(const std::vector<double>& axis_ghz,
                                     const std::vector<double>& spectrum_x,
                                     const std::vector<double>& spectrum_y) {
    FssResult r;
    r.fit_x = fit_lorentzian(axis_ghz, spectrum_x);
    r.fit_y = fit_lorentzian(axis_ghz, spectrum_y);
    r.splitting_ghz = r.fit_y.parameters[1] - r.fit_x.parameters[1];
    r.splitting_microev = ghz_to_microev(r.splitting_ghz);
    r.uncertainty_microev = ghz_to_microev(std::hypot(r.fit_x.uncertainties[1], r.fit_y.uncertainties[1]));
    return r;
}

// Log-log linear regression. parameters: [slope, log_prefactor]
inline FitResult fit_power_law(const std::vector<double>& powers, const std::vector<double>& intensities) {
    if (powers.size() != intensities.size() || powers.size() < 3)
        throw std::invalid_argument("fit_power_law: need >= 3 matched points");
    for (std::size_t i = 0; i < powers.size(); ++i)
        if (!(powers[i] > 0.0) || !(intensities[i] > 0.0))
            throw std::domain_error("fit_power_law: non-positive power or intensity");
    const std::size_t n = powers.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(powers[i]);
        const double y = std::log(intensities[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / den;
    const double inter = (sy - slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(intensities[i]) - slope * std::log(powers[i]) - inter;
        ss += r * r;
    }
    FitResult out;
    out.model_name = "power_law";
    out.parameters = {slope, inter};
    const double s2 = n > 2 ? ss / static_cast<double>(n - 2) : 0.0;
    out.uncertainties = {std::sqrt(s2 * n / den), std::sqrt(s2 * sxx / den)};
    out.residual_norm = ss;
    out.converged = true;
    return out;
}

struct SinusoidFit {
    FitResult fit; // [Cbar, V, phi], theta in radians
    double visibility() const { return std::abs(fit.parameters[1]); }
    double fidelity() const { return (1.0 + visibility()) / 2.0; }
    double fidelity_uncertainty() const { return fit.uncertainties[1] / 2.0; }
    // analyzer angle (deg) of maximum counts in [0, 90)
    double max_angle_deg() const {
        double phi = fit.parameters[2];
        if (fit.parameters[1] < 0.0) phi += pi_v;
        double deg = phi / 4.0 * 180.0 / pi_v;
        while (deg < 0.0) deg += 90.0;
        while (deg >= 90.0) deg -= 90.0;
        return deg;
    }
};

// Fit C(theta) = Cbar (1 + V cos(4 theta - phi)) with the period locked.
// Angles in degrees of the half-wave plate. Seeded by the exact linear
// solve in the (cos, sin) basis, then polished with LM.
inline SinusoidFit fit_sinusoid(const std::vector<double>& angles_deg, const std::vector<double>& counts) {
    if (angles_deg.size() != counts.size() || angles_deg.size() < 4)
        throw std::invalid_argument("fit_sinusoid: need >= 4 matched points");
    const double span = *std::max_element(angles_deg.begin(), angles_deg.end()) -
                        *std::min_element(angles_deg.begin(), angles_deg.end());
    if (span < 90.0 - 1e-9)
        throw std::invalid_argument("fit_sinusoid: angles must span one full period (90 deg)");
    FitData d;
    d.x.resize(angles_deg.size());
    d.y = counts;
    d.w.resize(counts.size());
    for (std::size_t i = 0; i < angles_deg.size(); ++i) {
        d.x[i] = angles_deg[i] * pi_v / 180.0;
        d.w[i] = 1.0 / std::max(counts[i], 1.0);
    }
    // linear solve y = a0 + a1 cos4t + a2 sin4t
    double S[3][3] = {{0}};
    double b[3] = {0};
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const double base[3] = {1.0, std::cos(4.0 * d.x[i]), std::sin(4.0 * d.x[i])};
        for (int a = 0; a < 3; ++a) {
            b[a] += d.w[i] * base[a] * d.y[i];
            for (int c = 0; c < 3; ++c) S[a][c] += d.w[i] * base[a] * base[c];
        }
    }
    std::vector<double> A(9), bb(b, b + 3), sol;
    for (int a = 0; a < 3; ++a)
        for (int c = 0; c < 3; ++c) A[a * 3 + c] = S[a][c];
    fitdetail::solve_dense(A, bb, sol);
    const double cbar0 = sol.empty() ? 1.0 : sol[0];
    const double v0 = sol.empty() ? 0.5 : std::hypot(sol[1], sol[2]) / std::max(cbar0, 1e-12);
    const double phi0 = sol.empty() ? 0.0 : std::atan2(sol[2], sol[1]);
    SinusoidFit out;
    out.fit = levenberg_marquardt(model_sinusoid4, d, {cbar0, v0, phi0}, "sinusoid4");
    return out;
}

struct G2Result {
    double g2 = 0.0;
    double uncertainty = 0.0;
    double zero_peak = 0.0;
    double mean_side_peak = 0.0;
    int n_side_peaks = 0;
};

// Zero-delay peak area over the mean side-peak area, peaks segmented at
// multiples of the pulse period.
inline G2Result estimate_g2(const Histogram& hbt_hist, double period_ns) {
    const double half = period_ns / 2.0;
    const double lo = hbt_hist.origin_ns;
    const double hi = hbt_hist.end_ns();
    const int kmin = static_cast<int>(std::ceil((lo + half) / period_ns));
    const int kmax = static_cast<int>(std::floor((hi - half) / period_ns));
    G2Result r;
    std::vector<double> sides;
    for (int k = kmin; k <= kmax; ++k) {
        const double area = window_counts(hbt_hist, k * period_ns, period_ns);
        if (k == 0)
            r.zero_peak = area;
        else
            sides.push_back(area);
    }
    if (sides.size() < 3) throw std::domain_error("estimate_g2: need >= 3 side peaks in the window");
    double s = 0.0;
    for (const double v : sides) s += v;
    r.mean_side_peak = s / static_cast<double>(sides.size());
    r.n_side_peaks = static_cast<int>(sides.size());
    if (r.mean_side_peak <= 0.0) throw std::domain_error("estimate_g2: empty side peaks");
    r.g2 = r.zero_peak / r.mean_side_peak;
    if (r.zero_peak > 0.0) {
        const double rel_z = 1.0 / std::sqrt(r.zero_peak);
        const double rel_s = 1.0 / std::sqrt(s);
        r.uncertainty = r.g2 * std::sqrt(rel_z * rel_z + rel_s * rel_s);
    } else {
        r.uncertainty = 1.0 / r.mean_side_peak;
    }
    return r;
}

// (signal - scaled noise floor) / scaled noise floor. The noise floor comes
// from the disjoint noise windows, scaled to the signal window width.
inline double estimate_snr(const Histogram& h, std::pair<double, double> signal_window,
                           const std::vector<std::pair<double, double>>& noise_windows) {
    const double s_lo = signal_window.first, s_hi = signal_window.second;
    double noise = 0.0, noise_span = 0.0;
    for (const auto& [lo, hi] : noise_windows) {
        if (hi <= lo) throw std::invalid_argument("estimate_snr: bad noise window");
        if (std::max(lo, s_lo) < std::min(hi, s_hi))
            throw std::invalid_argument("estimate_snr: windows must be disjoint");
        noise += window_counts(h, (lo + hi) / 2.0, hi - lo);
        noise_span += hi - lo;
    }
    const double signal = window_counts(h, (s_lo + s_hi) / 2.0, s_hi - s_lo);
    const double floor = noise / noise_span * (s_hi - s_lo);
    if (floor <= 0.0) return std::numeric_limits<double>::infinity();
    return (signal - floor) / floor;
}

struct ModePeak {
    double position_ns = 0.0;
    double height = 0.0;
    double prominence = 0.0;
};

struct ModeCountResult {
    int count = 0;
    std::vector<ModePeak> peaks;
};

// Local-maxima detection with a 3-sigma prominence threshold against the
// local baseline (median in a window around each candidate, peaks excluded).
inline ModeCountResult count_modes(const Histogram& h, std::pair<double, double> retrieval_window,
                                   double expected_separation_ns, double n_sigma = 3.0) {
    if (!(h.bin_width_ns < expected_separation_ns / 2.0))
        throw std::invalid_argument("count_modes: bin width must be below half the mode separation");
    const auto i_lo = static_cast<std::size_t>(
        std::max(0.0, (retrieval_window.first - h.origin_ns) / h.bin_width_ns));
    const auto i_hi = std::min(h.counts.size(), static_cast<std::size_t>(
        std::max(0.0, (retrieval_window.second - h.origin_ns) / h.bin_width_ns)));
    const int sep_bins = std::max<int>(1, static_cast<int>(std::round(expected_separation_ns / h.bin_width_ns)));
    ModeCountResult out;
    for (std::size_t i = i_lo; i < i_hi; ++i) {
        const double v = static_cast<double>(h.counts[i]);
        // strict local maximum over +-separation/2 (ties resolved to the left)
        bool is_max = true;
        for (int o = -sep_bins / 2; o <= sep_bins / 2 && is_max; ++o) {
            if (o == 0) continue;
            const std::int64_t j = static_cast<std::int64_t>(i) + o;
            if (j < static_cast<std::int64_t>(i_lo) || j >= static_cast<std::int64_t>(i_hi)) continue;
            const double u = static_cast<double>(h.counts[static_cast<std::size_t>(j)]);
            if (u > v || (u == v && o < 0)) is_max = false;
        }
        if (!is_max || v <= 0.0) continue;
        // local baseline: median over +-2 separations, excluding +-sep/3
        std::vector<double> ring;
        for (int o = -2 * sep_bins; o <= 2 * sep_bins; ++o) {
            if (std::abs(o) < sep_bins / 3) continue;
            const std::int64_t j = static_cast<std::int64_t>(i) + o;
            if (j < static_cast<std::int64_t>(i_lo) || j >= static_cast<std::int64_t>(i_hi)) continue;
            ring.push_back(static_cast<double>(h.counts[static_cast<std::size_t>(j)]));
        }
        if (ring.empty()) continue;
        std::nth_element(ring.begin(), ring.begin() + ring.size() / 2, ring.end());
        const double baseline = ring[ring.size() / 2];
        const double sigma = std::sqrt(std::max(baseline, 1.0));
        const double prom = v - baseline;
        if (prom <= n_sigma * sigma) continue;
        // parabolic sub-bin refinement
        double pos = h.bin_center(i);
        if (i > i_lo && i + 1 < i_hi) {
            const double ym = static_cast<double>(h.counts[i - 1]);
            const double yp = static_cast<double>(h.counts[i + 1]);
            const double den = ym - 2.0 * v + yp;
            if (den < 0.0) pos += 0.5 * (ym - yp) / den * h.bin_width_ns;
        }
        out.peaks.push_back({pos, v, prom});
    }
    out.count = static_cast<int>(out.peaks.size());
    return out;
}

struct ModeCorrespondence {
    double lag_ns = 0.0;
    bool correlated = false;
    int n_transmitted = 0;
    int n_stored = 0;
    int n_paired_within_1ns = 0;
    std::vector<double> residuals_ns; // stored - (transmitted + lag), per paired mode
    double pairing_fraction = 0.0;
};

// Cross-correlate the transmitted and stored windows; the global argmax lag
// estimates the storage delay. Stored peaks are then paired to the nearest
// transmitted peak after shifting by the lag.
inline ModeCorrespondence mode_correspondence(const Histogram& transmitted, const Histogram& stored,
                                              double t_storage_ns, double expected_separation_ns) {
    if (transmitted.bin_width_ns != stored.bin_width_ns)
        throw std::invalid_argument("mode_correspondence: bin widths differ");
    const double bw = transmitted.bin_width_ns;
    const int lag_center = static_cast<int>(std::round(t_storage_ns / bw));
    const int lag_span = std::max(4, static_cast<int>(std::round(expected_separation_ns * 2.0 / bw)));
    double best = -1.0, mean = 0.0;
    int best_lag = lag_center, n_lags = 0;
    for (int lag = lag_center - lag_span; lag <= lag_center + lag_span; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i < transmitted.counts.size(); ++i) {
            const std::int64_t j = static_cast<std::int64_t>(i) + lag;
            if (j < 0 || j >= static_cast<std::int64_t>(stored.counts.size())) continue;
            acc += static_cast<double>(transmitted.counts[i]) *
                   static_cast<double>(stored.counts[static_cast<std::size_t>(j)]);
        }
        mean += acc;
        ++n_lags;
        if (acc > best) { best = acc; best_lag = lag; }
    }
    mean /= std::max(1, n_lags);
    ModeCorrespondence out;
    out.lag_ns = best_lag * bw;
    out.correlated = best > 1.2 * mean && best > 0.0;

    const auto tr = count_modes(transmitted, {transmitted.origin_ns, transmitted.end_ns()},
                                expected_separation_ns);
    const auto st = count_modes(stored, {stored.origin_ns, stored.end_ns()}, expected_separation_ns);
    if (tr.peaks.empty() || st.peaks.empty())
        throw std::domain_error("mode_correspondence: no peaks detected");
    out.n_transmitted = tr.count;
    out.n_stored = st.count;
    for (const auto& sp : st.peaks) {
        double bestr = std::numeric_limits<double>::infinity();
        for (const auto& tp : tr.peaks) {
            const double r = sp.position_ns - (tp.position_ns + out.lag_ns);
            if (std::abs(r) < std::abs(bestr)) bestr = r;
        }
        out.residuals_ns.push_back(bestr);
        if (std::abs(bestr) <= 1.0) ++out.n_paired_within_1ns;
    }
    out.pairing_fraction = static_cast<double>(out.n_paired_within_1ns) /
                           static_cast<double>(out.residuals_ns.size());
    return out;
}

} // namespace afcsim
