#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "binaural/band_analysis.hpp"
#include "binaural/dataset.hpp"

namespace binaural {

// One-sided spectra (n_fft/2+1 bins) of one left/right HRTF pair.
struct HrtfSpectrumPair {
    std::vector<std::complex<double>> left;
    std::vector<std::complex<double>> right;
};

struct SpectrumSet {
    int sample_rate_hz = 0;
    std::size_t n_ir = 0;
    std::size_t n_fft = 0;
    std::vector<double> azimuths_deg;
    std::vector<HrtfSpectrumPair> spectra;
};

struct TransformParams {
    double max_ild_db = 12.0;        // reached at max_itd_us
    double max_itd_us = 700.0;
    double const_below_hz = 400.0;   // bands below reuse the lowest measured band
    double full_apply_upto_hz = 1000.0;
    double transition_upto_hz = 2000.0;
    bool smoothing = true;

    void check() const;
};

enum class ConditionName { unprocessed, noITD, noILD, transformITD_sub, transformITD_add, colocated };

// Base HRTF the _sub pipeline applies the transform to. The default removes
// the ITDs first; the literal reading of the text (transform on the noILD
// set) is available as an explicit switch.
enum class SubBase { noitd, noild };

ConditionName parse_condition_name(const std::string& name);
std::string condition_name_str(ConditionName cond);
SubBase parse_sub_base(const std::string& name);

SpectrumSet to_spectra(const HrtfDataset& ds);
HrtfDataset from_spectra(const SpectrumSet& set, const std::string& name);

// Sum over the full spectrum of |L|^2 + |R|^2 (one-sided bins weighted so the
// value equals the two-sided sum).
double spectral_energy(const HrtfSpectrumPair& pair);

// Linear ITD-to-ILD map: max_ild_db * itd / max_itd_us, sign-preserving, unclamped.
double delta_ild(double itd_us, const TransformParams& params = {});

// alpha = 10^(delta_ild_db / 20).
double gain_factor(double delta_ild_db);

// Per-bin ear gains in dB for one azimuth, before energy matching. Positive
// band ITD favors the right ear (+delta/2 right, -delta/2 left); below the
// lowest band the value is held constant; gains crossfade to 0 dB over
// (full_apply_upto_hz, transition_upto_hz] with a raised cosine in log
// frequency, and are exactly 0 dB at and above transition_upto_hz.
struct GainProfile {
    std::vector<double> left_db;
    std::vector<double> right_db;
};
GainProfile transform_gain_profile(std::span<const double> band_itds_us,
                                   std::span<const ThirdOctaveBand> bands,
                                   const TransformParams& params, std::size_t n_fft, double fs);

struct TransformReport {
    std::size_t bands_over_max = 0;  // band ITDs beyond max_itd_us (allowed, flagged)
    double max_abs_delta_ild_db = 0.0;
};

// ITD-to-ILD transformation with per-azimuth energy equalization.
SpectrumSet apply_transform(const SpectrumSet& set, const BandItdTable& itds,
                            const TransformParams& params, TransformReport* report = nullptr);

// Replace left/right unwrapped phase with their mean; magnitudes untouched.
SpectrumSet remove_itd(const SpectrumSet& set);

// Equalize left/right power per bin: |L'| = |R'| = sqrt((|L|^2+|R|^2)/2),
// phases preserved.
SpectrumSet remove_ild(const SpectrumSet& set);

HrtfDataset make_condition(const HrtfDataset& ds, ConditionName cond,
                           const TransformParams& params = {}, SubBase sub_base = SubBase::noitd,
                           TransformReport* report = nullptr);

}  // namespace binaural
