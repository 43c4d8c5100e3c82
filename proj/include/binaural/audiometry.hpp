#pragma once

#include <filesystem>
#include <map>
#include <vector>

namespace binaural {

// Per-ear hearing levels in dB HL on the audiometric frequency grid.
struct Audiogram {
    std::map<double, double> left;
    std::map<double, double> right;

    double average_hl(double freq_hz) const;
};

const std::vector<double>& audiometric_frequencies();  // 125 .. 8000 Hz, octaves

Audiogram load_audiogram(const std::filesystem::path& path);
void validate(const Audiogram& a);

struct SymmetryReport {
    bool symmetric = false;
    double worst_freq_hz = 0.0;
    double diff_db = 0.0;
};

// Symmetric iff max |left-right| <= 10 dB over the grid (inclusive bound).
SymmetryReport check_symmetry(const Audiogram& a);

struct HalfGainFilter {
    int sample_rate_hz = 0;
    std::map<double, double> target_gains_db;  // audiometric freq -> HL/2 (>= 0)
    std::vector<double> coefficients;          // 301 symmetric taps (order 300)

    double magnitude_db_at(double freq_hz) const;
};

// Half-gain rule compensation: target magnitude built from overlapping
// octave-wide Hann windows on a log axis scaled to half the ear-averaged
// hearing loss, fitted by a linear-phase FIR of order 300.
HalfGainFilter design_half_gain(const Audiogram& a, int sample_rate_hz);

void write_filter_csv(const std::filesystem::path& path, const HalfGainFilter& filter);

// Level bookkeeping relative to digital full scale: dB SPL = offset + 20*log10(rms).
double rms_of(const std::vector<std::vector<double>>& channels);
double rms_to_spl(double rms, double spl_offset_db = 100.0);

// Broadband gain (<= 1) that keeps the signal at or below cap_db_spl.
double level_cap_scale(double rms, double cap_db_spl, double spl_offset_db = 100.0);

struct LimitedSignal {
    std::vector<std::vector<double>> channels;
    double applied_reduction_db = 0.0;
};

// Filter every channel, then rescale (never clip) so the result stays at or
// below cap_db_spl under the spl_offset_db calibration.
LimitedSignal apply_with_limit(const std::vector<std::vector<double>>& channels,
                               const HalfGainFilter& filter, double cap_db_spl,
                               double spl_offset_db = 100.0);

}  // namespace binaural
