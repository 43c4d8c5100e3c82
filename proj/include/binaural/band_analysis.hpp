#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "binaural/dataset.hpp"

namespace binaural {

// Third-octave band with exact base-2 edges: center = 1000 * 2^(n/3), so
// adjacent bands tile without gaps. nominal_hz carries the ISO 266 label
// (400, 500, 630, ...).
struct ThirdOctaveBand {
    int index = 0;  // n in center = 1000 * 2^(n/3)
    double nominal_hz = 0.0;

    double center_hz() const;
    double lower_hz() const;  // center * 2^(-1/6)
    double upper_hz() const;  // center * 2^(+1/6)
};

ThirdOctaveBand band_for_nominal(double nominal_hz);

// Measurement bands 400..2000 Hz.
std::vector<ThirdOctaveBand> standard_bands();
// Verification bands 125..2000 Hz.
std::vector<ThirdOctaveBand> extended_bands();

// FFT brick-wall bandpass at the signal's own length: bins outside
// [lower_hz, upper_hz] are zeroed, output is real with the same length.
std::vector<double> band_filter(std::span<const double> ir, const ThirdOctaveBand& band, double fs);

// Lag of the interaural cross-correlation maximum within +-search_us after
// band filtering, refined by parabolic interpolation. Positive = right leads.
double estimate_itd(std::span<const double> left, std::span<const double> right,
                    const ThirdOctaveBand& band, double fs, double search_us = 1500.0);

struct BandItdTable {
    std::vector<double> azimuths_deg;
    std::vector<ThirdOctaveBand> bands;
    std::vector<std::vector<double>> itd_us;  // [azimuth][band]

    double at(std::size_t az_index, std::size_t band_index) const
    {
        return itd_us[az_index][band_index];
    }
};

struct BandIldTable {
    std::vector<double> azimuths_deg;
    std::vector<ThirdOctaveBand> bands;
    std::vector<std::vector<double>> ild_db;  // [azimuth][band], 10*log10(PL/PR)

    double at(std::size_t az_index, std::size_t band_index) const
    {
        return ild_db[az_index][band_index];
    }
};

BandItdTable estimate_itd_table(const HrtfDataset& ds,
                                const std::vector<ThirdOctaveBand>& bands = standard_bands(),
                                double search_us = 1500.0);
BandIldTable estimate_ild_table(const HrtfDataset& ds,
                                const std::vector<ThirdOctaveBand>& bands = standard_bands());

// Kuhn (1977) reference: low-frequency ITD = (3a/c) sin(theta),
// high-frequency ITD = (2a/c) sin(theta), in microseconds.
enum class KuhnRegime { low, high };
double kuhn_itd(double theta_deg, KuhnRegime regime, double head_radius_m = 0.0875,
                double speed_of_sound_mps = 343.0);

// CSV rows: azimuth_deg, band_center_hz, value.
void write_band_csv(const std::filesystem::path& path, const std::vector<double>& azimuths,
                    const std::vector<ThirdOctaveBand>& bands,
                    const std::vector<std::vector<double>>& values);

}  // namespace binaural
