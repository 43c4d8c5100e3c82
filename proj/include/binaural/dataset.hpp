#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace binaural {

struct IrPair {
    std::vector<double> left;
    std::vector<double> right;
};

// Horizontal-plane HRTF set. Convention used throughout the toolkit:
// positive azimuth = source to the listener's right, positive ITD = signal
// leads at the right ear.
struct HrtfDataset {
    std::string name;
    int sample_rate_hz = 0;
    std::vector<double> azimuths_deg;  // sorted strictly increasing, in [-180, 180)
    std::vector<IrPair> irs;           // one pair per azimuth, all the same length

    std::size_t ir_length() const { return irs.empty() ? 0 : irs.front().left.size(); }
    std::size_t size() const { return azimuths_deg.size(); }
    // Index of the stored azimuth closest to theta_deg (circular distance).
    std::size_t nearest_azimuth_index(double theta_deg) const;
};

// Throws ValidationError if any dataset invariant is broken.
void validate(const HrtfDataset& ds);

struct SphericalHeadSpec {
    double head_radius_m = 0.0875;
    double speed_of_sound_mps = 343.0;
    std::size_t ir_length_samples = 256;
    int sample_rate_hz = 44100;
    // Frequency-independent ILD of ild_tilt_db * sin(theta); 0 keeps fixtures pure-ITD.
    double ild_tilt_db = 0.0;
    int sinc_taps = 64;
};

// Spherical-head fixture: fractional-delay impulse pairs with interaural
// delay (2a/c)*sin(theta) (the high-frequency Woodworth/Kuhn value).
HrtfDataset synth_spherical(const SphericalHeadSpec& spec, const std::vector<double>& azimuths_deg);

// Native format: manifest.json + one stereo WAV per azimuth (channel 0 = left).
HrtfDataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const HrtfDataset& ds, const std::filesystem::path& dir);

}  // namespace binaural
