#include "binaural/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "binaural/errors.hpp"
#include "binaural/wav.hpp"

namespace binaural {

namespace {

constexpr double kPi = 3.14159265358979323846;

double circular_distance_deg(double a, double b)
{
    double d = std::fmod(std::fabs(a - b), 360.0);
    return std::min(d, 360.0 - d);
}

// Windowed-sinc fractional-delay pulse (Blackman window), added into ir.
void add_sinc_pulse(std::vector<double>& ir, double delay_samples, double gain, int taps)
{
    const int center = static_cast<int>(std::lround(delay_samples));
    const int half = taps / 2;
    for (int n = center - half; n <= center + half; ++n) {
        if (n < 0 || n >= static_cast<int>(ir.size()))
            continue;
        const double t = static_cast<double>(n) - delay_samples;
        const double sinc = (t == 0.0) ? 1.0 : std::sin(kPi * t) / (kPi * t);
        const double x = (t + half) / (2.0 * half);  // window position in [0, 1]
        if (x < 0.0 || x > 1.0)
            continue;
        const double w = 0.42 - 0.5 * std::cos(2.0 * kPi * x) + 0.08 * std::cos(4.0 * kPi * x);
        ir[static_cast<std::size_t>(n)] += gain * sinc * w;
    }
}

}  // namespace

std::size_t HrtfDataset::nearest_azimuth_index(double theta_deg) const
{
    if (azimuths_deg.empty())
        throw ValidationError("dataset: empty azimuth list");
    std::size_t best = 0;
    double best_d = circular_distance_deg(azimuths_deg[0], theta_deg);
    for (std::size_t i = 1; i < azimuths_deg.size(); ++i) {
        const double d = circular_distance_deg(azimuths_deg[i], theta_deg);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

void validate(const HrtfDataset& ds)
{
    if (ds.sample_rate_hz <= 0)
        throw ValidationError("dataset: sample_rate_hz must be positive");
    if (ds.azimuths_deg.empty())
        throw ValidationError("dataset: empty azimuth list");
    if (ds.azimuths_deg.size() != ds.irs.size())
        throw ValidationError("dataset: azimuth/IR count mismatch");
    for (std::size_t i = 0; i < ds.azimuths_deg.size(); ++i) {
        const double az = ds.azimuths_deg[i];
        if (!(az >= -180.0 && az < 180.0))
            throw ValidationError("dataset: azimuth out of [-180, 180): " + std::to_string(az));
        if (i > 0 && !(ds.azimuths_deg[i - 1] < az))
            throw ValidationError("dataset: azimuths not strictly increasing");
    }
    const std::size_t n = ds.ir_length();
    if (n == 0)
        throw ValidationError("dataset: zero-length IRs");
    for (const auto& pair : ds.irs) {
        if (pair.left.size() != n || pair.right.size() != n)
            throw ValidationError("dataset: IR length mismatch");
        for (const double v : pair.left)
            if (!std::isfinite(v))
                throw ValidationError("dataset: non-finite sample in left IR");
        for (const double v : pair.right)
            if (!std::isfinite(v))
                throw ValidationError("dataset: non-finite sample in right IR");
    }
}

HrtfDataset synth_spherical(const SphericalHeadSpec& spec, const std::vector<double>& azimuths_deg)
{
    if (spec.head_radius_m <= 0.0)
        throw ValidationError("synth_spherical: head radius must be positive");
    if (spec.speed_of_sound_mps <= 0.0)
        throw ValidationError("synth_spherical: speed of sound must be positive");
    if (spec.sample_rate_hz <= 0)
        throw ValidationError("synth_spherical: sample rate must be positive");
    const double max_delay_s = 3.0 * spec.head_radius_m / spec.speed_of_sound_mps;
    const double min_len = max_delay_s * spec.sample_rate_hz + spec.sinc_taps;
    if (static_cast<double>(spec.ir_length_samples) < min_len)
        throw ValidationError("synth_spherical: ir_length_samples too short for max interaural delay");

    HrtfDataset ds;
    ds.name = "spherical_head";
    ds.sample_rate_hz = spec.sample_rate_hz;
    ds.azimuths_deg = azimuths_deg;
    std::sort(ds.azimuths_deg.begin(), ds.azimuths_deg.end());
    ds.irs.reserve(ds.azimuths_deg.size());

    const double base = static_cast<double>(spec.ir_length_samples) / 2.0;
    for (const double az : ds.azimuths_deg) {
        const double s = std::sin(az * kPi / 180.0);
        // Positive ITD = right leads, so the right ear gets the shorter path.
        const double itd_s = 2.0 * spec.head_radius_m / spec.speed_of_sound_mps * s;
        const double half_delay = 0.5 * itd_s * spec.sample_rate_hz;
        const double gain_r = std::pow(10.0, spec.ild_tilt_db * s / 40.0);
        IrPair pair;
        pair.left.assign(spec.ir_length_samples, 0.0);
        pair.right.assign(spec.ir_length_samples, 0.0);
        add_sinc_pulse(pair.left, base + half_delay, 1.0 / gain_r, spec.sinc_taps);
        add_sinc_pulse(pair.right, base - half_delay, gain_r, spec.sinc_taps);
        ds.irs.push_back(std::move(pair));
    }
    validate(ds);
    return ds;
}

HrtfDataset load_dataset(const std::filesystem::path& dir)
{
    const auto manifest_path = dir / "manifest.json";
    std::ifstream f(manifest_path);
    if (!f)
        throw IoError("load_dataset: missing manifest " + manifest_path.string());
    nlohmann::json manifest;
    try {
        f >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_dataset: ill-formed manifest: " + std::string(e.what()));
    }
    if (!manifest.contains("sample_rate_hz") || !manifest.contains("entries"))
        throw IoError("load_dataset: manifest missing sample_rate_hz or entries");

    HrtfDataset ds;
    ds.name = manifest.value("name", dir.filename().string());
    ds.sample_rate_hz = manifest["sample_rate_hz"].get<int>();

    struct Entry {
        double azimuth;
        std::string file;
    };
    std::vector<Entry> entries;
    for (const auto& e : manifest["entries"]) {
        if (!e.contains("azimuth_deg") || !e.contains("file"))
            throw IoError("load_dataset: manifest entry missing azimuth_deg or file");
        entries.push_back({e["azimuth_deg"].get<double>(), e["file"].get<std::string>()});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.azimuth < b.azimuth; });

    for (const auto& entry : entries) {
        const WavData wav = read_wav(dir / entry.file);
        if (wav.channels.size() != 2)
            throw ValidationError("load_dataset: channel count must be 2 in " + entry.file);
        if (static_cast<int>(wav.sample_rate_hz) != ds.sample_rate_hz)
            throw ValidationError("load_dataset: mixed sample rates (" + entry.file + ")");
        if (!ds.irs.empty() && wav.frames() != ds.ir_length())
            throw ValidationError("load_dataset: IR length mismatch in " + entry.file);
        ds.azimuths_deg.push_back(entry.azimuth);
        ds.irs.push_back({wav.channels[0], wav.channels[1]});
    }
    validate(ds);
    return ds;
}

void save_dataset(const HrtfDataset& ds, const std::filesystem::path& dir)
{
    validate(ds);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);

    nlohmann::json manifest;
    manifest["name"] = ds.name;
    manifest["sample_rate_hz"] = ds.sample_rate_hz;
    manifest["entries"] = nlohmann::json::array();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        char file[32];
        std::snprintf(file, sizeof file, "ir_%03zu.wav", i);
        WavData wav;
        wav.sample_rate_hz = static_cast<std::uint32_t>(ds.sample_rate_hz);
        wav.channels = {ds.irs[i].left, ds.irs[i].right};
        write_wav(dir / file, wav, WavEncoding::float32);
        manifest["entries"].push_back({{"azimuth_deg", ds.azimuths_deg[i]}, {"file", file}});
    }

    const auto tmp = dir / "manifest.json.tmp";
    {
        std::ofstream of(tmp);
        if (!of)
            throw IoError("save_dataset: cannot write manifest in " + dir.string());
        of << manifest.dump(2) << "\n";
    }
    std::filesystem::rename(tmp, dir / "manifest.json");
}

}  // namespace binaural
