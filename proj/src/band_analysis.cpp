// Third-octave band machinery and interaural cue measurement. Band edges use
// the exact base-2 series center = 1000 * 2^(n/3) so that adjacent bands tile
// without gaps; the nominal ISO 266 labels (400, 500, 630, ...) are kept for
// reporting. The band filter is a deterministic zero-phase FFT brick-wall.

#include "binaural/band_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "binaural/errors.hpp"
#include "binaural/fft.hpp"

namespace binaural {

namespace {

// n in center = 1000 * 2^(n/3) for each nominal label.
struct NominalEntry {
    double nominal;
    int index;
};
constexpr NominalEntry kNominal[] = {
    {125.0, -9}, {160.0, -8}, {200.0, -7}, {250.0, -6}, {315.0, -5}, {400.0, -4}, {500.0, -3},
    {630.0, -2}, {800.0, -1}, {1000.0, 0}, {1250.0, 1}, {1600.0, 2},  {2000.0, 3},
};

std::size_t correlation_pad_length(std::size_t n)
{
    // Zero-pad so narrow low-frequency bands are resolved by several FFT bins
    // even for short IRs.
    return fft::next_pow2(std::max<std::size_t>(2 * n, 8192));
}

}  // namespace

double ThirdOctaveBand::center_hz() const
{
    return 1000.0 * std::pow(2.0, static_cast<double>(index) / 3.0);
}

double ThirdOctaveBand::lower_hz() const
{
    return center_hz() * std::pow(2.0, -1.0 / 6.0);
}

double ThirdOctaveBand::upper_hz() const
{
    return center_hz() * std::pow(2.0, 1.0 / 6.0);
}

ThirdOctaveBand band_for_nominal(double nominal_hz)
{
    for (const auto& e : kNominal)
        if (e.nominal == nominal_hz)
            return {e.index, e.nominal};
    throw ValidationError("band_for_nominal: " + std::to_string(nominal_hz) +
                          " is not a supported third-octave center");
}

std::vector<ThirdOctaveBand> standard_bands()
{
    std::vector<ThirdOctaveBand> bands;
    for (const auto& e : kNominal)
        if (e.nominal >= 400.0)
            bands.push_back({e.index, e.nominal});
    return bands;
}

std::vector<ThirdOctaveBand> extended_bands()
{
    std::vector<ThirdOctaveBand> bands;
    for (const auto& e : kNominal)
        bands.push_back({e.index, e.nominal});
    return bands;
}

std::vector<double> band_filter(std::span<const double> ir, const ThirdOctaveBand& band, double fs)
{
    if (ir.empty())
        throw ValidationError("band_filter: empty input");
    if (band.upper_hz() >= fs / 2.0)
        throw ValidationError("band_filter: band above Nyquist");
    const std::size_t n = ir.size();
    auto spectrum = fft::rfft(ir);
    const double lo = band.lower_hz(), hi = band.upper_hz();
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(n);
        if (f < lo || f > hi)
            spectrum[k] = 0.0;
    }
    return fft::irfft(spectrum, n);
}

double estimate_itd(std::span<const double> left, std::span<const double> right,
                    const ThirdOctaveBand& band, double fs, double search_us)
{
    if (left.size() != right.size())
        throw ValidationError("estimate_itd: channel length mismatch");
    if (left.empty())
        throw ValidationError("estimate_itd: empty input");
    const auto nonzero = [](std::span<const double> x) {
        for (double v : x)
            if (v != 0.0)
                return true;
        return false;
    };
    if (!nonzero(left) || !nonzero(right))
        throw ValidationError("estimate_itd: all-zero channel, correlation undefined");

    const std::size_t padded = correlation_pad_length(left.size());
    std::vector<double> l(padded, 0.0), r(padded, 0.0);
    std::copy(left.begin(), left.end(), l.begin());
    std::copy(right.begin(), right.end(), r.begin());
    l = band_filter(l, band, fs);
    r = band_filter(r, band, fs);

    const auto max_lag = static_cast<long>(std::floor(search_us * 1e-6 * fs));
    if (max_lag < 1)
        throw ValidationError("estimate_itd: search window below one sample");

    // c(tau) = sum_n r[n] * l[n+tau]; a positive peak lag means right leads.
    const auto corr_at = [&](long tau) {
        const long n0 = std::max<long>(0, -tau);
        const long n1 = static_cast<long>(padded) - 1 - std::max<long>(0, tau);
        double acc = 0.0;
        for (long n = n0; n <= n1; ++n)
            acc += r[static_cast<std::size_t>(n)] * l[static_cast<std::size_t>(n + tau)];
        return acc;
    };

    // Scan lags in order of increasing |lag| so ties break toward smaller |lag|.
    long best_lag = 0;
    double best = corr_at(0);
    std::vector<double> cache(static_cast<std::size_t>(2 * max_lag + 1));
    cache[static_cast<std::size_t>(max_lag)] = best;
    for (long a = 1; a <= max_lag; ++a) {
        for (const long tau : {-a, a}) {
            const double c = corr_at(tau);
            cache[static_cast<std::size_t>(tau + max_lag)] = c;
            if (c > best) {
                best = c;
                best_lag = tau;
            }
        }
    }

    double refined = static_cast<double>(best_lag);
    if (best_lag > -max_lag && best_lag < max_lag) {
        const double cm = cache[static_cast<std::size_t>(best_lag - 1 + max_lag)];
        const double cp = cache[static_cast<std::size_t>(best_lag + 1 + max_lag)];
        // Symmetric form keeps the estimate exactly antisymmetric under channel swap.
        const double denom = (cm + cp) - 2.0 * best;
        if (denom != 0.0) {
            double delta = 0.5 * (cm - cp) / denom;
            delta = std::clamp(delta, -0.5, 0.5);
            refined += delta;
        }
    }
    return refined * 1e6 / fs;
}

BandItdTable estimate_itd_table(const HrtfDataset& ds, const std::vector<ThirdOctaveBand>& bands,
                                double search_us)
{
    validate(ds);
    BandItdTable table;
    table.azimuths_deg = ds.azimuths_deg;
    table.bands = bands;
    table.itd_us.reserve(ds.size());
    for (const auto& pair : ds.irs) {
        std::vector<double> row;
        row.reserve(bands.size());
        for (const auto& band : bands)
            row.push_back(estimate_itd(pair.left, pair.right, band,
                                       static_cast<double>(ds.sample_rate_hz), search_us));
        table.itd_us.push_back(std::move(row));
    }
    return table;
}

BandIldTable estimate_ild_table(const HrtfDataset& ds, const std::vector<ThirdOctaveBand>& bands)
{
    validate(ds);
    BandIldTable table;
    table.azimuths_deg = ds.azimuths_deg;
    table.bands = bands;
    table.ild_db.reserve(ds.size());
    const double fs = static_cast<double>(ds.sample_rate_hz);
    const std::size_t padded = correlation_pad_length(ds.ir_length());
    for (const auto& pair : ds.irs) {
        std::vector<double> l(padded, 0.0), r(padded, 0.0);
        std::copy(pair.left.begin(), pair.left.end(), l.begin());
        std::copy(pair.right.begin(), pair.right.end(), r.begin());
        const auto sl = fft::rfft(l);
        const auto sr = fft::rfft(r);
        std::vector<double> row;
        row.reserve(bands.size());
        for (const auto& band : bands) {
            if (band.upper_hz() >= fs / 2.0)
                throw ValidationError("estimate_ild_table: band above Nyquist");
            const double lo = band.lower_hz(), hi = band.upper_hz();
            double pl = 0.0, pr = 0.0;
            for (std::size_t k = 0; k < sl.size(); ++k) {
                const double f = static_cast<double>(k) * fs / static_cast<double>(padded);
                if (f < lo || f > hi)
                    continue;
                pl += std::norm(sl[k]);
                pr += std::norm(sr[k]);
            }
            if (pl <= 0.0 || pr <= 0.0)
                throw ValidationError("estimate_ild_table: zero band power");
            row.push_back(10.0 * std::log10(pl / pr));
        }
        table.ild_db.push_back(std::move(row));
    }
    return table;
}

double kuhn_itd(double theta_deg, KuhnRegime regime, double head_radius_m,
                double speed_of_sound_mps)
{
    if (head_radius_m <= 0.0 || speed_of_sound_mps <= 0.0)
        throw ValidationError("kuhn_itd: radius and speed of sound must be positive");
    const double factor = (regime == KuhnRegime::low) ? 3.0 : 2.0;
    const double theta = theta_deg * 3.14159265358979323846 / 180.0;
    return factor * head_radius_m / speed_of_sound_mps * std::sin(theta) * 1e6;
}

void write_band_csv(const std::filesystem::path& path, const std::vector<double>& azimuths,
                    const std::vector<ThirdOctaveBand>& bands,
                    const std::vector<std::vector<double>>& values)
{
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp);
        if (!f)
            throw IoError("write_band_csv: cannot write " + path.string());
        f << "azimuth_deg,band_center_hz,value\n";
        f.precision(12);
        for (std::size_t i = 0; i < azimuths.size(); ++i)
            for (std::size_t b = 0; b < bands.size(); ++b)
                f << azimuths[i] << "," << bands[b].nominal_hz << "," << values[i][b] << "\n";
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace binaural
