// HRTF manipulations: the band-wise ITD-to-ILD transformation, phase-average
// ITD removal, power-equalizing ILD removal, and the named condition
// pipelines. All operations work on one-sided spectra and keep the total
// spectral energy of each azimuth pair unchanged (exactly for the phase and
// power ops, via explicit renormalization for the transform).

#include "binaural/cue_ops.hpp"

#include <algorithm>
#include <cmath>

#include "binaural/errors.hpp"
#include "binaural/fft.hpp"

namespace binaural {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Keeps the 1-2 kHz crossfade and band edges resolved even for short IRs.
constexpr std::size_t kMinFft = 4096;

double wrap_pi(double x)
{
    while (x > kPi)
        x -= 2.0 * kPi;
    while (x < -kPi)
        x += 2.0 * kPi;
    return x;
}

std::vector<double> unwrapped_phase(const std::vector<std::complex<double>>& spectrum)
{
    std::vector<double> raw(spectrum.size());
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        if (std::abs(spectrum[k]) == 0.0)
            raw[k] = (k == 0) ? 0.0 : raw[k - 1];  // continuation keeps the unwrap stable
        else
            raw[k] = std::arg(spectrum[k]);
    }
    std::vector<double> unwrapped(raw.size());
    unwrapped[0] = raw[0];
    for (std::size_t k = 1; k < raw.size(); ++k)
        unwrapped[k] = unwrapped[k - 1] + wrap_pi(raw[k] - raw[k - 1]);
    return unwrapped;
}

std::complex<double> from_polar(double magnitude, double phase, bool force_real)
{
    if (force_real)
        return {std::cos(phase) >= 0.0 ? magnitude : -magnitude, 0.0};
    return {magnitude * std::cos(phase), magnitude * std::sin(phase)};
}

// Raised-cosine crossfade in log frequency: 1 at/below f_lo, 0 at/above f_hi.
double crossfade_weight(double f, double f_lo, double f_hi)
{
    if (f <= f_lo)
        return 1.0;
    if (f >= f_hi)
        return 0.0;
    const double x = std::log(f / f_lo) / std::log(f_hi / f_lo);
    return 0.5 * (1.0 + std::cos(kPi * x));
}

}  // namespace

void TransformParams::check() const
{
    if (max_itd_us <= 0.0)
        throw ValidationError("TransformParams: max_itd_us must be positive");
    if (!(0.0 < const_below_hz && const_below_hz < full_apply_upto_hz &&
          full_apply_upto_hz < transition_upto_hz))
        throw ValidationError("TransformParams: need 0 < const_below < full_apply < transition");
}

ConditionName parse_condition_name(const std::string& name)
{
    if (name == "unprocessed")
        return ConditionName::unprocessed;
    if (name == "noITD")
        return ConditionName::noITD;
    if (name == "noILD")
        return ConditionName::noILD;
    if (name == "transformITD_sub")
        return ConditionName::transformITD_sub;
    if (name == "transformITD_add")
        return ConditionName::transformITD_add;
    if (name == "colocated")
        return ConditionName::colocated;
    throw ValidationError("unknown condition '" + name +
                          "' (valid: unprocessed, noITD, noILD, transformITD_sub, "
                          "transformITD_add, colocated)");
}

std::string condition_name_str(ConditionName cond)
{
    switch (cond) {
    case ConditionName::unprocessed: return "unprocessed";
    case ConditionName::noITD: return "noITD";
    case ConditionName::noILD: return "noILD";
    case ConditionName::transformITD_sub: return "transformITD_sub";
    case ConditionName::transformITD_add: return "transformITD_add";
    case ConditionName::colocated: return "colocated";
    }
    throw ValidationError("invalid condition enum value");
}

SubBase parse_sub_base(const std::string& name)
{
    if (name == "noitd")
        return SubBase::noitd;
    if (name == "noild")
        return SubBase::noild;
    throw ValidationError("unknown sub_base '" + name + "' (valid: noitd, noild)");
}

SpectrumSet to_spectra(const HrtfDataset& ds)
{
    validate(ds);
    SpectrumSet set;
    set.sample_rate_hz = ds.sample_rate_hz;
    set.n_ir = ds.ir_length();
    set.n_fft = std::max(fft::next_pow2(4 * set.n_ir), kMinFft);
    set.azimuths_deg = ds.azimuths_deg;
    set.spectra.reserve(ds.size());
    std::vector<double> padded(set.n_fft);
    for (const auto& pair : ds.irs) {
        HrtfSpectrumPair sp;
        std::fill(padded.begin(), padded.end(), 0.0);
        std::copy(pair.left.begin(), pair.left.end(), padded.begin());
        sp.left = fft::rfft(padded);
        std::fill(padded.begin(), padded.end(), 0.0);
        std::copy(pair.right.begin(), pair.right.end(), padded.begin());
        sp.right = fft::rfft(padded);
        set.spectra.push_back(std::move(sp));
    }
    return set;
}

HrtfDataset from_spectra(const SpectrumSet& set, const std::string& name)
{
    HrtfDataset ds;
    ds.name = name;
    ds.sample_rate_hz = set.sample_rate_hz;
    ds.azimuths_deg = set.azimuths_deg;
    ds.irs.reserve(set.spectra.size());
    for (const auto& sp : set.spectra) {
        IrPair pair;
        auto l = fft::irfft(sp.left, set.n_fft);
        auto r = fft::irfft(sp.right, set.n_fft);
        l.resize(set.n_ir);
        r.resize(set.n_ir);
        pair.left = std::move(l);
        pair.right = std::move(r);
        ds.irs.push_back(std::move(pair));
    }
    validate(ds);
    return ds;
}

double spectral_energy(const HrtfSpectrumPair& pair)
{
    double e = 0.0;
    const std::size_t last = pair.left.size() - 1;
    for (std::size_t k = 0; k < pair.left.size(); ++k) {
        const double w = (k == 0 || k == last) ? 1.0 : 2.0;
        e += w * (std::norm(pair.left[k]) + std::norm(pair.right[k]));
    }
    return e;
}

double delta_ild(double itd_us, const TransformParams& params)
{
    if (!std::isfinite(itd_us))
        throw ValidationError("delta_ild: non-finite ITD");
    return params.max_ild_db * itd_us / params.max_itd_us;
}

double gain_factor(double delta_ild_db)
{
    if (!std::isfinite(delta_ild_db))
        throw ValidationError("gain_factor: non-finite delta ILD");
    return std::pow(10.0, delta_ild_db / 20.0);
}

GainProfile transform_gain_profile(std::span<const double> band_itds_us,
                                   std::span<const ThirdOctaveBand> bands,
                                   const TransformParams& params, std::size_t n_fft, double fs)
{
    params.check();
    if (bands.empty() || band_itds_us.size() != bands.size())
        throw ValidationError("transform_gain_profile: band/ITD size mismatch");

    std::vector<double> band_delta(bands.size());
    for (std::size_t b = 0; b < bands.size(); ++b)
        band_delta[b] = delta_ild(band_itds_us[b], params);

    // Per-bin staircase of band deltas, held constant below the lowest band
    // and above the highest one (the crossfade removes the latter anyway).
    const std::size_t n_bins = n_fft / 2 + 1;
    std::vector<double> profile(n_bins);
    std::size_t b = 0;
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(n_fft);
        while (b + 1 < bands.size() && f >= bands[b].upper_hz())
            ++b;
        profile[k] = band_delta[b];
    }

    if (params.smoothing) {
        // Sliding third-octave mean of the dB profile.
        std::vector<double> smoothed(n_bins);
        constexpr double kHalfBand = 1.1224620483089301;  // 2^(1/6)
        std::size_t lo = 0, hi = 0;  // window [lo, hi)
        double acc = 0.0;
        for (std::size_t k = 0; k < n_bins; ++k) {
            const auto want_lo =
                static_cast<std::size_t>(std::ceil(static_cast<double>(k) / kHalfBand));
            const auto want_hi = std::min(
                n_bins, static_cast<std::size_t>(std::floor(static_cast<double>(k) * kHalfBand)) + 1);
            while (hi < want_hi)
                acc += profile[hi++];
            while (lo < want_lo)
                acc -= profile[lo++];
            smoothed[k] = acc / static_cast<double>(hi - lo);
        }
        profile = std::move(smoothed);
    }

    GainProfile gains;
    gains.left_db.resize(n_bins);
    gains.right_db.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(n_fft);
        const double d =
            profile[k] * crossfade_weight(f, params.full_apply_upto_hz, params.transition_upto_hz);
        gains.right_db[k] = 0.5 * d;   // positive ITD favors the right ear
        gains.left_db[k] = -0.5 * d;
    }
    return gains;
}

SpectrumSet apply_transform(const SpectrumSet& set, const BandItdTable& itds,
                            const TransformParams& params, TransformReport* report)
{
    params.check();
    if (itds.azimuths_deg != set.azimuths_deg)
        throw ValidationError("apply_transform: ITD table azimuths do not match the HRTF set");
    if (itds.bands.empty())
        throw ValidationError("apply_transform: missing band coverage");
    const double fs = static_cast<double>(set.sample_rate_hz);

    SpectrumSet out = set;
    for (std::size_t i = 0; i < out.spectra.size(); ++i) {
        const auto& row = itds.itd_us[i];
        if (report) {
            for (const double itd : row) {
                const double d = std::fabs(delta_ild(itd, params));
                if (d > params.max_ild_db)
                    ++report->bands_over_max;
                report->max_abs_delta_ild_db = std::max(report->max_abs_delta_ild_db, d);
            }
        }
        const GainProfile gains = transform_gain_profile(row, itds.bands, params, set.n_fft, fs);
        auto& sp = out.spectra[i];
        const double energy_before = spectral_energy(sp);
        for (std::size_t k = 0; k < sp.left.size(); ++k) {
            const double gl = std::pow(10.0, gains.left_db[k] / 20.0);
            const double gr = std::pow(10.0, gains.right_db[k] / 20.0);
            if (!(gl > 0.0) || !(gr > 0.0))
                throw ValidationError("apply_transform: non-positive gain factor");
            sp.left[k] *= gl;
            sp.right[k] *= gr;
        }
        const double energy_after = spectral_energy(sp);
        const double scale = std::sqrt(energy_before / energy_after);
        for (std::size_t k = 0; k < sp.left.size(); ++k) {
            sp.left[k] *= scale;
            sp.right[k] *= scale;
        }
    }
    return out;
}

SpectrumSet remove_itd(const SpectrumSet& set)
{
    SpectrumSet out = set;
    const std::size_t last = set.n_fft / 2;
    for (auto& sp : out.spectra) {
        const auto phase_l = unwrapped_phase(sp.left);
        const auto phase_r = unwrapped_phase(sp.right);
        for (std::size_t k = 0; k < sp.left.size(); ++k) {
            const double mean = 0.5 * (phase_l[k] + phase_r[k]);
            const bool force_real = (k == 0 || k == last);
            sp.left[k] = from_polar(std::abs(sp.left[k]), mean, force_real);
            sp.right[k] = from_polar(std::abs(sp.right[k]), mean, force_real);
        }
    }
    return out;
}

SpectrumSet remove_ild(const SpectrumSet& set)
{
    SpectrumSet out = set;
    for (auto& sp : out.spectra) {
        for (std::size_t k = 0; k < sp.left.size(); ++k) {
            const double ml = std::abs(sp.left[k]);
            const double mr = std::abs(sp.right[k]);
            const double m = std::sqrt(0.5 * (ml * ml + mr * mr));
            // Zero-magnitude bins take the equalized magnitude with phase 0.
            sp.left[k] = (ml > 0.0) ? sp.left[k] * (m / ml) : std::complex<double>(m, 0.0);
            sp.right[k] = (mr > 0.0) ? sp.right[k] * (m / mr) : std::complex<double>(m, 0.0);
        }
    }
    return out;
}

HrtfDataset make_condition(const HrtfDataset& ds, ConditionName cond, const TransformParams& params,
                           SubBase sub_base, TransformReport* report)
{
    validate(ds);
    const std::string out_name = ds.name + "_" + condition_name_str(cond);
    switch (cond) {
    case ConditionName::unprocessed:
    case ConditionName::colocated: {
        // colocated is a scene-level alias; the HRTF itself stays untouched.
        HrtfDataset copy = ds;
        copy.name = out_name;
        return copy;
    }
    case ConditionName::noITD:
        return from_spectra(remove_itd(to_spectra(ds)), out_name);
    case ConditionName::noILD:
        return from_spectra(remove_ild(to_spectra(ds)), out_name);
    case ConditionName::transformITD_add: {
        const BandItdTable itds = estimate_itd_table(ds);
        return from_spectra(apply_transform(to_spectra(ds), itds, params, report), out_name);
    }
    case ConditionName::transformITD_sub: {
        // ITDs are always measured from the unprocessed set.
        const BandItdTable itds = estimate_itd_table(ds);
        SpectrumSet base = (sub_base == SubBase::noitd) ? remove_itd(to_spectra(ds))
                                                        : remove_ild(to_spectra(ds));
        return from_spectra(apply_transform(base, itds, params, report), out_name);
    }
    }
    throw ValidationError("invalid condition enum value");
}

}  // namespace binaural
