// Adaptive 1-up/2-down ITD threshold tracks with logarithmic steps, the
// phase-shifted sinusoid stimulus, pluggable responders, and the Z-score
// composite against a user-supplied normal-hearing reference.

#include "binaural/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "binaural/errors.hpp"

namespace binaural {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Portable draws: std distributions are implementation-defined, these are not.
bool coin(std::mt19937_64& engine)
{
    return (engine() & 1u) != 0;
}

double uniform01(std::mt19937_64& engine)
{
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

SideOrder flipped(SideOrder order)
{
    return order == SideOrder::left_right ? SideOrder::right_left : SideOrder::left_right;
}

std::vector<double> hann_gate(std::size_t n, std::size_t ramp)
{
    std::vector<double> w(n, 1.0);
    for (std::size_t i = 0; i < ramp && i < n; ++i) {
        const double g = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(i) / static_cast<double>(ramp)));
        w[i] *= g;
        w[n - 1 - i] *= g;
    }
    return w;
}

void normalize_rms(std::vector<double>& x, double target_rms)
{
    double acc = 0.0;
    for (double v : x)
        acc += v * v;
    const double rms = std::sqrt(acc / static_cast<double>(x.size()));
    if (rms <= 0.0)
        throw ValidationError("synth_trial: zero-energy interval");
    const double g = target_rms / rms;
    for (double& v : x)
        v *= g;
}

TrialAudio assemble_trial(const std::vector<double> (&intervals)[2][2], const StimulusSpec& spec)
{
    const std::size_t n = intervals[0][0].size();
    const auto gap = static_cast<std::size_t>(
        std::lround(spec.gap_ms * 1e-3 * static_cast<double>(spec.sample_rate_hz)));
    TrialAudio out;
    out.sample_rate_hz = spec.sample_rate_hz;
    out.interval_length = n;
    out.interval_offset[0] = 0;
    out.interval_offset[1] = n + gap;
    out.left.assign(2 * n + gap, 0.0);
    out.right.assign(2 * n + gap, 0.0);
    for (int iv = 0; iv < 2; ++iv) {
        std::copy(intervals[iv][0].begin(), intervals[iv][0].end(),
                  out.left.begin() + static_cast<long>(out.interval_offset[iv]));
        std::copy(intervals[iv][1].begin(), intervals[iv][1].end(),
                  out.right.begin() + static_cast<long>(out.interval_offset[iv]));
    }
    return out;
}

}  // namespace

std::vector<double> staircase_frequencies()
{
    return {250.0, 500.0, 750.0, 1000.0, 1250.0};
}

FrequencyCondition frequency_condition(double freq_hz)
{
    const auto freqs = staircase_frequencies();
    if (std::find(freqs.begin(), freqs.end(), freq_hz) == freqs.end())
        throw ValidationError(std::to_string(freq_hz) + " Hz is not a staircase test frequency");
    FrequencyCondition cond;
    cond.freq_hz = freq_hz;
    cond.max_itd_us = 1e6 / (2.0 * freq_hz);  // phase shift of pi
    cond.start_itd_us = cond.max_itd_us / 2.0;
    return cond;
}

double itd_lin_to_log(double itd_us)
{
    if (!(itd_us > 0.0))
        throw ValidationError("itd_lin_to_log: ITD must be positive");
    return 20.0 * std::log10(itd_us);
}

double itd_log_to_lin(double log_itd)
{
    return std::pow(10.0, log_itd / 20.0);
}

double itd_to_ipd(double itd_us, double freq_hz)
{
    if (itd_us < 0.0)
        throw ValidationError("itd_to_ipd: ITD must be non-negative");
    const double degrees = 360.0 * freq_hz * itd_us * 1e-6;
    double rad = degrees * kPi / 180.0;
    rad = std::fmod(rad, 2.0 * kPi);
    if (rad < 0.0)
        rad += 2.0 * kPi;
    return rad;
}

TrialAudio synth_trial(double itd_us, SideOrder order, const StimulusSpec& spec, double freq_hz,
                       double spl_offset_db)
{
    const FrequencyCondition cond = frequency_condition(freq_hz);
    if (itd_us > cond.max_itd_us * (1.0 + 1e-12))
        throw ValidationError("synth_trial: ITD exceeds the pi-phase maximum for this frequency");
    if (spec.ramp_ms > spec.duration_ms / 2.0)
        throw ValidationError("synth_trial: ramp longer than half the interval");

    const double fs = static_cast<double>(spec.sample_rate_hz);
    const auto n = static_cast<std::size_t>(std::lround(spec.duration_ms * 1e-3 * fs));
    const auto ramp = static_cast<std::size_t>(std::lround(spec.ramp_ms * 1e-3 * fs));
    const auto gate = hann_gate(n, ramp);
    const double ipd = itd_to_ipd(itd_us, freq_hz);
    const double target_rms = std::pow(10.0, (spec.level_db_spl - spl_offset_db) / 20.0);

    // interval lateralized left = left ear leads = left phase advanced.
    std::vector<double> intervals[2][2];
    for (int iv = 0; iv < 2; ++iv) {
        const bool left_side = (iv == 0) == (order == SideOrder::left_right);
        const double half = (left_side ? 1.0 : -1.0) * ipd / 2.0;
        for (int ear = 0; ear < 2; ++ear) {
            const double phase = (ear == 0) ? half : -half;
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = gate[i] * std::sin(2.0 * kPi * freq_hz * static_cast<double>(i) / fs + phase);
            normalize_rms(x, target_rms);
            intervals[iv][ear] = std::move(x);
        }
    }
    return assemble_trial(intervals, spec);
}

TrialAudio synth_training_trial(double ild_db, SideOrder order, const StimulusSpec& spec,
                                double freq_hz, double spl_offset_db)
{
    const FrequencyCondition cond = frequency_condition(freq_hz);
    (void)cond;
    const double fs = static_cast<double>(spec.sample_rate_hz);
    const auto n = static_cast<std::size_t>(std::lround(spec.duration_ms * 1e-3 * fs));
    const auto ramp = static_cast<std::size_t>(std::lround(spec.ramp_ms * 1e-3 * fs));
    const auto gate = hann_gate(n, ramp);
    const double target_rms = std::pow(10.0, (spec.level_db_spl - spl_offset_db) / 20.0);
    const double atten = std::pow(10.0, -std::fabs(ild_db) / 20.0);

    std::vector<double> intervals[2][2];
    for (int iv = 0; iv < 2; ++iv) {
        const bool left_side = (iv == 0) == (order == SideOrder::left_right);
        for (int ear = 0; ear < 2; ++ear) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = gate[i] * std::sin(2.0 * kPi * freq_hz * static_cast<double>(i) / fs);
            normalize_rms(x, target_rms);
            // decrease the amplitude on the side away from the percept
            const bool contralateral = (ear == 0) != left_side;
            if (contralateral)
                for (double& v : x)
                    v *= atten;
            intervals[iv][ear] = std::move(x);
        }
    }
    return assemble_trial(intervals, spec);
}

SimulatedResponder::SimulatedResponder(double threshold_mu_log, double slope, double lapse,
                                       std::uint64_t seed)
    : mu_(threshold_mu_log), slope_(slope), lapse_(lapse), engine_(seed)
{
    if (slope_ <= 0.0)
        throw ValidationError("SimulatedResponder: slope must positive");
    if (lapse_ < 0.0 || lapse_ >= 1.0)
        throw ValidationError("SimulatedResponder: lapse must be in [0, 1)");
}

double SimulatedResponder::p_correct(double log_itd) const
{
    const double sigmoid = 1.0 / (1.0 + std::exp(-(log_itd - mu_) / slope_));
    return lapse_ / 2.0 + (1.0 - lapse_) * (0.5 + 0.5 * sigmoid);
}

SideOrder SimulatedResponder::respond(double log_itd, SideOrder presented)
{
    return uniform01(engine_) < p_correct(log_itd) ? presented : flipped(presented);
}

SideOrder ScriptedResponder::respond(double, SideOrder)
{
    if (next_ >= answers_.size())
        throw ValidationError("scripted responder ran out of answers before the track finished");
    return answers_[next_++];
}

double simulated_threshold_log(double mu, double slope, double lapse, double p_target)
{
    const double sigmoid = 2.0 * (p_target - lapse / 2.0) / (1.0 - lapse) - 1.0;
    if (!(sigmoid > 0.0 && sigmoid < 1.0))
        throw ValidationError("simulated_threshold_log: target not reachable");
    return mu + slope * std::log(sigmoid / (1.0 - sigmoid));
}

TrackResult run_track(const FrequencyCondition& cond, Responder& responder, const StopRule& stop,
                      std::uint64_t seed)
{
    static constexpr double kSteps[] = {8.0, 4.0, 2.0, 1.0};
    constexpr int kFinalStep = 3;

    const double x_min = 0.0;  // 1 us
    const double x_max = itd_lin_to_log(cond.max_itd_us);
    std::mt19937_64 engine(seed);

    TrackResult result;
    double x = itd_lin_to_log(cond.start_itd_us);
    int step_index = 0;
    int consecutive_correct = 0;
    int last_direction = 0;
    int reversals_at_final = 0;

    while (static_cast<int>(result.trials.size()) < stop.max_trials) {
        const double itd_us = itd_log_to_lin(x);
        const SideOrder presented = coin(engine) ? SideOrder::left_right : SideOrder::right_left;
        const SideOrder response = responder.respond(x, presented);
        const bool correct = response == presented;
        result.trials.push_back({itd_us, presented, response, correct});

        // Saturation: the subject sits at the ceiling for the whole window.
        if (static_cast<int>(result.trials.size()) >= stop.ceiling_window) {
            int at_ceiling = 0;
            for (std::size_t i = result.trials.size() - static_cast<std::size_t>(stop.ceiling_window);
                 i < result.trials.size(); ++i)
                if (result.trials[i].itd_us >= cond.max_itd_us * (1.0 - 1e-12))
                    ++at_ceiling;
            if (at_ceiling >= static_cast<int>(std::ceil(stop.ceiling_fraction * stop.ceiling_window))) {
                result.saturated_at_max = true;
                result.threshold_us = cond.max_itd_us;
                result.threshold_log_itd = x_max;
                return result;
            }
        }

        int direction = 0;
        if (correct) {
            if (++consecutive_correct == 2) {
                consecutive_correct = 0;
                direction = -1;
            }
        } else {
            consecutive_correct = 0;
            direction = +1;
        }
        if (direction != 0) {
            if (last_direction != 0 && direction != last_direction) {
                result.reversal_log_itds.push_back(x);
                const auto total = static_cast<int>(result.reversal_log_itds.size());
                if (step_index == kFinalStep) {
                    if (++reversals_at_final >= stop.reversals_at_final_step)
                        break;
                } else {
                    step_index = std::min(kFinalStep, total / 2);
                }
            }
            last_direction = direction;
            x = std::clamp(x + static_cast<double>(direction) * kSteps[step_index], x_min, x_max);
        }
    }

    const auto& rev = result.reversal_log_itds;
    if (!rev.empty()) {
        const auto n = std::min<std::size_t>(static_cast<std::size_t>(stop.threshold_reversals),
                                             rev.size());
        double acc = 0.0;
        for (std::size_t i = rev.size() - n; i < rev.size(); ++i)
            acc += rev[i];
        result.threshold_log_itd = acc / static_cast<double>(n);
    } else {
        result.threshold_log_itd = x;
    }
    result.threshold_us = itd_log_to_lin(result.threshold_log_itd);
    return result;
}

std::map<double, NhReference> load_nh_reference(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError("load_nh_reference: cannot open " + path.string());
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_nh_reference: " + std::string(e.what()));
    }
    std::map<double, NhReference> ref;
    for (const auto& [key, value] : j.items()) {
        if (!key.empty() && key.front() == '_')
            continue;
        NhReference r;
        r.mean_us = value.at("mean_us").get<double>();
        r.sd_us = value.at("sd_us").get<double>();
        ref[std::stod(key)] = r;
    }
    return ref;
}

double z_composite(const std::map<double, double>& subject_thresholds_us,
                   const std::map<double, NhReference>& nh_ref)
{
    const auto freqs = staircase_frequencies();
    double acc = 0.0;
    for (const double f : freqs) {
        const auto xi = subject_thresholds_us.find(f);
        const auto ni = nh_ref.find(f);
        if (xi == subject_thresholds_us.end())
            throw ValidationError("z_composite: missing subject threshold at " + std::to_string(f));
        if (ni == nh_ref.end())
            throw ValidationError("z_composite: missing NH reference at " + std::to_string(f));
        if (!(ni->second.sd_us > 0.0))
            throw ValidationError("z_composite: NH reference SD must be positive");
        acc += (xi->second - ni->second.mean_us) / ni->second.sd_us;
    }
    return acc / static_cast<double>(freqs.size());
}

void write_track_csv(const std::filesystem::path& path, const TrackResult& track)
{
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp);
        if (!f)
            throw IoError("write_track_csv: cannot write " + path.string());
        f.precision(12);
        f << "trial,itd_us,presented,response,correct\n";
        for (std::size_t i = 0; i < track.trials.size(); ++i) {
            const auto& t = track.trials[i];
            f << i << "," << t.itd_us << ","
              << (t.presented == SideOrder::left_right ? "LR" : "RL") << ","
              << (t.response == SideOrder::left_right ? "LR" : "RL") << ","
              << (t.correct ? 1 : 0) << "\n";
        }
    }
    std::filesystem::rename(tmp, path);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
    // splitmix64 round over the combined words
    std::uint64_t z = a + 0x9E3779B97F4A7C15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace binaural
