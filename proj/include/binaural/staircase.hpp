#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace binaural {

// Test frequency with its pi-phase-shift ITD ceiling: max = 1e6/(2f) us,
// start = max/2.
struct FrequencyCondition {
    double freq_hz = 0.0;
    double max_itd_us = 0.0;
    double start_itd_us = 0.0;
};

std::vector<double> staircase_frequencies();  // {250, 500, 750, 1000, 1250}
FrequencyCondition frequency_condition(double freq_hz);

// Log-domain ITD ("dB" re 1 us): 20*log10 and its exact inverse.
double itd_lin_to_log(double itd_us);
double itd_log_to_lin(double log_itd);

// ITD (us) to interaural phase difference in radians, wrapped into [0, 2pi).
double itd_to_ipd(double itd_us, double freq_hz);

struct StimulusSpec {
    double duration_ms = 500.0;
    double ramp_ms = 50.0;  // Hann fade in/out
    double gap_ms = 500.0;
    double level_db_spl = 75.0;
    int sample_rate_hz = 44100;
};

// Which side the *second* interval is lateralized to relative to the first:
// left_right = first interval shifted left, second shifted right.
enum class SideOrder { left_right, right_left };

struct TrialAudio {
    std::vector<double> left;
    std::vector<double> right;
    std::size_t interval_offset[2] = {0, 0};
    std::size_t interval_length = 0;
    int sample_rate_hz = 0;
};

// Two Hann-gated sinusoids lateralized by equal-and-opposite phase shifts of
// +-IPD/2; every channel of every interval is normalized to the exact RMS
// implied by level_db_spl so interval level is independent of the ITD.
TrialAudio synth_trial(double itd_us, SideOrder order, const StimulusSpec& spec, double freq_hz,
                       double spl_offset_db = 100.0);

// Training variant: lateralization by attenuating the contralateral channel
// by ild_db instead of phase shifting.
TrialAudio synth_training_trial(double ild_db, SideOrder order, const StimulusSpec& spec,
                                double freq_hz, double spl_offset_db = 100.0);

class Responder {
public:
    virtual ~Responder() = default;
    // Answer for one trial: which order the responder believes was presented.
    virtual SideOrder respond(double log_itd, SideOrder presented) = 0;
};

// p(correct | x) = lapse/2 + (1-lapse) * (0.5 + 0.5/(1+exp(-(x-mu)/slope))).
class SimulatedResponder : public Responder {
public:
    SimulatedResponder(double threshold_mu_log, double slope, double lapse, std::uint64_t seed);
    SideOrder respond(double log_itd, SideOrder presented) override;
    double p_correct(double log_itd) const;

private:
    double mu_, slope_, lapse_;
    std::mt19937_64 engine_;
};

class PerfectResponder : public Responder {
public:
    SideOrder respond(double, SideOrder presented) override { return presented; }
};

class AlwaysWrongResponder : public Responder {
public:
    SideOrder respond(double, SideOrder presented) override
    {
        return presented == SideOrder::left_right ? SideOrder::right_left
                                                  : SideOrder::left_right;
    }
};

// Fixed answer list; throws when the track outlives the script.
class ScriptedResponder : public Responder {
public:
    explicit ScriptedResponder(std::vector<SideOrder> answers) : answers_(std::move(answers)) {}
    SideOrder respond(double, SideOrder) override;

private:
    std::vector<SideOrder> answers_;
    std::size_t next_ = 0;
};

// Log-ITD at which the simulated responder crosses p_target (70.7% for the
// 1-up/2-down convergence point).
double simulated_threshold_log(double mu, double slope, double lapse,
                               double p_target = 0.7071067811865476);

struct StopRule {
    int reversals_at_final_step = 8;  // reversals counted at the 1 "dB" step
    int threshold_reversals = 6;      // averaged for the threshold
    int max_trials = 400;
    int ceiling_window = 20;          // saturation detector
    double ceiling_fraction = 0.8;
};

struct TrialRecord {
    double itd_us = 0.0;
    SideOrder presented = SideOrder::left_right;
    SideOrder response = SideOrder::left_right;
    bool correct = false;
};

struct TrackResult {
    double threshold_log_itd = 0.0;
    double threshold_us = 0.0;
    bool saturated_at_max = false;
    std::vector<double> reversal_log_itds;
    std::vector<TrialRecord> trials;
};

// Adaptive 1-up/2-down track with log steps {8, 4, 2, 1} "dB"; the step
// shrinks after every 2nd reversal; presented ITDs are clamped to
// [1 us, max_itd_us]. Deterministic given (seed, responder state, stop rule).
TrackResult run_track(const FrequencyCondition& cond, Responder& responder, const StopRule& stop,
                      std::uint64_t seed);

struct NhReference {
    double mean_us = 0.0;
    double sd_us = 0.0;
};

// {freq_hz: {mean_us, sd_us}}; keys beginning with '_' are ignored.
std::map<double, NhReference> load_nh_reference(const std::filesystem::path& path);

// Mean over the five test frequencies of (X_HI - mean_NH) / sd_NH.
double z_composite(const std::map<double, double>& subject_thresholds_us,
                   const std::map<double, NhReference>& nh_ref);

void write_track_csv(const std::filesystem::path& path, const TrackResult& track);

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace binaural
