#include "crnoise/spectral.hpp"

#include "crnoise/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

namespace crnoise {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(double* p) const noexcept { fftw_free(p); }
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

class RealFft {
public:
    explicit RealFft(std::size_t n)
        : n_(n),
          in_(static_cast<double*>(fftw_malloc(sizeof(double) * n))),
          out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)))) {
        if (!in_ || !out_) {
            throw NumericalError("FFT buffer allocation failed");
        }
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_.get(), out_.get(), FFTW_ESTIMATE);
        if (plan_ == nullptr) {
            throw NumericalError("FFT planning failed");
        }
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    ~RealFft() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }

    double* input() noexcept { return in_.get(); }
    const fftw_complex* output() const noexcept { return out_.get(); }
    void execute() noexcept { fftw_execute(plan_); }

private:
    std::size_t n_;
    std::unique_ptr<double, FftwDeleter> in_;
    std::unique_ptr<fftw_complex, FftwDeleter> out_;
    fftw_plan plan_ = nullptr;
};

}  // namespace

std::string to_string(DbConvention convention) {
    return convention == DbConvention::paper_20log ? "paper_20log" : "power_10log";
}

double Spectrum::total_power() const noexcept {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * df;
}

double Spectrum::at(double freq_hz) const {
    if (values.empty() || !(freq_hz >= 0.0) || freq_hz > max_freq()) {
        throw ConfigError("frequency outside spectrum grid");
    }
    const double pos = freq_hz / df;
    const auto k = static_cast<std::size_t>(std::floor(pos));
    if (k + 1 >= values.size()) {
        return values.back();
    }
    const double frac = pos - static_cast<double>(k);
    return values[k] + frac * (values[k + 1] - values[k]);
}

std::size_t default_segment_length(std::size_t n) {
    std::size_t target = n / 8;
    if (target < 16) {
        target = std::min<std::size_t>(n, 16);
    }
    std::size_t len = 1;
    while (len * 2 <= target) len *= 2;
    return len;
}

Spectrum welch_psd(std::span<const double> samples, double dt, std::size_t segment_length, double overlap) {
    if (!(dt > 0.0)) {
        throw ConfigError("sample interval must be positive");
    }
    if (!(overlap >= 0.0 && overlap < 1.0)) {
        throw ConfigError("overlap must lie in [0, 1)");
    }
    if (segment_length == 0) {
        segment_length = default_segment_length(samples.size());
    }
    if (segment_length < 2 || segment_length > samples.size()) {
        std::ostringstream os;
        os << "series too short: " << samples.size() << " samples for segment length " << segment_length;
        throw ConfigError(os.str());
    }

    const std::size_t L = segment_length;
    const auto overlap_samples = static_cast<std::size_t>(std::llround(overlap * static_cast<double>(L)));
    const std::size_t step = std::max<std::size_t>(1, L - std::min(overlap_samples, L - 1));
    const std::size_t segments = (samples.size() - L) / step + 1;

    std::vector<double> window(L);
    double wss = 0.0;
    for (std::size_t n = 0; n < L; ++n) {
        window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(L));
        wss += window[n] * window[n];
    }

    const double fs = 1.0 / dt;
    const std::size_t bins = L / 2 + 1;
    Spectrum spec;
    spec.df = fs / static_cast<double>(L);
    spec.values.assign(bins, 0.0);
    spec.segment_length = L;
    spec.overlap = overlap;
    spec.segments = segments;

    RealFft fft(L);
    for (std::size_t s = 0; s < segments; ++s) {
        const double* seg = samples.data() + s * step;
        double* in = fft.input();
        for (std::size_t n = 0; n < L; ++n) in[n] = window[n] * seg[n];
        fft.execute();
        const fftw_complex* out = fft.output();
        for (std::size_t k = 0; k < bins; ++k) {
            spec.values[k] += out[k][0] * out[k][0] + out[k][1] * out[k][1];
        }
    }

    const double scale = 1.0 / (fs * wss * static_cast<double>(segments));
    for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = k == 0 || (L % 2 == 0 && k == bins - 1);
        spec.values[k] *= scale * (edge ? 1.0 : 2.0);
    }

    const std::size_t covered = (segments - 1) * step + L;
    double ms = 0.0;
    for (std::size_t n = 0; n < covered; ++n) ms += samples[n] * samples[n];
    spec.covered_mean_square = ms / static_cast<double>(covered);
    return spec;
}

double band_power(const Spectrum& spectrum, double f_center, double bandwidth) {
    if (!(bandwidth >= 0.0)) {
        throw ConfigError("bandwidth must be non-negative");
    }
    if (bandwidth == 0.0) {
        return 0.0;
    }
    const double lo = f_center - 0.5 * bandwidth;
    const double hi = f_center + 0.5 * bandwidth;
    if (spectrum.values.size() < 2 || lo < 0.0 || hi > spectrum.max_freq()) {
        std::ostringstream os;
        os << "band [" << lo << ", " << hi << "] Hz outside spectrum grid [0, " << spectrum.max_freq() << "] Hz";
        throw ConfigError(os.str());
    }

    // Breakpoints: lo, interior grid points, hi.
    const double df = spectrum.df;
    auto first = static_cast<std::size_t>(std::floor(lo / df)) + 1;
    double total = 0.0;
    double f_prev = lo;
    double v_prev = spectrum.at(lo);
    for (std::size_t k = first; k < spectrum.values.size() && spectrum.freq(k) < hi; ++k) {
        const double f = spectrum.freq(k);
        const double v = spectrum.values[k];
        total += 0.5 * (v + v_prev) * (f - f_prev);
        f_prev = f;
        v_prev = v;
    }
    const double v_hi = spectrum.at(hi);
    total += 0.5 * (v_hi + v_prev) * (hi - f_prev);
    return total;
}

double rms_from_mean_square(double mean_square) {
    if (!(mean_square >= 0.0)) {
        throw ConfigError("mean square must be non-negative");
    }
    return std::sqrt(mean_square);
}

double to_db(double psd_value, DbConvention convention) {
    if (!(psd_value > 0.0)) {
        throw ConfigError("dB conversion needs a positive value");
    }
    const double factor = convention == DbConvention::paper_20log ? 20.0 : 10.0;
    return factor * std::log10(psd_value);
}

void write_csv(std::ostream& out, const Spectrum& spectrum) {
    out << "f_hz,psd,psd_db_paper,psd_db_power\n";
    char buf[128];
    for (std::size_t k = 0; k < spectrum.values.size(); ++k) {
        const double v = spectrum.values[k];
        if (v > 0.0) {
            std::snprintf(buf, sizeof buf, "%.9e,%.9e,%.6f,%.6f\n", spectrum.freq(k), v,
                          to_db(v, DbConvention::paper_20log), to_db(v, DbConvention::power_10log));
        } else {
            std::snprintf(buf, sizeof buf, "%.9e,%.9e,-inf,-inf\n", spectrum.freq(k), v);
        }
        out << buf;
    }
}

}  // namespace crnoise
