#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace crnoise {

enum class DbConvention {
    paper_20log,  ///< 20 log10 of the PSD value, matches the reference device's tabulated levels
    power_10log,  ///< 10 log10, the standard power-quantity convention
};

[[nodiscard]] std::string to_string(DbConvention convention);

/// One-sided density-scaled PSD on the grid k * df, k = 0 .. L/2.
struct Spectrum {
    double df = 0.0;
    std::vector<double> values;  ///< [unit^2/Hz]
    std::string window = "hann";
    std::size_t segment_length = 0;
    double overlap = 0.0;
    std::size_t segments = 0;
    /// Plain mean square of the samples covered by the segments.
    double covered_mean_square = 0.0;

    [[nodiscard]] double freq(std::size_t k) const noexcept { return static_cast<double>(k) * df; }
    [[nodiscard]] double max_freq() const noexcept { return values.empty() ? 0.0 : freq(values.size() - 1); }
    /// Sum of values * df.
    [[nodiscard]] double total_power() const noexcept;
    /// Linear interpolation on the grid.
    [[nodiscard]] double at(double freq_hz) const;
};

/// Largest power of two <= n / 8 (at least 16 when n allows).
[[nodiscard]] std::size_t default_segment_length(std::size_t n);

/// Hann-windowed, overlap-averaged one-sided periodogram. segment_length 0
/// selects default_segment_length.
[[nodiscard]] Spectrum welch_psd(std::span<const double> samples, double dt, std::size_t segment_length = 0,
                                 double overlap = 0.5);

/// Trapezoidal integral of the PSD over [f_center - B/2, f_center + B/2] with
/// linear interpolation at band edges that fall between grid points.
[[nodiscard]] double band_power(const Spectrum& spectrum, double f_center, double bandwidth);

[[nodiscard]] double rms_from_mean_square(double mean_square);

[[nodiscard]] double to_db(double psd_value, DbConvention convention = DbConvention::paper_20log);

/// CSV with header `f_hz,psd,psd_db_paper,psd_db_power`. Zero bins print -inf.
void write_csv(std::ostream& out, const Spectrum& spectrum);

}  // namespace crnoise
