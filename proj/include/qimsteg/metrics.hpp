#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qimsteg/jpeg.hpp"

namespace qimsteg::metrics {

inline constexpr int kDefaultHistogramLo = -60;
inline constexpr int kDefaultHistogramHi = 60;

/// Counts of integer values in [lo, hi]; everything else lands in overflow.
struct Histogram {
    int lo = kDefaultHistogramLo;
    int hi = kDefaultHistogramHi;
    std::vector<std::uint64_t> counts;
    std::uint64_t overflow = 0;

    Histogram() = default;
    Histogram(int lo_, int hi_);

    void add(std::int32_t value);
    std::uint64_t count(int value) const { return counts[static_cast<std::size_t>(value - lo)]; }
    std::uint64_t total() const;

    bool operator==(const Histogram&) const = default;
};

struct QualityReport {
    double psnr_db = 0.0;
    double mse = 0.0;
    double chi_square = 0.0;
    double l1_distance = 0.0;
};

double mse(const jpeg::PixelPlane& a, const jpeg::PixelPlane& b);

/// 10 log10(255^2 / MSE); +infinity for identical planes. Throws DimensionMismatch.
double psnr(const jpeg::PixelPlane& a, const jpeg::PixelPlane& b);

/// Histogram of every luma AC coefficient (zigzag 1..63, all blocks).
Histogram ac_histogram(const jpeg::JpegImage& image, int lo = kDefaultHistogramLo, int hi = kDefaultHistogramHi);

/// Symmetric chi-square distance: sum of (a - b)^2 / (a + b) over bins where
/// either count is non-zero. The overflow bucket counts as one more bin.
/// Throws RangeMismatch.
double chi_square(const Histogram& a, const Histogram& b);

/// Sum of absolute count differences, overflow included. Throws RangeMismatch.
double l1_distance(const Histogram& a, const Histogram& b);

/// Compares the decoded luminance and luma AC histograms of two images.
QualityReport compare(const jpeg::JpegImage& cover, const jpeg::JpegImage& stego, int lo = kDefaultHistogramLo,
                      int hi = kDefaultHistogramHi);

/// Two-column CSV: header "value,count", one row per bin, then "overflow,N".
void write_csv(std::ostream& out, const Histogram& h);

/// Header "psnr_db,mse,chi_square,l1_distance" plus one data row.
void write_csv(std::ostream& out, const QualityReport& r);

/// Shortest round-trippable text for a double; "inf" for +infinity.
std::string format_number(double v);

}  // namespace qimsteg::metrics
