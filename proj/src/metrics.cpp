#include "qimsteg/metrics.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qimsteg/errors.hpp"

namespace qimsteg::metrics {

namespace {

void require_same_range(const Histogram& a, const Histogram& b) {
    if (a.lo != b.lo || a.hi != b.hi || a.counts.size() != b.counts.size()) {
        throw RangeMismatch("histograms cover different value ranges");
    }
}

double abs_diff(std::uint64_t a, std::uint64_t b) { return static_cast<double>(a > b ? a - b : b - a); }

}  // namespace

Histogram::Histogram(int lo_, int hi_) : lo(lo_), hi(hi_) {
    if (lo_ > hi_) throw std::invalid_argument("histogram lower bound exceeds upper bound");
    counts.assign(static_cast<std::size_t>(hi_ - lo_ + 1), 0);
}

void Histogram::add(std::int32_t value) {
    if (value < lo || value > hi) {
        ++overflow;
    } else {
        ++counts[static_cast<std::size_t>(value - lo)];
    }
}

std::uint64_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), overflow); }

double mse(const jpeg::PixelPlane& a, const jpeg::PixelPlane& b) {
    if (a.width != b.width || a.height != b.height || a.samples.size() != b.samples.size()) {
        throw DimensionMismatch("pixel planes differ in size: " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                                " vs " + std::to_string(b.width) + "x" + std::to_string(b.height));
    }
    if (a.samples.empty()) return 0.0;
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const int d = int{a.samples[i]} - int{b.samples[i]};
        sum += static_cast<std::uint64_t>(d * d);
    }
    return static_cast<double>(sum) / static_cast<double>(a.samples.size());
}

double psnr(const jpeg::PixelPlane& a, const jpeg::PixelPlane& b) {
    const double m = mse(a, b);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

Histogram ac_histogram(const jpeg::JpegImage& image, int lo, int hi) {
    Histogram h(lo, hi);
    for (const auto& block : image.luma().blocks) {
        for (std::size_t k = 1; k < block.coeffs.size(); ++k) h.add(block[k]);
    }
    return h;
}

double chi_square(const Histogram& a, const Histogram& b) {
    require_same_range(a, b);
    auto term = [](std::uint64_t x, std::uint64_t y) {
        if (x == 0 && y == 0) return 0.0;
        const double d = abs_diff(x, y);
        return d * d / static_cast<double>(x + y);
    };
    double sum = term(a.overflow, b.overflow);
    for (std::size_t i = 0; i < a.counts.size(); ++i) sum += term(a.counts[i], b.counts[i]);
    return sum;
}

double l1_distance(const Histogram& a, const Histogram& b) {
    require_same_range(a, b);
    double sum = abs_diff(a.overflow, b.overflow);
    for (std::size_t i = 0; i < a.counts.size(); ++i) sum += abs_diff(a.counts[i], b.counts[i]);
    return sum;
}

QualityReport compare(const jpeg::JpegImage& cover, const jpeg::JpegImage& stego, int lo, int hi) {
    QualityReport r;
    const auto pa = jpeg::decode_pixels(cover);
    const auto pb = jpeg::decode_pixels(stego);
    r.mse = mse(pa, pb);
    r.psnr_db = psnr(pa, pb);
    const auto ha = ac_histogram(cover, lo, hi);
    const auto hb = ac_histogram(stego, lo, hi);
    r.chi_square = chi_square(ha, hb);
    r.l1_distance = l1_distance(ha, hb);
    return r;
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(10);
    os << v;
    return os.str();
}

void write_csv(std::ostream& out, const Histogram& h) {
    out << "value,count\n";
    for (int v = h.lo; v <= h.hi; ++v) out << v << ',' << h.count(v) << '\n';
    out << "overflow," << h.overflow << '\n';
}

void write_csv(std::ostream& out, const QualityReport& r) {
    out << "psnr_db,mse,chi_square,l1_distance\n"
        << format_number(r.psnr_db) << ',' << format_number(r.mse) << ',' << format_number(r.chi_square) << ','
        << format_number(r.l1_distance) << '\n';
}

}  // namespace qimsteg::metrics
