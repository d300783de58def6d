#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "qimsteg/errors.hpp"
#include "qimsteg/jpeg.hpp"
#include "qimsteg/metrics.hpp"
#include "qimsteg/stego.hpp"

namespace qimsteg::cli {

namespace fs = std::filesystem;

namespace {

using metrics::format_number;

/// Runs body and maps library errors to exit codes.
template <typename Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const InsufficientCapacity& e) {
        err << "error: insufficient capacity: " << e.what() << '\n';
        return kInsufficientCapacity;
    } catch (const LengthOutOfRange& e) {
        err << "error: no message found or wrong parameters (" << e.what() << ")\n";
        return kLengthOutOfRange;
    } catch (const MalformedStream& e) {
        err << "error: malformed JPEG: " << e.what() << '\n';
        return kMalformedStream;
    } catch (const UnsupportedJpeg& e) {
        err << "error: unsupported JPEG: " << e.what() << '\n';
        return kUnsupportedJpeg;
    } catch (const DimensionMismatch& e) {
        err << "error: " << e.what() << '\n';
        return kDimensionMismatch;
    } catch (const EncodingOverflow& e) {
        err << "error: " << e.what() << '\n';
        return kEncodingOverflow;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
}

/// Writes via a temporary sibling and renames, so a failed run never leaves a
/// partial file behind.
void write_atomically(const fs::path& path, std::span<const std::uint8_t> bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    jpeg::write_file(tmp, bytes);
    fs::rename(tmp, path);
}

bool same_coefficients(const jpeg::JpegImage& a, const jpeg::JpegImage& b) {
    return a.coeff_planes == b.coeff_planes && a.quant_tables == b.quant_tables && a.frame == b.frame &&
           a.restart_interval == b.restart_interval;
}

std::string step_histogram_text(const stego::EmbedReport& report) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [q, n] : report.step_histogram) {
        os << (first ? "" : " ") << "q" << q << '=' << n;
        first = false;
    }
    return os.str();
}

void print_report(std::ostream& out, const stego::EmbedReport& r) {
    out << "bits_embedded: " << r.bits_embedded << '\n'
        << "capacity_bits: " << r.capacity_bits << '\n'
        << "blocks_used: " << r.blocks_used << '\n'
        << "step_histogram: " << step_histogram_text(r) << '\n';
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct ExperimentRow {
    std::string image_id;
    std::size_t capacity_bits = 0;
    double psnr_adaptive_db = 0.0;
    double psnr_fixed_db = 0.0;
    double chi2_adaptive = 0.0;
    double chi2_fixed = 0.0;
    double mean_q = 0.0;
};

struct ImageOutcome {
    std::vector<ExperimentRow> rows;
    std::vector<std::string> warnings;
};

ImageOutcome run_image(const fs::path& path, const ExperimentOptions& opts) {
    ImageOutcome outcome;
    const std::string id = path.filename().string();
    jpeg::JpegImage cover;
    try {
        cover = jpeg::parse_file(path);
    } catch (const std::exception& e) {
        outcome.warnings.push_back("skipped " + id + ": " + e.what());
        return outcome;
    }
    const auto cover_pixels = jpeg::decode_pixels(cover);
    const auto cover_hist = metrics::ac_histogram(cover, opts.range_lo, opts.range_hi);
    const std::size_t available = stego::capacity(cover, opts.params);
    const std::size_t largest = *std::max_element(opts.capacities.begin(), opts.capacities.end());
    const auto stream = experiment_payload(opts.seed, id, stego::payload_bytes_for(largest));
    const qim::StepValue fixed_q(opts.fixed_q);

    for (std::size_t bits : opts.capacities) {
        if (bits > available || bits < stego::kLengthHeaderBits) {
            outcome.warnings.push_back("skipped " + id + " at " + std::to_string(bits) + " bits: image holds " +
                                       std::to_string(available));
            continue;
        }
        const std::span<const std::uint8_t> payload(stream.data(), stego::payload_bytes_for(bits));
        const auto adaptive = stego::embed_message(cover, payload, opts.params);
        const auto fixed = stego::embed_message_fixed_q(cover, payload, fixed_q, opts.params);

        // Measure what a receiver would see: the written file, re-read.
        const auto adaptive_img = jpeg::parse(jpeg::serialize(adaptive.image));
        const auto fixed_img = jpeg::parse(jpeg::serialize(fixed.image));

        ExperimentRow row;
        row.image_id = id;
        row.capacity_bits = bits;
        row.psnr_adaptive_db = metrics::psnr(cover_pixels, jpeg::decode_pixels(adaptive_img));
        row.psnr_fixed_db = metrics::psnr(cover_pixels, jpeg::decode_pixels(fixed_img));
        row.chi2_adaptive = metrics::chi_square(cover_hist, metrics::ac_histogram(adaptive_img, opts.range_lo, opts.range_hi));
        row.chi2_fixed = metrics::chi_square(cover_hist, metrics::ac_histogram(fixed_img, opts.range_lo, opts.range_hi));
        row.mean_q = adaptive.report.mean_step();
        outcome.rows.push_back(row);
    }
    return outcome;
}

std::vector<fs::path> list_jpegs(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == ".jpg" || ext == ".jpeg") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

std::vector<std::uint8_t> experiment_payload(std::uint64_t seed, const std::string& image_id, std::size_t bytes) {
    std::mt19937_64 rng(seed ^ fnv1a(image_id));
    std::vector<std::uint8_t> out(bytes);
    for (std::size_t i = 0; i < bytes; i += 8) {
        std::uint64_t word = rng();
        for (std::size_t j = i; j < std::min(bytes, i + 8); ++j, word >>= 8) out[j] = static_cast<std::uint8_t>(word);
    }
    return out;
}

int cmd_embed(const EmbedOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        opts.params.validate();
        const auto cover = jpeg::parse_file(opts.cover);
        const auto message = jpeg::read_file(opts.message);
        if (message.empty()) {
            // An empty message leaves most covers bit-identical, so extract could
            // not tell it from a clean image.
            err << "error: message file is empty\n";
            return static_cast<int>(kUsage);
        }
        const auto result = opts.fixed_q
                                ? stego::embed_message_fixed_q(cover, message, qim::StepValue(*opts.fixed_q), opts.params)
                                : stego::embed_message(cover, message, opts.params);
        const auto bytes = jpeg::serialize(result.image);
        if (!same_coefficients(jpeg::parse(bytes), result.image)) {
            err << "error: re-encoded stego image does not decode to the embedded coefficients\n";
            return static_cast<int>(kVerificationFailed);
        }
        write_atomically(opts.output, bytes);
        print_report(out, result.report);
        return static_cast<int>(kOk);
    });
}

int cmd_extract(const ExtractOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        opts.params.validate();
        const auto image = jpeg::parse_file(opts.stego);
        const auto payload = opts.fixed_q ? stego::extract_message_fixed_q(image, qim::StepValue(*opts.fixed_q), opts.params)
                                          : stego::extract_message(image, opts.params);
        if (payload.empty()) {
            err << "error: no message found or wrong parameters (length header is zero)\n";
            return static_cast<int>(kLengthOutOfRange);
        }
        write_atomically(opts.output, payload);
        out << "bytes_extracted: " << payload.size() << '\n';
        return static_cast<int>(kOk);
    });
}

int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto cover = jpeg::parse_file(opts.cover);
        const auto stego_img = jpeg::parse_file(opts.stego);
        const auto report = metrics::compare(cover, stego_img, opts.range_lo, opts.range_hi);
        metrics::write_csv(out, report);

        const auto write_hist = [&](const jpeg::JpegImage& img, const char* suffix) {
            fs::path path = opts.histogram_prefix;
            path += suffix;
            std::ofstream f(path);
            if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
            metrics::write_csv(f, metrics::ac_histogram(img, opts.range_lo, opts.range_hi));
        };
        write_hist(cover, "_cover.csv");
        write_hist(stego_img, "_stego.csv");
        return static_cast<int>(kOk);
    });
}

int cmd_experiment(const ExperimentOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        opts.params.validate();
        if (opts.capacities.empty()) throw std::invalid_argument("no capacities given");
        static_cast<void>(qim::StepValue(opts.fixed_q));  // validates

        const auto files = list_jpegs(opts.corpus_dir);
        std::vector<std::future<ImageOutcome>> jobs;
        for (const auto& f : files) jobs.push_back(std::async(std::launch::async, run_image, f, std::cref(opts)));

        std::vector<ExperimentRow> rows;
        std::vector<std::string> warnings;
        std::size_t processed = 0;
        for (auto& job : jobs) {
            auto outcome = job.get();
            if (!outcome.rows.empty()) ++processed;
            rows.insert(rows.end(), outcome.rows.begin(), outcome.rows.end());
            warnings.insert(warnings.end(), outcome.warnings.begin(), outcome.warnings.end());
        }
        std::sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
            return std::tie(a.image_id, a.capacity_bits) < std::tie(b.image_id, b.capacity_bits);
        });

        std::ostringstream csv;
        csv << "# seed=" << opts.seed << " fixed_q=" << opts.fixed_q << " split_index=" << opts.params.split_index
            << " q_min=" << opts.params.q_min << " q_max=" << opts.params.q_max << '\n';
        for (const auto& w : warnings) csv << "# warning: " << w << '\n';
        csv << "image_id,capacity_bits,psnr_adaptive_db,psnr_fixed_db,chi2_adaptive,chi2_fixed,mean_q\n";
        for (const auto& r : rows) {
            csv << r.image_id << ',' << r.capacity_bits << ',' << format_number(r.psnr_adaptive_db) << ','
                << format_number(r.psnr_fixed_db) << ',' << format_number(r.chi2_adaptive) << ','
                << format_number(r.chi2_fixed) << ',' << format_number(r.mean_q) << '\n';
        }
        std::ofstream f(opts.output_csv);
        if (!f) throw std::runtime_error("cannot open " + opts.output_csv.string() + " for writing");
        f << csv.str();

        for (const auto& w : warnings) err << "warning: " << w << '\n';
        if (processed == 0) {
            err << "error: no corpus image could be processed\n";
            return static_cast<int>(kNoImages);
        }

        // Averages over the sample, one line per capacity.
        std::map<std::size_t, std::pair<double, std::size_t>> adaptive_mean;
        std::map<std::size_t, std::pair<double, std::size_t>> fixed_mean;
        for (const auto& r : rows) {
            adaptive_mean[r.capacity_bits].first += r.psnr_adaptive_db;
            ++adaptive_mean[r.capacity_bits].second;
            fixed_mean[r.capacity_bits].first += r.psnr_fixed_db;
            ++fixed_mean[r.capacity_bits].second;
        }
        out << "capacity_bits,images,mean_psnr_adaptive_db,mean_psnr_fixed_db\n";
        for (const auto& [bits, acc] : adaptive_mean) {
            const auto& fixed_acc = fixed_mean[bits];
            out << bits << ',' << acc.second << ',' << format_number(acc.first / static_cast<double>(acc.second)) << ','
                << format_number(fixed_acc.first / static_cast<double>(fixed_acc.second)) << '\n';
        }
        return static_cast<int>(kOk);
    });
}

int cmd_recompress(const RecompressOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto original = jpeg::parse_file(opts.input);
        const auto bytes = jpeg::serialize(original);
        const auto reparsed = jpeg::parse(bytes);
        if (!same_coefficients(original, reparsed) || jpeg::decode_pixels(original) != jpeg::decode_pixels(reparsed)) {
            err << "error: transcoding changed the image\n";
            return static_cast<int>(kVerificationFailed);
        }
        write_atomically(opts.output, bytes);
        out << "identical: coefficients, tables, frame and pixels preserved (" << bytes.size() << " bytes)\n";
        return static_cast<int>(kOk);
    });
}

}  // namespace qimsteg::cli
