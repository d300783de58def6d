#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qimsteg/qim.hpp"

namespace qimsteg::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kIoError = 2,
    kMalformedStream = 3,
    kUnsupportedJpeg = 4,
    kInsufficientCapacity = 5,
    kLengthOutOfRange = 6,
    kDimensionMismatch = 7,
    kEncodingOverflow = 8,
    kVerificationFailed = 9,
    kNoImages = 10,
};

inline constexpr std::uint64_t kDefaultSeed = 20201;
inline constexpr int kDefaultFixedQ = 8;

struct EmbedOptions {
    std::filesystem::path cover;
    std::filesystem::path message;
    std::filesystem::path output;
    qim::StegoParams params;
    std::optional<int> fixed_q;  // classical QIM instead of the adaptive step
};

struct ExtractOptions {
    std::filesystem::path stego;
    std::filesystem::path output;
    qim::StegoParams params;
    std::optional<int> fixed_q;
};

struct AnalyzeOptions {
    std::filesystem::path cover;
    std::filesystem::path stego;
    std::filesystem::path histogram_prefix;  // writes <prefix>_cover.csv and <prefix>_stego.csv
    int range_lo = -60;
    int range_hi = 60;
};

struct ExperimentOptions {
    std::filesystem::path corpus_dir;
    std::vector<std::size_t> capacities{10000, 30000, 50000};
    int fixed_q = kDefaultFixedQ;
    std::uint64_t seed = kDefaultSeed;
    std::filesystem::path output_csv;
    qim::StegoParams params;
    int range_lo = -60;
    int range_hi = 60;
};

struct RecompressOptions {
    std::filesystem::path input;
    std::filesystem::path output;
};

int cmd_embed(const EmbedOptions& opts, std::ostream& out, std::ostream& err);
int cmd_extract(const ExtractOptions& opts, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeOptions& opts, std::ostream& out, std::ostream& err);
int cmd_experiment(const ExperimentOptions& opts, std::ostream& out, std::ostream& err);
int cmd_recompress(const RecompressOptions& opts, std::ostream& out, std::ostream& err);

/// Seeded pseudo-random payload stream for one corpus image. Payloads for
/// different capacities are prefixes of the same stream.
std::vector<std::uint8_t> experiment_payload(std::uint64_t seed, const std::string& image_id, std::size_t bytes);

}  // namespace qimsteg::cli
