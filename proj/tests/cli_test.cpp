#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "qimsteg/jpeg.hpp"
#include "support/corpus.hpp"

using namespace qimsteg;
using namespace qimsteg::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qimsteg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path file(const std::string& name) const { return dir_ / name; }

    fs::path write(const std::string& name, const std::vector<std::uint8_t>& bytes) const {
        jpeg::write_file(file(name), bytes);
        return file(name);
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

std::vector<std::uint8_t> random_bytes(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

}  // namespace

TEST_F(CliTest, EmbedExtractRoundTrip) {
    const auto message = write("msg.bin", random_bytes(4000, 1));
    EmbedOptions e{testdata::corpus().front(), message, file("stego.jpg"), {}, {}};
    ASSERT_EQ(cmd_embed(e, out_, err_), kOk) << err_.str();
    EXPECT_NE(out_.str().find("bits_embedded: 32032"), std::string::npos) << out_.str();
    EXPECT_NE(out_.str().find("capacity_bits: 176128"), std::string::npos);
    EXPECT_NE(out_.str().find("step_histogram: q"), std::string::npos);
    EXPECT_FALSE(fs::exists(file("stego.jpg.tmp")));

    ExtractOptions x{file("stego.jpg"), file("out.bin"), {}, {}};
    ASSERT_EQ(cmd_extract(x, out_, err_), kOk) << err_.str();
    EXPECT_EQ(jpeg::read_file(file("out.bin")), jpeg::read_file(message));
}

TEST_F(CliTest, FixedStepRoundTrip) {
    const auto message = write("msg.bin", random_bytes(500, 2));
    EmbedOptions e{testdata::corpus()[1], message, file("stego.jpg"), {}, 8};
    ASSERT_EQ(cmd_embed(e, out_, err_), kOk) << err_.str();
    EXPECT_NE(out_.str().find("step_histogram: q8="), std::string::npos);
    ExtractOptions x{file("stego.jpg"), file("out.bin"), {}, 8};
    ASSERT_EQ(cmd_extract(x, out_, err_), kOk) << err_.str();
    EXPECT_EQ(jpeg::read_file(file("out.bin")), jpeg::read_file(message));
}

TEST_F(CliTest, InsufficientCapacityWritesNothing) {
    const auto message = write("msg.bin", random_bytes(22013, 3));
    EmbedOptions e{testdata::corpus().front(), message, file("stego.jpg"), {}, {}};
    EXPECT_EQ(cmd_embed(e, out_, err_), kInsufficientCapacity);
    EXPECT_FALSE(fs::exists(file("stego.jpg")));
    EXPECT_NE(err_.str().find("insufficient capacity"), std::string::npos);
}

TEST_F(CliTest, EmptyMessageRejected) {
    const auto message = write("msg.bin", {});
    EmbedOptions e{testdata::corpus().front(), message, file("stego.jpg"), {}, {}};
    EXPECT_EQ(cmd_embed(e, out_, err_), kUsage);
    EXPECT_FALSE(fs::exists(file("stego.jpg")));
}

TEST_F(CliTest, CleanCoverExtractReportsNoMessage) {
    for (const auto& cover : testdata::everything()) {
        ExtractOptions x{cover, file("out.bin"), {}, {}};
        const int code = cmd_extract(x, out_, err_);
        EXPECT_EQ(code, kLengthOutOfRange) << cover;
        EXPECT_FALSE(fs::exists(file("out.bin")));
    }
}

TEST_F(CliTest, BadInputsMapToExitCodes) {
    const auto garbage = write("garbage.jpg", random_bytes(300, 4));
    const auto message = write("msg.bin", random_bytes(10, 5));
    EXPECT_EQ(cmd_embed({garbage, message, file("o.jpg"), {}, {}}, out_, err_), kMalformedStream);

    auto progressive = jpeg::read_file(testdata::corpus().front());
    // flip SOF0 to SOF2
    for (std::size_t i = 0; i + 1 < progressive.size(); ++i) {
        if (progressive[i] == 0xFF && progressive[i + 1] == 0xC0) {
            progressive[i + 1] = 0xC2;
            break;
        }
    }
    const auto unsupported = write("prog.jpg", progressive);
    EXPECT_EQ(cmd_embed({unsupported, message, file("o.jpg"), {}, {}}, out_, err_), kUnsupportedJpeg);
    EXPECT_EQ(cmd_extract({unsupported, file("o.bin"), {}, {}}, out_, err_), kUnsupportedJpeg);
    EXPECT_EQ(cmd_embed({file("missing.jpg"), message, file("o.jpg"), {}, {}}, out_, err_), kIoError);

    qim::StegoParams bad;
    bad.q_min = 3;
    EXPECT_EQ(cmd_embed({testdata::corpus().front(), message, file("o.jpg"), bad, {}}, out_, err_), kUsage);
    EXPECT_EQ(cmd_embed({testdata::corpus().front(), message, file("o.jpg"), {}, 5}, out_, err_), kUsage);
    EXPECT_FALSE(fs::exists(file("o.jpg")));
}

TEST_F(CliTest, AnalyzeWritesCsvs) {
    const auto message = write("msg.bin", random_bytes(2000, 6));
    ASSERT_EQ(cmd_embed({testdata::corpus()[2], message, file("stego.jpg"), {}, {}}, out_, err_), kOk);
    std::ostringstream report;
    AnalyzeOptions a{testdata::corpus()[2], file("stego.jpg"), file("hist")};
    ASSERT_EQ(cmd_analyze(a, report, err_), kOk) << err_.str();
    const auto lines = split(report.str(), '\n');
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], "psnr_db,mse,chi_square,l1_distance");
    EXPECT_GT(std::stod(split(lines[1], ',')[0]), 30.0);
    for (const char* suffix : {"hist_cover.csv", "hist_stego.csv"}) {
        const auto rows = read_lines(file(suffix));
        ASSERT_EQ(rows.size(), 123u) << suffix;
        EXPECT_EQ(rows.front(), "value,count");
        EXPECT_EQ(rows[1].rfind("-60,", 0), 0u);
        EXPECT_EQ(rows.back().rfind("overflow,", 0), 0u);
    }

    AnalyzeOptions narrow{testdata::corpus()[2], file("stego.jpg"), file("narrow"), -5, 5};
    ASSERT_EQ(cmd_analyze(narrow, report, err_), kOk);
    EXPECT_EQ(read_lines(file("narrow_cover.csv")).size(), 13u);
}

TEST_F(CliTest, AnalyzeSizeMismatch) {
    const auto odd = testdata::root() / "extra" / "chelsea_color_444.jpg";
    EXPECT_EQ(cmd_analyze({testdata::corpus().front(), odd, file("h")}, out_, err_), kDimensionMismatch);
}

TEST_F(CliTest, ExperimentOnCorpus) {
    ExperimentOptions opts;
    opts.corpus_dir = testdata::root() / "corpus";
    opts.output_csv = file("results.csv");
    ASSERT_EQ(cmd_experiment(opts, out_, err_), kOk) << err_.str();
    const auto lines = read_lines(opts.output_csv);
    ASSERT_GE(lines.size(), 2u);
    EXPECT_EQ(lines[0], "# seed=20201 fixed_q=8 split_index=21 q_min=2 q_max=32");
    EXPECT_EQ(lines[1], "image_id,capacity_bits,psnr_adaptive_db,psnr_fixed_db,chi2_adaptive,chi2_fixed,mean_q");
    ASSERT_EQ(lines.size(), 2u + 18u);

    std::map<std::string, std::vector<double>> psnr_by_image;
    double sum_at_50k = 0.0;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        ASSERT_EQ(f.size(), 7u);
        const double psnr_a = std::stod(f[2]);
        psnr_by_image[f[0]].push_back(psnr_a);
        if (f[1] == "50000") sum_at_50k += psnr_a;
        EXPECT_LT(std::stod(f[4]), std::stod(f[5])) << lines[i];
        const double mean_q = std::stod(f[6]);
        EXPECT_GE(mean_q, 2.0);
        EXPECT_LE(mean_q, 32.0);
    }
    EXPECT_EQ(psnr_by_image.size(), 6u);
    EXPECT_GE(sum_at_50k / 6.0, 30.0);
    for (const auto& [id, values] : psnr_by_image) {
        ASSERT_EQ(values.size(), 3u);
        EXPECT_GE(values[0], values[1]) << id;
        EXPECT_GE(values[1], values[2]) << id;
    }
    EXPECT_NE(out_.str().find("capacity_bits,images,mean_psnr_adaptive_db,mean_psnr_fixed_db"), std::string::npos);

    // same seed, same file
    const auto first = jpeg::read_file(opts.output_csv);
    std::ostringstream quiet;
    ASSERT_EQ(cmd_experiment(opts, quiet, quiet), kOk);
    EXPECT_EQ(jpeg::read_file(opts.output_csv), first);

    opts.seed = 7;
    ASSERT_EQ(cmd_experiment(opts, quiet, quiet), kOk);
    EXPECT_NE(jpeg::read_file(opts.output_csv), first);
}

TEST_F(CliTest, ExperimentSkipsTooLargeCapacities) {
    ExperimentOptions opts;
    opts.corpus_dir = testdata::root() / "extra";
    opts.output_csv = file("results.csv");
    opts.capacities = {1000, 50000};
    ASSERT_EQ(cmd_experiment(opts, out_, err_), kOk) << err_.str();
    EXPECT_NE(err_.str().find("warning: skipped"), std::string::npos);
    bool warned_in_csv = false;
    for (const auto& line : read_lines(opts.output_csv)) warned_in_csv |= line.rfind("# warning:", 0) == 0;
    EXPECT_TRUE(warned_in_csv);
}

TEST_F(CliTest, ExperimentEmptyDirectory) {
    fs::create_directories(file("empty"));
    ExperimentOptions opts;
    opts.corpus_dir = file("empty");
    opts.output_csv = file("results.csv");
    EXPECT_EQ(cmd_experiment(opts, out_, err_), kNoImages);
}

TEST(ExperimentPayload, PrefixesAndSeeds) {
    const auto longer = experiment_payload(1, "a.jpg", 100);
    const auto shorter = experiment_payload(1, "a.jpg", 37);
    EXPECT_TRUE(std::equal(shorter.begin(), shorter.end(), longer.begin()));
    EXPECT_NE(experiment_payload(2, "a.jpg", 37), shorter);
    EXPECT_NE(experiment_payload(1, "b.jpg", 37), shorter);
}

TEST_F(CliTest, RecompressPreservesImage) {
    for (const auto& input : testdata::everything()) {
        RecompressOptions r{input, file("re.jpg")};
        ASSERT_EQ(cmd_recompress(r, out_, err_), kOk) << input << err_.str();
        EXPECT_EQ(jpeg::parse_file(file("re.jpg")).coeff_planes, jpeg::parse_file(input).coeff_planes);
    }
}
