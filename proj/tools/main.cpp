// qimsteg: adaptive-step QIM steganography for baseline JPEG files.

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

void add_params(CLI::App* cmd, qimsteg::qim::StegoParams& params) {
    cmd->add_option("--split-index", params.split_index, "first zigzag index of the embedding area (2..63)")
        ->capture_default_str();
    cmd->add_option("--q-min", params.q_min, "smallest quantization step (even, >= 2)")->capture_default_str();
    cmd->add_option("--q-max", params.q_max, "largest quantization step (even, >= q-min)")->capture_default_str();
}

void add_range(CLI::App* cmd, int& lo, int& hi) {
    cmd->add_option("--range-lo", lo, "lowest histogram bin")->capture_default_str();
    cmd->add_option("--range-hi", hi, "highest histogram bin")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace qimsteg::cli;

    CLI::App app{"Hide messages in baseline JPEG files with adaptive-step QIM"};
    app.require_subcommand(1);

    EmbedOptions embed;
    auto* embed_cmd = app.add_subcommand("embed", "embed a message file into a cover JPEG");
    embed_cmd->add_option("cover", embed.cover, "cover JPEG")->required()->check(CLI::ExistingFile);
    embed_cmd->add_option("message", embed.message, "message file")->required()->check(CLI::ExistingFile);
    embed_cmd->add_option("output", embed.output, "stego JPEG to write")->required();
    add_params(embed_cmd, embed.params);
    embed_cmd->add_option("--fixed-q", embed.fixed_q, "use one fixed step instead of the adaptive rule");

    ExtractOptions extract;
    auto* extract_cmd = app.add_subcommand("extract", "recover a message from a stego JPEG");
    extract_cmd->add_option("stego", extract.stego, "stego JPEG")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("output", extract.output, "file to write the message to")->required();
    add_params(extract_cmd, extract.params);
    extract_cmd->add_option("--fixed-q", extract.fixed_q, "message was embedded with this fixed step");

    AnalyzeOptions analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "PSNR and AC-histogram distances between cover and stego");
    analyze_cmd->add_option("cover", analyze.cover, "cover JPEG")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("stego", analyze.stego, "stego JPEG")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("histogram-prefix", analyze.histogram_prefix,
                            "writes <prefix>_cover.csv and <prefix>_stego.csv")
        ->required();
    add_range(analyze_cmd, analyze.range_lo, analyze.range_hi);

    ExperimentOptions experiment;
    auto* experiment_cmd = app.add_subcommand("experiment", "capacity sweep over a corpus, adaptive vs fixed step");
    experiment_cmd->add_option("corpus-dir", experiment.corpus_dir, "directory of cover JPEGs")
        ->required()
        ->check(CLI::ExistingDirectory);
    experiment_cmd->add_option("output-csv", experiment.output_csv, "per-image results")->required();
    experiment_cmd->add_option("--capacities", experiment.capacities, "embedded bits per run")
        ->delimiter(',')
        ->capture_default_str();
    experiment_cmd->add_option("--fixed-q", experiment.fixed_q, "step of the fixed-q baseline")->capture_default_str();
    experiment_cmd->add_option("--seed", experiment.seed, "payload generator seed")->capture_default_str();
    add_params(experiment_cmd, experiment.params);
    add_range(experiment_cmd, experiment.range_lo, experiment.range_hi);

    RecompressOptions recompress;
    auto* recompress_cmd = app.add_subcommand("recompress", "re-encode a JPEG and check coefficients are unchanged");
    recompress_cmd->add_option("input", recompress.input, "JPEG to transcode")->required()->check(CLI::ExistingFile);
    recompress_cmd->add_option("output", recompress.output, "where to write the transcoded file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (*embed_cmd) return cmd_embed(embed, std::cout, std::cerr);
    if (*extract_cmd) return cmd_extract(extract, std::cout, std::cerr);
    if (*analyze_cmd) return cmd_analyze(analyze, std::cout, std::cerr);
    if (*experiment_cmd) return cmd_experiment(experiment, std::cout, std::cerr);
    return cmd_recompress(recompress, std::cout, std::cerr);
}
