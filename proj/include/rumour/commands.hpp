#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "rumour/embedding.hpp"
#include "rumour/error.hpp"
#include "rumour/run_config.hpp"

namespace rumour::cli {

struct CommandIo {
    std::ostream& out;  // summaries meant for the user
    std::ostream& err;  // progress and error messages
};

enum ExitCode : int { kOk = 0, kUsage = 2, kService = 3, kData = 4 };

int exit_code_for(Error::Kind kind);

/// Each command returns an exit code; errors are reported on io.err.
int cmd_ingest(const std::filesystem::path& root, const std::filesystem::path& out_jsonl, CommandIo io);
int cmd_features(const std::filesystem::path& jsonl, const std::filesystem::path& lexicon_dir,
                 const std::filesystem::path& out_csv, CommandIo io);
/// Writes through "<out_store>.partial" and renames on success; any provider
/// failure exits 3 and leaves no store behind.
int cmd_embed(const std::filesystem::path& jsonl, const ProviderConfig& provider,
              const std::filesystem::path& out_store, CommandIo io);
/// Holdout for every (representation, algorithm) pair. Writes report.csv,
/// report.txt, split.json, config.effective.ini and models/ under the output dir.
int cmd_train_eval(const RunConfig& config, CommandIo io);
/// k-fold CV over the training partition for config.cv_algorithms.
/// Writes cv_report.csv and cv_report.txt.
int cmd_cv(const RunConfig& config, CommandIo io);
/// Merges report files and writes compare.csv / compare.txt into out_dir.
int cmd_compare(const std::vector<std::filesystem::path>& reports, const std::filesystem::path& out_dir, CommandIo io);

int run_cli(int argc, const char* const* argv, CommandIo io);

}  // namespace rumour::cli
