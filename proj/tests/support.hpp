#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "rumour/dataset.hpp"
#include "rumour/rng.hpp"

namespace rumour::testing {

inline std::filesystem::path fixtures() { return RUMOUR_FIXTURES_DIR; }
inline std::filesystem::path lexicon_dir() { return RUMOUR_LEXICON_DIR; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("rumour-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

/// Dataset with `rumours` + `non_rumours` tweets, ids "t0".."tN" in a seeded shuffled label order.
inline LabeledDataset synthetic_dataset(std::size_t rumours, std::size_t non_rumours, std::uint64_t seed) {
    std::vector<ClassLabel> labels(rumours, ClassLabel::rumour);
    labels.insert(labels.end(), non_rumours, ClassLabel::non_rumour);
    Rng rng(seed);
    rng.shuffle(labels);
    LabeledDataset ds;
    ds.name = "synthetic";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        Tweet t;
        t.id = "t" + std::to_string(i);
        t.text = "tweet " + std::to_string(i);
        t.label = labels[i];
        ds.tweets.push_back(std::move(t));
    }
    return ds;
}

}  // namespace rumour::testing
