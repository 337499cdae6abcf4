#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "morphseg/morphseg.hpp"

namespace fixtures {

inline const std::filesystem::path data_dir = MORPHSEG_DATA_DIR;

/// The bert-base-uncased vocabulary with the shipped affix and stopword
/// lists, loaded once per process.
inline const morphseg::Resources& bert()
{
    static const morphseg::Resources r(data_dir / "bert-base-uncased-vocab.txt", data_dir / "prefixes.txt",
                                       data_dir / "suffixes.txt", data_dir / "stopwords-en.txt");
    return r;
}

inline morphseg::SegmentationContext bert_context() { return bert().context(); }

struct CommandResult {
    int exit_code = -1;
    std::string out;
};

/// Runs a shell command, capturing stdout; stderr is discarded unless
/// redirected by the caller.
inline CommandResult run(const std::string& command)
{
    CommandResult r;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string cli() { return MORPHSEG_CLI; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("morphseg-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
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

}  // namespace fixtures
