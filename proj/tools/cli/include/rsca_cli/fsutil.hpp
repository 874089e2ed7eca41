#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace rsca::cli {

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Builds a directory next to `path` with `fill`, then moves it into place.
void write_dir_atomic(const std::filesystem::path& path, const std::function<void(const std::filesystem::path&)>& fill);

/// Regular files under `dir` (non-recursive) with one of the extensions, sorted by name.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir, const std::vector<std::string>& exts);

/// Runs body(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace rsca::cli
