#pragma once

// File helpers and a small worker pool.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

namespace modelspace {

/// Whole file as bytes. Throws Error(kIoError).
std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames it over `path`. Parent
/// directories are created. Throws Error(kIoError).
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Runs body(0..n-1) on up to `jobs` threads. The first exception thrown by
/// any call is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body);

}  // namespace modelspace
