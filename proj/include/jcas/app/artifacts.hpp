#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "jcas/rd_matrix.hpp"
#include "jcas/receiver.hpp"

namespace jcas::app {

/// "RDMX", u16 version, u32 rows, u32 cols, then rows*cols complex values
/// as little-endian float64 (re, im), row-major.
void write_rd_bin(const std::filesystem::path& path, const RdMatrix& rd);
RdMatrix read_rd_bin(const std::filesystem::path& path);

/// |value| / max |value|, one range bin per line, 9 significant digits.
void write_rd_csv(const std::filesystem::path& path, const RdMatrix& rd);

/// Pattern cache file ("PTRN"). Returns false when the file is missing or
/// carries a different key.
void write_pattern(const std::filesystem::path& path, const PatternTensor& pat, std::uint64_t key);
bool read_pattern(const std::filesystem::path& path, std::uint64_t key, PatternTensor& out);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace jcas::app
