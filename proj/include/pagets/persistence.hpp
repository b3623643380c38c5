#pragma once

#include "pagets/incremental_model.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace pagets {

inline constexpr int kFormatVersion = 1;

struct SubModelEntry {
  Index start = 0;
  Index L = 0;
  Index P = 0;
  Index k1 = 0;
  Index k2 = 0;
  std::int64_t obs_count = 0;
};

struct ModelManifest {
  int version = kFormatVersion;
  std::vector<std::string> names;
  HyperParams hp;
  Index length = 0;
  std::vector<SubModelEntry> submodels;
  std::map<std::string, std::uint32_t> checksums;  // relative path -> crc32
};

/// Points at which a save may be interrupted in tests.
enum class SaveStage { ArraysWritten, ManifestWritten, BeforeSwap, AfterSwap };

struct SaveOptions {
  /// Called at every stage; throwing aborts the save as a crash would.
  std::function<void(SaveStage)> fault_hook;
};

/// Writes a complete new version next to `dir`, then swaps it in atomically.
/// IoError / DiskFull on failure; the previous version stays intact.
ModelManifest save_model(const PredictionModel& model, const std::filesystem::path& dir, const SaveOptions& opts = {});

/// CorruptManifest, ChecksumMismatch, VersionUnsupported, IoError.
PredictionModel load_model(const std::filesystem::path& dir);

/// Parses and verifies only the manifest.
ModelManifest read_manifest(const std::filesystem::path& dir);

/// Column-major float64 array file with two uint64 dims in front.
void write_array(const std::filesystem::path& file, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_array(const std::filesystem::path& file);

}  // namespace pagets
