#ifndef ROOTMLE_RECORD_STORE_HPP
#define ROOTMLE_RECORD_STORE_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rootmle/optimizer.hpp"

namespace rootmle {

/// Everything that determines the outcome of a grid search. Two runs with the
/// same fingerprint produce identical records.
struct StoreManifest {
  CountMatrix counts;
  ConstraintMask mask;
  int cycles = 1;
  std::vector<int> denominators;
  OptimizerSettings settings;
  std::uint64_t grid_size = 0;

  /// Canonical text without the fingerprint line.
  std::string canonical_text() const;
  /// FNV-1a 64-bit hash of the canonical text, as 16 hex digits.
  std::string fingerprint() const;

  std::string to_text() const;
  static StoreManifest parse(const std::string& text);
};

/// Append-only store: `manifest.txt` plus fixed-width binary records in
/// `records.bin`. Each record is
///   u64 start_id | u32 status | f64 loglik | f64 grad_linf | u32 outer_iters |
///   f64 theta[free entries, row-major]
/// in host byte order.
class RecordStore {
 public:
  /// Creates a new store; fails if `dir` already holds one.
  static RecordStore create(const std::filesystem::path& dir, const StoreManifest& manifest);
  /// Opens an existing store and loads its records. A partial trailing record
  /// left by an interrupted writer is truncated away.
  static RecordStore open(const std::filesystem::path& dir);
  static bool exists(const std::filesystem::path& dir);

  RecordStore(RecordStore&&) = default;
  RecordStore& operator=(RecordStore&&) = default;

  const StoreManifest& manifest() const { return manifest_; }
  const std::filesystem::path& path() const { return dir_; }
  const std::vector<ConvergenceRecord>& records() const { return records_; }

  /// Writes one record. Not thread-safe; callers serialize.
  void append(const ConvergenceRecord& record);
  void flush();

  std::size_t record_size() const;

 private:
  RecordStore(std::filesystem::path dir, StoreManifest manifest);
  void open_for_append();

  std::filesystem::path dir_;
  StoreManifest manifest_;
  std::vector<ConvergenceRecord> records_;
  std::ofstream out_;
};

}  // namespace rootmle

#endif  // ROOTMLE_RECORD_STORE_HPP
