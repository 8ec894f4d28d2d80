#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "retail/ingest.hpp"

namespace retail {

enum class BatchState { Loaded, Transformed };
enum class BatchKind { Pings, Pos };

const char* batch_state_name(BatchState s);
const char* batch_kind_name(BatchKind k);

struct BatchMeta {
  std::int64_t batch_id = 0;
  std::string source_file;
  std::string checksum;  // fnv1a64 of the source bytes, hex
  std::size_t byte_size = 0;
  BatchKind kind = BatchKind::Pings;
  BatchState state = BatchState::Loaded;
  std::size_t rows_accepted = 0;
  std::size_t rows_rejected = 0;
};

/// Append-only staging area: one directory per batch plus a JSON manifest.
/// The manifest swap is the durability point; a batch directory without a
/// manifest entry is invisible and gets overwritten on retry. Re-staging
/// bytes with a known checksum returns the existing batch.
///
/// Single writer per store; readers may share an instance freely.
class StagingStore {
 public:
  explicit StagingStore(std::filesystem::path dir);

  /// Parses + persists a ping file. Returns the batch and its quality report
  /// (for an existing checksum, the stored report).
  std::pair<BatchMeta, QualityReport> stage_pings(std::string_view bytes,
                                                  const std::string& source_name);
  std::pair<BatchMeta, QualityReport> stage_pos(std::string_view bytes,
                                                const std::string& source_name);

  std::vector<BatchMeta> list_batches(std::optional<BatchState> filter = std::nullopt) const;
  std::optional<BatchMeta> find_batch(std::int64_t batch_id) const;

  std::vector<Ping> read_accepted_pings(std::int64_t batch_id) const;
  std::vector<ReceiptLine> read_accepted_pos(std::int64_t batch_id) const;
  std::vector<RejectedRow> read_rejects(std::int64_t batch_id) const;
  std::string read_report_text(std::int64_t batch_id) const;

  void mark_transformed(std::int64_t batch_id);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  struct Staged;
  BatchMeta stage_common(BatchKind kind, std::string_view bytes, const std::string& source_name,
                         const std::string& accepted_csv, const std::string& rejects_csv,
                         const QualityReport& report, std::size_t* out_existing);
  void load_manifest();
  void write_manifest() const;
  std::filesystem::path batch_dir(std::int64_t batch_id) const;

  std::filesystem::path dir_;
  std::vector<BatchMeta> batches_;
};

std::string rejects_to_csv(const std::vector<RejectedRow>& rejects);

}  // namespace retail
