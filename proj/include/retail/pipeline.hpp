#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "retail/staging.hpp"
#include "retail/warehouse.hpp"

namespace retail {

/// Holds the workspace lock for the lifetime of the object. One command at a
/// time per workspace; a lock file naming a dead PID is reclaimed.
class WorkspaceLock {
 public:
  explicit WorkspaceLock(const std::filesystem::path& workspace);
  ~WorkspaceLock();
  WorkspaceLock(const WorkspaceLock&) = delete;
  WorkspaceLock& operator=(const WorkspaceLock&) = delete;

 private:
  std::filesystem::path lock_path_;
  bool held_ = false;
};

struct LoadSummary {
  std::size_t batches_transformed = 0;
  std::size_t sales_rows_inserted = 0;
  std::size_t behaviour_rows_inserted = 0;
  std::size_t products = 0;
  std::size_t suppliers = 0;
  std::size_t customers = 0;
  std::size_t calendar_days = 0;
  std::size_t areas = 0;
  std::size_t attribute_conflicts = 0;
  std::size_t orphan_pings = 0;
  std::size_t status_conflicts = 0;
  std::int64_t warehouse_version = 0;

  std::string to_text() const;
};

struct LoadInputs {
  std::string zone_file;
  std::string cost_file;
  std::string catalog_file;
  std::string demographics_file;
  SegmentationParams segmentation;
};

/// Stage-2 pass: transforms every LOADED staging batch into warehouse facts
/// and publishes one new version. Re-running is a no-op (batch states gate
/// re-entry); an unresolved SKU/customer aborts the whole pass with the
/// staging state unchanged.
LoadSummary run_load(const std::filesystem::path& workspace, const LoadInputs& inputs);

/// Appends a stage record to the workspace run manifest. Records carry a
/// logical sequence number and content digests only, never wall-clock time,
/// so repeated runs leave byte-identical workspaces.
void record_stage(const std::filesystem::path& workspace, const std::string& stage,
                  const std::vector<std::pair<std::string, std::string>>& details);

std::filesystem::path staging_dir(const std::filesystem::path& workspace);
std::filesystem::path warehouse_dir(const std::filesystem::path& workspace);

}  // namespace retail
