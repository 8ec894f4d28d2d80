#include "retail/staging.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace retail {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Err::StorageFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Err::StorageFailure, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(Err::StorageFailure, "short write to " + path.string());
}

// Write-then-rename; rename is the publish point.
void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, bytes);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Err::StorageFailure, "cannot publish " + path.string() + ": " + ec.message());
}

}  // namespace

const char* batch_state_name(BatchState s) {
  return s == BatchState::Loaded ? "LOADED" : "TRANSFORMED";
}

const char* batch_kind_name(BatchKind k) {
  return k == BatchKind::Pings ? "pings" : "pos";
}

std::string rejects_to_csv(const std::vector<RejectedRow>& rejects) {
  std::string out = "line_no,reason,raw\n";
  for (const RejectedRow& r : rejects) {
    out += csv_join({std::to_string(r.line_no), r.reason, r.raw});
    out += '\n';
  }
  return out;
}

StagingStore::StagingStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(Err::StorageFailure, "cannot create staging dir: " + ec.message());
  load_manifest();
}

void StagingStore::load_manifest() {
  batches_.clear();
  fs::path manifest = dir_ / "manifest.json";
  if (!fs::exists(manifest)) return;
  json doc = json::parse(read_file(manifest), nullptr, false);
  if (doc.is_discarded()) {
    throw Error(Err::StorageFailure, "staging manifest is corrupt: " + manifest.string());
  }
  for (const auto& b : doc.at("batches")) {
    BatchMeta meta;
    meta.batch_id = b.at("batch_id").get<std::int64_t>();
    meta.source_file = b.at("source_file").get<std::string>();
    meta.checksum = b.at("checksum").get<std::string>();
    meta.byte_size = b.at("byte_size").get<std::size_t>();
    meta.kind = b.at("kind").get<std::string>() == "pos" ? BatchKind::Pos : BatchKind::Pings;
    meta.state = b.at("state").get<std::string>() == "TRANSFORMED" ? BatchState::Transformed
                                                                   : BatchState::Loaded;
    meta.rows_accepted = b.at("rows_accepted").get<std::size_t>();
    meta.rows_rejected = b.at("rows_rejected").get<std::size_t>();
    batches_.push_back(std::move(meta));
  }
}

void StagingStore::write_manifest() const {
  json arr = json::array();
  for (const BatchMeta& b : batches_) {
    arr.push_back({{"batch_id", b.batch_id},
                   {"source_file", b.source_file},
                   {"checksum", b.checksum},
                   {"byte_size", b.byte_size},
                   {"kind", batch_kind_name(b.kind)},
                   {"state", batch_state_name(b.state)},
                   {"rows_accepted", b.rows_accepted},
                   {"rows_rejected", b.rows_rejected}});
  }
  json doc = {{"batches", arr}};
  write_file_atomic(dir_ / "manifest.json", doc.dump(2) + "\n");
}

fs::path StagingStore::batch_dir(std::int64_t batch_id) const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "batch_%06lld", static_cast<long long>(batch_id));
  return dir_ / buf;
}

BatchMeta StagingStore::stage_common(BatchKind kind, std::string_view bytes,
                                     const std::string& source_name,
                                     const std::string& accepted_csv,
                                     const std::string& rejects_csv, const QualityReport& report,
                                     std::size_t* out_existing) {
  const std::string checksum = hex64(fnv1a64(bytes));
  for (const BatchMeta& b : batches_) {
    if (b.checksum == checksum && b.byte_size == bytes.size() && b.kind == kind) {
      if (out_existing) *out_existing = 1;
      return b;  // idempotent re-stage
    }
  }
  if (out_existing) *out_existing = 0;

  BatchMeta meta;
  meta.batch_id = batches_.empty() ? 1 : batches_.back().batch_id + 1;
  meta.source_file = source_name;
  meta.checksum = checksum;
  meta.byte_size = bytes.size();
  meta.kind = kind;
  meta.state = BatchState::Loaded;
  meta.rows_accepted = report.rows_accepted;
  meta.rows_rejected = report.rows_rejected;

  fs::path dir = batch_dir(meta.batch_id);
  std::error_code ec;
  fs::remove_all(dir, ec);  // orphan from an interrupted stage, if any
  fs::create_directories(dir, ec);
  if (ec) throw Error(Err::StorageFailure, "cannot create batch dir: " + ec.message());
  write_file(dir / "accepted.csv", accepted_csv);
  write_file(dir / "rejects.csv", rejects_csv);
  write_file(dir / "report.txt", report.to_text());

  batches_.push_back(meta);
  write_manifest();  // publish point
  return meta;
}

std::pair<BatchMeta, QualityReport> StagingStore::stage_pings(std::string_view bytes,
                                                              const std::string& source_name) {
  PingParseResult parsed = parse_pings(bytes);
  std::string accepted(kPingHeader);
  accepted += '\n';
  for (const Ping& p : parsed.accepted) {
    accepted += ping_to_csv_row(p);
    accepted += '\n';
  }
  std::size_t existed = 0;
  BatchMeta meta = stage_common(BatchKind::Pings, bytes, source_name, accepted,
                                rejects_to_csv(parsed.rejects), parsed.report, &existed);
  return {meta, parsed.report};
}

std::pair<BatchMeta, QualityReport> StagingStore::stage_pos(std::string_view bytes,
                                                            const std::string& source_name) {
  PosParseResult parsed = parse_pos(bytes);
  std::string accepted(kPosHeader);
  accepted += '\n';
  for (const ReceiptLine& r : parsed.accepted) {
    accepted += receipt_line_to_csv_row(r);
    accepted += '\n';
  }
  std::size_t existed = 0;
  BatchMeta meta = stage_common(BatchKind::Pos, bytes, source_name, accepted,
                                rejects_to_csv(parsed.rejects), parsed.report, &existed);
  return {meta, parsed.report};
}

std::vector<BatchMeta> StagingStore::list_batches(std::optional<BatchState> filter) const {
  std::vector<BatchMeta> out;
  for (const BatchMeta& b : batches_) {
    if (!filter || b.state == *filter) out.push_back(b);
  }
  return out;  // manifest order == batch_id order
}

std::optional<BatchMeta> StagingStore::find_batch(std::int64_t batch_id) const {
  for (const BatchMeta& b : batches_) {
    if (b.batch_id == batch_id) return b;
  }
  return std::nullopt;
}

std::vector<Ping> StagingStore::read_accepted_pings(std::int64_t batch_id) const {
  PingParseResult parsed = parse_pings(read_file(batch_dir(batch_id) / "accepted.csv"));
  if (parsed.report.rows_rejected != 0) {
    throw Error(Err::StorageFailure, "staged batch " + std::to_string(batch_id) +
                                         " no longer parses cleanly");
  }
  return std::move(parsed.accepted);
}

std::vector<ReceiptLine> StagingStore::read_accepted_pos(std::int64_t batch_id) const {
  PosParseResult parsed = parse_pos(read_file(batch_dir(batch_id) / "accepted.csv"));
  if (parsed.report.rows_rejected != 0) {
    throw Error(Err::StorageFailure, "staged batch " + std::to_string(batch_id) +
                                         " no longer parses cleanly");
  }
  return std::move(parsed.accepted);
}

std::vector<RejectedRow> StagingStore::read_rejects(std::int64_t batch_id) const {
  std::string bytes = read_file(batch_dir(batch_id) / "rejects.csv");
  std::vector<RejectedRow> out;
  LineReader reader(bytes);
  std::string_view line;
  reader.next(line);  // header
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto fields = csv_split(line);
    if (!fields || fields->size() != 3) {
      throw Error(Err::StorageFailure, "corrupt rejects file for batch " +
                                           std::to_string(batch_id));
    }
    auto line_no = parse_int((*fields)[0]);
    out.push_back({line_no ? static_cast<std::size_t>(*line_no) : 0, (*fields)[1], (*fields)[2]});
  }
  return out;
}

std::string StagingStore::read_report_text(std::int64_t batch_id) const {
  return read_file(batch_dir(batch_id) / "report.txt");
}

void StagingStore::mark_transformed(std::int64_t batch_id) {
  for (BatchMeta& b : batches_) {
    if (b.batch_id == batch_id) {
      if (b.state != BatchState::Transformed) {
        b.state = BatchState::Transformed;
        write_manifest();
      }
      return;
    }
  }
  throw Error(Err::StorageFailure, "no such batch: " + std::to_string(batch_id));
}

}  // namespace retail
