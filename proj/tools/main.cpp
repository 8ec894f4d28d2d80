#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "retail/bsc.hpp"
#include "retail/cube.hpp"
#include "retail/journey.hpp"
#include "retail/pipeline.hpp"
#include "retail/simgen.hpp"

namespace fs = std::filesystem;
using namespace retail;

namespace {

// exit codes: 0 ok, 2 usage/dependency, 3 data error, 4 integrity violations,
// 5 workspace busy, 6 storage failure
int exit_code_for(Err code) {
  switch (code) {
    case Err::UsageError:
    case Err::MissingStage:
    case Err::UnknownLevel:
    case Err::UnknownMeasure:
    case Err::IncompatibleLevel:
    case Err::NonAdditiveMeasure:
    case Err::UnknownKpiInConfig:
      return 2;
    case Err::WorkspaceBusy:
      return 5;
    case Err::StorageFailure:
      return 6;
    default:
      return 3;
  }
}

std::string read_file_or_die(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Err::StorageFailure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Err::StorageFailure, "cannot create " + out_path);
  out << content;
  if (!out.flush()) throw Error(Err::StorageFailure, "short write to " + out_path);
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string current;
  for (char c : csv) {
    if (c == ',') {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

std::int32_t parse_date_key(const std::string& text, const char* what) {
  auto epoch = parse_date(text);
  if (!epoch) {
    throw Error(Err::UsageError, std::string(what) + " must be YYYY-MM-DD, got '" + text + "'");
  }
  return date_key_from_epoch(*epoch);
}

int cmd_generate(const std::string& config_path, const std::string& out_dir, bool seed_set,
                 std::uint64_t seed) {
  SimConfig config;
  if (!config_path.empty()) config = SimConfig::from_json_text(read_file_or_die(config_path));
  if (seed_set) config.seed = seed;
  GeneratedCorpus corpus = generate_to_dir(config, out_dir);
  std::cout << "seed = " << config.seed << '\n';
  for (const auto& [name, bytes] : corpus.files) {
    std::cout << name << " = " << bytes.size() << " bytes\n";
  }
  std::cout << "ground_truth.json = " << corpus.truth.days.size() << " customer-days\n";
  std::cout << "ping_rows = " << corpus.truth.ping_rows << '\n';
  std::cout << "pos_rows = " << corpus.truth.pos_rows << '\n';
  std::cout << "corrupted_rows = " << corpus.truth.corrupted.size() << '\n';
  return 0;
}

int cmd_ingest(const std::string& workspace, const std::vector<std::string>& files) {
  WorkspaceLock lock(workspace);
  StagingStore staging(staging_dir(workspace));
  for (const std::string& path : files) {
    std::string bytes = read_file_or_die(path);
    LineReader reader(bytes);
    std::string_view header;
    reader.next(header);
    std::string source = fs::path(path).filename().string();

    BatchMeta meta;
    QualityReport report;
    if (header == kPingHeader) {
      std::tie(meta, report) = staging.stage_pings(bytes, source);
    } else if (header == kPosHeader) {
      std::tie(meta, report) = staging.stage_pos(bytes, source);
    } else {
      throw Error(Err::BadHeader, path + " has neither the ping nor the POS header");
    }
    std::cout << "file = " << source << '\n';
    std::cout << "batch_id = " << meta.batch_id << '\n';
    std::cout << "kind = " << batch_kind_name(meta.kind) << '\n';
    std::cout << "state = " << batch_state_name(meta.state) << '\n';
    std::cout << report.to_text() << '\n';
    record_stage(workspace, "ingest",
                 {{"source", source},
                  {"batch_id", std::to_string(meta.batch_id)},
                  {"checksum", meta.checksum},
                  {"rows_accepted", std::to_string(report.rows_accepted)},
                  {"rows_rejected", std::to_string(report.rows_rejected)}});
  }
  return 0;
}

int cmd_load(const std::string& workspace, const LoadInputs& inputs) {
  WorkspaceLock lock(workspace);
  LoadSummary summary = run_load(workspace, inputs);
  std::cout << summary.to_text();
  record_stage(workspace, "load",
               {{"batches_transformed", std::to_string(summary.batches_transformed)},
                {"fact_sales_inserted", std::to_string(summary.sales_rows_inserted)},
                {"fact_cust_behaviour_inserted",
                 std::to_string(summary.behaviour_rows_inserted)},
                {"warehouse_version", std::to_string(summary.warehouse_version)}});
  return 0;
}

int cmd_query(const std::string& workspace, const std::string& measures_arg,
              const std::string& by_arg, const std::vector<std::string>& filter_args,
              const std::string& format, const std::string& out_path) {
  WorkspaceLock lock(workspace);
  CubeQuery query;
  for (const std::string& name : split_list(measures_arg)) {
    auto m = measure_from_name(name);
    if (!m) throw Error(Err::UnknownMeasure, "unknown measure '" + name + "'");
    query.measures.push_back(*m);
  }
  for (const std::string& name : split_list(by_arg)) {
    auto l = level_from_name(name);
    if (!l) throw Error(Err::UnknownLevel, "unknown level '" + name + "'");
    query.group_by.push_back(*l);
  }
  for (const std::string& arg : filter_args) {
    std::size_t eq = arg.find('=');
    if (eq == std::string::npos) {
      throw Error(Err::UsageError, "--filter expects level=value, got '" + arg + "'");
    }
    auto l = level_from_name(arg.substr(0, eq));
    if (!l) throw Error(Err::UnknownLevel, "unknown level '" + arg.substr(0, eq) + "'");
    query.filters.push_back({*l, arg.substr(eq + 1)});
  }
  Warehouse wh(warehouse_dir(workspace));
  ResultTable table = rollup(wh, query);
  emit(out_path, format == "report" ? table.to_report() : table.to_csv());
  return 0;
}

int cmd_heatmap(const std::string& workspace, const std::string& measure_arg,
                const std::string& from, const std::string& to, double cell_size,
                const std::string& format, const std::string& out_path) {
  WorkspaceLock lock(workspace);
  auto m = measure_from_name(measure_arg);
  if (!m) throw Error(Err::UnknownMeasure, "unknown measure '" + measure_arg + "'");
  Warehouse wh(warehouse_dir(workspace));
  Heatmap hm = heatmap(wh, *m, parse_date_key(from, "--from"), parse_date_key(to, "--to"),
                       cell_size);
  std::string content = format == "matrix"   ? hm.to_matrix()
                        : format == "report" ? hm.to_report()
                                             : hm.to_csv();
  emit(out_path, content);
  return 0;
}

int cmd_journey(const std::string& workspace, const std::string& customer,
                const std::string& date, const std::string& format,
                const std::string& out_path) {
  WorkspaceLock lock(workspace);
  Warehouse wh(warehouse_dir(workspace));
  JourneyProfile profile = build_profile(wh, customer, parse_date_key(date, "--date"));
  emit(out_path, format == "json" ? profile.to_json_text() : profile.to_text());
  return 0;
}

int cmd_bsc(const std::string& workspace, const std::string& inputs_path,
            const std::string& targets_path, const std::string& format,
            const std::string& out_path) {
  WorkspaceLock lock(workspace);
  OperationalInputs inputs = parse_operational_inputs(read_file_or_die(inputs_path));
  TargetConfig targets = parse_targets(read_file_or_die(targets_path));
  Warehouse wh(warehouse_dir(workspace));
  Money revenue_baseline = period_revenue(wh, inputs.baseline_start, inputs.baseline_end);
  Money revenue_current = period_revenue(wh, inputs.current_start, inputs.current_end);
  std::vector<KpiValue> kpis = compute_kpis(inputs, revenue_baseline, revenue_current);
  Scorecard card = evaluate(kpis, targets);
  emit(out_path, format == "json" ? card.to_json_text() : card.to_text());
  return 0;
}

int cmd_check(const std::string& workspace) {
  WorkspaceLock lock(workspace);
  Warehouse wh(warehouse_dir(workspace));
  if (wh.version() == 0) {
    throw Error(Err::MissingStage, "warehouse is empty; run load first");
  }
  IntegrityReport report = wh.integrity_check();
  std::cout << report.to_text();
  return report.clean() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RFID + POS retail analytics pipeline"};
  app.require_subcommand(1);

  std::string workspace, config_path, out_dir, out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto* generate = app.add_subcommand("generate", "produce a synthetic corpus");
  generate->add_option("--config", config_path, "simulation config JSON");
  generate->add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_set = true; });
  generate->add_option("--out", out_dir, "output directory")->required();

  std::vector<std::string> ingest_files;
  auto* ingest = app.add_subcommand("ingest", "parse + stage raw ping/POS files");
  ingest->add_option("--workspace", workspace, "workspace directory")->required();
  ingest->add_option("files", ingest_files, "input CSV files")->required();

  LoadInputs load_inputs;
  auto* load = app.add_subcommand("load", "transform staged batches into the warehouse");
  load->add_option("--workspace", workspace, "workspace directory")->required();
  load->add_option("--zones", load_inputs.zone_file, "zone definition CSV")->required();
  load->add_option("--cost", load_inputs.cost_file, "cost snapshot CSV")->required();
  load->add_option("--catalog", load_inputs.catalog_file, "product catalog CSV")->required();
  load->add_option("--demographics", load_inputs.demographics_file, "demographics CSV")
      ->required();
  load->add_option("--stop-radius", load_inputs.segmentation.stop_radius_m,
                   "stop radius, meters");
  load->add_option("--min-stop", load_inputs.segmentation.min_stop_duration_s,
                   "minimum stop duration, seconds");
  load->add_option("--max-gap", load_inputs.segmentation.max_gap_s,
                   "track split threshold, seconds");

  std::string measures_arg, by_arg, format = "csv";
  std::vector<std::string> filter_args;
  auto* query = app.add_subcommand("query", "cube rollup over the warehouse");
  query->add_option("--workspace", workspace)->required();
  query->add_option("--measures", measures_arg, "comma list of measures")->required();
  query->add_option("--by", by_arg, "comma list of group levels");
  query->add_option("--filter", filter_args, "level=value equality filter");
  query->add_option("--format", format, "csv or report");
  query->add_option("--out", out_path, "write to file instead of stdout");

  std::string measure_arg, from_arg, to_arg;
  double cell_size = 1.0;
  auto* heatmap_cmd = app.add_subcommand("heatmap", "per-zone matrix for one measure");
  heatmap_cmd->add_option("--workspace", workspace)->required();
  heatmap_cmd->add_option("--measure", measure_arg, "dwell_s, visit_count or revenue")
      ->required();
  heatmap_cmd->add_option("--from", from_arg, "start date YYYY-MM-DD")->required();
  heatmap_cmd->add_option("--to", to_arg, "end date YYYY-MM-DD")->required();
  heatmap_cmd->add_option("--cell-size", cell_size, "raster cell size, meters");
  heatmap_cmd->add_option("--format", format, "csv, matrix or report");
  heatmap_cmd->add_option("--out", out_path);

  std::string customer_arg, date_arg;
  auto* journey = app.add_subcommand("journey", "one customer-day profile");
  journey->add_option("--workspace", workspace)->required();
  journey->add_option("--customer", customer_arg)->required();
  journey->add_option("--date", date_arg, "YYYY-MM-DD")->required();
  journey->add_option("--format", format, "report or json");
  journey->add_option("--out", out_path);

  std::string inputs_path, targets_path;
  auto* bsc = app.add_subcommand("bsc", "balanced scorecard from inputs + warehouse");
  bsc->add_option("--workspace", workspace)->required();
  bsc->add_option("--inputs", inputs_path, "operational inputs CSV")->required();
  bsc->add_option("--targets", targets_path, "target config file")->required();
  bsc->add_option("--format", format, "report or json");
  bsc->add_option("--out", out_path);

  auto* check = app.add_subcommand("check", "referential + identity integrity check");
  check->add_option("--workspace", workspace)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: USAGE_ERROR: " << e.what() << '\n';
    return 2;
  }

  try {
    if (generate->parsed()) return cmd_generate(config_path, out_dir, seed_set, seed);
    if (ingest->parsed()) return cmd_ingest(workspace, ingest_files);
    if (load->parsed()) return cmd_load(workspace, load_inputs);
    if (query->parsed()) {
      return cmd_query(workspace, measures_arg, by_arg, filter_args, format, out_path);
    }
    if (heatmap_cmd->parsed()) {
      return cmd_heatmap(workspace, measure_arg, from_arg, to_arg, cell_size, format, out_path);
    }
    if (journey->parsed()) {
      return cmd_journey(workspace, customer_arg, date_arg, format, out_path);
    }
    if (bsc->parsed()) return cmd_bsc(workspace, inputs_path, targets_path, format, out_path);
    if (check->parsed()) return cmd_check(workspace);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: INTERNAL: " << e.what() << '\n';
    return 6;
  }
  return 2;
}
