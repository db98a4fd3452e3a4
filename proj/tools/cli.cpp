#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bonefrag/audit.hpp"
#include "bonefrag/error.hpp"
#include "bonefrag/evaluation.hpp"
#include "bonefrag/ingest.hpp"
#include "bonefrag/unsupervised.hpp"
#include "extract.hpp"

namespace bonefrag::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Tracks every file a command writes so a failure can remove them.
class OutputSet {
 public:
  void write(const fs::path& path, const std::string& text) {
    written_.push_back(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << text;
    out.close();
    if (!out) throw Error("failed writing '" + path.string() + "'");
  }

  // Output plus `<output>.config.json` holding the resolved configuration.
  void write_with_config(const fs::path& path, const std::string& text, const json& config) {
    write(path, text);
    write(fs::path(path.string() + ".config.json"), config.dump(2) + "\n");
  }

  void remove_all() noexcept {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

 private:
  std::vector<fs::path> written_;
};

struct Context {
  json config;  // resolved; excludes the thread count
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::ostream& out;
  std::ostream& err;
  OutputSet outputs;

  json record(std::string_view command) const { return json{{"command", command}, {"config", config}}; }
};

struct Command {
  std::string name;
  std::string description;
  // Every configurable key with its default; null marks a required string.
  json defaults;
  std::map<std::string, std::string> help;
  bool uses_seed = false;
  // Keys accepted only from the config file (structured values).
  std::vector<std::string> file_only;
  std::function<void(Context&)> action;
};

std::string flag_of(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json typed_flag_value(const json& def, const std::string& key, const std::string& text) {
  const std::string where = "flag " + flag_of(key);
  try {
    if (def.is_number_unsigned() || def.is_number_integer()) {
      std::size_t used = 0;
      const long long v = std::stoll(text, &used);
      if (used != text.size() || v < 0) throw std::invalid_argument(text);
      return static_cast<std::uint64_t>(v);
    }
    if (def.is_number_float()) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
  } catch (const std::logic_error&) {
    throw ValidationError(where + ": expected a non-negative number, got '" + text + "'");
  }
  if (def.is_array()) return split_list(text);
  return text;
}

void check_config_type(const json& def, const std::string& key, const json& value) {
  const std::string where = "config." + key;
  bool ok = true;
  if (def.is_number_unsigned() || def.is_number_integer()) {
    ok = value.is_number_integer() && value.get<long long>() >= 0;
  } else if (def.is_number_float()) {
    ok = value.is_number();
  } else if (def.is_array()) {
    ok = value.is_array() && std::all_of(value.begin(), value.end(), [](const json& v) { return v.is_string(); });
  } else {
    ok = value.is_string();
  }
  if (!ok) throw ValidationError(where + ": wrong type (expected " + std::string(def.is_null() ? "string" : def.type_name()) + ")");
}

std::uint64_t parse_seed(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  if (v.is_string()) {
    std::uint64_t s = 0;
    const std::string text = v.get<std::string>();
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), s);
    if (ec == std::errc() && ptr == text.data() + text.size()) return s;
  }
  throw ValidationError(where + ": seed must be a non-negative integer");
}

// ---- commands --------------------------------------------------------------

void do_extract(Context& ctx) {
  const json& c = ctx.config;
  ExtractInputs in{c["mesh_dir"].get<std::string>(), c["annotations"].get<std::string>(),
                   c["break_meta"].get<std::string>(), c["fragment_meta"].get<std::string>()};
  Diagnostics diag;
  const ExtractResult result = extract_features(in, diag);
  const std::string prefix = c["out_prefix"].get<std::string>();
  const json record = ctx.record("extract");
  ctx.outputs.write_with_config(prefix + "_breaks.csv", features_csv_text(result.breaks), record);
  ctx.outputs.write_with_config(prefix + "_fragments.csv", features_csv_text(result.fragments), record);
  ctx.outputs.write_with_config(prefix + "_manifest.txt", result.manifest, record);
  for (const auto& w : diag.messages()) ctx.err << "warning: " << w << '\n';
  ctx.out << "extracted " << result.breaks.size() << " breaks from " << result.fragments.size() << " fragments\n";
}

std::vector<ClassifierSpec> resolve_specs(json& config, bool algorithms_flag_given) {
  std::vector<ClassifierSpec> specs;
  if (config.contains("specs") && !algorithms_flag_given) {
    const json& list = config["specs"];
    if (!list.is_array() || list.empty()) throw ValidationError("config.specs: expected a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      specs.push_back(spec_from_json(list[i], "config.specs[" + std::to_string(i) + "]"));
    }
  } else {
    const auto names = config["algorithms"].get<std::vector<std::string>>();
    if (names.empty()) throw ValidationError("config.algorithms: at least one algorithm is required");
    for (const auto& n : names) {
      try {
        specs.push_back(ClassifierSpec::defaults(parse_algorithm(n)));
      } catch (const Error& e) {
        throw ValidationError(std::string("config.algorithms: ") + e.what());
      }
    }
  }
  json resolved = json::array();
  json names = json::array();
  for (const auto& s : specs) {
    resolved.push_back(spec_to_json(s));
    names.push_back(s.name());
  }
  config["specs"] = resolved;
  config["algorithms"] = names;
  return specs;
}

void do_experiment(Context& ctx, bool algorithms_flag_given) {
  json& c = ctx.config;
  const std::vector<ClassifierSpec> specs = resolve_specs(c, algorithms_flag_given);
  ExperimentOptions opt;
  opt.protocol = parse_protocol(c["protocol"].get<std::string>());
  opt.n_trials = c["trials"].get<std::size_t>();
  opt.test_fraction = c["test_fraction"].get<double>();
  opt.master_seed = ctx.seed;
  opt.threads = ctx.threads;
  if (opt.n_trials == 0) throw ValidationError("config.trials: must be >= 1");
  if (!(opt.test_fraction > 0.0 && opt.test_fraction < 1.0)) {
    throw ValidationError("config.test_fraction: must lie in (0, 1)");
  }
  Diagnostics diag;
  opt.diagnostics = &diag;
  const FeatureTable table = read_features_csv(c["dataset"].get<std::string>());
  std::vector<ExperimentReport> reports;
  for (const auto& spec : specs) {
    reports.push_back(run_experiment(table, spec, opt));
    const auto& r = reports.back();
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %-18s mean %6.2f%%  std %5.2f%%\n", r.algorithm.c_str(),
                  std::string(to_string(r.protocol)).c_str(), 100.0 * r.mean_accuracy, 100.0 * r.std_accuracy);
    ctx.out << line;
  }
  for (const auto& w : diag.messages()) ctx.err << "warning: " << w << '\n';
  ctx.outputs.write_with_config(c["out"].get<std::string>(), reports_csv(reports), ctx.record("experiment"));
}

void do_spectral(Context& ctx) {
  const json& c = ctx.config;
  const int k = c["k"].get<int>();
  SpectralOptions opt;
  opt.k_neighbors = c["neighbors"].get<int>();
  opt.k_dims = c["k_dims"].get<int>();
  opt.restarts = c["restarts"].get<int>();
  const std::string scatter = c["scatter"].get<std::string>();
  const int dims = opt.k_dims > 0 ? opt.k_dims : k;
  if (!scatter.empty() && dims != 2) {
    throw ContractViolation("scatter export needs a 2-dimensional embedding, got k_dims=" + std::to_string(dims));
  }
  if (k < 1) throw ValidationError("config.k: must be >= 1");
  const FeatureTable table = read_features_csv(c["dataset"].get<std::string>());
  Diagnostics diag;
  const SpectralClustering result = spectral_clustering(table.rows, k, ctx.seed, opt, &diag);
  const ClusteringScore score = clustering_score(result.clusters.labels, table.labels);
  for (const auto& w : diag.messages()) ctx.err << "warning: " << w << '\n';
  const json record = ctx.record("spectral");
  ctx.outputs.write_with_config(c["out"].get<std::string>(),
                                clustering_report_csv(table.level, k, score, table.class_names, ctx.seed), record);
  if (!scatter.empty()) {
    std::vector<std::string> ids;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < table.size(); ++i) {
      ids.push_back(table.level == TableLevel::breakage ? table.group_ids[i] + "/" + table.row_ids[i]
                                                        : table.row_ids[i]);
      labels.push_back(table.class_names[static_cast<std::size_t>(table.labels[i])]);
    }
    ctx.outputs.write_with_config(scatter, scatter_csv_text(result.embedding, ids, labels), record);
  }
  char line[96];
  std::snprintf(line, sizeof line, "clustering accuracy %.2f%% (k=%d)\n", 100.0 * score.accuracy, k);
  ctx.out << line;
}

void do_audit(Context& ctx) {
  const json& c = ctx.config;
  AuditConfig cfg;
  cfg.data.seed = ctx.seed;
  cfg.n_trials = c["trials"].get<std::size_t>();
  cfg.test_fraction = c["test_fraction"].get<double>();
  cfg.bootstrap_factor = c["bootstrap_factor"].get<std::size_t>();
  cfg.threads = ctx.threads;
  Diagnostics diag;
  cfg.diagnostics = &diag;
  const AuditReport report = run_leakage_audit(cfg);
  for (const auto& w : diag.messages()) ctx.err << w << '\n';
  const json record = ctx.record("audit");
  ctx.outputs.write_with_config(c["out"].get<std::string>(), audit_csv(report), record);
  const std::string table = audit_table_text(report);
  if (const std::string path = c["table"].get<std::string>(); !path.empty()) {
    ctx.outputs.write_with_config(path, table, record);
  }
  ctx.out << table;
}

void do_ingest(Context& ctx) {
  const json& c = ctx.config;
  json schema_json;
  try {
    schema_json = json::parse(read_text(c["schema"].get<std::string>()));
  } catch (const json::parse_error& e) {
    throw ValidationError("schema file: " + std::string(e.what()));
  }
  const SchemaConfig schema = schema_from_json(schema_json);
  const IngestResult result = ingest_tabular_csv(c["input"].get<std::string>(), schema);
  const json record = ctx.record("ingest");
  ctx.outputs.write_with_config(c["out"].get<std::string>(), features_csv_text(result.table), record);
  const std::string report = result.report.to_text();
  if (const std::string path = c["report"].get<std::string>(); !path.empty()) {
    ctx.outputs.write_with_config(path, report, record);
  } else {
    ctx.out << report;
  }
}

std::vector<Command> commands(bool& algorithms_flag_given) {
  std::vector<Command> list;
  list.push_back({"extract",
                  "Compute break-level and fragment-level feature CSVs from meshes and annotations",
                  json{{"mesh_dir", nullptr},
                       {"annotations", nullptr},
                       {"break_meta", nullptr},
                       {"fragment_meta", nullptr},
                       {"out_prefix", nullptr}},
                  {{"mesh_dir", "Directory holding <fragment_id>.ply meshes"},
                   {"annotations", "Break-curve point CSV"},
                   {"break_meta", "Per-break metadata CSV"},
                   {"fragment_meta", "Per-fragment metadata CSV"},
                   {"out_prefix", "Writes <prefix>_breaks.csv, <prefix>_fragments.csv, <prefix>_manifest.txt"}},
                  false,
                  {},
                  do_extract});
  json all_algorithms = json::array();
  for (Algorithm a : kAllAlgorithms) all_algorithms.push_back(std::string(to_string(a)));
  list.push_back({"experiment",
                  "Repeated grouped train/test trials for each classifier",
                  json{{"dataset", nullptr},
                       {"protocol", "fragment_level"},
                       {"algorithms", all_algorithms},
                       {"trials", 300u},
                       {"test_fraction", 0.25},
                       {"out", nullptr}},
                  {{"dataset", "Features CSV (break or fragment level)"},
                   {"protocol", "fragment_level | break_level_voted | row_level_unsafe"},
                   {"algorithms", "Comma-separated algorithms with default hyperparameters"},
                   {"trials", "Number of random train/test splits"},
                   {"test_fraction", "Fraction of fragments held out per trial"},
                   {"out", "Report CSV"}},
                  true,
                  {"specs"},
                  [&algorithms_flag_given](Context& ctx) { do_experiment(ctx, algorithms_flag_given); }});
  list.push_back({"spectral",
                  "Spectral embedding and clustering of a feature table",
                  json{{"dataset", nullptr},
                       {"k", 2u},
                       {"k_dims", 0u},
                       {"neighbors", 10u},
                       {"restarts", 10u},
                       {"out", nullptr},
                       {"scatter", ""}},
                  {{"dataset", "Features CSV"},
                   {"k", "Number of clusters"},
                   {"k_dims", "Embedding dimension (0: same as k)"},
                   {"neighbors", "Neighbours per node in the similarity graph"},
                   {"restarts", "k-means restarts"},
                   {"out", "Clustering report CSV"},
                   {"scatter", "Optional id,x,y,label CSV of the 2-D embedding"}},
                  true,
                  {},
                  do_spectral});
  list.push_back({"audit",
                  "Randomized-data leakage audit over three split protocols",
                  json{{"trials", 100u}, {"test_fraction", 0.25}, {"bootstrap_factor", 100u}, {"out", nullptr},
                       {"table", ""}},
                  {{"trials", "Number of trials (fresh random dataset each)"},
                   {"test_fraction", "Held-out fraction"},
                   {"bootstrap_factor", "Copies drawn per fragment row before the bootstrapped split"},
                   {"out", "Audit report CSV"},
                   {"table", "Optional text file with the formatted table"}},
                  true,
                  {},
                  do_audit});
  list.push_back({"ingest",
                  "Clean an external tabular CSV into a features CSV",
                  json{{"input", nullptr}, {"schema", nullptr}, {"out", nullptr}, {"report", ""}},
                  {{"input", "Raw CSV"},
                   {"schema", "JSON schema declaring each column"},
                   {"out", "Features CSV"},
                   {"report", "Optional cleaning report path (default: print)"}},
                  false,
                  {},
                  do_ingest});
  return list;
}

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bone fragment feature extraction, classification and leakage auditing"};
  app.name("bonefrag");
  app.require_subcommand(1);
  app.fallthrough();
  std::string seed_text;
  std::string threads_text;
  std::string config_path;
  auto* seed_opt = app.add_option("--seed", seed_text, "Master seed (generated and printed when omitted)");
  auto* threads_opt = app.add_option("--threads", threads_text, "Worker cap; 0 uses every core");
  app.add_option("--config", config_path, "JSON file with command settings; flags take precedence");

  bool algorithms_flag_given = false;
  std::vector<Command> cmds = commands(algorithms_flag_given);
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, std::map<std::string, CLI::Option*>> flag_opts;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : cmds) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.description);
    subs[cmd.name] = sub;
    for (const auto& [key, def] : cmd.defaults.items()) {
      std::string help = cmd.help.count(key) ? cmd.help.at(key) : key;
      if (def.is_null()) help += " (required)";
      flag_opts[cmd.name][key] = sub->add_option(flag_of(key), flag_values[cmd.name][key], help);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  const Command* cmd = nullptr;
  for (const auto& c : cmds) {
    if (subs[c.name]->parsed()) cmd = &c;
  }

  json file = json::object();
  if (!config_path.empty()) {
    try {
      file = json::parse(read_text(config_path));
    } catch (const json::parse_error& e) {
      throw ValidationError("config file '" + config_path + "': " + e.what());
    }
    if (!file.is_object()) throw ValidationError("config file '" + config_path + "': expected a JSON object");
  }

  json config = cmd->defaults;
  for (const auto& [key, value] : file.items()) {
    if (key == "seed" || key == "threads") continue;
    const bool structured = std::find(cmd->file_only.begin(), cmd->file_only.end(), key) != cmd->file_only.end();
    if (structured) {
      config[key] = value;
      continue;
    }
    if (!cmd->defaults.contains(key)) {
      throw ValidationError("config." + key + ": unknown field for command '" + cmd->name + "'");
    }
    check_config_type(cmd->defaults[key], key, value);
    config[key] = value;
  }
  for (const auto& [key, opt] : flag_opts[cmd->name]) {
    if (opt->count() == 0) continue;
    config[key] = typed_flag_value(cmd->defaults[key], key, flag_values[cmd->name][key]);
    if (key == "algorithms") algorithms_flag_given = true;
  }
  for (const auto& [key, value] : config.items()) {
    if (value.is_null()) {
      throw ValidationError("missing required setting '" + key + "' (flag " + flag_of(key) + " or config key)");
    }
  }

  Context ctx{config, 0, 0, out, err, {}};
  if (threads_opt->count() > 0) {
    ctx.threads = static_cast<unsigned>(parse_seed(json(threads_text), "--threads"));
  } else if (file.contains("threads")) {
    ctx.threads = static_cast<unsigned>(parse_seed(file["threads"], "config.threads"));
  }
  if (cmd->uses_seed) {
    if (seed_opt->count() > 0) {
      ctx.seed = parse_seed(json(seed_text), "--seed");
    } else if (file.contains("seed")) {
      ctx.seed = parse_seed(file["seed"], "config.seed");
    } else {
      ctx.seed = std::random_device{}();
      ctx.seed = (ctx.seed << 32) ^ std::random_device{}();
      out << "seed: " << ctx.seed << '\n';
    }
    ctx.config["seed"] = ctx.seed;
  }

  try {
    cmd->action(ctx);
  } catch (...) {
    ctx.outputs.remove_all();
    throw;
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run_impl(args, out, err);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationError;
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << '\n';
    return kValidationError;
  } catch (const Error& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const json::exception& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace bonefrag::cli
