#include "ucca/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ucca/error.hpp"
#include "ucca/interchange.hpp"
#include "ucca/notation.hpp"
#include "ucca/scorer.hpp"
#include "ucca/validator.hpp"

namespace ucca {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Result of processing one input; printed in input order.
struct FileResult {
  int status = kExitOk;
  std::string out;
  std::string err;
};

struct Common {
  std::string from = "auto";
  unsigned jobs = 0;
};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_interchange(const std::string& path, const std::string& from) {
  if (from != "auto") return from == "json";
  return ends_with(path, kInterchangeExtension);
}

// "dir/abc.ucca.json" and "dir/abc.txt" both give "abc".
std::string stem_of(const std::string& path) {
  std::string name = fs::path(path).filename().string();
  if (ends_with(name, kInterchangeExtension)) return name.substr(0, name.size() - kInterchangeExtension.size());
  return fs::path(name).stem().string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Loaded {
  std::vector<Passage> passages;
  std::vector<ParseWarning> warnings;
};

Loaded load(const std::string& path, const std::string& from, bool lenient_remotes = false) {
  Loaded loaded;
  std::string bytes = read_file(path);
  if (is_interchange(path, from)) {
    loaded.passages.push_back(from_interchange(bytes, BuildOptions{.require_full_coverage = false}));
  } else {
    ParseOptions options{.lenient_remotes = lenient_remotes, .passage_id = stem_of(path)};
    loaded.passages = parse_document(bytes, options, &loaded.warnings);
  }
  return loaded;
}

std::string failure(const std::string& path, const std::exception& e) {
  return path + ": " + e.what() + "\n";
}

std::string warnings_text(const std::string& path, const std::vector<ParseWarning>& warnings) {
  std::string out;
  for (const auto& w : warnings) out += path + ": warning at byte " + std::to_string(w.position) + ": " + w.message + "\n";
  return out;
}

// Runs fn(i) for every i in [0, n) on a small pool of threads.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  unsigned workers = jobs ? jobs : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<FileResult> run_each(const std::vector<std::string>& paths, unsigned jobs,
                                 const std::function<FileResult(const std::string&)>& fn) {
  std::vector<FileResult> results(paths.size());
  parallel_for(paths.size(), jobs, [&](std::size_t i) { results[i] = fn(paths[i]); });
  return results;
}

// ---------------------------------------------------------------------------

struct ParseArgs {
  std::vector<std::string> paths;
  std::string out_dir;
  bool lenient_remotes = false;
  bool keep_going = false;
};

int cmd_parse(const ParseArgs& args, const Common& common, std::string& out, std::string& err) {
  struct Converted {
    std::vector<std::pair<std::string, std::string>> files;  // path, contents
    std::size_t tokens = 0;
  };
  std::vector<Converted> converted(args.paths.size());
  auto results = run_each(args.paths, common.jobs, [&](const std::string& path) {
    FileResult r;
    auto i = static_cast<std::size_t>(&path - args.paths.data());
    try {
      Loaded loaded = load(path, common.from, args.lenient_remotes);
      r.err = warnings_text(path, loaded.warnings);
      fs::path dir = args.out_dir.empty() ? fs::path(path).parent_path() : fs::path(args.out_dir);
      std::string stem = stem_of(path);
      for (std::size_t k = 0; k < loaded.passages.size(); ++k) {
        std::string name = loaded.passages.size() == 1 ? stem : stem + "-" + std::to_string(k + 1);
        converted[i].files.emplace_back((dir / (name + std::string(kInterchangeExtension))).string(),
                                        to_interchange(loaded.passages[k]));
        converted[i].tokens += loaded.passages[k].tokens().size();
      }
    } catch (const std::exception& e) {
      r.status = kExitFailure;
      r.err += failure(path, e);
    }
    return r;
  });

  int status = kExitOk;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    err += r.err;
    if (r.status == kExitOk) {
      std::string targets;
      try {
        for (const auto& [target, contents] : converted[i].files) {
          if (auto parent = fs::path(target).parent_path(); !parent.empty()) fs::create_directories(parent);
          std::ofstream f(target, std::ios::binary);
          if (!(f << contents)) throw std::runtime_error("cannot write " + target);
          targets += " " + target;
        }
      } catch (const std::exception& e) {
        r.status = kExitFailure;
        err += failure(args.paths[i], e);
      }
      if (r.status == kExitOk) {
        out += args.paths[i] + ": " + std::to_string(converted[i].files.size()) + " passage(s), " +
               std::to_string(converted[i].tokens) + " token(s) ->" + targets + "\n";
      }
    }
    status = std::max(status, r.status);
    if (status == kExitFailure && !args.keep_going) break;
  }
  return status;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::vector<std::string> paths;
  std::string config;
  std::string format = "text";
};

int cmd_validate(const ValidateArgs& args, const Common& common, std::string& out, std::string& err) {
  ValidatorConfig config;
  if (!args.config.empty()) {
    try {
      config = parse_validator_config(read_file(args.config));
    } catch (const std::exception& e) {
      err += args.config + ": " + e.what() + "\n";
      return kExitFailure;
    }
  }
  struct Entry {
    std::string file;
    std::string passage;
    std::size_t index;
    Diagnostic diagnostic;
  };
  std::vector<std::vector<Entry>> entries(args.paths.size());
  auto results = run_each(args.paths, common.jobs, [&](const std::string& path) {
    FileResult r;
    auto i = static_cast<std::size_t>(&path - args.paths.data());
    try {
      Loaded loaded = load(path, common.from);
      r.err = warnings_text(path, loaded.warnings);
      for (std::size_t k = 0; k < loaded.passages.size(); ++k) {
        for (auto& d : validate(loaded.passages[k], config)) {
          if (d.severity == Severity::Error) r.status = kExitDiagnostics;
          entries[i].push_back({path, loaded.passages[k].id(), k, std::move(d)});
        }
      }
    } catch (const std::exception& e) {
      r.status = kExitFailure;
      r.err += failure(path, e);
    }
    return r;
  });

  int status = kExitOk;
  std::vector<Entry> all;
  for (std::size_t i = 0; i < results.size(); ++i) {
    err += results[i].err;
    status = std::max(status, results[i].status);
    for (auto& e : entries[i]) all.push_back(std::move(e));
  }
  // Per passage the validator already orders by (unit, rule).
  std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.file, a.index) < std::tie(b.file, b.index);
  });

  if (args.format == "json") {
    json arr = json::array();
    for (const auto& e : all) {
      arr.push_back({{"file", e.file},
                     {"passage", e.passage},
                     {"unit", std::to_string(e.diagnostic.unit)},
                     {"rule", e.diagnostic.rule},
                     {"severity", to_string(e.diagnostic.severity)},
                     {"message", e.diagnostic.message},
                     {"yield", e.diagnostic.yield}});
    }
    out += arr.dump(2) + "\n";
  } else {
    for (const auto& e : all) {
      const auto& d = e.diagnostic;
      out += e.file + ":" + e.passage + ": unit " + std::to_string(d.unit) + ": " + std::string(to_string(d.severity)) +
             " [" + d.rule + "] " + d.message + " (\"" + d.yield + "\")\n";
    }
  }
  return status;
}

// ---------------------------------------------------------------------------

struct ConvertArgs {
  std::string path;
  std::string to;
  std::string label_side = "left";
};

int cmd_convert(const ConvertArgs& args, const Common& common, std::string& out, std::string& err) {
  try {
    Loaded loaded = load(args.path, common.from);
    err += warnings_text(args.path, loaded.warnings);
    std::string to = args.to;
    if (to.empty()) to = is_interchange(args.path, common.from) ? "text" : "json";
    if (to == "json") {
      if (loaded.passages.size() != 1) {
        err += args.path + ": --to json needs exactly one passage, found " + std::to_string(loaded.passages.size()) + "\n";
        return kExitFailure;
      }
      out += to_interchange(loaded.passages.front());
    } else {
      LabelSide side = args.label_side == "right" ? LabelSide::Right : LabelSide::Left;
      for (std::size_t k = 0; k < loaded.passages.size(); ++k) {
        if (k) out += "\n";
        out += render(loaded.passages[k], side) + "\n";
      }
    }
  } catch (const std::exception& e) {
    err += failure(args.path, e);
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ScoreArgs {
  std::string gold;
  std::string pred;
  std::string mode = "labeled";
  std::string format = "text";
};

int cmd_score(const ScoreArgs& args, const Common& common, std::string& out, std::string& err) {
  try {
    Loaded gold = load(args.gold, common.from);
    Loaded pred = load(args.pred, common.from);
    err += warnings_text(args.gold, gold.warnings) + warnings_text(args.pred, pred.warnings);
    if (gold.passages.size() != pred.passages.size()) {
      throw Error(ErrorCode::TokenMismatch, std::to_string(gold.passages.size()) + " gold passage(s) against " +
                                                std::to_string(pred.passages.size()) + " predicted");
    }
    ScoreMode mode = args.mode == "unlabeled" ? ScoreMode::Unlabeled : ScoreMode::Labeled;
    ScoreReport total;
    total.mode = mode;
    for (std::size_t k = 0; k < gold.passages.size(); ++k) total += score(gold.passages[k], pred.passages[k], mode);
    out += args.format == "json" ? report_to_json(total) : report_to_table(total);
  } catch (const std::exception& e) {
    err += args.gold + " vs " + args.pred + ": " + e.what() + "\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> paths;
  std::string format = "text";
};

std::string stats_json(const CategoryCounts& c) {
  json per_category = json::object();
  for (Category cat : kAllCategories) per_category[std::string(abbreviation(cat))] = c[cat];
  json doc = {{"passages", c.passages},           {"tokens", c.tokens},
              {"units", c.units},                 {"edges", c.edges},
              {"remote_edges", c.remote_edges},   {"scenes", c.scenes},
              {"implicit_units", c.implicit_units}, {"unanalyzable_units", c.unanalyzable_units},
              {"per_category", std::move(per_category)}};
  return doc.dump(2) + "\n";
}

std::string stats_table(const CategoryCounts& c) {
  std::string out;
  char line[96];
  auto row = [&](const std::string& name, std::size_t value) {
    std::snprintf(line, sizeof line, "%-20s %10zu\n", name.c_str(), value);
    out += line;
  };
  row("passages", c.passages);
  row("tokens", c.tokens);
  row("units", c.units);
  row("edges", c.edges);
  row("remote_edges", c.remote_edges);
  row("scenes", c.scenes);
  row("implicit_units", c.implicit_units);
  row("unanalyzable_units", c.unanalyzable_units);
  out += "\n";
  for (Category cat : kAllCategories) row(std::string(abbreviation(cat)), c[cat]);
  return out;
}

int cmd_stats(const StatsArgs& args, const Common& common, std::string& out, std::string& err) {
  std::vector<CategoryCounts> counts(args.paths.size());
  auto results = run_each(args.paths, common.jobs, [&](const std::string& path) {
    FileResult r;
    auto i = static_cast<std::size_t>(&path - args.paths.data());
    try {
      Loaded loaded = load(path, common.from);
      r.err = warnings_text(path, loaded.warnings);
      for (const auto& p : loaded.passages) counts[i] += stats(p);
    } catch (const std::exception& e) {
      r.status = kExitFailure;
      r.err += failure(path, e);
    }
    return r;
  });
  int status = kExitOk;
  CategoryCounts total;
  for (std::size_t i = 0; i < results.size(); ++i) {
    err += results[i].err;
    status = std::max(status, results[i].status);
    total += counts[i];
  }
  out += args.format == "json" ? stats_json(total) : stats_table(total);
  return status;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parse, validate, convert, score and summarize foundational-layer UCCA annotations.", "ucca-fl"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  Common common;
  const std::vector<std::string> formats{"auto", "text", "json"};
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--from", common.from, "Input format; auto picks json for *.ucca.json, text otherwise")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
    sub->add_option("-j,--jobs", common.jobs, "Worker threads (0 = one per core)")->capture_default_str();
  };
  const std::vector<std::string> output_formats{"text", "json"};

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "Parse bracket-notation files and write .ucca.json documents");
  parse->add_option("paths", parse_args.paths, "Input files")->required();
  parse->add_option("-o,--out-dir", parse_args.out_dir, "Output directory (default: next to each input)");
  parse->add_flag("--lenient-remotes", parse_args.lenient_remotes,
                  "Resolve ambiguous remote references to the nearest preceding match, with a warning");
  parse->add_flag("-k,--keep-going", parse_args.keep_going, "Continue after a file fails; return the worst status");
  add_common(parse);

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Check passages against the restriction rules");
  validate_cmd->add_option("paths", validate_args.paths, "Input files")->required();
  validate_cmd->add_option("-c,--config", validate_args.config, "Rule severity overrides (RULE = error|warning|off)")
      ->envname("UCCA_CONFIG");
  validate_cmd->add_option("-f,--format", validate_args.format, "Output format")
      ->check(CLI::IsMember(output_formats))
      ->capture_default_str();
  add_common(validate_cmd);

  ConvertArgs convert_args;
  auto* convert = app.add_subcommand("convert", "Convert between bracket notation and .ucca.json");
  convert->add_option("path", convert_args.path, "Input file")->required();
  convert->add_option("-t,--to", convert_args.to, "Output format (default: the other one)")
      ->check(CLI::IsMember(output_formats));
  convert->add_option("--label-side", convert_args.label_side, "Where bracket labels are written")
      ->check(CLI::IsMember({"left", "right"}))
      ->capture_default_str();
  add_common(convert);

  ScoreArgs score_args;
  auto* score_cmd = app.add_subcommand("score", "Compare a predicted annotation against a gold one");
  score_cmd->add_option("gold", score_args.gold, "Gold file")->required();
  score_cmd->add_option("pred", score_args.pred, "Predicted file")->required();
  score_cmd->add_option("-m,--mode", score_args.mode, "Headline scores")
      ->check(CLI::IsMember({"labeled", "unlabeled"}))
      ->capture_default_str();
  score_cmd->add_option("-f,--format", score_args.format, "Output format")
      ->check(CLI::IsMember(output_formats))
      ->capture_default_str();
  add_common(score_cmd);

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Count units, edges and categories across files");
  stats_cmd->add_option("paths", stats_args.paths, "Input files");
  stats_cmd->add_option("-f,--format", stats_args.format, "Output format")
      ->check(CLI::IsMember(output_formats))
      ->capture_default_str();
  add_common(stats_cmd);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::ostringstream discard;
    app.exit(e, discard, err);
    return kExitUsage;
  }

  std::string stdout_buf;
  std::string stderr_buf;
  int status = kExitUsage;
  if (parse->parsed()) {
    status = cmd_parse(parse_args, common, stdout_buf, stderr_buf);
  } else if (validate_cmd->parsed()) {
    status = cmd_validate(validate_args, common, stdout_buf, stderr_buf);
  } else if (convert->parsed()) {
    status = cmd_convert(convert_args, common, stdout_buf, stderr_buf);
  } else if (score_cmd->parsed()) {
    status = cmd_score(score_args, common, stdout_buf, stderr_buf);
  } else if (stats_cmd->parsed()) {
    status = cmd_stats(stats_args, common, stdout_buf, stderr_buf);
  }
  if (status < kExitFailure) out << stdout_buf;
  err << stderr_buf;
  out.flush();
  err.flush();
  return status;
}

}  // namespace ucca
