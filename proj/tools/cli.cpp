#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "layoutkit/bufferset.hpp"
#include "layoutkit/decoder.hpp"
#include "layoutkit/dynamic_builder.hpp"
#include "layoutkit/error.hpp"
#include "layoutkit/layout_builder.hpp"
#include "layoutkit/logical_value.hpp"

namespace layoutkit::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string located(const std::string& message, const std::string& path) {
  return path == "$" ? message : message + " at " + path;
}

void fill_json(BuilderNode& node, const Json& value, const std::string& path) {
  switch (node.kind()) {
    case NodeKind::primitive: {
      auto& builder = node.as<PrimitiveBuilder>();
      if (builder.type() == PrimitiveType::boolean) {
        if (!value.is_boolean()) throw Error(located("expected bool, got " + value.dump(), path));
        builder.append_bool(value.get<bool>());
      } else if (value.is_number_integer() && !value.is_number_unsigned()) {
        builder.append_integer(value.get<std::int64_t>());
      } else if (value.is_number_unsigned()) {
        auto v = value.get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
          builder.append_real(static_cast<double>(v));
        } else {
          builder.append_integer(static_cast<std::int64_t>(v));
        }
      } else if (value.is_number_float()) {
        builder.append_real(value.get<double>());
      } else {
        throw Error(located("expected " + std::string(primitive_name(builder.type())) + ", got " + value.dump(),
                            path));
      }
      return;
    }
    case NodeKind::list_offset: {
      if (!value.is_array()) throw Error(located("expected a list, got " + value.dump(), path));
      auto& list = node.as<ListOffsetBuilder>();
      auto& content = list.begin_list();
      for (const auto& item : value) fill_json(content, item, path + "[]");
      list.end_list();
      return;
    }
    case NodeKind::record: {
      if (!value.is_object()) throw Error(located("expected a record, got " + value.dump(), path));
      auto& record = node.as<RecordBuilder>();
      for (std::size_t i = 0; i < record.field_count(); ++i) {
        if (!value.contains(record.field_name(i))) {
          throw Error(located("missing field " + record.field_name(i), path));
        }
      }
      for (const auto& [name, item] : value.items()) {
        bool known = false;
        for (std::size_t i = 0; i < record.field_count() && !known; ++i) known = record.field_name(i) == name;
        if (!known) throw Error(located("unexpected field " + name, path));
      }
      for (std::size_t i = 0; i < record.field_count(); ++i) {
        const auto& name = record.field_name(i);
        fill_json(record.field_at(i), value[name], path + "." + name);
      }
      return;
    }
    case NodeKind::indexed_option: {
      auto& option = node.as<OptionBuilder>();
      if (value.is_null()) {
        option.append_missing();
      } else {
        fill_json(option.append_valid(), value, path);
      }
      return;
    }
  }
}

// Nulls may only appear under an option; checked before filling so a bad
// line never leaves half a row behind.
void check_nulls(const FormNode& schema, const Json& value, const std::string& path) {
  if (value.is_null()) {
    if (schema.kind() != NodeKind::indexed_option) throw Error(located("null where a value is required", path));
    return;
  }
  switch (schema.kind()) {
    case NodeKind::primitive:
      return;
    case NodeKind::list_offset:
      if (value.is_array()) {
        for (const auto& item : value) check_nulls(schema.content(), item, path + "[]");
      }
      return;
    case NodeKind::record: {
      if (!value.is_object()) return;
      auto names = schema.field_names();
      const auto& children = schema.children();
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (value.contains(names[i])) check_nulls(children[i], value[names[i]], path + "." + names[i]);
      }
      return;
    }
    case NodeKind::indexed_option:
      check_nulls(schema.content(), value, path);
      return;
  }
}

template <typename F>
double seconds_of(F&& body) {
  auto start = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2;
}

struct Cursor {
  const Workload& w;
  std::vector<std::size_t> at;
  std::size_t value = 0;

  explicit Cursor(const Workload& workload) : w(workload), at(workload.lengths.size(), 0) {}
};

BufferSet run_typed(const Workload& w) {
  FormNode leaf = FormNode::primitive(PrimitiveType::int32);
  for (int level = 0; level < w.depth; ++level) leaf = FormNode::list_offset(std::move(leaf));
  LayoutBuilder builder(FormNode::record({{"x", FormNode::primitive(PrimitiveType::float64)}, {"y", std::move(leaf)}}));

  auto& record = builder.root().as<RecordBuilder>();
  auto& x = record.field<PrimitiveBuilder>("x");
  std::vector<ListOffsetBuilder*> lists;
  BuilderNode* node = &record.field("y");
  for (int level = 0; level < w.depth; ++level) {
    lists.push_back(&node->as<ListOffsetBuilder>());
    node = &lists.back()->content();
  }
  auto& data = node->as<PrimitiveBuilder>();

  Cursor cursor(w);
  std::function<void(int)> fill_level = [&](int level) {
    auto count = w.lengths[level][cursor.at[level]++];
    lists[level]->begin_list();
    for (std::uint32_t i = 0; i < count; ++i) {
      if (level + 1 == w.depth) {
        data.append(w.values[cursor.value++]);
      } else {
        fill_level(level + 1);
      }
    }
    lists[level]->end_list();
  };
  for (std::size_t row = 0; row < w.rows; ++row) {
    x.append(w.x[row]);
    if (w.depth == 0) {
      data.append(w.values[cursor.value++]);
    } else {
      fill_level(0);
    }
  }
  return export_bufferset(builder);
}

BufferSet run_dynamic(const Workload& w) {
  DynamicBuilder builder;
  Cursor cursor(w);
  std::function<LogicalValue(int)> make_level = [&](int level) {
    auto count = w.lengths[level][cursor.at[level]++];
    LogicalValue::List items;
    items.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      if (level + 1 == w.depth) {
        items.push_back(LogicalValue::integer(w.values[cursor.value++]));
      } else {
        items.push_back(make_level(level + 1));
      }
    }
    return LogicalValue::list(std::move(items));
  };
  for (std::size_t row = 0; row < w.rows; ++row) {
    LogicalValue y = w.depth == 0 ? LogicalValue::integer(w.values[cursor.value++]) : make_level(0);
    builder.append_value(LogicalValue::record({{"x", LogicalValue::real(w.x[row])}, {"y", std::move(y)}}));
  }
  return builder.snapshot();
}

std::string format_double(double value, int precision) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << value;
  return out.str();
}

}  // namespace

IngestSummary ingest(std::istream& input, const std::optional<FormNode>& schema, const fs::path& out_dir) {
  std::optional<LayoutBuilder> typed;
  std::optional<DynamicBuilder> dynamic;
  if (schema) {
    typed.emplace(*schema);
  } else {
    dynamic.emplace();
  }
  std::string line;
  std::size_t number = 0;
  while (std::getline(input, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string prefix = "line " + std::to_string(number) + ": ";
    Json value;
    try {
      value = Json::parse(line);
    } catch (const Json::exception& e) {
      throw Error(prefix + "invalid JSON (" + e.what() + ")");
    }
    try {
      if (typed) {
        check_nulls(typed->schema(), value, "$");
        fill_json(typed->root(), value, "$");
      } else {
        dynamic->append_value(from_json_value(value));
      }
    } catch (const Error& e) {
      throw Error(prefix + e.what());
    }
  }
  BufferSet set;
  if (typed) {
    if (auto problem = typed->check()) throw Error("input ended with an incomplete row: " + *problem);
    set = export_bufferset(*typed);
  } else {
    set = dynamic->snapshot();
  }
  write_bufferset(set, out_dir);
  return {set.length, set.form};
}

std::size_t decode_to(const fs::path& in_dir, std::ostream& out) {
  auto set = read_bufferset(in_dir);
  auto values = decode(set.form, set.views(), set.length);
  for (const auto& value : values) out << to_json(value) << '\n';
  return values.size();
}

std::vector<std::string> validate_dir(const fs::path& in_dir) {
  std::vector<std::string> problems;
  BufferSet set;
  try {
    set = read_bufferset(in_dir);
  } catch (const Error& e) {
    problems.push_back(e.what());
    return problems;
  }
  try {
    problems = check_meta(in_dir);
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  if (auto problem = validate_buffers(parse_form(set.form), set.views(), set.length)) {
    problems.push_back(*problem);
  }
  return problems;
}

Workload make_workload(std::size_t rows, int depth, std::uint64_t seed) {
  if (depth < 0) throw ConfigError("depth must be non-negative");
  Workload w;
  w.rows = rows;
  w.depth = depth;
  w.lengths.resize(depth);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> length(0, 4);
  std::uniform_int_distribution<std::int32_t> value(-1000, 1000);
  std::uniform_real_distribution<double> real(-1e3, 1e3);
  w.x.reserve(rows);
  std::function<void(int)> generate = [&](int level) {
    auto count = length(rng);
    w.lengths[level].push_back(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      if (level + 1 == depth) {
        w.values.push_back(value(rng));
      } else {
        generate(level + 1);
      }
    }
  };
  for (std::size_t row = 0; row < rows; ++row) {
    w.x.push_back(real(rng));
    if (depth == 0) {
      w.values.push_back(value(rng));
    } else {
      generate(0);
    }
  }
  return w;
}

BenchReport run_bench(const BenchConfig& config) {
  if (config.reps < 1) throw ConfigError("reps must be at least 1");
  BenchReport report;
  report.config = config;
  Workload w = make_workload(config.rows, config.depth, config.seed);
  std::vector<double> typed_times, dynamic_times;
  BufferSet typed_set, dynamic_set;
  for (int rep = 0; rep < config.reps; ++rep) {
    double t = seconds_of([&] { typed_set = run_typed(w); });
    typed_times.push_back(t);
    report.timings.push_back({"typed", rep, t});
    double d = seconds_of([&] { dynamic_set = run_dynamic(w); });
    dynamic_times.push_back(d);
    report.timings.push_back({"dynamic", rep, d});
  }
  report.outputs_agree = to_json(decode(typed_set.form, typed_set.views(), typed_set.length)) ==
                         to_json(decode(dynamic_set.form, dynamic_set.views(), dynamic_set.length));
  if (config.rows > 0) {
    double typed = median(typed_times), dynamic = median(dynamic_times);
    report.typed_rows_per_second = typed > 0 ? config.rows / typed : 0;
    report.dynamic_rows_per_second = dynamic > 0 ? config.rows / dynamic : 0;
    if (report.dynamic_rows_per_second > 0) {
      report.ratio = report.typed_rows_per_second / report.dynamic_rows_per_second;
    }
  }
  return report;
}

std::string format_report(const BenchReport& report) {
  std::ostringstream out;
  const auto& c = report.config;
  out << "workload: rows=" << c.rows << " depth=" << c.depth << " seed=" << c.seed << " reps=" << c.reps << '\n';
  auto rate = [&](double value) { return c.rows == 0 ? std::string("n/a") : format_double(value, 0) + " rows/s"; };
  out << "typed:   " << rate(report.typed_rows_per_second) << " (median)\n";
  out << "dynamic: " << rate(report.dynamic_rows_per_second) << " (median)\n";
  out << "ratio:   " << (report.ratio ? format_double(*report.ratio, 3) : std::string("n/a")) << '\n';
  out << "outputs agree: " << (report.outputs_agree ? "yes" : "no") << '\n';
  return out.str();
}

std::string format_csv(const BenchReport& report) {
  std::ostringstream out;
  const auto& c = report.config;
  out << "path,rep,rows,depth,seed,seconds,rows_per_second\n";
  for (const auto& t : report.timings) {
    out << t.path << ',' << t.rep << ',' << c.rows << ',' << c.depth << ',' << c.seed << ','
        << format_double(t.seconds, 6) << ','
        << (t.seconds > 0 && c.rows > 0 ? format_double(c.rows / t.seconds, 0) : std::string("n/a")) << '\n';
  }
  out << "ratio,,,,,," << (report.ratio ? format_double(*report.ratio, 4) : std::string("n/a")) << '\n';
  return out.str();
}

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Build, inspect and benchmark columnar buffer sets", "layoutkit"};
  app.require_subcommand(1);

  auto* ingest_cmd = app.add_subcommand("ingest", "Convert JSON lines into a buffer set directory");
  std::string schema_path, out_dir, input_path;
  ingest_cmd->add_option("--schema", schema_path, "Form JSON describing each line")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", out_dir, "Output directory")->required();
  ingest_cmd->add_option("input", input_path, "JSON-lines file (default: standard input)")->check(CLI::ExistingFile);

  auto* decode_cmd = app.add_subcommand("decode", "Print a buffer set as JSON lines");
  std::string decode_dir;
  decode_cmd->add_option("dir", decode_dir, "Buffer set directory")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Check a buffer set without decoding it");
  std::string validate_dir_path;
  validate_cmd->add_option("dir", validate_dir_path, "Buffer set directory")->required();

  auto* bench_cmd = app.add_subcommand("bench", "Compare typed and dynamic builder throughput");
  BenchConfig bench;
  std::string csv_path;
  bench_cmd->add_option("--rows", bench.rows, "Rows per repetition")->capture_default_str();
  bench_cmd->add_option("--depth", bench.depth, "List nesting depth of field y")
      ->check(CLI::Range(0, 16))
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Workload seed")->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps, "Repetitions")->check(CLI::Range(1, 1000))->capture_default_str();
  bench_cmd->add_option("--csv", csv_path, "Also write timings as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "layoutkit: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*ingest_cmd) {
      std::optional<FormNode> schema;
      if (!schema_path.empty()) {
        std::ifstream file(schema_path);
        std::stringstream text;
        text << file.rdbuf();
        schema = parse_form(text.str());
      }
      IngestSummary summary;
      if (input_path.empty()) {
        summary = ingest(in, schema, out_dir);
      } else {
        std::ifstream file(input_path);
        summary = ingest(file, schema, out_dir);
      }
      err << "wrote " << summary.rows << " rows to " << out_dir << '\n';
    } else if (*decode_cmd) {
      decode_to(decode_dir, out);
    } else if (*validate_cmd) {
      auto problems = validate_dir(validate_dir_path);
      if (!problems.empty()) {
        for (const auto& problem : problems) err << problem << '\n';
        return kDataError;
      }
      out << "ok\n";
    } else if (*bench_cmd) {
      auto report = run_bench(bench);
      out << format_report(report);
      if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        csv << format_csv(report);
        if (!csv) throw Error("cannot write " + csv_path);
      }
      if (!report.outputs_agree) return kDataError;
    }
  } catch (const ConfigError& e) {
    err << "layoutkit: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "layoutkit: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace layoutkit::cli
