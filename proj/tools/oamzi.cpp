// oamzi: parameter sweeps over the OAM-enhanced lossy Mach-Zehnder model.
//
//   oamzi run <config.json> [--jobs N] [--allow-heavy] [--output PATH] [--format csv|json]
//   oamzi validate <config.json> [--allow-heavy]
//   oamzi figures <id> [--jobs N] [--output PATH] [--format csv|json]
//   oamzi figures --list
//
// Exit codes: 0 success, 1 configuration error, 2 numeric failure, 3 I/O failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "oamzi/sweep/figures.hpp"
#include "oamzi/sweep/run.hpp"

namespace {

using namespace oamzi;
using namespace oamzi::sweep;

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::ConfigError:
      return 1;
    case ErrorKind::IoError:
      return 3;
    default:
      return 2;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string with_extension(std::string path, OutputFormat f) {
  const std::string ext = f == OutputFormat::Csv ? ".csv" : ".json";
  if (std::filesystem::path(path).extension().empty()) path += ext;
  return path;
}

/// "out/fig5.csv" + "fwhm" -> "out/fig5_fwhm.csv".
std::string with_suffix(const std::string& path, const std::string& suffix) {
  if (suffix.empty()) return path;
  std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + suffix + p.extension().string())).string();
}

struct Overrides {
  unsigned jobs = 0;
  bool allow_heavy = false;
  std::string output;
  std::string format;
};

int execute(SweepSpec spec, const Overrides& ov, const std::string& default_path) {
  if (!ov.format.empty()) spec.format = ov.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  std::string path = !ov.output.empty() ? ov.output : !spec.output_path.empty() ? spec.output_path : default_path;
  path = with_extension(path, spec.format);

  RunOptions ro;
  ro.jobs = ov.jobs;
  ro.allow_heavy = ov.allow_heavy;
  const ResultTable table = run_sweep(spec, ro);
  const std::string meta = emit(table, path, spec.format);
  const std::size_t errors = table.error_count();
  std::cerr << table.experiment << ": " << table.rows.size() << " rows, " << errors << " with errors -> " << path
            << " (+ " << meta << ")\n";
  return !table.rows.empty() && errors == table.rows.size() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OAM-enhanced Mach-Zehnder phase-estimation sweeps"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config_path, figure_id;
  bool list = false;

  auto* run = app.add_subcommand("run", "run a sweep configuration");
  run->add_option("config", config_path, "JSON configuration file")->required();
  run->add_option("--jobs", ov.jobs, "worker threads (default: hardware concurrency)");
  run->add_flag("--allow-heavy", ov.allow_heavy, "permit lossy sweeps beyond N = 12 or cutoff 64");
  run->add_option("--output", ov.output, "output path (overrides output.path)");
  run->add_option("--format", ov.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* validate = app.add_subcommand("validate", "check a configuration without running it");
  validate->add_option("config", config_path, "JSON configuration file")->required();
  validate->add_flag("--allow-heavy", ov.allow_heavy, "permit lossy sweeps beyond N = 12 or cutoff 64");

  auto* figs = app.add_subcommand("figures", "run a canned figure configuration");
  figs->add_option("id", figure_id, "figure id (fig2 ... fig17, figA1)");
  figs->add_flag("--list", list, "list the available figures");
  figs->add_option("--jobs", ov.jobs, "worker threads (default: hardware concurrency)");
  figs->add_option("--output", ov.output, "output path; multi-panel figures append _<panel>");
  figs->add_option("--format", ov.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run) {
      const SweepSpec spec = parse_config(read_file(config_path));
      return execute(spec, ov, std::filesystem::path(config_path).stem().string());
    }
    if (*validate) {
      const SweepSpec spec = parse_config(read_file(config_path));
      check_guardrails(spec, ov.allow_heavy);
      std::cout << "ok: " << to_string(spec.experiment) << " with " << spec.states.size() << " state(s)\n";
      return 0;
    }
    if (*figs) {
      if (list || figure_id.empty()) {
        for (const auto& f : figures()) std::cout << f.id << "\t" << f.description << "\n";
        return list ? 0 : 1;
      }
      const Figure& fig = figure(figure_id);
      ov.allow_heavy = true;
      int rc = 0;
      for (const auto& part : fig.parts) {
        const SweepSpec spec = parse_config(part.config);
        Overrides o = ov;
        const OutputFormat fmt = ov.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
        o.output = with_suffix(with_extension(ov.output.empty() ? fig.id : ov.output, fmt), part.suffix);
        rc = std::max(rc, execute(spec, o, fig.id));
      }
      return rc;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
