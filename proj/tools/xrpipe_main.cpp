// xrpipe command line: validate deployment configs, run pipelines by role,
// and run the latency benchmarks. Uses only the public C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "xrpipe/xrpipe.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

int emit_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) {
    std::cerr << "IO_ERROR: cannot write '" << out_path << "'\n";
    return kExitValidation;
  }
  out << text;
  return kExitOk;
}

int report_failure(xrp_status status) {
  std::cerr << xrp_status_name(status) << ": " << xrp_last_error() << '\n';
  return kExitValidation;
}

/// Prints one machine-greppable "CODE: message" line per violation.
/// Returns true when the config is runnable.
bool load_and_validate(const std::string& path, xrp_config** cfg_out) {
  xrp_config* cfg = nullptr;
  const xrp_status parse_rc = xrp_config_parse_file(path.c_str(), &cfg);
  if (parse_rc != XRP_OK) {
    std::cout << xrp_status_name(parse_rc) << ": " << xrp_last_error() << '\n';
    return false;
  }
  xrp_issues* issues = nullptr;
  const xrp_status rc = xrp_config_validate(cfg, &issues);
  if (rc != XRP_OK) {
    for (size_t i = 0; i < xrp_issues_count(issues); ++i)
      std::cout << xrp_issue_code(issues, i) << ": "
                << xrp_issue_message(issues, i) << '\n';
    xrp_issues_free(issues);
    xrp_config_free(cfg);
    return false;
  }
  if (cfg_out)
    *cfg_out = cfg;
  else
    xrp_config_free(cfg);
  return true;
}

int cmd_validate(const std::string& path) {
  if (!load_and_validate(path, nullptr)) return kExitValidation;
  std::cout << "OK\n";
  return kExitOk;
}

int cmd_run(const std::string& path, const std::string& role_name,
            double duration_s, long long frames, const std::string& out_path) {
  xrp_role role = XRP_ROLE_ALL;
  if (role_name == "client")
    role = XRP_ROLE_CLIENT;
  else if (role_name == "server")
    role = XRP_ROLE_SERVER;
  else if (role_name != "all") {
    std::cerr << "unknown role '" << role_name << "'\n";
    return kExitUsage;
  }

  xrp_config* cfg = nullptr;
  if (!load_and_validate(path, &cfg)) return kExitValidation;

  xrp_pipeline* pipe = nullptr;
  xrp_status rc = xrp_pipeline_create(cfg, role, &pipe);
  xrp_config_free(cfg);
  if (rc != XRP_OK) return report_failure(rc);

  xrp_run_options opts{};
  opts.duration_s = duration_s;
  opts.frame_budget = frames;
  xrp_report* report = nullptr;
  rc = xrp_pipeline_run(pipe, &opts, &report);
  xrp_pipeline_free(pipe);
  if (rc != XRP_OK) return report_failure(rc);

  char* text = nullptr;
  xrp_report_render(report, &text);
  const int exit_code =
      xrp_report_ok(report) ? emit_output(text, out_path) : kExitValidation;
  if (!xrp_report_ok(report)) std::cout << text;
  xrp_string_free(text);
  xrp_report_free(report);
  return exit_code;
}

int render_and_emit(xrp_bench_table* table, const std::string& format,
                    const std::string& out_path) {
  const xrp_table_format fmt =
      format == "csv" ? XRP_FORMAT_CSV : XRP_FORMAT_MARKDOWN;
  char* text = nullptr;
  const xrp_status rc = xrp_bench_table_render(table, fmt, &text);
  xrp_bench_table_free(table);
  if (rc != XRP_OK) return report_failure(rc);
  const int exit_code = emit_output(text, out_path);
  xrp_string_free(text);
  return exit_code;
}

int cmd_bench_local(const std::string& resolutions, std::uint64_t frames,
                    const std::string& kind, const std::string& format,
                    const std::string& out_path) {
  const xrp_channel_kind k =
      kind == "copy" ? XRP_CHANNEL_COPY : XRP_CHANNEL_ZEROCOPY;
  xrp_bench_table* table = nullptr;
  const xrp_status rc =
      xrp_bench_local(resolutions.c_str(), frames, k, &table);
  if (rc != XRP_OK) return report_failure(rc);
  return render_and_emit(table, format, out_path);
}

int cmd_bench_remote(const std::string& resolutions, std::uint64_t frames,
                     const std::string& codec, const std::string& addr,
                     const std::string& format, const std::string& out_path) {
  const xrp_codec c = codec == "rle" ? XRP_CODEC_RLE : XRP_CODEC_RAW;
  xrp_bench_table* table = nullptr;
  const xrp_status rc =
      xrp_bench_remote(resolutions.c_str(), frames, c, addr.c_str(), &table);
  if (rc != XRP_OK) return report_failure(rc);
  return render_and_emit(table, format, out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xrpipe: deployable stream-processing pipelines"};
  app.require_subcommand(1);

  std::string config_path, role = "all", out_path;
  std::string resolutions = "720p,1080p,1440p,2160p";
  std::string kind = "zerocopy", codec = "raw", format = "markdown";
  std::string addr = "127.0.0.1:7010";
  double duration_s = -1;
  long long frames = 0;
  std::uint64_t bench_frames = 1000;

  auto* validate = app.add_subcommand("validate", "check a config file");
  validate->add_option("config", config_path, "config file")->required();

  auto* run = app.add_subcommand("run", "run a pipeline by role");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--role", role, "client|server|all")
      ->check(CLI::IsMember({"client", "server", "all"}));
  run->add_option("--duration", duration_s, "wall-clock cap in seconds");
  run->add_option("--frames", frames, "override every source's frame budget");
  run->add_option("--out", out_path, "write the run report here");

  auto* bl = app.add_subcommand("bench-local", "local channel latency table");
  bl->add_option("--resolutions", resolutions, "comma-separated list");
  bl->add_option("--frames", bench_frames, "measured transmissions per cell");
  bl->add_option("--kind", kind, "zerocopy|copy")
      ->check(CLI::IsMember({"zerocopy", "copy"}));
  bl->add_option("--format", format, "csv|markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));
  bl->add_option("--out", out_path, "write the table here");

  auto* br = app.add_subcommand("bench-remote", "loopback link latency table");
  br->add_option("--resolutions", resolutions, "comma-separated list");
  br->add_option("--frames", bench_frames, "measured transmissions per cell");
  br->add_option("--codec", codec, "raw|rle")
      ->check(CLI::IsMember({"raw", "rle"}));
  br->add_option("--addr", addr, "loopback host:port (port 0 = ephemeral)");
  br->add_option("--format", format, "csv|markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));
  br->add_option("--out", out_path, "write the table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse problem
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (validate->parsed()) return cmd_validate(config_path);
  if (run->parsed())
    return cmd_run(config_path, role, duration_s, frames, out_path);
  if (bl->parsed())
    return cmd_bench_local(resolutions, bench_frames, kind, format, out_path);
  if (br->parsed())
    return cmd_bench_remote(resolutions, bench_frames, codec, addr, format,
                            out_path);
  return kExitUsage;
}
