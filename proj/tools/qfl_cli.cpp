// qfl: command-line front end over the C API.
//
//   qfl <command> [--config path] [--seed u64] [--out dir] [--shots n|exact]
//
// Exit codes: 0 pass, 1 verification or training failure, 2 usage/config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "qfl/qfl_c.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "qfl_out";
  std::string shots;
};

int exit_for(qfl_status s) {
  switch (s) {
    case QFL_ERR_CONFIG:
    case QFL_ERR_INPUT:
    case QFL_ERR_IO:
    case QFL_ERR_NULL_ARGUMENT:
      return kExitUsage;
    default:
      return kExitFail;
  }
}

int report(const char* step, qfl_status s) {
  std::cerr << "qfl: " << step << " failed (" << qfl_status_name(s) << "): " << qfl_last_error()
            << "\n";
  return exit_for(s);
}

bool write_file(const std::filesystem::path& path, const char* data, std::size_t len) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) return false;
  f.write(data, static_cast<std::streamsize>(len));
  return static_cast<bool>(f);
}

int run(const std::string& command, const Options& opt) {
  std::string config = "{}";
  if (!opt.config_path.empty()) {
    std::ifstream f(opt.config_path, std::ios::binary);
    if (!f) {
      std::cerr << "qfl: cannot read config '" << opt.config_path << "'\n";
      return kExitUsage;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    config = ss.str();
  }

  std::optional<std::uint64_t> shots;
  bool exact = false;
  if (!opt.shots.empty()) {
    if (opt.shots == "exact") {
      exact = true;
    } else {
      try {
        std::size_t pos = 0;
        const unsigned long long n = std::stoull(opt.shots, &pos);
        if (pos != opt.shots.size() || n == 0 || opt.shots[0] == '-') throw std::invalid_argument("");
        shots = n;
      } catch (const std::exception&) {
        std::cerr << "qfl: --shots expects a positive integer or 'exact'\n";
        return kExitUsage;
      }
    }
  }

  qfl_experiment* exp = nullptr;
  qfl_status s = qfl_experiment_create(command.c_str(), config.c_str(), &exp);
  if (s != QFL_OK) return report("config", s);
  struct Guard {
    qfl_experiment* e;
    ~Guard() { qfl_experiment_destroy(e); }
  } guard{exp};

  if (opt.seed && (s = qfl_experiment_set_seed(exp, *opt.seed)) != QFL_OK) return report("seed", s);
  if (shots && (s = qfl_experiment_set_shots(exp, *shots)) != QFL_OK) return report("shots", s);
  if (exact && (s = qfl_experiment_set_shots(exp, 0)) != QFL_OK) return report("shots", s);

  std::error_code ec;
  const std::filesystem::path out(opt.out_dir);
  std::filesystem::create_directories(out, ec);
  if (ec) {
    std::cerr << "qfl: cannot create output directory '" << opt.out_dir << "': " << ec.message()
              << "\n";
    return kExitUsage;
  }

  s = qfl_experiment_run(exp);
  if (s != QFL_OK) {
    // The echo is still written so a failed run can be reproduced.
    const char* echo = nullptr;
    if (qfl_experiment_config_echo(exp, &echo) == QFL_OK)
      write_file(out / "config_echo.json", echo, std::char_traits<char>::length(echo));
    return report("run", s);
  }

  for (std::size_t i = 0; i < qfl_experiment_artifact_count(exp); ++i) {
    std::size_t len = 0;
    const char* data = qfl_experiment_artifact_data(exp, i, &len);
    const char* name = qfl_experiment_artifact_name(exp, i);
    if (!write_file(out / name, data, len)) {
      std::cerr << "qfl: cannot write " << (out / name).string() << "\n";
      return kExitFail;
    }
  }
  const bool passed = qfl_experiment_passed(exp) == 1;
  std::cout << command << ": " << (passed ? "PASS" : "FAIL") << " (" << opt.out_dir << ")\n";
  return passed ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum fusion layer simulator and verification suite"};
  app.require_subcommand(1, 1);
  Options opt;

  const char* commands[][2] = {
      {"verify-expressivity", "Extract realized polynomials and check degree, unitarity, det"},
      {"torus-scan", "Sample one matrix entry over the (θ1, θ2) torus for each depth"},
      {"separation", "Zero-error discrimination, query count, block encoding, CP gap"},
      {"sample-bound", "Check the shot-count bound of the measurement estimator"},
      {"train-synthetic", "Train QFL and a CP baseline on a planted polynomial task"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", opt.config_path, "JSON config (a config echo also works)");
    sub->add_option("--seed", opt.seed, "Global 64-bit seed");
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--shots", opt.shots, "Shot count per observable, or 'exact'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return run(app.get_subcommands().front()->get_name(), opt);
}
