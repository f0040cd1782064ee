// Command-line front end. Talks to the library exclusively through the
// C interface; each subcommand names the experiment the config must declare.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "bigjump/bigjump.h"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_path;
  std::string format;
  unsigned long long seed = 0;
  bool has_seed = false;
};

// Pull the declared experiment out of the raw config text so a mismatched
// subcommand fails fast; full validation happens inside the library.
std::string peek_experiment(const std::string& text) {
  const std::string key = "\"experiment\"";
  auto pos = text.find(key);
  if (pos == std::string::npos) return "";
  pos = text.find(':', pos + key.size());
  if (pos == std::string::npos) return "";
  pos = text.find('"', pos + 1);
  if (pos == std::string::npos) return "";
  auto end = text.find('"', pos + 1);
  if (end == std::string::npos) return "";
  return text.substr(pos + 1, end - pos - 1);
}

int run_one(const std::string& experiment, const CliArgs& args) {
  std::ifstream in(args.config_path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "error: cannot read config %s\n",
                 args.config_path.c_str());
    return 1;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  const std::string declared = peek_experiment(text);
  if (!declared.empty() && declared != experiment) {
    std::fprintf(stderr,
                 "error: config declares experiment \"%s\" but subcommand "
                 "expects \"%s\"\n",
                 declared.c_str(), experiment.c_str());
    return 2;
  }

  char* report = nullptr;
  const char* fmt = args.format.empty() ? nullptr : args.format.c_str();
  const char* out = args.out_path.empty() ? nullptr : args.out_path.c_str();
  const unsigned long long* seed = args.has_seed ? &args.seed : nullptr;
  int rc = bj_run_experiment(text.c_str(), fmt, out, seed, &report);

  if (rc == BJ_OK || rc == BJ_EDOMAIN) {
    if (args.out_path.empty() && report != nullptr &&
        std::string(text).find("\"output_path\"") == std::string::npos) {
      std::fputs(report, stdout);
    } else if (!args.out_path.empty()) {
      std::fprintf(stderr, "wrote %s\n", args.out_path.c_str());
    }
  }
  bj_string_free(report);

  switch (rc) {
    case BJ_OK: return 0;
    case BJ_EINVAL:
      std::fprintf(stderr, "schema error: %s\n", bj_last_error());
      return 2;
    case BJ_EDOMAIN:
      std::fprintf(stderr, "regime failure: %s\n", bj_last_error());
      return 3;
    default:
      std::fprintf(stderr, "error: %s\n", bj_last_error());
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for heavy-tailed integer sums"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bj_version()));

  // subcommand name -> experiment id in the config schema
  const std::pair<const char*, const char*> kCommands[] = {
      {"ratio", "ratio"},         {"tail-ratio", "tail_ratio"},
      {"tv2", "tv2"},             {"tv3", "tv3"},
      {"fn-bound", "fn_bound"},   {"poisson", "poisson"},
      {"scales", "scales"},       {"sample", "sample"},
  };

  CliArgs args;
  std::string chosen;
  for (const auto& [name, experiment] : kCommands) {
    auto* sub = app.add_subcommand(
        name, std::string("run a ") + experiment + " experiment config");
    sub->add_option("--config", args.config_path, "experiment config (JSON)")
        ->required();
    sub->add_option("--seed", args.seed, "override the config seed");
    sub->add_option("--out", args.out_path, "override the output path");
    sub->add_option("--format", args.format, "override the output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->callback([&chosen, experiment = std::string(experiment), sub, &args] {
      chosen = experiment;
      args.has_seed = sub->count("--seed") > 0;
    });
  }

  CLI11_PARSE(app, argc, argv);
  return run_one(chosen, args);
}
