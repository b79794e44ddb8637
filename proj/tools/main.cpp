#include "qoptics5/core.hpp"
#include "qoptics5/scenarios.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Globals {
  std::string config;
  std::string out = "qoptics5_out";
  std::optional<long> seed;
  std::optional<int> threads;
  std::vector<std::string> overrides;  // section.key=value
};

int run(const std::string& scenario, const Globals& g, const std::optional<std::string>& ensemble) {
  auto cfg = qoptics5::make_config();
  if (!g.config.empty()) cfg.parse_file(g.config);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw qoptics5::ConfigError(kv, "override must look like section.key=value");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) cfg.set("run.seed", std::to_string(*g.seed));
  if (g.threads) cfg.set("run.threads", std::to_string(*g.threads));
  if (ensemble) cfg.set("kernel.ensemble", *ensemble);
  cfg.set("run.scenario", scenario);
  const auto out = qoptics5::run_scenario(scenario, cfg);
  qoptics5::write_outputs(g.out, cfg, out);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& [name, body] : out.files)
    std::cout << g.out << '/' << name << ' ' << qoptics5::hex64(qoptics5::fnv1a64(body)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qoptics5: 5D optics scenarios"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "INI configuration file");
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option_function<long>("--seed", [&](const long& s) { g.seed = s; }, "random seed");
  app.add_option_function<int>("--threads", [&](const int& t) { g.threads = t; }, "worker threads")
      ->check(CLI::PositiveNumber);
  app.add_option("--set", g.overrides, "override a config key: section.key=value");
  app.set_version_flag("--version", qoptics5::version());

  std::optional<std::string> ensemble;
  std::string chosen;
  for (const auto& name : qoptics5::scenario_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " scenario");
    sub->callback([&chosen, name] { chosen = name; });
    if (name == "kernel")
      sub->add_option_function<std::string>("--ensemble", [&](const std::string& e) { ensemble = e; },
                                             "qm, sm or micro")
          ->check(CLI::IsMember({"qm", "sm", "micro"}));
  }
  std::string manifest;
  auto* rerun = app.add_subcommand("rerun", "re-run a scenario from its manifest and compare hashes");
  rerun->add_option("--manifest", manifest, "manifest.ini written by an earlier run")->required();
  rerun->callback([&chosen] { chosen = "rerun"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (chosen == "rerun") {
      const auto rep = qoptics5::rerun_from_manifest(manifest, g.out);
      for (const auto& n : rep.mismatched) std::cerr << "hash mismatch: " << n << '\n';
      for (const auto& n : rep.missing) std::cerr << "missing output: " << n << '\n';
      std::cout << (rep.ok() ? "reproduced " : "NOT reproduced ") << rep.scenario << '\n';
      return rep.ok() ? 0 : 2;
    }
    return run(chosen, g, ensemble);
  } catch (const qoptics5::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const qoptics5::Error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  }
}
