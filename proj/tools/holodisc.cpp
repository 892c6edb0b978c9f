// holodisc command-line front end. Each subcommand takes its fields as
// --flags; --config reads a key = value file that flags override.

#include "holodisc/error.hpp"
#include "holodisc/io.hpp"
#include "holodisc/run.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

namespace {

struct Sub {
  CLI::App* app = nullptr;
  std::string config_path;
  bool echo = false;
  std::map<std::string, std::string> flags;
};

const std::map<std::string, std::string> kAbout{
    {"solve-disc", "solve for one disc from a seed"},
    {"family", "flat wedge family at given parameters"},
    {"foliation", "edge, sheet and coverage checks over a parameter grid"},
    {"holder", "Hoelder constant of a restricted test function"},
    {"lindelof", "compare limits along two curves ending at the edge"},
    {"fatou", "nontangential limits at random edge points"},
    {"montel", "rescaled family and its limit in a cone"},
    {"cg", "Cauchy-Green transform of grid data"},
    {"schwarz", "Schwarz integral of boundary data"},
    {"acceptance", "run the acceptance criteria"},
};

int usage(const std::string& what) {
  std::cerr << "holodisc: " << what << "\n";
  return 2;
}

} // namespace

int main(int argc, char** argv) {
  using namespace holodisc;
  CLI::App app{"Pseudoholomorphic discs, wedge families and boundary limits"};
  app.require_subcommand(1);
  std::map<std::string, Sub> subs;
  for (const std::string& name : commands()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, kAbout.count(name) ? kAbout.at(name) : "");
    s.app->add_option("--config", s.config_path, "key = value file; flags override it");
    s.app->add_flag("--echo", s.echo, "print the validated configuration and exit");
    for (const FieldSpec& f : fields(name)) {
      std::string help = f.help;
      if (!f.fallback.empty()) help += " [" + f.fallback + "]";
      s.app->add_option("--" + f.name, s.flags[f.name], help);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      RunConfig c;
      if (!s.config_path.empty()) {
        c = RunConfig::parse(io::read_file(s.config_path));
        if (!c.command.empty() && c.command != name)
          throw Error(ErrorCode::ConfigError, "field 'command': file names '" + c.command + "', not '" + name + "'");
      }
      c.command = name;
      for (const auto& [key, value] : s.flags)
        if (s.app->count("--" + key) > 0) c.values[key] = value;
      if (s.echo) {
        std::cout << c.validated().echo();
        return 0;
      }
      const RunReport rep = run(c);
      for (const auto& [check, ok] : rep.checks) {
        const auto t = rep.timings.find(check);
        std::cout << check << (ok ? " PASS" : " FAIL");
        if (t != rep.timings.end()) std::printf(" (%.1f s)", t->second), std::fflush(stdout);
        std::cout << "\n";
      }
      if (rep.results.contains("error")) std::cerr << rep.results["error"].get<std::string>() << "\n";
      if (c.validated().integer("verbose") > 0) std::cout << rep.to_json(true).dump(2) << "\n";
      std::cout << name << (rep.passed() ? " PASS" : " FAIL") << "\n";
      return exit_code(rep);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::InputParseError ||
        e.code() == ErrorCode::InvalidArgument)
      return usage(e.what());
    std::cerr << "holodisc: " << e.what() << "\n";
    return 1;
  }
  return usage("no subcommand");
}
