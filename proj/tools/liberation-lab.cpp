// Copyright 2026 The liberation-lab Authors - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "liblab.h"

using json = nlohmann::json;

namespace {

enum class Kind { Int, Num, Time, Str, IntList, StrList, Flag };

struct FlagSpec {
  std::string flag;  // without leading dashes
  std::string key;   // configuration key
  Kind kind;
  std::string help;
};

const std::map<std::string, std::pair<std::string, std::vector<FlagSpec>>> &commands() {
  static const std::map<std::string, std::pair<std::string, std::vector<FlagSpec>>> c = {
      {"ubm-moments",
       {"Finite-N unitary Brownian motion moments against the large-N oracle",
        {{"N", "N", Kind::Int, "matrix size"},
         {"paths", "paths", Kind::Int, "number of simulated paths"},
         {"T", "T", Kind::Time, "final time"},
         {"h", "h", Kind::Time, "step size (T must be a multiple)"},
         {"n-max", "n_max", Kind::Int, "largest moment order"},
         {"record-every", "record_every", Kind::Int, "record every k-th step"},
         {"cross", "cross", Kind::Flag, "also report E tr(U1* U2) against e^{-t}"},
         {"seed", "seed", Kind::Int, "base seed"}}}},
      {"liberation-convergence",
       {"Metric between empirical liberation trajectories and the exact liberation state",
        {{"N", "N", Kind::IntList, "comma-separated matrix sizes"},
         {"replicates", "replicates", Kind::Int, "trajectories per size"},
         {"n", "n", Kind::Int, "number of motions"},
         {"grid", "grid", Kind::StrList, "comma-separated time grid"},
         {"m-max", "m_max", Kind::Int, "metric time truncation"},
         {"l-max", "l_max", Kind::Int, "metric word-length truncation"},
         {"h", "h", Kind::Time, "step size"},
         {"bootstrap", "bootstrap", Kind::Int, "bootstrap resamples"},
         {"seed", "seed", Kind::Int, "base seed"}}}},
      {"chi-orb",
       {"Monte-Carlo hit fraction of Haar-rotated tuples in a moment neighbourhood",
        {{"N", "N", Kind::IntList, "comma-separated matrix sizes"},
         {"samples", "samples", Kind::Int, "Haar samples per size"},
         {"m", "m", Kind::Int, "neighbourhood word length / index cap"},
         {"delta", "delta", Kind::Num, "neighbourhood radius"},
         {"n", "n", Kind::Int, "number of rotated algebras"},
         {"target", "target", Kind::Str, "free | initial"},
         {"seed", "seed", Kind::Int, "base seed"}}}},
      {"heat-kernel",
       {"Free energy of the unitary heat kernel with its two-sided bounds",
        {{"t-min", "t_min", Kind::Num, "smallest T"},
         {"t-max", "t_max", Kind::Num, "largest T"},
         {"points", "points", Kind::Int, "number of T values"},
         {"eps", "eps", Kind::Num, "bound parameter in (0,1)"},
         {"spacing", "spacing", Kind::Str, "linear | log"}}}},
      {"condexp-check",
       {"Pairing identity of the conditional expectation on word sets",
        {{"n", "n", Kind::Int, "number of motions"},
         {"sigma0", "sigma0", Kind::Str, "free | correlated"},
         {"words-file", "words_file", Kind::Str, "polynomials, one per line"},
         {"pairing-file", "pairing_file", Kind::Str, "pairing polynomials, one per line"},
         {"k", "k", Kind::IntList, "comma-separated motion indices"},
         {"s", "s", Kind::StrList, "comma-separated times"}}}},
      {"rate-minimizer",
       {"Rate functional over the test polynomial set",
        {{"n", "n", Kind::Int, "number of motions"},
         {"sigma0", "sigma0", Kind::Str, "free | correlated"},
         {"state", "state", Kind::Str, "lib | free-constant | constant"},
         {"words-file", "words_file", Kind::Str, "polynomials, one per line"},
         {"times", "times", Kind::StrList, "comma-separated times"},
         {"tol", "tol", Kind::Num, "quadrature tolerance"}}}},
      {"rate",
       {"Rate functional for one polynomial",
        {{"n", "n", Kind::Int, "number of motions"},
         {"sigma0", "sigma0", Kind::Str, "free | correlated"},
         {"state", "state", Kind::Str, "lib | free-constant | constant"},
         {"P", "P", Kind::Str, "polynomial, e.g. X[1,1;1]X[2,1;1]"},
         {"t", "t", Kind::Time, "time"},
         {"tol", "tol", Kind::Num, "quadrature tolerance"}}}},
      {"decay-bounds",
       {"Decay bound for alternating centered words under liberation",
        {{"n", "n", Kind::Int, "number of motions"},
         {"sigma0", "sigma0", Kind::Str, "free | correlated"},
         {"T", "T", Kind::StrList, "comma-separated times"}}}},
      {"metric",
       {"Truncated trajectory metric between two distributions",
        {{"compare", "compare", Kind::Str, "empirical-vs-lib | free-vs-lib | lib-vs-lib"},
         {"N", "N", Kind::Int, "matrix size"},
         {"n", "n", Kind::Int, "number of motions"},
         {"grid", "grid", Kind::StrList, "comma-separated time grid"},
         {"m-max", "m_max", Kind::Int, "metric time truncation"},
         {"l-max", "l_max", Kind::Int, "metric word-length truncation"},
         {"h", "h", Kind::Time, "step size"},
         {"seed", "seed", Kind::Int, "base seed"}}}},
  };
  return c;
}

struct Failure {
  int status;  // liblab_status value
  std::string code;
  std::string message;
};

[[noreturn]] void config_failure(const std::string &msg) {
  throw Failure{LIBLAB_E_CONFIG, "ConfigError", msg};
}

long long to_int(const std::string &flag, const std::string &s) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception &) {
  }
  config_failure("--" + flag + " expects an integer, got '" + s + "'");
}

double to_num(const std::string &flag, const std::string &s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception &) {
  }
  config_failure("--" + flag + " expects a number, got '" + s + "'");
}

std::vector<std::string> split(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

json flag_value(const FlagSpec &f, const std::string &raw) {
  switch (f.kind) {
    case Kind::Int:
      return to_int(f.flag, raw);
    case Kind::Num:
      return to_num(f.flag, raw);
    case Kind::Time:
    case Kind::Str:
      return raw;
    case Kind::IntList: {
      json a = json::array();
      for (const auto &s : split(raw)) a.push_back(to_int(f.flag, s));
      return a;
    }
    case Kind::StrList: {
      json a = json::array();
      for (const auto &s : split(raw)) a.push_back(s);
      return a;
    }
    case Kind::Flag:
      return true;
  }
  return nullptr;
}

// The configuration file is a JSON object. Keys at the top level apply to
// every experiment; an object stored under an experiment's name holds
// settings for that experiment only and wins over the top level.
json load_config(const std::string &path, const std::string &command) {
  std::ifstream in(path);
  if (!in) throw Failure{LIBLAB_E_IO, "IoError", "cannot open configuration '" + path + "'"};
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::exception &e) {
    config_failure("configuration '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) config_failure("configuration must be a JSON object");
  json cfg = json::object();
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (it.key() == "experiment" || commands().count(it.key())) continue;
    cfg[it.key()] = it.value();
  }
  if (doc.contains("experiment") && doc["experiment"] != command)
    config_failure("configuration is for experiment '" + doc["experiment"].get<std::string>() +
                   "', not '" + command + "'");
  if (doc.contains(command)) {
    if (!doc[command].is_object()) config_failure("section '" + command + "' must be an object");
    for (auto it = doc[command].begin(); it != doc[command].end(); ++it) cfg[it.key()] = it.value();
  }
  return cfg;
}

void print_failure(const Failure &f) {
  json err = {{"error", {{"code", f.code}, {"status", f.status}, {"message", f.message}}}};
  std::cerr << err.dump() << std::endl;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"liberation-lab: free liberation processes, their matrix models and rate functionals"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", liblab_version());
  app.require_subcommand(1);

  struct Parsed {
    std::string config_path, output_path;
    std::vector<std::string> sets;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
  };
  std::map<std::string, Parsed> parsed;
  std::map<std::string, CLI::App *> subs;
  for (const auto &[name, spec] : commands()) {
    CLI::App *sub = app.add_subcommand(name, spec.first);
    Parsed &p = parsed[name];
    sub->add_option("--config", p.config_path, "JSON configuration file");
    sub->add_option("-o,--output", p.output_path, "write the CSV here instead of stdout");
    sub->add_option("--set", p.sets, "override any configuration key: key=value (value in JSON)");
    for (const FlagSpec &f : spec.second) {
      if (f.kind == Kind::Flag) sub->add_flag("--" + f.flag, p.flags[f.key], f.help);
      else sub->add_option("--" + f.flag, p.values[f.key], f.help);
    }
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    print_failure({LIBLAB_E_CONFIG, "ConfigError", e.what()});
    return liblab_exit_code(LIBLAB_E_CONFIG);
  }

  std::string command;
  for (const auto &[name, sub] : subs)
    if (sub->parsed()) command = name;
  const Parsed &p = parsed[command];

  try {
    json cfg = p.config_path.empty() ? json::object() : load_config(p.config_path, command);
    std::string output = p.output_path;
    if (cfg.contains("output")) {
      if (output.empty() && cfg["output"].is_string()) output = cfg["output"];
      cfg.erase("output");
    }
    // Flags win over the file.
    for (const FlagSpec &f : commands().at(command).second) {
      CLI::App *sub = subs[command];
      if (sub->count("--" + f.flag) == 0) continue;
      cfg[f.key] = f.kind == Kind::Flag ? json(true) : flag_value(f, p.values.at(f.key));
    }
    for (const std::string &s : p.sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) config_failure("--set expects key=value, got '" + s + "'");
      std::string key = s.substr(0, eq), val = s.substr(eq + 1);
      json v = json::parse(val, nullptr, false);
      cfg[key] = v.is_discarded() ? json(val) : v;
    }

    char *csv = nullptr;
    liblab_status st = liblab_run_experiment(command.c_str(), cfg.dump().c_str(), &csv);
    if (st != LIBLAB_OK) throw Failure{st, liblab_status_name(st), liblab_last_error()};
    std::string text(csv);
    liblab_string_free(csv);

    if (output.empty()) {
      std::cout << text;
      std::cout.flush();
      if (!std::cout) throw Failure{LIBLAB_E_IO, "IoError", "failed to write to stdout"};
    } else {
      std::ofstream out(output, std::ios::binary);
      out << text;
      out.close();
      if (!out) throw Failure{LIBLAB_E_IO, "IoError", "cannot write '" + output + "'"};
    }
  } catch (const Failure &f) {
    print_failure(f);
    return liblab_exit_code(static_cast<liblab_status>(f.status));
  }
  return 0;
}
