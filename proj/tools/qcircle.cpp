#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "quadcircle/quadcircle.hpp"

namespace {

using namespace qc;
using json = nlohmann::ordered_json;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kGuard = 3 };

struct RunConfig {
  std::string pair_path;
  i64 d = 1;
  i64 q = 1;
  std::string m_text;
  std::string B_text;
  i64 p_max = 50;
  int k_max = 6;
  std::string suite = "all";
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string format;  // empty: the command's own default
  double guard = 1e9;
  std::string output;
  std::string replot;

  ExecPolicy policy() const { return {workers, guard}; }
};

std::vector<i64> parse_csv_ints(const std::string& text, const std::string& flag) {
  const std::string t = detail::trim(text);
  if (t.empty()) return {};
  std::vector<i64> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = t.find(',', start);
    const std::string tok = detail::trim(t.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    std::size_t used = 0;
    i64 v = 0;
    try {
      v = std::stoll(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) throw ParseError(flag + ": '" + tok + "' is not an integer");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

QuadricPair load(const RunConfig& cfg) {
  if (cfg.pair_path.empty()) throw InvalidArgument("--pair is required");
  return load_pair(cfg.pair_path);
}

json sum_json(const SumValue& v) { return {{"re", v.re}, {"im", v.im}, {"tol", v.tol}}; }

void emit(const json& j) {
  write_json(std::cout, j);
  std::cout << '\n';
}

int cmd_expsum(const RunConfig& cfg) {
  const auto pair = load(cfg);
  std::vector<i64> m = parse_csv_ints(cfg.m_text, "--m");
  if (m.empty()) m.assign(static_cast<std::size_t>(pair.n()), 0);
  const auto policy = cfg.policy();
  const SumValue direct = S_dq(pair, cfg.d, cfg.q, m, policy, SumRoute::Direct);
  const SumValue reduced = S_dq(pair, cfg.d, cfg.q, m, policy, SumRoute::Ramanujan);
  std::optional<SumValue> factorized;
  if (cfg.d == 1 && pair.Q2().is_diagonal()) factorized = S_dq(pair, 1, cfg.q, m, policy, SumRoute::Diagonal);
  double discrepancy = std::abs(direct.value() - reduced.value());
  bool agree = direct.agrees(reduced);
  if (factorized) {
    discrepancy = std::max(discrepancy, std::abs(direct.value() - factorized->value()));
    agree = agree && direct.agrees(*factorized);
  }
  if (cfg.format == "csv") {
    std::cout << "path,re,im,tol\n";
    auto row = [](const char* name, const SumValue& v) {
      std::cout << name << ',' << format_number(v.re) << ',' << format_number(v.im) << ',' << format_number(v.tol) << '\n';
    };
    row("direct", direct);
    row("ramanujan", reduced);
    if (factorized) row("factorized", *factorized);
  } else {
    json j;
    j["pair"] = pair.name();
    j["d"] = cfg.d;
    j["q"] = cfg.q;
    j["m"] = m;
    j["value"] = sum_json(direct);
    j["paths"]["direct"] = sum_json(direct);
    j["paths"]["ramanujan"] = sum_json(reduced);
    if (factorized) j["paths"]["factorized"] = sum_json(*factorized);
    j["discrepancy"] = discrepancy;
    j["agree"] = agree;
    emit(j);
  }
  return agree ? kOk : kVerifyFailed;
}

int cmd_verify(const RunConfig& cfg) {
  const auto rep = run_suite(cfg.suite, cfg.seed, cfg.policy());
  if (cfg.format == "json") {
    json j;
    j["suite"] = rep.suite;
    j["seed"] = rep.seed;
    auto& checks = j["checks"] = json::array();
    for (const auto& c : rep.checks) {
      json e{{"tag", c.tag}, {"verdict", c.pass ? "PASS" : "FAIL"}, {"samples", c.samples}, {"worst", c.worst}};
      if (!c.note.empty()) e["note"] = c.note;
      checks.push_back(e);
    }
    j["verdict"] = rep.passed() ? "PASS" : "FAIL";
    emit(j);
  } else if (cfg.format == "csv") {
    std::cout << "tag,verdict,samples,worst\n";
    for (const auto& c : rep.checks)
      std::cout << c.tag << ',' << (c.pass ? "PASS" : "FAIL") << ',' << c.samples << ',' << format_number(c.worst) << '\n';
  } else {
    write_report(std::cout, rep);
  }
  return rep.passed() ? kOk : kVerifyFailed;
}

int cmd_density(const RunConfig& cfg) {
  const auto pair = load(cfg);
  const auto report = singular_constant(pair, default_weight(pair), cfg.p_max, cfg.k_max, cfg.policy());
  emit(to_json(report));
  return kOk;
}

int cmd_experiment(const RunConfig& cfg) {
  if (!cfg.replot.empty()) {
    std::ifstream in(cfg.replot);
    if (!in) throw ParseError("cannot open '" + cfg.replot + "'");
    write_experiment_csv(std::cout, read_experiment_csv(in));
    return kOk;
  }
  const auto pair = load(cfg);
  std::vector<double> B;
  for (i64 b : parse_csv_ints(cfg.B_text, "--B")) {
    if (b < 1) throw InvalidArgument("--B: entries must be positive");
    B.push_back(static_cast<double>(b));
  }
  if (B.empty()) throw InvalidArgument("--B: empty list");
  const auto W = default_weight(pair);
  const auto policy = cfg.policy();
  const auto report = singular_constant(pair, W, cfg.p_max, cfg.k_max, policy);
  const auto rows = experiment(pair, W, B, report.c_truncated, policy);

  std::string report_path = "density_report.json";
  if (!cfg.output.empty()) {
    std::ofstream csv(cfg.output);
    if (!csv) throw InvalidArgument("cannot write '" + cfg.output + "'");
    write_experiment_csv(csv, rows);
    report_path = std::filesystem::path(cfg.output).replace_extension(".json").string();
  }
  {
    std::ofstream js(report_path);
    if (!js) throw InvalidArgument("cannot write '" + report_path + "'");
    write_json(js, to_json(report));
    js << '\n';
  }
  if (cfg.format == "json") {
    json j;
    auto& arr = j["rows"] = json::array();
    for (const auto& r : rows)
      arr.push_back({{"B", r.B}, {"S_B", r.S}, {"S_over_Bn2", r.normalized}, {"c_trunc", r.c}, {"ratio", r.ratio}});
    j["report"] = report_path;
    emit(j);
  } else {
    write_experiment_csv(std::cout, rows);
  }
  return kOk;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case Error::Kind::ResourceLimit:
    case Error::Kind::Overflow: return kGuard;
    case Error::Kind::Internal: return kVerifyFailed;
    default: return kUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"Exponential sums, local densities and lattice counts for pairs of quadrics"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--guard", cfg.guard, "Maximum elementary operations per call")->check(CLI::PositiveNumber);
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* expsum = app.add_subcommand("expsum", "Evaluate S_{d,q}(m) along every available path");
  expsum->add_option("--pair", cfg.pair_path, "Pair definition file")->required();
  expsum->add_option("--d", cfg.d, "Divisibility modulus")->check(CLI::PositiveNumber);
  expsum->add_option("--q", cfg.q, "Sum modulus")->check(CLI::PositiveNumber);
  expsum->add_option("--m", cfg.m_text, "Comma-separated integer vector m (default 0)");
  add_common(expsum);

  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->add_option("--suite", cfg.suite, "Suite name")->check(CLI::IsMember(suite_names()));
  verify->add_option("--seed", cfg.seed, "Seed for the randomized checks");
  add_common(verify);

  auto* density = app.add_subcommand("density", "Local densities and the truncated singular constant");
  density->add_option("--pair", cfg.pair_path, "Pair definition file")->required();
  density->add_option("--p-max", cfg.p_max, "Largest prime in the truncated product")->check(CLI::Range(static_cast<i64>(2), static_cast<i64>(100000)));
  density->add_option("--k-max", cfg.k_max, "Largest lifting level")->check(CLI::Range(3, 40));
  add_common(density);

  auto* exper = app.add_subcommand("experiment", "Compare S(B) / B^{n-2} with the truncated constant");
  exper->add_option("--pair", cfg.pair_path, "Pair definition file");
  exper->add_option("--B", cfg.B_text, "Comma-separated box sizes");
  exper->add_option("--p-max", cfg.p_max, "Largest prime in the truncated product")->check(CLI::Range(static_cast<i64>(2), static_cast<i64>(100000)));
  exper->add_option("--k-max", cfg.k_max, "Largest lifting level")->check(CLI::Range(3, 40));
  exper->add_option("--output", cfg.output, "CSV destination; the density report goes next to it");
  exper->add_option("--replot", cfg.replot, "Re-read an experiment CSV and print it again");
  add_common(exper);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  try {
    if (expsum->parsed()) return cmd_expsum(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    if (density->parsed()) return cmd_density(cfg);
    if (exper->parsed()) {
      if (cfg.replot.empty() && cfg.pair_path.empty()) throw InvalidArgument("experiment: --pair is required");
      if (cfg.replot.empty() && exper->count("--B") == 0) throw InvalidArgument("experiment: --B is required");
      return cmd_experiment(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "qcircle: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "qcircle: internal error: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kUsage;
}
