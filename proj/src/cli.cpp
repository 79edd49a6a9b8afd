#include "runlab/cli.hpp"

#include "runlab/constructions.hpp"
#include "runlab/dimension.hpp"
#include "runlab/errors.hpp"
#include "runlab/runstats.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace runlab {

namespace {

using nlohmann::json;

constexpr const char* kBudgetEnv = "RUNLENGTH_LAB_BUDGET";
constexpr std::uint64_t kDefaultScanBudget = 10'000'000;

struct Options {
  std::string command;
  std::string phi = "log2";
  unsigned p = 3;
  std::string mode = "relaxed";
  unsigned count = 6;
  unsigned stages = 4;
  std::string seed = "0";
  std::string budget;
  std::string scan_budget;
  std::string levels;
  std::string n;
  std::string k;
  std::string trials = "2000";
  std::string epsilon;
  std::string out;
  std::string format;
  std::string manifest;
  std::string kind = "thm1";
  std::string input;
  std::string selector = "seeded";
  std::string omega_seed = "0";
  std::string checkpoints;
  std::string condition = "ratio";
  std::string alpha = "1";
  std::string targets;
  std::string bound;
  std::uint64_t dump_prefix = 0;
};

// Named outputs of one command; "out" is the primary report.
struct Result {
  std::map<std::string, std::string> outputs;
  int status = 0;
  std::string message;
};

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw InvalidParameter(what + " must be a non-negative integer, got '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw InvalidParameter(what + " out of range: '" + s + "'");
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    auto b = cur.find_first_not_of(" \t");
    auto e = cur.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
  }
  return out;
}

Index parse_index(const std::string& s, const std::string& what) {
  try {
    return Index::parse(s);
  } catch (const ParseError& e) {
    throw InvalidParameter(what + ": " + e.what());
  }
}

Index index_budget(const Options& o) {
  if (!o.budget.empty()) return parse_index(o.budget, "--budget");
  if (const char* env = std::getenv(kBudgetEnv)) return parse_index(env, kBudgetEnv);
  return default_index_budget();
}

std::uint64_t scan_budget(const Options& o) {
  if (!o.scan_budget.empty()) return parse_u64(o.scan_budget, "--scan-budget");
  return kDefaultScanBudget;
}

std::string fmt(const Options& o, const std::string& fallback) {
  std::string f = o.format.empty() ? fallback : o.format;
  if (f != "csv" && f != "json") throw InvalidParameter("--format must be csv or json");
  return f;
}

Result cmd_runlen(const Options& o) {
  if (o.input.empty()) throw InvalidParameter("runlen needs --input");
  Word w = read_bitstring_file(o.input);
  Result res;
  json rows = json::array();
  std::ostringstream csv;
  csv << "n,r_n,error\n";
  for (const auto& item : split_list(o.n)) {
    std::uint64_t n = parse_u64(item, "--n entry");
    if (n < 1 || n > w.size()) {
      std::string e = "n outside 1.." + std::to_string(w.size());
      csv << n << ",," << e << '\n';
      rows.push_back({{"n", n}, {"r_n", nullptr}, {"error", e}});
      res.status = 2;
      continue;
    }
    RunState st;
    st.push_word(w, n);
    csv << n << ',' << st.max << ",\n";
    rows.push_back({{"n", n}, {"r_n", st.max}});
  }
  res.outputs["out"] = fmt(o, "csv") == "json" ? json({{"length", w.size()}, {"rows", rows}}).dump(2) + "\n" : csv.str();
  return res;
}

Result cmd_construct(const Options& o) {
  Speed phi = Speed::parse(o.phi);
  Index budget = index_budget(o);
  std::uint64_t seed = parse_u64(o.seed, "--seed");
  std::uint64_t scan = scan_budget(o);
  Result res;
  Stream stream;
  CheckpointReport rep;
  json detail;
  if (o.kind == "thm1") {
    Schedule sched;
    if (o.checkpoints.empty()) {
      sched = build_schedule_thm1(phi, o.p, o.count, parse_mode(o.mode), budget);
    } else {
      std::vector<Index> cps;
      for (const auto& c : split_list(o.checkpoints)) cps.push_back(parse_index(c, "--checkpoints"));
      sched = make_schedule(phi, o.p, std::move(cps), parse_mode(o.mode));
    }
    EpSpec spec{o.p, Selector::parse(o.selector, seed)};
    auto [s, plan] = apply_insertions(make_ep_stream(spec), sched, phi);
    stream = s;
    rep = verify_checkpoints(*stream, sched, phi, scan);
    detail = {{"base", stream->describe()}, {"schedule", to_json(sched)}, {"plan", to_json(plan)}};
  } else if (o.kind == "thm2") {
    Word seed_word = Word::from_string(o.omega_seed);
    std::vector<Index> cps;
    for (const auto& c : split_list(o.checkpoints)) cps.push_back(parse_index(c, "--checkpoints"));
    auto [el, s] = build_omega_element(seed_word, phi, cps, o.stages, budget);
    stream = s;
    rep = verify_checkpoints(*stream, el.checkpoints(), phi, scan);
    detail = {{"element", to_json(el)}};
  } else {
    throw InvalidParameter("--kind must be thm1 or thm2");
  }
  json j = rep.to_json();
  j["construction"] = detail;
  j["speed"] = phi.name();
  res.outputs["out"] = fmt(o, "csv") == "json" ? j.dump(2) + "\n" : rep.to_csv();
  if (o.dump_prefix > 0) {
    if (o.dump_prefix > kDefaultMaterializeBudget) throw BudgetExceeded("--dump-prefix exceeds the materialization budget");
    res.outputs["prefix"] = stream->materialize(1, o.dump_prefix).to_string() + "\n";
  }
  res.status = rep.pass ? 0 : 2;
  if (!rep.pass) res.message = "checkpoint verification failed";
  return res;
}

Result cmd_dim(const Options& o) {
  EpPredicate pred(o.p);
  std::vector<std::size_t> levels;
  for (const auto& l : split_list(o.levels)) levels.push_back(parse_u64(l, "--levels entry"));
  if (levels.empty()) throw InsufficientData("no levels given");
  CountProfile prof = count_profile(pred, levels);
  Result res;
  Rational expect(static_cast<long>(o.p - 2), static_cast<long>(o.p));
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] % o.p == 0 && levels[i - 1] % o.p == 0 && levels[i - 1] >= o.p) {
      const SlopeValue& s = prof.slopes[i - 1];
      if (!s.exact || *s.value.lo.to_rational() != expect) {
        res.status = 2;
        res.message = "slope between levels " + std::to_string(levels[i - 1]) + " and " + std::to_string(levels[i]) +
                      " differs from " + to_string(expect);
      }
    }
  }
  res.outputs["out"] = fmt(o, "csv") == "json" ? json({{"p", o.p}, {"profile", prof.to_json()}}).dump(2) + "\n"
                                               : prof.to_csv();
  if (levels.size() < 2) {
    // the counts are still reported; only the slope is missing
    res.status = InsufficientData("").exit_code();
    res.message = "insufficient data: a slope needs at least two levels";
  }
  return res;
}

Result cmd_er(const Options& o) {
  std::uint64_t n = parse_u64(o.n, "--n");
  std::uint64_t trials = parse_u64(o.trials, "--trials");
  std::uint64_t seed = parse_u64(o.seed, "--seed");
  ERSample s = er_monte_carlo(n, trials, seed);
  Result res;
  json j = s.summary_json();
  if (n <= kDpLimit) {
    DkwCheck d = dkw_check(s);
    j["dkw"] = {{"alpha", to_string(d.alpha)},
                {"distance", to_string(d.distance)},
                {"distance_decimal", d.distance.convert_to<double>()},
                {"band_decimal", std::sqrt(d.band_sq_lo.convert_to<double>())},
                {"at", d.at},
                {"band_sq_lo", to_string(d.band_sq_lo)},
                {"band_sq_hi", to_string(d.band_sq_hi)},
                {"inside", d.inside}};
    res.status = d.inside ? 0 : 2;
    if (!d.inside) res.message = "sample CDF leaves the DKW band";
  }
  if (fmt(o, "csv") == "json") {
    json trials_j = json::array();
    for (const auto& t : s.data) trials_j.push_back({{"trial", t.trial}, {"seed", t.seed}, {"r_n", t.r}});
    j["trials_data"] = trials_j;
    res.outputs["out"] = j.dump(2) + "\n";
  } else {
    res.outputs["out"] = s.to_csv();
    res.outputs["summary"] = j.dump(2) + "\n";
  }
  return res;
}

Result cmd_er_exact(const Options& o) {
  std::uint64_t n = parse_u64(o.n, "--n");
  Result res;
  bool json_out = fmt(o, "csv") == "json";
  if (!o.k.empty()) {
    std::uint64_t k = parse_u64(o.k, "--k");
    Rational p = exact_run_cdf(n, k);
    BigInt a = count_no_run(n, k);
    res.outputs["out"] = json_out ? json({{"n", n}, {"k", k}, {"A", a.str()}, {"cdf", to_string(p)}}).dump(2) + "\n"
                                  : "n,k,A(n;k),P(r_n<k)\n" + std::to_string(n) + "," + std::to_string(k) + "," +
                                        a.str() + "," + to_string(p) + "\n";
  } else if (!o.epsilon.empty()) {
    Rational eps = parse_rational(o.epsilon);
    Rational p = er_deviation_report(n, eps);
    std::ostringstream dec;
    dec.precision(17);
    dec << p.convert_to<double>();
    res.outputs["out"] = json_out ? json({{"n", n},
                                          {"epsilon", to_string(eps)},
                                          {"probability", to_string(p)},
                                          {"probability_decimal", p.convert_to<double>()}})
                                            .dump(2) + "\n"
                                  : "n,epsilon,probability_decimal,probability\n" + std::to_string(n) + "," +
                                        to_string(eps) + "," + dec.str() + "," + to_string(p) + "\n";
  } else {
    RunDistribution d = run_distribution(n);
    if (json_out) {
      json rows = json::array();
      for (std::uint64_t k = 0; k <= n + 1; ++k) {
        rows.push_back({{"k", k}, {"A", d.table[k].str()}, {"cdf", to_string(d.cdf(k))}});
      }
      res.outputs["out"] = json({{"n", n}, {"mean", to_string(d.mean())}, {"rows", rows}}).dump(2) + "\n";
    } else {
      res.outputs["out"] = d.to_csv();
    }
  }
  return res;
}

json witness_json(const ClassWitness& w) {
  json ladder = json::array();
  for (const auto& e : w.ladder) {
    ladder.push_back({{"target", to_string(e.target)},
                      {"n", e.n.to_string()},
                      {"ratio_lo", e.ratio.lo.to_string()},
                      {"ratio_hi", e.ratio.hi.to_string()}});
  }
  json j = {{"condition", w.condition == WitnessCondition::class_a ? "class-A" : "ratio-divergence"},
            {"ladder", ladder},
            {"search_bound", w.search_bound.to_string()},
            {"verdict", w.verdict()}};
  if (w.condition == WitnessCondition::class_a) j["alpha"] = to_string(w.alpha);
  if (w.missed) j["missed_target"] = to_string(*w.missed);
  return j;
}

Result cmd_speed(const Options& o) {
  Speed phi = Speed::parse(o.phi);
  std::vector<Rational> targets;
  for (const auto& t : split_list(o.targets)) targets.push_back(parse_rational(t));
  if (targets.empty()) throw InvalidParameter("speed needs --targets");
  Index bound = o.bound.empty() ? index_budget(o) : parse_index(o.bound, "--bound");
  ClassWitness w;
  if (o.condition == "ratio") {
    w = ratio_divergence_witness(phi, targets, bound);
  } else if (o.condition == "class-A") {
    w = class_a_witness(phi, parse_rational(o.alpha), targets, bound);
  } else {
    throw InvalidParameter("--condition must be ratio or class-A");
  }
  Result res;
  json j = witness_json(w);
  j["speed"] = phi.name();
  if (fmt(o, "json") == "json") {
    res.outputs["out"] = j.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << "target,n,ratio_lo,ratio_hi\n";
    for (const auto& e : w.ladder) {
      csv << to_string(e.target) << ',' << e.n.to_string() << ',' << e.ratio.lo.to_string() << ','
          << e.ratio.hi.to_string() << '\n';
    }
    res.outputs["out"] = csv.str();
  }
  res.status = w.witnessed ? 0 : 2;
  if (!w.witnessed) res.message = "refuted up to bound " + w.search_bound.to_string();
  return res;
}

Result dispatch(const Options& o) {
  if (o.command == "runlen") return cmd_runlen(o);
  if (o.command == "construct") return cmd_construct(o);
  if (o.command == "dim") return cmd_dim(o);
  if (o.command == "er") return cmd_er(o);
  if (o.command == "er-exact") return cmd_er_exact(o);
  if (o.command == "speed") return cmd_speed(o);
  throw InvalidParameter("unknown command '" + o.command + "'");
}

std::string output_path(const std::string& out, const std::string& role) {
  if (role == "out") return out;
  return out + "." + role + (role == "summary" ? ".json" : ".txt");
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidParameter("cannot write " + path);
  f << data;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidParameter("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Builds the parser; `opts` receives the values.
void configure(CLI::App& app, Options& o, std::string& replay_manifest) {
  app.require_subcommand(1);
  auto common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "output file (default stdout)");
    c->add_option("--format", o.format, "csv or json");
    c->add_option("--manifest", o.manifest, "write a replay manifest here");
  };
  auto* runlen = app.add_subcommand("runlen", "longest run of ones in a bitstring file");
  runlen->add_option("--input", o.input, "ASCII or packed bitstring file")->required();
  runlen->add_option("--n", o.n, "comma-separated prefix lengths");
  common(runlen);

  auto* construct = app.add_subcommand("construct", "build an extreme divergence point and verify checkpoints");
  construct->add_option("--kind", o.kind, "thm1 (insertion) or thm2 (Omega)");
  construct->add_option("--phi", o.phi, "speed: log2, loglog, pow:<b>, linear:<c>, custom-table:<file>");
  construct->add_option("--p", o.p, "E_p block length (>= 3)");
  construct->add_option("--mode", o.mode, "faithful or relaxed");
  construct->add_option("--count", o.count, "number of checkpoints (thm1)");
  construct->add_option("--stages", o.stages, "number of Omega stages (thm2)");
  construct->add_option("--seed", o.seed, "selector seed");
  construct->add_option("--selector", o.selector, "seeded, zeros or ones");
  construct->add_option("--omega-seed", o.omega_seed, "seed word for thm2");
  construct->add_option("--checkpoints", o.checkpoints, "explicit checkpoints, comma-separated");
  construct->add_option("--budget", o.budget, "bound on checkpoint magnitude (expression)");
  construct->add_option("--scan-budget", o.scan_budget, "checkpoints up to this are also brute scanned");
  construct->add_option("--dump-prefix", o.dump_prefix, "also write the first N digits");
  common(construct);

  auto* dim = app.add_subcommand("dim", "cylinder counts and slopes of E_p");
  dim->add_option("--p", o.p, "E_p block length");
  dim->add_option("--levels", o.levels, "comma-separated levels")->required();
  common(dim);

  auto* er = app.add_subcommand("er", "Monte Carlo r_n / log2 n");
  er->add_option("--n", o.n, "digits per trial")->required();
  er->add_option("--trials", o.trials, "number of trials");
  er->add_option("--seed", o.seed, "master seed");
  common(er);

  auto* ere = app.add_subcommand("er-exact", "exact longest-run distribution");
  ere->add_option("--n", o.n, "word length")->required();
  ere->add_option("--k", o.k, "report P(r_n < k)");
  ere->add_option("--epsilon", o.epsilon, "report P(|r_n / log2 n - 1| > epsilon)");
  common(ere);

  auto* speed = app.add_subcommand("speed", "bounded witness search for divergence conditions");
  speed->add_option("--phi", o.phi, "speed");
  speed->add_option("--condition", o.condition, "ratio or class-A");
  speed->add_option("--alpha", o.alpha, "alpha in (0, 1] for class-A");
  speed->add_option("--targets", o.targets, "comma-separated increasing targets")->required();
  speed->add_option("--bound", o.bound, "search bound (expression)");
  speed->add_option("--budget", o.budget, "default bound when --bound is absent");
  common(speed);

  auto* replay = app.add_subcommand("replay", "re-run a manifest and compare output digests");
  replay->add_option("--manifest", replay_manifest, "manifest file")->required();
}

void emit(const Options& o, const Result& r, std::ostream& out) {
  for (const auto& [role, data] : r.outputs) {
    if (o.out.empty()) {
      if (role != "out") out << "# " << role << "\n";
      out << data;
    } else {
      write_file(output_path(o.out, role), data);
    }
  }
}

json make_manifest(const Options& o, const std::vector<std::string>& args, const Result& r) {
  json outs = json::object();
  for (const auto& [role, data] : r.outputs) {
    outs[role] = {{"path", o.out.empty() ? "-" : output_path(o.out, role)}, {"sha256", sha256_hex(data)}};
  }
  std::vector<std::string> argv;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--manifest") {
      ++i;
      continue;
    }
    if (args[i].rfind("--manifest=", 0) == 0) continue;
    argv.push_back(args[i]);
  }
  const char* env = std::getenv(kBudgetEnv);
  return {{"tool", "runlab"},
          {"version", kVersion},
          {"command", o.command},
          {"argv", argv},
          {"parameters",
           {{"phi", o.phi},
            {"p", o.p},
            {"mode", o.mode},
            {"kind", o.kind},
            {"count", o.count},
            {"stages", o.stages},
            {"selector", o.selector},
            {"levels", o.levels},
            {"n", o.n},
            {"k", o.k},
            {"trials", o.trials},
            {"epsilon", o.epsilon},
            {"targets", o.targets},
            {"condition", o.condition},
            {"alpha", o.alpha},
            {"bound", o.bound},
            {"input", o.input}}},
          {"seeds", {{"seed", o.seed}, {"omega_seed", o.omega_seed}}},
          {"budgets",
           {{"budget", o.budget.empty() ? index_budget(o).to_string() : o.budget},
            {"scan_budget", std::to_string(scan_budget(o))},
            {"materialize_budget", std::to_string(kDefaultMaterializeBudget)}}},
          {"env", {{kBudgetEnv, env ? json(env) : json(nullptr)}}},
          {"status", r.status},
          {"outputs", outs}};
}

int parse_and_run(const std::vector<std::string>& args, Options& o, std::string& replay_manifest, Result& res,
                  std::ostream& err) {
  CLI::App app{"runlab: run-length analytics and extreme divergence point constructions"};
  app.set_version_flag("--version", std::string("runlab ") + kVersion);
  configure(app, o, replay_manifest);
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os, es;
    int code = app.exit(e, os, es);
    err << os.str() << es.str();
    return code == 0 ? 0 : 64;
  }
  o.command = app.get_subcommands().front()->get_name();
  if (o.command == "replay") return -1;
  res = dispatch(o);
  return res.status;
}

int replay(const std::string& path, std::ostream& out, std::ostream& err) {
  json m = json::parse(read_file(path));
  std::vector<std::string> args = m.at("argv").get<std::vector<std::string>>();
  // outputs are regenerated in memory; drop --out so nothing is overwritten
  std::vector<std::string> run_args;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out") {
      ++i;
      continue;
    }
    run_args.push_back(args[i]);
  }
  std::optional<std::string> saved;
  if (const char* e = std::getenv(kBudgetEnv)) saved = e;
  const json& env = m.at("env").at(kBudgetEnv);
  if (env.is_null()) {
    unsetenv(kBudgetEnv);
  } else {
    setenv(kBudgetEnv, env.get<std::string>().c_str(), 1);
  }
  Options o;
  std::string unused;
  Result res;
  int status;
  try {
    status = parse_and_run(run_args, o, unused, res, err);
  } catch (...) {
    if (saved) setenv(kBudgetEnv, saved->c_str(), 1); else unsetenv(kBudgetEnv);
    throw;
  }
  if (saved) setenv(kBudgetEnv, saved->c_str(), 1); else unsetenv(kBudgetEnv);
  bool same = status == m.value("status", 0);
  for (const auto& [role, rec] : m.at("outputs").items()) {
    auto it = res.outputs.find(role);
    std::string want = rec.at("sha256").get<std::string>();
    std::string got = it == res.outputs.end() ? "missing" : sha256_hex(it->second);
    bool ok = got == want;
    same = same && ok;
    out << role << ' ' << (ok ? "identical" : "MISMATCH") << ' ' << got << '\n';
  }
  if (res.outputs.size() != m.at("outputs").size()) same = false;
  out << (same ? "replay: byte-identical\n" : "replay: outputs differ\n");
  return same ? 0 : 2;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  std::string replay_manifest;
  Result res;
  try {
    int status = parse_and_run(args, o, replay_manifest, res, err);
    if (status == -1) return replay(replay_manifest, out, err);
    if (o.command.empty()) return status;
    emit(o, res, out);
    if (!o.manifest.empty()) write_file(o.manifest, make_manifest(o, args, res).dump(2) + "\n");
    if (!res.message.empty()) err << "runlab: " << res.message << '\n';
    return res.status;
  } catch (const Error& e) {
    err << "runlab: " << e.what() << '\n';
    return e.exit_code();
  } catch (const nlohmann::json::exception& e) {
    err << "runlab: malformed manifest: " << e.what() << '\n';
    return 64;
  } catch (const std::exception& e) {
    err << "runlab: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace runlab
