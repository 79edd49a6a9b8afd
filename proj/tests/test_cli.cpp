#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "runlab/cli.hpp"

#include "json.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace runlab;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("runlen") {
  std::string in = tmp("runlab_cli_word.txt");
  std::ofstream(in) << "11010\n";
  Run r = cli({"runlen", "--input", in, "--n", "5"});
  CHECK(r.code == 0);
  CHECK(r.out == "n,r_n,error\n5,2,\n");
  Run empty = cli({"runlen", "--input", in});
  CHECK(empty.code == 0);
  CHECK(empty.out == "n,r_n,error\n");
  Run beyond = cli({"runlen", "--input", in, "--n", "2,6", "--format", "json"});
  CHECK(beyond.code == 2);
  auto j = nlohmann::json::parse(beyond.out);
  CHECK(j["rows"][0]["r_n"] == 2);
  CHECK(j["rows"][1].contains("error"));
  std::remove(in.c_str());
}

TEST_CASE("construct") {
  CHECK(cli({"construct", "--phi", "linear:2"}).code == 3);
  Run t1 = cli({"construct", "--kind", "thm1", "--phi", "log2", "--mode", "relaxed", "--count", "6"});
  CHECK(t1.code == 0);
  CHECK(t1.out.find(",false") == std::string::npos);
  Run t2 = cli({"construct", "--kind", "thm2", "--phi", "log2", "--stages", "4", "--format", "json"});
  CHECK(t2.code == 0);
  auto j = nlohmann::json::parse(t2.out);
  CHECK(j["pass"] == true);
  CHECK(j["rows"].size() == 4);
  Run dump = cli({"construct", "--phi", "pow:1/2", "--count", "2", "--dump-prefix", "12", "--selector", "ones"});
  CHECK(dump.out.find("# prefix\n111010010010\n") != std::string::npos);
  CHECK(cli({"construct", "--kind", "thm3"}).code == 64);
  CHECK(cli({"construct", "--phi", "log2", "--p", "2"}).code == 64);
}

TEST_CASE("budget from the environment") {
  setenv("RUNLENGTH_LAB_BUDGET", "10^6", 1);
  Run r = cli({"construct", "--phi", "log2", "--count", "4"});
  unsetenv("RUNLENGTH_LAB_BUDGET");
  CHECK(r.code == 4);
  CHECK(cli({"construct", "--phi", "log2", "--count", "4", "--budget", "2^(2^600)"}).code == 0);
}

TEST_CASE("dim") {
  Run r = cli({"dim", "--p", "4", "--levels", "8,12"});
  CHECK(r.code == 0);
  CHECK(r.out.find("12,16,1,2,1/2,1/2") != std::string::npos);
  Run one = cli({"dim", "--p", "3", "--levels", "3"});
  CHECK(one.code == 64);
  CHECK(one.out.find("3,1,") != std::string::npos);
  CHECK(one.err.find("insufficient data") != std::string::npos);
  CHECK(cli({"dim", "--p", "3"}).code == 64);
}

TEST_CASE("er and er-exact") {
  Run e = cli({"er-exact", "--n", "3", "--k", "2"});
  CHECK(e.out == "n,k,A(n;k),P(r_n<k)\n3,2,5,5/8\n");
  Run d = cli({"er-exact", "--n", "2"});
  CHECK(d.out == "k,A(n;k),P(r_n<k)\n0,0,0\n1,1,1/4\n2,3,3/4\n3,4,1\n");
  CHECK(cli({"er", "--n", "100", "--seed", "abc"}).code == 64);
  CHECK(cli({"er", "--n", "100", "--seed", "-1"}).code == 64);
  Run mc = cli({"er", "--n", "1000", "--trials", "200", "--seed", "3"});
  CHECK(mc.code == 0);
  CHECK(mc.out == cli({"er", "--n", "1000", "--trials", "200", "--seed", "3"}).out);
}

TEST_CASE("speed") {
  Run w = cli({"speed", "--phi", "log2", "--targets", "10,100", "--bound", "10^6"});
  CHECK(w.code == 0);
  CHECK(nlohmann::json::parse(w.out)["verdict"] == "witnessed");
  Run r = cli({"speed", "--phi", "linear:2", "--targets", "1", "--bound", "10^9"});
  CHECK(r.code == 2);
  CHECK(nlohmann::json::parse(r.out)["verdict"] == "refuted-up-to-bound");
  Run a = cli({"speed", "--phi", "pow:1/4", "--condition", "class-A", "--alpha", "1", "--targets", "10", "--bound", "10^6"});
  CHECK(a.code == 0);
  CHECK(cli({"speed", "--phi", "bogus", "--targets", "1"}).code == 64);
  std::string table = tmp("runlab_cli_table.csv");
  std::ofstream(table) << "n,phi\n1,1\n10,3\n100,2\n";
  Run bad = cli({"speed", "--phi", "custom-table:" + table, "--targets", "1"});
  CHECK(bad.code == 64);
  CHECK(bad.err.find("row 4") != std::string::npos);
  std::remove(table.c_str());
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == 64);
  CHECK(cli({"frobnicate"}).code == 64);
  CHECK(cli({"dim", "--p", "x", "--levels", "3,6"}).code == 64);
  CHECK(cli({"--version"}).code == 0);
}

TEST_CASE("manifests replay byte-identically") {
  std::string out = tmp("runlab_cli_out.csv"), man = tmp("runlab_cli_manifest.json");
  Run r = cli({"construct", "--phi", "log2", "--count", "6", "--dump-prefix", "600", "--out", out, "--manifest", man});
  CHECK(r.code == 0);
  auto m = nlohmann::json::parse(slurp(man));
  CHECK(m["outputs"]["out"]["sha256"] == sha256_hex(slurp(out)));
  CHECK(m["outputs"]["prefix"]["sha256"] == sha256_hex(slurp(out + ".prefix.txt")));
  CHECK(m["argv"].size() == 9);
  Run rep = cli({"replay", "--manifest", man});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("replay: byte-identical") != std::string::npos);
  // a tampered digest is reported
  m["outputs"]["out"]["sha256"] = std::string(64, '0');
  std::ofstream(man) << m.dump();
  CHECK(cli({"replay", "--manifest", man}).code == 2);
  std::ofstream(man) << "{not json";
  CHECK(cli({"replay", "--manifest", man}).code == 64);
  for (const auto& f : {out, out + ".prefix.txt", man}) std::remove(f.c_str());
}

TEST_CASE("the installed binary reports exit codes") {
  std::string bin = RUNLAB_CLI_PATH;
  auto status = [&](const std::string& args) {
    int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  CHECK(status("--version") == 0);
  CHECK(status("construct --phi linear:2") == 3);
  CHECK(status("dim --p 4 --levels 8,12") == 0);
  CHECK(status("dim --p 3") == 64);
}
