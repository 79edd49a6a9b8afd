#include "runlab/cli.hpp"
#include "runlab/constructions.hpp"
#include "runlab/dimension.hpp"
#include "runlab/errors.hpp"
#include "runlab/runstats.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace runlab;

namespace {

std::pair<std::string, std::string> rational_parts(const Rational& q) {
  return {numerator(q).str(), denominator(q).str()};
}

}  // namespace

PYBIND11_MODULE(_runlab, m) {
  m.doc() = "run-length analytics core";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "RunlabError", PyExc_RuntimeError);

  m.def(
      "run_length",
      [](const std::string& bits, std::size_t n) { return run_length(Word::from_string(bits), n); },
      py::arg("bits"), py::arg("n"), "longest run of 1s among the first n digits (1-based)");

  m.def(
      "ep_prefix",
      [](unsigned p, const std::string& selector, std::uint64_t seed, std::uint64_t count) {
        return make_ep_stream({p, Selector::parse(selector, seed)})->materialize(1, count).to_string();
      },
      py::arg("p"), py::arg("selector") = "seeded", py::arg("seed") = 0, py::arg("count") = 64);

  m.def(
      "cylinder_count", [](unsigned p, std::size_t level) { return cylinder_count(EpPredicate(p), level).str(); },
      py::arg("p"), py::arg("level"), "number of length-level cylinders of E_p, as a decimal string");

  m.def(
      "count_no_run", [](std::uint64_t n, std::uint64_t k) { return count_no_run(n, k).str(); }, py::arg("n"),
      py::arg("k"));

  m.def(
      "exact_run_cdf", [](std::uint64_t n, std::uint64_t k) { return rational_parts(exact_run_cdf(n, k)); },
      py::arg("n"), py::arg("k"), "P(r_n < k) as (numerator, denominator) strings");

  m.def(
      "deviation_probability",
      [](std::uint64_t n, const std::string& eps) { return rational_parts(er_deviation_report(n, parse_rational(eps))); },
      py::arg("n"), py::arg("epsilon"));

  m.def(
      "monte_carlo",
      [](std::uint64_t n, std::uint64_t trials, std::uint64_t seed) {
        ERSample s = er_monte_carlo(n, trials, seed);
        std::vector<std::uint64_t> r;
        r.reserve(s.data.size());
        for (const auto& t : s.data) r.push_back(t.r);
        return r;
      },
      py::arg("n"), py::arg("trials"), py::arg("seed"), "r_n for each trial, deterministic in the seed");

  m.def(
      "construct_report",
      [](const std::string& phi, unsigned p, unsigned count, const std::string& mode) {
        Speed s = Speed::parse(phi);
        Schedule sched = build_schedule_thm1(s, p, count, parse_mode(mode), default_index_budget());
        auto [x, plan] = apply_insertions(make_ep_stream({p, Selector::seeded(0)}), sched, s);
        return verify_checkpoints(*x, sched, s).to_json().dump();
      },
      py::arg("phi") = "log2", py::arg("p") = 3, py::arg("count") = 6, py::arg("mode") = "relaxed",
      "checkpoint report as a JSON string");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "run the command line in-process; returns (exit code, stdout, stderr)");
}
