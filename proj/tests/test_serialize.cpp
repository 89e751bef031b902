#include <catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "lancaster_lab/serialize.hpp"

using namespace lancaster_lab;

TEST_CASE("sequence json carries the printed variant", "[serialize]") {
  const Json j = seq_beta_binomial(1, 1.0, 1.0);
  CHECK(j["rho"][1].get<double>() == seq_beta_binomial(1, 1.0, 1.0).rho[1]);
  CHECK(j["printed_rho"][1].get<double>() == 1.0 / 3.0);
  CHECK(j["margin_x"]["family"] == "beta_binomial");
  CHECK(j["margin_y"]["params"]["b"].get<double>() == 1.0);

  const Json k = seq_kibble(2.0, 0.5, 3);
  CHECK_FALSE(k.contains("printed_rho"));
  CHECK(k["N"] == 3);
}

TEST_CASE("reports serialize verdict names and nulls for infinities", "[serialize]") {
  PositivityReport report;
  report.verdict = PositivityVerdict::nonnegative_on_grid;
  const Json j = report;
  CHECK(j["verdict"] == "nonnegative-on-grid");
  CHECK(j["min_stabilized"].is_null());

  auto hyper = seq_hyperbolic_beta(1.0, 1.0, 20).sequence;
  for (int n = 0; n <= 20; ++n) hyper.rho[n] = std::pow(0.9, n);
  const Json v = verify_moment_representation(hyper, SupportCase::C, 20);
  CHECK(v["verdict"] == "consistent");
  CHECK(v["one_sided"] == true);
  CHECK(v["note"] == "known non-Lancaster");
}

TEST_CASE("csv round-trips doubles", "[serialize]") {
  ChainTrace trace;
  trace.states = {0.1, 1.0 / 3.0, -2.5e-300};
  std::ostringstream os;
  write_trace_csv(os, trace);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,x");
  for (std::size_t t = 0; t < trace.states.size(); ++t) {
    std::getline(is, line);
    const auto comma = line.find(',');
    CHECK(std::stoul(line.substr(0, comma)) == t);
    CHECK(parse_real(line.substr(comma + 1)) == trace.states[t]);
  }

  const auto rule = quadrature(recurrence(Measure::gaussian(), 3), 3);
  std::ostringstream q;
  write_quadrature_csv(q, rule);
  CHECK(q.str().starts_with("node,weight\n"));

  const auto spec = make_kernel_spec(Measure::binomial(2, 0.5), 2);
  ScanOptions options;
  options.keep_points = true;
  std::ostringstream s;
  write_scan_csv(s, positivity_scan(spec, 10, options));
  const std::string csv = s.str();
  CHECK(csv.starts_with("x,y,z,S_N,stabilized\n"));
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 28);
}
