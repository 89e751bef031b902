#include "lancaster_lab/serialize.hpp"

namespace lancaster_lab {

namespace {

// JSON has no infinities; they become null.
Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json reals(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(real(v));
  return out;
}

std::string_view mode_name(SeriesMode mode) { return mode == SeriesMode::raw ? "raw" : "filtered"; }

}  // namespace

void to_json(Json& j, const Params& params) {
  j = Json::object();
  for (const auto& [key, value] : params.entries()) j[key] = real(value);
}

void to_json(Json& j, const Measure& measure) {
  j = Json{{"family", family_name(measure.family())}, {"name", measure.name()}};
  if (measure.is_parametric()) j["params"] = measure.params();
}

void to_json(Json& j, const LancasterSequence& seq) {
  j = Json{{"provenance", seq.provenance},
           {"margin_x", seq.margin_x},
           {"margin_y", seq.margin_y},
           {"N", seq.N()},
           {"rho", reals(seq.rho)}};
  if (seq.printed_variant) {
    j["printed_rho"] = reals(*seq.printed_variant);
    j["printed_note"] = seq.printed_note;
  }
}

void to_json(Json& j, const BivariateLancaster& biv) {
  j = Json{{"N", biv.N}, {"sequence", biv.sequence}};
}

void to_json(Json& j, const HankelCheck& check) {
  j = Json{{"name", check.name},
           {"size", check.size},
           {"min_eigenvalue", real(check.min_eigenvalue)},
           {"tolerance", real(check.tolerance)},
           {"passed", check.passed}};
}

void to_json(Json& j, const VerifyReport& report) {
  j = Json{{"verdict", verdict_name(report.verdict)},
           {"one_sided", report.one_sided},
           {"support_case", report.support_case == SupportCase::C ? "C" : "D"},
           {"gamma_estimate", real(report.gamma_estimate)},
           {"gamma_trend", reals(report.gamma_trend)},
           {"rescaled_moments", reals(report.rescaled)},
           {"checks", report.checks}};
  j["witness"] = report.witness ? Json{report.witness->first, report.witness->second} : Json(nullptr);
  for (const auto& note : report.notes) {
    if (note.starts_with("known non-Lancaster")) j["note"] = "known non-Lancaster";
  }
  j["notes"] = report.notes;
}

void to_json(Json& j, const ScanPoint& point) {
  j = Json{{"x", point.x}, {"y", point.y}, {"z", point.z}, {"S_N", real(point.value)},
           {"stabilized", point.stabilized}};
}

void to_json(Json& j, const PositivityReport& report) {
  j = Json{{"verdict", positivity_verdict_name(report.verdict)},
           {"grid", {{"kind", report.grid}, {"per_axis", report.grid_per_axis}, {"points", report.points}}},
           {"N", report.N},
           {"series", mode_name(report.mode)},
           {"tolerance", report.tolerance},
           {"min_stabilized", real(report.min_stabilized)},
           {"min_value", real(report.min_value)},
           {"stabilization_fraction", report.stabilization_fraction},
           {"max_ratio_to_x0", real(report.max_ratio_to_x0)},
           {"x0_dominates", report.x0_dominates},
           {"witnesses", report.witnesses},
           {"notes", report.notes}};
}

void to_json(Json& j, const EigenCheck& check) {
  j = Json{{"eigenvalue", real(check.eigenvalue)},
           {"residual", real(check.residual)},
           {"grid_points", check.grid_points},
           {"exact", check.exact}};
}

void to_json(Json& j, const AutocorrFit& fit) {
  Json acf = Json::object();
  for (const auto& [lag, value] : fit.autocorrelation) acf[std::to_string(lag)] = real(value);
  j = Json{{"autocorrelation", acf},
           {"rate", real(fit.rate)},
           {"ci", {real(fit.ci_low), real(fit.ci_high)}},
           {"expected", real(fit.expected)},
           {"lags_used", fit.lags_used}};
}

void to_json(Json& j, const GaussRule& rule) {
  j = Json{{"nodes", reals({rule.nodes.data(), rule.nodes.data() + rule.nodes.size()})},
           {"weights", reals({rule.weights.data(), rule.weights.data() + rule.weights.size()})}};
}

void write_trace_csv(std::ostream& os, const ChainTrace& trace) {
  os << "t,x\n";
  for (std::size_t t = 0; t < trace.states.size(); ++t) os << t << ',' << format_real(trace.states[t]) << '\n';
}

void write_scan_csv(std::ostream& os, const PositivityReport& report) {
  os << "x,y,z,S_N,stabilized\n";
  for (const auto& p : report.samples) {
    os << format_real(p.x) << ',' << format_real(p.y) << ',' << format_real(p.z) << ',' << format_real(p.value)
       << ',' << (p.stabilized ? 1 : 0) << '\n';
  }
}

void write_quadrature_csv(std::ostream& os, const GaussRule& rule) {
  os << "node,weight\n";
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    os << format_real(rule.nodes(i)) << ',' << format_real(rule.weights(i)) << '\n';
  }
}

}  // namespace lancaster_lab
