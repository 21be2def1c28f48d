#include "convreg/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace convreg {

namespace {

// 17 significant digits round-trip an IEEE double exactly.
std::string num17(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string json_number(double x) {
  if (!std::isfinite(x)) return "null";
  return num17(x);
}

const char* bstr(bool b) { return b ? "true" : "false"; }

std::string csv_of(const RateStudyResult& result) {
  std::ostringstream out;
  out << "delta,alpha,admissible,discrepancy,error_norm,d_j,d_j_sym,d_g,d_f,sym_residual\n";
  for (const auto& r : result.rows) {
    out << num17(r.delta) << ',' << num17(r.alpha) << ',' << bstr(r.admissible) << ','
        << num17(r.discrepancy) << ',' << num17(r.error_norm) << ',' << num17(r.d_j)
        << ',' << num17(r.d_j_sym) << ',' << num17(r.d_g) << ',' << num17(r.d_f)
        << ',' << num17(r.sym_residual) << '\n';
  }
  return out.str();
}

// Emitted by hand so that key order and number formatting are fixed; two
// identical runs must produce byte-identical files.
std::string json_of(const RateStudyResult& result) {
  const RateStudyConfig& c = result.config;
  std::ostringstream out;
  out << "{\n";
  out << "  \"config\": {\n";
  out << "    \"problem\": \"" << c.problem << "\",\n";
  out << "    \"profile\": \"" << c.profile << "\",\n";
  out << "    \"n\": " << c.n << ",\n";
  out << "    \"decay\": " << json_number(c.decay) << ",\n";
  out << "    \"width\": " << json_number(c.width) << ",\n";
  out << "    \"penalty\": \"" << c.penalty << "\",\n";
  out << "    \"mu\": " << json_number(c.mu) << ",\n";
  out << "    \"eps\": " << json_number(c.eps) << ",\n";
  out << "    \"radius\": " << json_number(c.radius) << ",\n";
  out << "    \"rule\": \"" << c.rule << "\",\n";
  out << "    \"tau\": " << json_number(c.tau) << ",\n";
  out << "    \"p\": " << json_number(c.p) << ",\n";
  out << "    \"rule_hessian_lipschitz\": " << json_number(c.rule_hessian_lipschitz) << ",\n";
  out << "    \"opnorm\": " << json_number(c.opnorm) << ",\n";
  out << "    \"deltas\": [";
  for (size_t i = 0; i < c.deltas.size(); ++i) {
    if (i) out << ", ";
    out << num17(c.deltas[i]);
  }
  out << "],\n";
  out << "    \"seed\": " << c.seed << ",\n";
  out << "    \"repeats\": " << c.repeats << ",\n";
  out << "    \"discrepancy_search\": " << bstr(c.discrepancy_search) << ",\n";
  out << "    \"grad_tol\": " << json_number(c.grad_tol) << ",\n";
  out << "    \"max_iter\": " << c.max_iter << "\n";
  out << "  },\n";
  out << "  \"rows\": [\n";
  for (size_t i = 0; i < result.rows.size(); ++i) {
    const auto& r = result.rows[i];
    out << "    {\"delta\": " << num17(r.delta) << ", \"alpha\": " << num17(r.alpha)
        << ", \"admissible\": " << bstr(r.admissible)
        << ", \"used_fallback\": " << bstr(r.used_fallback)
        << ", \"discrepancy\": " << num17(r.discrepancy)
        << ", \"error_norm\": " << num17(r.error_norm)
        << ", \"d_j\": " << num17(r.d_j) << ", \"d_j_sym\": " << num17(r.d_j_sym)
        << ", \"d_g\": " << num17(r.d_g) << ", \"d_f\": " << num17(r.d_f)
        << ", \"sym_residual\": " << num17(r.sym_residual) << "}"
        << (i + 1 < result.rows.size() ? "," : "") << "\n";
  }
  out << "  ],\n";
  out << "  \"fitted_slopes\": {\n";
  out << "    \"error_vs_delta\": " << json_number(result.fitted_slopes.error_vs_delta) << ",\n";
  out << "    \"d_j_vs_delta\": " << json_number(result.fitted_slopes.d_j_vs_delta) << ",\n";
  out << "    \"d_g_vs_delta\": " << json_number(result.fitted_slopes.d_g_vs_delta) << "\n";
  out << "  },\n";
  out << "  \"error_trend_monotone\": " << bstr(result.error_trend_monotone) << "\n";
  out << "}\n";
  return out.str();
}

}  // namespace

std::string report_to_string(const RateStudyResult& result, ReportFormat format) {
  return format == ReportFormat::Csv ? csv_of(result) : json_of(result);
}

void emit_report(const RateStudyResult& result, ReportFormat format,
                 const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_report: cannot open '" + path + "' for writing");
  out << report_to_string(result, format);
  if (!out) throw std::runtime_error("emit_report: write failed for '" + path + "'");
}

}  // namespace convreg
