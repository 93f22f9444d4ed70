#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "locpriv/error.h"
#include "locpriv/harness.h"

namespace locpriv {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ValidationError("bad number '" + s + "'");
  return v;
}

}  // namespace

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment_id << ',' << r.model << ',' << r.n << ',' << r.m << ','
        << format_double(r.beta) << ',' << r.trial << ',' << r.metric << ','
        << format_double(r.value) << ',' << (r.std_error ? format_double(*r.std_error) : "")
        << ',' << r.seed << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw ValidationError("results file does not start with the expected header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw ValidationError("results row has " + std::to_string(f.size()) +
                                              " fields: " + line);
    try {
      ResultRow r;
      r.experiment_id = f[0];
      r.model = f[1];
      r.n = std::stoull(f[2]);
      r.m = std::stoull(f[3]);
      r.beta = parse_double(f[4]);
      r.trial = std::stoll(f[5]);
      r.metric = f[6];
      r.value = parse_double(f[7]);
      if (!f[8].empty()) r.std_error = parse_double(f[8]);
      r.seed = std::stoull(f[9]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw ValidationError("malformed results row: " + line);
    }
  }
  return rows;
}

}  // namespace locpriv
