#include "cusp_spectra/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cusp {

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::square_sanity: return "square_sanity";
    case ExperimentKind::lipschitz_rate: return "lipschitz_rate";
    case ExperimentKind::cusp_rate: return "cusp_rate";
    case ExperimentKind::projector_ensemble: return "projector_ensemble";
    case ExperimentKind::property_p: return "property_p";
  }
  throw config_error("unknown experiment kind");
}

ExperimentKind experiment_from_string(const std::string& s) {
  if (s == "square_sanity") return ExperimentKind::square_sanity;
  if (s == "lipschitz_rate") return ExperimentKind::lipschitz_rate;
  if (s == "cusp_rate") return ExperimentKind::cusp_rate;
  if (s == "projector_ensemble") return ExperimentKind::projector_ensemble;
  if (s == "property_p") return ExperimentKind::property_p;
  throw config_error("unknown experiment '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw config_error("");
    return d;
  } catch (...) {
    throw config_error("bad numeric value for '" + key + "': " + v);
  }
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
  std::string body = trim(v);
  if (body.size() < 2 || body.front() != '[' || body.back() != ']')
    throw config_error("list value for '" + key + "' must look like [a, b, c]");
  body = body.substr(1, body.size() - 2);
  std::vector<double> out;
  std::string item;
  std::istringstream is(body);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(item, key));
  }
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace

RunConfig parse_config(std::istream& is) {
  RunConfig c;
  c.eps_levels.clear();
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("unterminated section header at line " +
                           std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("expected 'key = value' at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;

    if (full == "experiment") c.experiment = experiment_from_string(value);
    else if (full == "geometry.alpha") c.alpha = parse_double(value, full);
    else if (full == "geometry.eps0") c.eps0 = parse_double(value, full);
    else if (full == "geometry.eps_levels") c.eps_levels = parse_list(value, full);
    else if (full == "geometry.eps_ref") c.eps_ref = parse_double(value, full);
    else if (full == "discretization.h") c.h = parse_double(value, full);
    else if (full == "discretization.grading") c.grading = parse_double(value, full);
    else if (full == "discretization.quad_points")
      c.quad_points = static_cast<int>(parse_double(value, full));
    else if (full == "solver.count") c.count = static_cast<int>(parse_double(value, full));
    else if (full == "solver.tol") c.tol = parse_double(value, full);
    else if (full == "solver.k") c.k = static_cast<int>(parse_double(value, full));
    else if (full == "solver.q0") c.q0 = parse_double(value, full);
    else if (full == "solver.seed")
      c.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (full == "output.dir") c.out_dir = value;
    else if (full == "output.workers")
      c.workers = static_cast<int>(parse_double(value, full));
    else
      throw config_error("unknown config key '" + full + "'");
  }
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open config file '" + path + "'");
  return parse_config(is);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "experiment = " << to_string(c.experiment) << "\n\n";
  os << "[geometry]\n";
  os << "alpha = " << fmt17(c.alpha) << "\n";
  os << "eps0 = " << fmt17(c.eps0) << "\n";
  os << "eps_levels = [";
  for (std::size_t i = 0; i < c.eps_levels.size(); ++i)
    os << (i ? ", " : "") << fmt17(c.eps_levels[i]);
  os << "]\n";
  os << "eps_ref = " << fmt17(c.eps_ref) << "\n\n";
  os << "[discretization]\n";
  os << "h = " << fmt17(c.h) << "\n";
  os << "grading = " << fmt17(c.grading) << "\n";
  os << "quad_points = " << c.quad_points << "\n\n";
  os << "[solver]\n";
  os << "count = " << c.count << "\n";
  os << "tol = " << fmt17(c.tol) << "\n";
  os << "k = " << c.k << "\n";
  os << "q0 = " << fmt17(c.q0) << "\n";
  os << "seed = " << c.seed << "\n\n";
  os << "[output]\n";
  os << "dir = " << c.out_dir << "\n";
  os << "workers = " << c.workers << "\n";
  return os.str();
}

void validate_config(const RunConfig& c) {
  if (!(c.h > 0.0)) throw config_error("h must be positive");
  if (c.k < 1) throw config_error("resolvent power k must be >= 1");
  if (c.count < 1) throw config_error("count must be >= 1");
  if (!(c.tol > 0.0)) throw config_error("tol must be positive");
  if (!(c.grading >= 1.0)) throw config_error("grading must be >= 1");
  if (c.quad_points != 3 && c.quad_points != 7)
    throw config_error("quad_points must be 3 or 7");
  if (c.workers < 1) throw config_error("workers must be >= 1");
  for (std::size_t i = 0; i < c.eps_levels.size(); ++i) {
    const double e = c.eps_levels[i];
    if (!(e > 0.0 && e <= c.eps0))
      throw config_error("eps_levels entries must lie in (0, eps0]");
    if (i > 0 && !(e < c.eps_levels[i - 1]))
      throw config_error("eps_levels must be strictly decreasing");
  }
  if (c.experiment == ExperimentKind::cusp_rate) {
    if (c.eps_levels.empty()) throw config_error("cusp_rate needs eps_levels");
    if (!(c.eps_ref > 0.0 && c.eps_ref <= c.eps0))
      throw config_error("eps_ref must lie in (0, eps0]");
    if (c.eps_levels.back() < 4.0 * c.eps_ref)
      throw config_error(
          "comparison levels must satisfy eps >= 4 * eps_ref so the reference "
          "error stays subdominant");
  }
}

} // namespace cusp
