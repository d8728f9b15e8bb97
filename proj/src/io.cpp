#include "mqnmr/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "mqnmr/errors.hpp"

namespace mqnmr {

using nlohmann::json;

namespace {

struct Digits17 {
  explicit Digits17(std::ostream& os) : os_(os), flags_(os.flags()), precision_(os.precision()) {
    os_ << std::setprecision(17);
  }
  ~Digits17() {
    os_.flags(flags_);
    os_.precision(precision_);
  }
  std::ostream& os_;
  std::ios::fmtflags flags_;
  std::streamsize precision_;
};

json parameters_json(const ProfileParameters& p) {
  return {{"A1", p.a_cap_1}, {"A2", p.a_cap_2}, {"alpha1", p.alpha_1},
          {"alpha2", p.alpha_2}, {"a1", p.a_1}, {"a2", p.a_2}};
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_double(const std::string& text, const std::string& where, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": field '" + field + "': expected a number, got '" + text + "'");
  }
}

int parse_int(const std::string& text, const std::string& where, const std::string& field) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(where + ": field '" + field + "': expected an integer, got '" + text + "'");
  }
  return v;
}

AveragedProfile profile_from_parts(int n_spins, double coupling, double t0, int k0, double period,
                                   const std::map<int, double>& by_order, const std::string& source) {
  AveragedProfile profile{[&] {
    try {
      return SpinSystem(n_spins, coupling);
    } catch (const DomainError& e) {
      throw ParseError(source + ": " + e.what());
    }
  }()};
  profile.t0 = t0;
  profile.k0 = k0;
  profile.period = period;
  profile.averaged.assign(static_cast<std::size_t>(n_spins / 2 + 1), 0.0);
  for (const auto& [order, value] : by_order) {
    if (order < 0 || order % 2 != 0 || order > n_spins) {
      throw ParseError(source + ": order " + std::to_string(order) + " is not an even order in [0, N]");
    }
    profile.averaged[static_cast<std::size_t>(order / 2)] = value;
  }
  if (!by_order.contains(0)) throw ParseError(source + ": profile has no order 0 entry");
  return profile;
}

AveragedProfile read_profile_json(std::istream& is, const std::string& source) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
  auto field = [&](const char* name) -> const json& {
    if (!doc.contains(name)) throw ParseError(source + ": missing field '" + std::string(name) + "'");
    return doc.at(name);
  };
  try {
    if (field("schema_version").get<int>() != kSchemaVersion) {
      throw ParseError(source + ": unsupported schema_version " + field("schema_version").dump());
    }
    if (field("kind").get<std::string>() != "averaged_profile") {
      throw ParseError(source + ": field 'kind': expected averaged_profile");
    }
    const auto& orders = field("orders");
    const auto& values = field("intensities");
    if (!orders.is_array() || !values.is_array() || orders.size() != values.size()) {
      throw ParseError(source + ": fields 'orders' and 'intensities' must be arrays of equal length");
    }
    std::map<int, double> by_order;
    for (std::size_t i = 0; i < orders.size(); ++i) by_order[orders[i].get<int>()] = values[i].get<double>();
    return profile_from_parts(field("n_spins").get<int>(), field("coupling").get<double>(),
                              field("t0").get<double>(), field("k0").get<int>(), field("period").get<double>(),
                              by_order, source);
  } catch (const json::exception& e) {
    throw ParseError(source + ": " + e.what());
  }
}

AveragedProfile read_profile_csv(std::istream& is, const std::string& source) {
  std::map<std::string, std::string> meta;
  std::map<int, double> by_order;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw ParseError(where + ": metadata line needs key=value");
      meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      continue;
    }
    if (!header_seen) {
      if (line != "order,intensity") throw ParseError(where + ": expected header 'order,intensity', got '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError(where + ": expected two fields 'order,intensity'");
    }
    const int order = parse_int(trim(line.substr(0, comma)), where, "order");
    if (by_order.contains(order)) throw ParseError(where + ": field 'order': duplicate order " + std::to_string(order));
    by_order[order] = parse_double(trim(line.substr(comma + 1)), where, "intensity");
  }
  if (!header_seen) throw ParseError(source + ": no 'order,intensity' header");
  auto get = [&](const char* key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ParseError(source + ": missing metadata '" + std::string(key) + "'");
    return it->second;
  };
  if (parse_int(get("schema_version"), source, "schema_version") != kSchemaVersion) {
    throw ParseError(source + ": unsupported schema_version " + get("schema_version"));
  }
  if (get("kind") != "averaged_profile") throw ParseError(source + ": metadata 'kind': expected averaged_profile");
  return profile_from_parts(parse_int(get("n_spins"), source, "n_spins"), parse_double(get("coupling"), source, "coupling"),
                            parse_double(get("t0"), source, "t0"), parse_int(get("k0"), source, "k0"),
                            parse_double(get("period"), source, "period"), by_order, source);
}

}  // namespace

Format parse_format(const std::string& name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw DomainError("unknown format '" + name + "' (expected csv or json)");
}

void write_time_series_csv(std::ostream& os, const TimeSeries& series) {
  const Digits17 digits(os);
  os << "t,order,intensity\n";
  for (const auto& spectrum : series.spectra) {
    for (std::size_t p = 0; p < spectrum.intensities.size(); ++p) {
      os << spectrum.time << ',' << 2 * p << ',' << spectrum.intensities[p] << '\n';
    }
  }
}

void write_time_series_json(std::ostream& os, const TimeSeries& series) {
  json spectra = json::array();
  for (const auto& spectrum : series.spectra) {
    json orders = json::array();
    for (std::size_t p = 0; p < spectrum.intensities.size(); ++p) orders.push_back(2 * p);
    spectra.push_back({{"t", spectrum.time}, {"orders", orders}, {"intensities", spectrum.intensities}});
  }
  const json doc = {{"schema_version", kSchemaVersion},
                    {"kind", "time_series"},
                    {"n_spins", series.system.n_spins},
                    {"coupling", series.system.coupling},
                    {"symmetric", true},
                    {"pruned_mass", series.pruned_mass},
                    {"spectra", spectra}};
  os << doc.dump(2) << '\n';
}

void write_profile_csv(std::ostream& os, const AveragedProfile& profile) {
  const Digits17 digits(os);
  os << "# schema_version=" << kSchemaVersion << '\n'
     << "# kind=averaged_profile\n"
     << "# n_spins=" << profile.system.n_spins << '\n'
     << "# coupling=" << profile.system.coupling << '\n'
     << "# t0=" << profile.t0 << '\n'
     << "# k0=" << profile.k0 << '\n'
     << "# period=" << profile.period << '\n'
     << "# intervals=" << profile.intervals << '\n'
     << "# symmetric=true\n"
     << "order,intensity\n";
  for (std::size_t p = 0; p < profile.averaged.size(); ++p) os << 2 * p << ',' << profile.averaged[p] << '\n';
}

void write_profile_json(std::ostream& os, const AveragedProfile& profile) {
  json orders = json::array();
  for (std::size_t p = 0; p < profile.averaged.size(); ++p) orders.push_back(2 * p);
  const json doc = {{"schema_version", kSchemaVersion},
                    {"kind", "averaged_profile"},
                    {"n_spins", profile.system.n_spins},
                    {"coupling", profile.system.coupling},
                    {"t0", profile.t0},
                    {"k0", profile.k0},
                    {"period", profile.period},
                    {"intervals", profile.intervals},
                    {"last_change", profile.last_change},
                    {"pruned_mass", profile.pruned_mass},
                    {"symmetric", true},
                    {"orders", orders},
                    {"intensities", profile.averaged}};
  os << doc.dump(2) << '\n';
}

AveragedProfile read_profile(std::istream& is, const std::string& source_name) {
  is >> std::ws;
  if (is.peek() == '{') return read_profile_json(is, source_name);
  return read_profile_csv(is, source_name);
}

AveragedProfile read_profile_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  return read_profile(in, path.string());
}

void write_fit_json(std::ostream& os, const ProfileFit& fit, int n_spins) {
  auto block = [&](const ProfileParameters& p) {
    return json{{"half_order", parameters_json(p)},
                {"per_order", parameters_json(p.per_order())},
                {"normalization_residual", normalization_residual(p, fit.j_bar_zero)}};
  };
  const json doc = {{"schema_version", kSchemaVersion},
                    {"kind", "profile_fit"},
                    {"n_spins", n_spins},
                    {"j_bar_zero", fit.j_bar_zero},
                    {"joint", block(fit.joint)},
                    {"staged", block(fit.staged)},
                    {"free_gamma1", parameters_json(fit.free_gamma1)},
                    {"residuals",
                     {{"rms_gamma1", fit.rms_gamma1},
                      {"rms_gamma2", fit.rms_gamma2},
                      {"log_rms_gamma1", fit.log_rms_gamma1},
                      {"log_rms_gamma2", fit.log_rms_gamma2}}},
                    {"points", {{"gamma1", fit.points_gamma1}, {"gamma2", fit.points_gamma2}}}};
  os << doc.dump(2) << '\n';
}

void write_fit_csv(std::ostream& os, const ProfileFit& fit, int n_spins) {
  const Digits17 digits(os);
  os << "# schema_version=" << kSchemaVersion << '\n'
     << "# kind=profile_fit\n"
     << "# n_spins=" << n_spins << '\n'
     << "# j_bar_zero=" << fit.j_bar_zero << '\n'
     << "set,convention,A1,A2,alpha1,alpha2,a1,a2,normalization_residual\n";
  auto row = [&](const char* set, const char* convention, const ProfileParameters& p, double residual) {
    os << set << ',' << convention << ',' << p.a_cap_1 << ',' << p.a_cap_2 << ',' << p.alpha_1 << ',' << p.alpha_2
       << ',' << p.a_1 << ',' << p.a_2 << ',' << residual << '\n';
  };
  for (const auto& [name, p] : {std::pair{"joint", fit.joint}, std::pair{"staged", fit.staged}}) {
    const double residual = normalization_residual(p, fit.j_bar_zero);
    row(name, "half_order", p, residual);
    row(name, "per_order", p.per_order(), residual);
  }
}

}  // namespace mqnmr
