#include "polylat/rule_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace polylat {

using nlohmann::json;

namespace {

double parse_double(std::string_view text) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<real>& v) { return v ? format_g17(static_cast<double>(*v)) : ""; }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
void put_le(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw std::runtime_error("truncated binary point file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<T>(v);
}

constexpr char kMagic[8] = {'P', 'L', 'A', 'T', 'P', 'T', 'S', '1'};

}  // namespace

json weights_to_json(const WeightModel& w) {
  if (w.is_product()) {
    const auto g = w.product_weights();
    return {{"type", "product"}, {"params", std::vector<double>(g.begin(), g.end())}};
  }
  json params = json::array();
  for (const auto& [u, g] : w.general_weights()) {
    json coords = json::array();
    for (SubsetMask v = u; v != 0; v &= v - 1) coords.push_back(std::countr_zero(v) + 1);
    params.push_back({{"u", coords}, {"gamma", g}});
  }
  return {{"type", "general"}, {"params", params}};
}

namespace {

WeightModel general_from_params(const json& params, int s) {
  if (!params.is_array()) throw std::invalid_argument("general weights need an array of {u, gamma}");
  std::map<SubsetMask, double> m;
  for (const auto& e : params) {
    SubsetMask u = 0;
    for (const auto& c : e.at("u")) {
      const int j = c.get<int>();
      if (j < 1 || j > s || j > kMaxGeneralWeightDimension) throw std::invalid_argument("weight subset coordinate out of range");
      u |= SubsetMask{1} << (j - 1);
    }
    if (!m.emplace(u, e.at("gamma").get<double>()).second) throw std::invalid_argument("duplicate weight subset");
  }
  return WeightModel::general(s, std::move(m));
}

}  // namespace

WeightModel weights_from_json(const json& j, int s) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "product") {
    auto g = j.at("params").get<std::vector<double>>();
    if (static_cast<int>(g.size()) != s) throw std::invalid_argument("product weights need exactly s values");
    return WeightModel::product(std::move(g));
  }
  if (type == "general") return general_from_params(j.at("params"), s);
  throw std::invalid_argument("unknown weight type '" + type + "'");
}

WeightModel parse_weight_spec(std::string_view spec, int s, const std::filesystem::path& base_dir) {
  if (s < 1) throw std::invalid_argument("dimension must be >= 1");
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("weight spec needs a 'prod:' or 'general:' prefix");
  const std::string kind(spec.substr(0, colon));
  std::string body = trim(spec.substr(colon + 1));

  if (kind == "general") {
    if (body.empty() || body.front() != '@') throw std::invalid_argument("general weights are read from '@file.json'");
    std::filesystem::path path(body.substr(1));
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    const json j = json::parse(read_text(path));
    return j.is_array() ? general_from_params(j, s) : weights_from_json(j, s);
  }
  if (kind != "prod") throw std::invalid_argument("unknown weight kind '" + kind + "'");
  if (body.empty()) throw std::invalid_argument("empty product weight spec");

  std::vector<double> g;
  if (body.front() == '[') {
    if (body.back() != ']') throw std::invalid_argument("unbalanced '[' in weight list");
    body = body.substr(1, body.size() - 2);
  }
  if (body.find(',') != std::string::npos) {
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) g.push_back(parse_double(trim(item)));
    if (static_cast<int>(g.size()) != s) throw std::invalid_argument("explicit weight list must have s entries");
    return WeightModel::product(std::move(g));
  }
  if (const auto star = body.find("*j^"); star != std::string::npos) {
    const double c = parse_double(body.substr(0, star));
    const double k = -parse_double(body.substr(star + 3));  // "c*j^-k"
    for (int j = 1; j <= s; ++j) g.push_back(c * std::pow(static_cast<double>(j), -k));
    return WeightModel::product(std::move(g));
  }
  if (body.size() > 2 && body.ends_with("^j")) {
    const double c = parse_double(body.substr(0, body.size() - 2));
    for (int j = 1; j <= s; ++j) g.push_back(std::pow(c, j));
    return WeightModel::product(std::move(g));
  }
  g.assign(static_cast<std::size_t>(s), parse_double(body));
  return WeightModel::product(std::move(g));
}

json rule_to_json(const RuleFile& f) {
  const RuleSpec& r = f.rule;
  json gens = json::array();
  for (F2Poly q : r.generators) gens.push_back(q.to_hex());
  return {{"version", kRuleFileVersion},
          {"s", r.s},
          {"m", r.m},
          {"mprime", r.mprime},
          {"alpha", r.alpha},
          {"modulus_hex", r.modulus.to_hex()},
          {"generators_hex", gens},
          {"weights", weights_to_json(r.weights)},
          {"provenance",
           {{"tool_version", f.provenance.tool_version},
            {"construction", f.provenance.construction},
            {"tie_break", f.provenance.tie_break},
            {"timestamp", f.provenance.timestamp}}}};
}

RuleFile rule_from_json(const json& j) {
  const int version = j.at("version").get<int>();
  if (version != kRuleFileVersion) throw std::invalid_argument("unsupported rule file version " + std::to_string(version));
  RuleFile f;
  RuleSpec& r = f.rule;
  r.s = j.at("s").get<int>();
  r.m = j.at("m").get<int>();
  r.mprime = j.at("mprime").get<int>();
  r.alpha = j.at("alpha").get<int>();
  r.modulus = F2Poly::from_hex(j.at("modulus_hex").get<std::string>());
  for (const auto& q : j.at("generators_hex")) r.generators.push_back(F2Poly::from_hex(q.get<std::string>()));
  r.weights = weights_from_json(j.at("weights"), r.s);
  if (j.contains("provenance")) {
    const auto& p = j.at("provenance");
    f.provenance.tool_version = p.value("tool_version", std::string(kToolVersion));
    f.provenance.construction = p.value("construction", std::string());
    f.provenance.tie_break = p.value("tie_break", std::string("min_encoding"));
    f.provenance.timestamp = p.value("timestamp", std::string());
  }
  r.validate();
  return f;
}

std::string write_rule(const RuleFile& f) { return rule_to_json(f).dump(2) + "\n"; }

RuleFile read_rule(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("rule file is not valid JSON: ") + e.what());
  }
  try {
    return rule_from_json(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed rule file: ") + e.what());
  }
}

void save_rule_file(const std::filesystem::path& path, const RuleFile& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << write_rule(f);
}

RuleFile load_rule_file(const std::filesystem::path& path) { return read_rule(read_text(path)); }

void write_points_csv(std::ostream& out, const PointSet& points) {
  for (std::size_t n = 0; n < points.size(); ++n) {
    for (int j = 0; j < points.dimension(); ++j) {
      if (j) out << ',';
      out << format_g17(static_cast<double>(points.value(n, j)));
    }
    out << '\n';
  }
}

void write_points_binary(std::ostream& out, const PointSet& points, int m, int mprime) {
  out.write(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(points.dimension()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(mprime));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(points.precision()));
  put_le<std::uint64_t>(out, points.size());
  for (std::uint64_t v : points.numerators()) put_le<std::uint64_t>(out, v);
}

BinaryPoints read_points_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + 8, kMagic)) throw std::runtime_error("not a binary point file");
  BinaryPoints b;
  b.s = static_cast<int>(get_le<std::uint32_t>(in));
  b.m = static_cast<int>(get_le<std::uint32_t>(in));
  b.mprime = static_cast<int>(get_le<std::uint32_t>(in));
  const int precision = static_cast<int>(get_le<std::uint32_t>(in));
  const auto count = get_le<std::uint64_t>(in);
  b.points = PointSet(count, b.s, precision);
  for (std::size_t n = 0; n < count; ++n) {
    for (int j = 0; j < b.s; ++j) b.points.numerator(n, j) = get_le<std::uint64_t>(in);
  }
  return b;
}

void write_study_csv(std::ostream& out, const ErrorStudy& study) {
  out << "m,N,mprime,B,mse_mean,mse_stderr,rms_err,slope_B_full,slope_B_half,slope_rms_full,slope_rms_half,"
         "slope_mse_full,slope_mse_half\n";
  const auto slope = [](real v) { return format_g17(static_cast<double>(v)); };
  std::string tail = slope(study.b_slope.full) + "," + slope(study.b_slope.half) + "," + slope(study.rms_slope.full) +
                     "," + slope(study.rms_slope.half) + ",";
  tail += study.mse_slope ? slope(study.mse_slope->full) + "," + slope(study.mse_slope->half) : std::string(",");
  for (const auto& r : study.records) {
    out << r.m << ',' << r.n << ',' << r.mprime << ',' << format_g17(static_cast<double>(r.b)) << ','
        << format_optional(r.mse_mean) << ',' << format_optional(r.mse_stderr) << ','
        << format_g17(static_cast<double>(r.rms_error)) << ',' << tail << '\n';
  }
}

}  // namespace polylat
