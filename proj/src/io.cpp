#include "collrf/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "collrf/errors.hpp"

namespace collrf::io {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSignificantDigits = 12;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(std::string_view token, std::size_t line) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("not a number: '" + std::string(token) + "'", line);
  if (!std::isfinite(value)) throw ParseError("non-finite value", line);
  return value;
}

std::vector<std::string_view> split_row(std::string_view row) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < row.size()) {
    while (i < row.size() && (row[i] == ',' || row[i] == ' ' || row[i] == '\t' || row[i] == '\r')) ++i;
    if (i >= row.size()) break;
    std::size_t j = i;
    while (j < row.size() && row[j] != ',' && row[j] != ' ' && row[j] != '\t' && row[j] != '\r') ++j;
    out.push_back(row.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Writer>
void replace_file(const std::filesystem::path& path, Writer&& writer) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

json params_json(const SystemParams& p) {
  return json{{"n_emitters", p.n_emitters},
              {"rabi", round_decimal(p.rabi)},
              {"dd_coupling", round_decimal(p.dd_coupling)},
              {"detuning", round_decimal(p.detuning)}};
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const char* where) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw InvalidInput(std::string("unknown key '") + key + "' in " + where);
  }
}

double number_field(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) throw InvalidInput(std::string("missing '") + key + "' in " + where);
  const auto& v = obj.at(key);
  if (!v.is_number()) throw InvalidInput(std::string("'") + key + "' must be a number in " + where);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InvalidInput(std::string("'") + key + "' must be finite");
  return d;
}

SystemParams params_from_json(const json& obj) {
  if (!obj.is_object()) throw InvalidInput("params must be an object");
  reject_unknown(obj, {"n_emitters", "rabi", "dd_coupling", "detuning", "grid"}, "params");
  if (!obj.contains("n_emitters") || !obj.at("n_emitters").is_number_integer())
    throw InvalidInput("'n_emitters' must be an integer");
  const auto n = obj.at("n_emitters").get<long long>();
  if (n < 1 || n > 100000) throw InvalidInput("n_emitters must be >= 1");
  const double detuning = obj.contains("detuning") ? number_field(obj, "detuning", "params") : 0.0;
  return make_params(static_cast<int>(n), number_field(obj, "rabi", "params"),
                     number_field(obj, "dd_coupling", "params"), detuning);
}

json parse_json(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string format_decimal(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                       std::chars_format::general, kSignificantDigits);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return {buf.data(), ptr};
}

double round_decimal(double value) {
  const auto text = format_decimal(value);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

Provenance params_provenance(const SystemParams& p) {
  return {{"n_emitters", std::to_string(p.n_emitters)},
          {"rabi", format_decimal(p.rabi)},
          {"dd_coupling", format_decimal(p.dd_coupling)},
          {"detuning", format_decimal(p.detuning)}};
}

void write_spectrum(std::ostream& out, const SampledSpectrum& s, const Provenance& provenance) {
  if (s.grid.size() != s.values.size()) throw InvalidInput("grid and values differ in length");
  out << "# collrf spectrum\n";
  for (const auto& [key, value] : provenance) out << "# " << key << ": " << value << '\n';
  out << "# tool_version: " << kToolVersion << '\n';
  out << "# columns: offset,intensity\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << format_decimal(s.grid[i]) << ',' << format_decimal(s.values[i]) << '\n';
}

void write_spectrum(const std::filesystem::path& path, const SampledSpectrum& s,
                    const Provenance& provenance) {
  replace_file(path, [&](std::ostream& out) { write_spectrum(out, s, provenance); });
}

SpectrumDocument read_spectrum(std::istream& in) {
  SpectrumDocument doc;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      const auto colon = body.find(':');
      if (colon != std::string::npos) {
        const auto key = trim(std::string_view(body).substr(0, colon));
        if (key != "tool_version" && key != "columns")
          doc.provenance.emplace_back(key, trim(std::string_view(body).substr(colon + 1)));
      }
      continue;
    }
    const auto cols = split_row(line);
    if (cols.size() != 2)
      throw ParseError("expected 2 columns, found " + std::to_string(cols.size()), line_no);
    const double x = parse_number(cols[0], line_no);
    const double y = parse_number(cols[1], line_no);
    if (!doc.spectrum.grid.empty() && !(x > doc.spectrum.grid.back()))
      throw ParseError("offsets must be strictly increasing", line_no);
    doc.spectrum.grid.push_back(x);
    doc.spectrum.values.push_back(y);
  }
  if (in.bad()) throw Error("read failure");
  if (doc.spectrum.empty()) throw InvalidInput("spectrum file has no data rows");
  return doc;
}

SpectrumDocument read_spectrum(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_spectrum(in);
}

void write_lines(std::ostream& out, const LineSpectrum& ls, const Provenance& provenance) {
  json prov = json::object();
  for (const auto& [key, value] : provenance) prov[key] = value;
  prov["tool_version"] = std::string(kToolVersion);
  json lines = json::array();
  for (const auto& l : ls.lines) {
    lines.push_back(json{{"center", round_decimal(l.center)},
                         {"half_width", round_decimal(l.half_width)},
                         {"weight", round_decimal(l.weight)}});
  }
  const json doc{{"model", std::string(to_string(ls.model))},
                 {"params", params_json(ls.params)},
                 {"provenance", prov},
                 {"lines", lines}};
  out << doc.dump(2) << '\n';
}

void write_lines(const std::filesystem::path& path, const LineSpectrum& ls,
                 const Provenance& provenance) {
  replace_file(path, [&](std::ostream& out) { write_lines(out, ls, provenance); });
}

LinesDocument read_lines(std::istream& in) {
  const json doc = parse_json(in);
  if (!doc.is_object()) throw InvalidInput("lines file must be a JSON object");
  reject_unknown(doc, {"model", "params", "provenance", "lines"}, "lines file");
  LinesDocument out;
  if (!doc.contains("model") || !doc.at("model").is_string())
    throw InvalidInput("lines file needs a 'model' string");
  out.spectrum.model = line_model_from_string(doc.at("model").get<std::string>());
  if (!doc.contains("params")) throw InvalidInput("lines file needs 'params'");
  out.spectrum.params = params_from_json(doc.at("params"));
  if (doc.contains("provenance")) {
    for (const auto& [key, value] : doc.at("provenance").items()) {
      if (key == "tool_version") continue;
      out.provenance.emplace_back(key, value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  if (!doc.contains("lines") || !doc.at("lines").is_array())
    throw InvalidInput("lines file needs a 'lines' array");
  for (const auto& item : doc.at("lines")) {
    if (!item.is_object()) throw InvalidInput("each line must be an object");
    reject_unknown(item, {"center", "half_width", "weight"}, "line");
    SpectralLine l{number_field(item, "center", "line"), number_field(item, "half_width", "line"),
                   number_field(item, "weight", "line")};
    if (!(l.half_width > 0.0)) throw InvalidInput("line half_width must be positive");
    if (l.weight < 0.0) throw InvalidInput("line weight must be non-negative");
    out.spectrum.lines.push_back(l);
  }
  return out;
}

LinesDocument read_lines(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_lines(in);
}

void write_params(std::ostream& out, const ParamsFile& pf) {
  json doc = params_json(pf.params);
  if (pf.grid) {
    doc["grid"] = json{{"min", round_decimal(pf.grid->min)},
                       {"max", round_decimal(pf.grid->max)},
                       {"points", pf.grid->points}};
  }
  out << doc.dump(2) << '\n';
}

void write_params(const std::filesystem::path& path, const ParamsFile& pf) {
  replace_file(path, [&](std::ostream& out) { write_params(out, pf); });
}

ParamsFile read_params(std::istream& in) {
  const json doc = parse_json(in);
  ParamsFile out;
  out.params = params_from_json(doc);
  if (doc.contains("grid")) {
    const auto& g = doc.at("grid");
    if (!g.is_object()) throw InvalidInput("'grid' must be an object");
    reject_unknown(g, {"min", "max", "points"}, "grid");
    if (!g.contains("points") || !g.at("points").is_number_integer())
      throw InvalidInput("'grid.points' must be an integer");
    const auto points = g.at("points").get<long long>();
    if (points < 2) throw InvalidInput("'grid.points' must be >= 2");
    GridSpec spec{number_field(g, "min", "grid"), number_field(g, "max", "grid"),
                  static_cast<std::size_t>(points)};
    if (!(spec.min < spec.max)) throw InvalidInput("'grid.min' must be below 'grid.max'");
    out.grid = spec;
  }
  return out;
}

ParamsFile read_params(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_params(in);
}

}  // namespace collrf::io
