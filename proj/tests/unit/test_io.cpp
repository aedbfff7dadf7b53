#include <doctest.h>

#include <algorithm>
#include <clocale>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "collrf/analytic.hpp"
#include "collrf/errors.hpp"
#include "collrf/io.hpp"

using namespace collrf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "collrf_io_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("decimal formatting") {
  CHECK(io::format_decimal(50.0) == "50");
  CHECK(io::format_decimal(0.5) == "0.5");
  CHECK(io::format_decimal(2.0 / 3.0) == "0.666666666667");
  CHECK(io::format_decimal(-1.25e-7) == "-1.25e-07");
  CHECK(io::round_decimal(2.0 / 3.0) == 0.666666666667);
}

TEST_CASE("spectrum round trip") {
  const auto p = make_params(2, 50, 20);
  const auto s = evaluate_spectrum(general_lines(p).lines, linear_grid(-120, 120, 1001));
  std::stringstream buf;
  io::write_spectrum(buf, s, io::params_provenance(p));
  const auto doc = io::read_spectrum(buf);
  REQUIRE(doc.spectrum.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(doc.spectrum.grid[i] == doctest::Approx(s.grid[i]).epsilon(1e-12));
    CHECK(doc.spectrum.values[i] == doctest::Approx(s.values[i]).epsilon(1e-11));
  }
  REQUIRE(doc.provenance.size() == 4);
  CHECK(doc.provenance[0] == std::pair<std::string, std::string>{"n_emitters", "2"});
  CHECK(doc.provenance[2] == std::pair<std::string, std::string>{"dd_coupling", "20"});

  // a second pass is byte-stable
  std::stringstream again;
  io::write_spectrum(again, doc.spectrum, doc.provenance);
  std::stringstream first;
  io::write_spectrum(first, s, io::params_provenance(p));
  CHECK(again.str() == first.str());
}

TEST_CASE("spectrum reader accepts whitespace-separated rows") {
  std::istringstream in("# hand written\n0 1\n1\t2.5\n\n2   3e-1\n");
  const auto doc = io::read_spectrum(in);
  CHECK(doc.spectrum.grid == std::vector<double>{0, 1, 2});
  CHECK(doc.spectrum.values == std::vector<double>{1, 2.5, 0.3});
}

TEST_CASE("spectrum parse errors name the line") {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      io::read_spectrum(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("# h\n0,1\n2,1\n1,1\n") == 4);
  CHECK(line_of("0,1\n1,2,3\n") == 2);
  CHECK(line_of("0,1\n1,abc\n") == 2);
  CHECK(line_of("0,1\n1,nan\n") == 2);
  CHECK(line_of("0,1\n1,inf\n") == 2);
  CHECK(line_of("0,1\n0,1\n") == 2);

  std::istringstream header_only("# collrf spectrum\n# n_emitters: 2\n");
  CHECK_THROWS_AS(io::read_spectrum(header_only), InvalidInput);
}

TEST_CASE("lines round trip") {
  const auto ls = general_lines(make_params(3, 50, 20));
  std::stringstream buf;
  io::write_lines(buf, ls, {{"source", "unit test"}});
  const auto doc = io::read_lines(buf);
  CHECK(doc.spectrum.model == LineModel::general);
  CHECK(doc.spectrum.params.n_emitters == 3);
  CHECK(doc.spectrum.params.dd_coupling == 20.0);
  REQUIRE(doc.spectrum.lines.size() == ls.lines.size());
  for (std::size_t i = 0; i < ls.lines.size(); ++i) {
    CHECK(doc.spectrum.lines[i].center == io::round_decimal(ls.lines[i].center));
    CHECK(doc.spectrum.lines[i].half_width == io::round_decimal(ls.lines[i].half_width));
    CHECK(doc.spectrum.lines[i].weight == io::round_decimal(ls.lines[i].weight));
  }
  REQUIRE(doc.provenance.size() == 1);
  CHECK(doc.provenance[0].second == "unit test");
}

TEST_CASE("lines reader rejects malformed documents") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return io::read_lines(in);
  };
  const std::string params = R"("params":{"n_emitters":1,"rabi":10,"dd_coupling":0})";
  CHECK_NOTHROW(parse(R"({"model":"mollow",)" + params + R"(,"lines":[]})"));
  CHECK_THROWS_AS(parse("{"), InvalidInput);
  CHECK_THROWS_AS(parse(R"({"model":"mollow",)" + params + R"(,"lines":[],"extra":1})"), InvalidInput);
  CHECK_THROWS_AS(parse(R"({"model":"mollow",)" + params + R"(,"lines":[{"center":0,"half_width":-1,"weight":1}]})"),
                  InvalidInput);
  CHECK_THROWS_AS(parse(R"({"model":"sextet",)" + params + R"(,"lines":[]})"), InvalidInput);
}

TEST_CASE("params round trip") {
  io::ParamsFile pf{make_params(2, 50, 20, 0), io::GridSpec{-140, 140, 4001}};
  std::stringstream buf;
  io::write_params(buf, pf);
  const auto back = io::read_params(buf);
  CHECK(back.params.n_emitters == 2);
  CHECK(back.params.rabi == 50.0);
  CHECK(back.params.dd_coupling == 20.0);
  CHECK(back.params.detuning == 0.0);
  REQUIRE(back.grid);
  CHECK(back.grid->points == 4001);
  CHECK(back.grid->min == -140.0);
}

TEST_CASE("params reader validates") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return io::read_params(in);
  };
  CHECK_THROWS_AS(parse(R"({"n_emitters":0,"rabi":1,"dd_coupling":1})"), InvalidInput);
  CHECK_THROWS_AS(parse(R"({"n_emitters":2.5,"rabi":1,"dd_coupling":1})"), InvalidInput);
  CHECK_THROWS_AS(parse(R"({"n_emitters":2,"rabi":-1,"dd_coupling":1})"), InvalidInput);
  CHECK_THROWS_AS(parse(R"({"n_emitters":2,"rabi":1})"), InvalidInput);
  CHECK_THROWS_AS(parse(R"({"n_emitters":2,"rabi":1,"dd_coupling":1,"gamma":2})"), InvalidInput);
  CHECK_THROWS_AS(parse(R"({"n_emitters":2,"rabi":1,"dd_coupling":1,"grid":{"min":1,"max":0,"points":5}})"),
                  InvalidInput);
}

TEST_CASE("file round trip leaves no temporary behind") {
  const auto path = scratch("roundtrip.spectrum.csv");
  const auto s = evaluate_spectrum(general_lines(make_params(1, 10, 0)).lines, linear_grid(-30, 30, 61));
  io::write_spectrum(path, s, {});
  CHECK(io::read_spectrum(path).spectrum.size() == 61);
  for (const auto& entry : fs::directory_iterator(path.parent_path()))
    CHECK(entry.path().extension() != ".tmp");
  CHECK_THROWS_AS(io::read_spectrum(scratch("missing.csv")), Error);
}

TEST_CASE("output does not depend on the C locale") {
  const char* previous = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = previous ? previous : "C";
  const bool switched = std::setlocale(LC_NUMERIC, "de_DE.UTF-8") != nullptr;
  CHECK(io::format_decimal(0.5) == "0.5");
  std::istringstream in("0.5,1.25\n1.5,2.5\n");
  CHECK(io::read_spectrum(in).spectrum.values[0] == 1.25);
  std::setlocale(LC_NUMERIC, saved.c_str());
  if (!switched) MESSAGE("de_DE locale not installed; checked under the default locale only");
}
