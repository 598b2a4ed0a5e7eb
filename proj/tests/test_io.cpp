#include "rellich/rellich.hpp"

#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <filesystem>
#include <sstream>

using namespace rellich;

namespace {

// Well-formedness oracle: throws on malformed XML.
boost::property_tree::ptree parse_xml(const std::string& text) {
  std::istringstream in(text);
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(in, tree);
  return tree;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rellich_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Format, ShortestRoundTrip) {
  Rng rng(1);
  for (int k = 0; k < 2000; ++k) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-300.0, 300.0));
    EXPECT_EQ(parse_number(format_number(v)), v);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.5625), "1.5625");
  EXPECT_EQ(format_number(infinity), "inf");
  EXPECT_TRUE(std::isinf(parse_number("inf")));
  EXPECT_THROW(parse_number("1,5"), PreconditionError);
  EXPECT_THROW(parse_number("abc"), PreconditionError);
}

TEST(Csv, RoundTripWithQuoting) {
  CsvTable t("demo", {"name", "value", "flag"});
  t.add_row({"plain", 1.25, true});
  t.add_row({"has,comma", -3.0, false});
  t.add_row({"has \"quote\"", 1e-300, true});
  const CsvData d = parse_csv(t.str());
  ASSERT_EQ(d.header, t.header());
  ASSERT_EQ(d.rows, t.rows());
  EXPECT_EQ(d.column("value"), 1);
  EXPECT_EQ(d.column("missing"), -1);
  EXPECT_THROW(t.add_row({1.0}), PreconditionError);
  EXPECT_THROW(parse_csv(""), PreconditionError);
}

TEST(Files, AtomicWriteReplacesContent) {
  const auto dir = scratch("atomic");
  const auto path = dir / "nested" / "out.txt";
  write_atomic(path, "first");
  write_atomic(path, "second");
  EXPECT_EQ(read_file(path), "second");
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
  EXPECT_THROW(read_file(dir / "absent.txt"), PreconditionError);
}

TEST(Config, SectionsCommentsAndOverrides) {
  const auto s = parse_config_text("seed = 9  # comment\n[model]\nN = 6\nc = 0, 2.5\n[sweep]\nq = 2, inf\n");
  const RunConfig c = make_config("decay", s);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.dimension, 6);
  EXPECT_EQ(c.couplings, (std::vector<double>{0.0, 2.5}));
  EXPECT_TRUE(std::isinf(c.q_list[1]));
  const Json j = c.to_json();
  EXPECT_EQ(j["sweep"]["q"][1], "inf");
  EXPECT_EQ(j["N"], 6);
}

TEST(Config, ErrorsAreConfigErrors) {
  EXPECT_THROW(parse_config_text("[model]\nNN = 5\n"), ConfigError);
  EXPECT_THROW(parse_config_text("[model\nN = 5\n"), ConfigError);
  EXPECT_THROW(parse_config_text("just text\n"), ConfigError);
  EXPECT_THROW(make_config("rellich", {{"model.N", "4"}}), ConfigError);
  EXPECT_THROW(make_config("decay", {{"model.c", "1.6"}}), ConfigError);
  EXPECT_NO_THROW(make_config("decay", {{"model.c", "1.6"}, {"run.allow_supercritical", "true"}}));
  EXPECT_THROW(make_config("decay", {{"sweep.t", ""}}), ConfigError);
  EXPECT_THROW(make_config("decay", {{"grid.m", "5"}}), ConfigError);
  EXPECT_THROW(make_config("decay", {{"run.seed", "-1"}}), ConfigError);
  EXPECT_THROW(make_config("decay", {{"grid.spacing", "cubic"}}), ConfigError);
  EXPECT_THROW(make_config("nonsense", {}), ConfigError);
}

TEST(Plot, EmptyTableGivesWellFormedEmptyAxes) {
  CsvData d;
  d.header = {"t", "upper"};
  PlotSpec spec;
  spec.x_column = "t";
  spec.y_columns = {"upper"};
  const std::string svg = render_svg(d, spec);
  EXPECT_NO_THROW(parse_xml(svg));
  EXPECT_EQ(svg.find("<polyline"), std::string::npos);
}

TEST(Plot, GuideLineCarriesRequestedSlope) {
  CsvTable t("decay", {"t", "upper"});
  for (double x : {0.1, 0.2, 0.5, 1.0}) t.add_row({x, std::pow(x, -0.625)});
  PlotSpec spec;
  spec.title = "decay & <slopes>";
  spec.x_column = "t";
  spec.y_columns = {"upper"};
  spec.guide_slopes = {-0.625};
  const std::string svg = render_svg(parse_csv(t.str()), spec);
  EXPECT_NE(svg.find("class=\"guide\" data-slope=\"-0.625\""), std::string::npos);
  const auto tree = parse_xml(svg);
  EXPECT_EQ(tree.get<std::string>("svg.<xmlattr>.xmlns"), "http://www.w3.org/2000/svg");
}

TEST(Plot, MissingColumnRejected) {
  CsvData d;
  d.header = {"t"};
  PlotSpec spec;
  spec.x_column = "t";
  spec.y_columns = {"nope"};
  EXPECT_THROW(render_svg(d, spec), PreconditionError);
}

// A small off-diagonal run writes CSV, SVG and a manifest naming them all.
TEST(Experiment, OffdiagArtifactsParseAndManifestIsComplete) {
  const RunConfig cfg = make_config("offdiag", {{"grid.n", "256"}, {"sweep.samples", "5"}});
  const ExperimentOutput out = run_experiment(cfg);
  const auto root = scratch("offdiag");
  const auto manifest_path = write_experiment(out, root);
  const Json m = Json::parse(read_file(manifest_path));
  EXPECT_EQ(m["experiment"], "offdiag");
  EXPECT_TRUE(m.contains("hashes"));
  EXPECT_TRUE(m.contains("wall_clock_seconds"));
  for (const auto& a : m["artifacts"]) {
    const auto file = root / "offdiag" / a.get<std::string>();
    ASSERT_TRUE(std::filesystem::exists(file)) << file;
    if (file.extension() == ".svg") EXPECT_NO_THROW(parse_xml(read_file(file))) << file;
    if (file.extension() == ".csv") EXPECT_FALSE(parse_csv(read_file(file)).header.empty());
  }
  std::size_t csv_count = 0;
  for (const auto& e : std::filesystem::directory_iterator(root / "offdiag"))
    if (e.path().extension() == ".csv") ++csv_count;
  EXPECT_EQ(csv_count, out.tables.size());
}

TEST(Experiment, RellichTableCarriesTarget) {
  const RunConfig cfg = make_config("rellich", {{"grid.n", "400"}, {"sweep.ell_max", "2"}});
  const ExperimentOutput out = run_experiment(cfg);
  bool found = false;
  for (const auto& t : out.tables) {
    const CsvData d = parse_csv(t.str());
    const int col = d.column("target");
    if (col < 0) continue;
    for (const auto& row : d.rows) {
      EXPECT_EQ(row[col], "1.5625");
      found = true;
    }
  }
  EXPECT_TRUE(found);
}
