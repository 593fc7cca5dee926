#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "bergelab/corpus/corpus.hpp"
#include "bergelab/report/report.hpp"

using namespace bergelab;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("bergelab-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Csv, Quoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  CsvWriter w({"k", "v"});
  w.row({"1;2", "x,y"});
  EXPECT_EQ(w.str(), "k,v\n1;2,\"x,y\"\n");
  EXPECT_THROW(w.row({"only"}), IoError);
}

TEST(Csv, ScalarText) {
  EXPECT_EQ(scalar_text(0.1), "0.1");
  EXPECT_EQ(scalar_text(0.25), "0.25");
  EXPECT_EQ(std::stod(scalar_text(1.0 / 3)), 1.0 / 3);
  EXPECT_EQ(scalar_text(kInf), "inf");
  EXPECT_EQ(scalar_text(ExactScalar(Rational(1, 2))), "1/2");
  EXPECT_EQ(ext_text(ExtReal<double>::pos_inf()), ExtReal<double>::pos_inf().str());
  EXPECT_EQ(join_scalars(std::vector<double>{0, 0.5, 1}), "0;0.5;1");
}

TEST(OutputDir, CommitIsAtomicAndRecordsFiles) {
  fs::path target = scratch("commit");
  fs::create_directories(target);
  write_text_file(target / "stale.txt", "old");
  {
    OutputDir out(target);
    out.write("a.csv", "x\n1\n");
    out.write("b.json", "{}\n");
    EXPECT_TRUE(fs::exists(target / "stale.txt"));
    EXPECT_FALSE(fs::exists(target / "a.csv"));
    out.commit(Json{{"command", "test"}});
  }
  EXPECT_FALSE(fs::exists(target / "stale.txt"));
  EXPECT_EQ(slurp(target / "a.csv"), "x\n1\n");
  fs::path partial = target;
  partial += ".partial";
  EXPECT_FALSE(fs::exists(partial));
  Json meta = Json::parse(slurp(target / "metadata.json"));
  EXPECT_EQ(meta["command"], "test");
  EXPECT_EQ(meta["files"], Json::array({"a.csv", "b.json"}));
  EXPECT_TRUE(meta.contains("timestamp"));
  fs::remove_all(target);
}

TEST(OutputDir, AbandonedRunLeavesNothing) {
  fs::path target = scratch("abandon");
  {
    OutputDir out(target);
    out.write("a.csv", "x\n");
  }
  fs::path partial = target;
  partial += ".partial";
  EXPECT_FALSE(fs::exists(target));
  EXPECT_FALSE(fs::exists(partial));
}

TEST(PlotData, FeasibilityBoundaries) {
  PlotData d = feasibility_boundaries(2, 3, Grid1D<double>(0, 4, 1));
  auto rows = lines_of(d.str());
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0], "series,x,value");
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> series;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto c1 = rows[i].find(','), c2 = rows[i].rfind(',');
    series[rows[i].substr(0, c1)].push_back({rows[i].substr(c1 + 1, c2 - c1 - 1), rows[i].substr(c2 + 1)});
  }
  ASSERT_EQ(series.size(), 4u);
  auto bb = series[variant_name(InventoryVariant::BoundedOrdersBoundedCapacity)];
  ASSERT_EQ(bb.size(), 4u);
  EXPECT_EQ(bb[0].second, "2");
  EXPECT_EQ(bb[2].second, "1");
  EXPECT_EQ(bb[3].second, "0");
  auto ub = series[variant_name(InventoryVariant::UnlimitedOrdersBoundedCapacity)];
  ASSERT_EQ(ub.size(), 4u);
  EXPECT_EQ(ub[0].second, "3");
  auto bu = series[variant_name(InventoryVariant::BoundedOrdersUnlimitedCapacity)];
  ASSERT_EQ(bu.size(), 5u);
  for (const auto& [x, v] : bu) EXPECT_EQ(v, "2");
  auto uu = series[variant_name(InventoryVariant::UnlimitedOrdersUnlimitedCapacity)];
  ASSERT_EQ(uu.size(), 5u);
  for (const auto& [x, v] : uu) EXPECT_EQ(v, "inf");
  EXPECT_THROW(feasibility_boundaries(kInf, 3, Grid1D<double>(0, 4, 1)), ValidationError);
}

TEST(PlotData, EmptyProfileIsHeaderOnly) {
  ValueProfile<double> empty;
  EXPECT_EQ(plot_data(empty).str(), "series,x,value\n");
  EXPECT_EQ(profile_csv(empty), "x,value,argmin_list\n");
  fs::path target = scratch("plot");
  fs::create_directories(target);
  emit_plot_data(plot_data(empty), target / "plot.csv");
  EXPECT_EQ(slurp(target / "plot.csv"), "series,x,value\n");
  fs::remove_all(target);
}

TEST(PlotData, VasquezProfileIsAStep) {
  auto p = compile_problem<double>(corpus_instantiate("vasquez").cases.at(0).problem);
  auto prof = compute_profile(p, Grid1D<double>(-0.5, 0.5, 0.25), Grid1D<double>(0, 400, 0.01), 1e-9, 1);
  auto rows = lines_of(plot_data(prof).str());
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[1], "value,-0.5,1");
  EXPECT_EQ(rows[3], "value,0,1");
  for (std::size_t i = 4; i < rows.size(); ++i) {
    double v = std::stod(rows[i].substr(rows[i].rfind(',') + 1));
    EXPECT_NEAR(v, 0.0, 1e-9) << rows[i];
  }
}

TEST(Determinism, OutputsIndependentOfWorkers) {
  auto p = compile_problem<double>(corpus_instantiate("optimum-counterexample").cases.at(0).problem);
  Grid1D<double> xg(0, 1, 0.05), yg(0, 1, 0.01);
  auto a = profile_csv(compute_profile(p, xg, yg, 1e-9, 1));
  auto b = profile_csv(compute_profile(p, xg, yg, 1e-9, 5));
  EXPECT_EQ(a, b);
  InventoryModel m;
  m.L = 2;
  m.M = 4;
  m.demand = {{0, 0.5}, {1, 0.5}};
  Grid1D<double> g(0, 4, 0.5);
  EXPECT_EQ(value_table_csv(backward_induction(m, 3, g, 0.5, 1)), value_table_csv(backward_induction(m, 3, g, 0.5, 3)));
}

TEST(Tables, ValueTableRows) {
  InventoryModel m;
  m.L = 2;
  m.M = 2;
  m.demand = {{0, 0.5}, {1, 0.5}};
  auto rows = lines_of(value_table_csv(backward_induction(m, 2, Grid1D<double>(0, 2, 1), 1, 1)));
  ASSERT_EQ(rows.size(), 1u + 3 * 3);
  EXPECT_EQ(rows[0], "stage,x,value,order");
  EXPECT_EQ(rows[1], "0,0,0,");
}

TEST(Tables, VerdictSummary) {
  auto c = corpus_instantiate("vasquez").cases.at(0);
  auto p = compile_problem<double>(c.problem);
  auto params = fixture_params<double>(c, 1);
  auto rows = lines_of(verdict_summary_csv(std::vector<Verdict<double>>{check_lisc(p, 0.0, params), check_fptusc(p, 0.0, params)}));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "property,point,status,gap,delta_min,y_step,depth");
  EXPECT_EQ(rows[1].rfind("lisc,0,Violated,", 0), 0u) << rows[1];
  EXPECT_EQ(rows[2].rfind("fptusc,0,NoViolationFound,,", 0), 0u) << rows[2];
}
