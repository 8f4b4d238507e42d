#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "dla/run.hpp"

using namespace dla;

namespace {

const std::string kDataDir = std::string(DLA_SOURCE_DIR) + "/data";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DLA_BENCH_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunOptions fast_options(const std::string& out_dir) {
  RunOptions opt;
  opt.data_dir = kDataDir;
  opt.out_dir = out_dir;
  opt.config.htm.mc_runs = 20;  // keep the unit suite quick
  return opt;
}

}  // namespace

TEST_CASE("resolve_dataset knows the bundled names") {
  auto iris = resolve_dataset("iris", "data");
  CHECK(iris.path == "data/iris.csv");
  CHECK(iris.schema.label_column == 4);
  CHECK(iris.htm_minimum_overlap == 90);
  auto heart = resolve_dataset("heart", "data");
  CHECK(heart.htm_minimum_overlap == 210);
  auto ws = resolve_dataset("wordsim", "data");
  CHECK(ws.kind == DatasetSpec::Kind::WordSimilarity);
  CHECK(ws.htm_minimum_overlap == 123);
  auto path = resolve_dataset("/tmp/foo.csv", "data");
  CHECK(path.name == "foo");
  CHECK(path.accepted_shapes.empty());
}

TEST_CASE("load_dataset resolves quantization per dataset") {
  RunConfig cfg;
  auto iris = load_dataset(resolve_dataset("iris", kDataDir), cfg);
  CHECK(iris.rows.size() == 150);
  CHECK(iris.columns == 5);
  CHECK(iris.quantizers[0].scale == doctest::Approx(10.0));
  int max_val = 0;
  for (const auto& row : iris.rows) {
    for (std::size_t f = 0; f < 4; ++f) max_val = std::max(max_val, row[f]);
  }
  CHECK(max_val == 79);

  RunConfig cfg2;
  auto heart = load_dataset(resolve_dataset("heart", kDataDir), cfg2);
  CHECK(heart.columns == 14);
  CHECK(cfg2.htm.minimum_overlap == 210);
  int hmax = 0;
  for (const auto& row : heart.rows) {
    for (int v : row) hmax = std::max(hmax, v);
  }
  CHECK(hmax == 199);  // min-max lands on learning_extent - 1

  RunConfig cfg3;
  auto ws = load_dataset(resolve_dataset("wordsim", kDataDir), cfg3);
  CHECK(ws.columns == 2);
  CHECK(ws.rows.size() == 353);
  CHECK(ws.quantizers[1].scale == doctest::Approx(10.0));  // score column x10
}

TEST_CASE("exclude_class_column drops the label column") {
  RunConfig cfg;
  cfg.exclude_class_column = true;
  auto iris = load_dataset(resolve_dataset("iris", kDataDir), cfg);
  CHECK(iris.columns == 4);
}

TEST_CASE("run_experiment1 writes the results table") {
  const auto out = fresh_dir("dla_exp1");
  auto opt = fast_options(out.string());
  opt.datasets = {"iris"};
  opt.algo = "both";
  auto rows = run_experiment1(opt);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].algorithm == "dla");
  CHECK(rows[1].algorithm == "htm");
  CHECK(rows[0].config_hash == rows[1].config_hash);

  const std::string table = slurp((out / "experiment1_results.csv").string());
  CHECK(table.find("dataset,algorithm,mapca_percent,seed,config_hash") == 0);
  CHECK(table.find("iris,dla,") != std::string::npos);
  CHECK(table.find("iris,htm,") != std::string::npos);

  // report values match the table to 2 decimals
  char expect[32];
  std::snprintf(expect, sizeof(expect), "%.2f", rows[0].mapca_percent);
  CHECK(table.find(std::string("iris,dla,") + expect) != std::string::npos);
  CHECK(rows[0].report.find(std::string("mapca=") + expect) != std::string::npos);
}

TEST_CASE("run_experiment1 rejects unknown algorithms and missing files") {
  auto opt = fast_options(fresh_dir("dla_exp1_err").string());
  opt.algo = "nope";
  CHECK_THROWS_AS(run_experiment1(opt), io_error);

  auto opt2 = fast_options(fresh_dir("dla_exp1_err2").string());
  opt2.datasets = {"/does/not/exist.csv"};
  CHECK_THROWS_AS(run_experiment1(opt2), io_error);
}

TEST_CASE("run_experiment2 emits matrices and an index") {
  const auto out = fresh_dir("dla_exp2");
  auto opt = fast_options(out.string());
  opt.datasets = {"iris"};
  opt.extents = {10, 20};
  auto outputs = run_experiment2(opt);
  REQUIRE(outputs.size() == 2);
  CHECK(outputs[0].extent == 10);
  CHECK(outputs[1].extent == 20);
  CHECK(std::filesystem::exists(out / "experiment2_extent_010.csv"));
  CHECK(std::filesystem::exists(out / "experiment2_extent_020.csv"));
  const std::string index = slurp((out / "experiment2_index.csv").string());
  CHECK(index.find("extent,file,rows,cols") == 0);
  CHECK(index.find("10,experiment2_extent_010.csv") != std::string::npos);
}

TEST_CASE("repeated runs are byte-identical") {
  const auto out_a = fresh_dir("dla_det_a");
  const auto out_b = fresh_dir("dla_det_b");
  for (const auto& out : {out_a, out_b}) {
    auto opt = fast_options(out.string());
    opt.datasets = {"iris"};
    opt.algo = "both";
    run_experiment1(opt);
    auto opt2 = fast_options(out.string());
    opt2.datasets = {"iris"};
    opt2.extents = {30, 60};
    run_experiment2(opt2);
  }
  for (const char* name :
       {"experiment1_results.csv", "manifest_experiment1.txt",
        "experiment2_extent_030.csv", "experiment2_extent_060.csv",
        "experiment2_index.csv", "manifest_experiment2.txt"}) {
    CHECK(slurp((out_a / name).string()) == slurp((out_b / name).string()));
  }
}

TEST_CASE("cli: successful run exits 0 and writes outputs") {
  const auto out = fresh_dir("dla_cli_ok");
  const int rc = run_cli("--dataset iris --algo dla --experiment 1 --out " +
                         out.string() + " --data-dir " + kDataDir +
                         " --seed 42");
  CHECK(rc == 0);
  CHECK(std::filesystem::exists(out / "experiment1_results.csv"));
}

TEST_CASE("cli: usage and I/O errors exit 2") {
  CHECK(run_cli("--algo invalid") == 2);
  CHECK(run_cli("--dataset /missing/file.csv --out " +
                fresh_dir("dla_cli_miss").string()) == 2);
  CHECK(run_cli("--config /missing/config.txt") == 2);
}

TEST_CASE("cli: experiment 2 with explicit extents") {
  const auto out = fresh_dir("dla_cli_e2");
  const int rc = run_cli("--dataset iris --experiment 2 --extents 10,20 --out " +
                         out.string() + " --data-dir " + kDataDir);
  CHECK(rc == 0);
  CHECK(std::filesystem::exists(out / "experiment2_extent_010.csv"));
  CHECK(std::filesystem::exists(out / "experiment2_extent_020.csv"));
  CHECK(!std::filesystem::exists(out / "experiment2_extent_050.csv"));
}
