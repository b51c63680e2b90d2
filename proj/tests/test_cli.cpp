#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
  const char* path = std::getenv("TRAYREC_CLI");
  REQUIRE(path != nullptr);
  return path;
}

int run(const std::string& command) {
  const int rc = std::system(command.c_str());
  return rc == -1 ? -1 : (rc >> 8) & 0xff;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("trayrec_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int value = 0;
    return value;
  }
};

std::string generate_dataset(const fs::path& dir, int trigger_categories = 1,
                             double mixed_fraction = 0.34) {
  std::ostringstream mixed;
  mixed << mixed_fraction;
  const std::string cmd = cli_path() + " generate --out " + dir.string() +
                          " --categories 2 --classes-per-category 4 --trigger-categories " +
                          std::to_string(trigger_categories) + " --dim 16 --trays 6" +
                          " --regions-per-tray 3 --mixed-fraction " + mixed.str() +
                          " --mixed-items 3 --seed 5 2>/dev/null";
  return cmd;
}

}  // namespace

TEST_CASE("cli generate writes the dataset files") {
  TempDir dir;
  REQUIRE(run(generate_dataset(dir.path)) == 0);
  CHECK(fs::exists(dir.path / "manifest.json"));
  CHECK(fs::exists(dir.path / "features.tsv"));
  int trays = 0;
  for (const auto& entry : fs::directory_iterator(dir.path / "trays")) {
    (void)entry;
    ++trays;
  }
  CHECK(trays == 6);
}

TEST_CASE("cli generate is deterministic") {
  TempDir a;
  TempDir b;
  REQUIRE(run(generate_dataset(a.path)) == 0);
  REQUIRE(run(generate_dataset(b.path)) == 0);
  CHECK(slurp(a.path / "manifest.json") == slurp(b.path / "manifest.json"));
  CHECK(slurp(a.path / "features.tsv") == slurp(b.path / "features.tsv"));
  CHECK(slurp(a.path / "trays" / "tray_00000.json") == slurp(b.path / "trays" / "tray_00000.json"));
}

TEST_CASE("cli recognize emits one JSON line per tray") {
  TempDir dir;
  REQUIRE(run(generate_dataset(dir.path)) == 0);
  const fs::path out = dir.path / "pred.jsonl";
  const std::string cmd = cli_path() + " recognize --meal " +
                          (dir.path / "manifest.json").string() + " --features " +
                          (dir.path / "features.tsv").string() + " --trays " +
                          (dir.path / "trays").string() + "/*.json --method hierarchical --out " +
                          out.string() + " 2>/dev/null";
  REQUIRE(run(cmd) == 0);

  std::ifstream in(out);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const json doc = json::parse(line);
    CHECK(doc.contains("photo_id"));
    CHECK(doc.contains("predicted_items"));
    CHECK(doc.contains("region_results"));
    CHECK(doc.at("nutrition").contains("energy_kcal"));
    ++lines;
  }
  CHECK(lines == 6);
}

TEST_CASE("cli recognize validates theta usage") {
  TempDir dir;
  REQUIRE(run(generate_dataset(dir.path)) == 0);
  const std::string base = cli_path() + " recognize --meal " +
                           (dir.path / "manifest.json").string() + " --features " +
                           (dir.path / "features.tsv").string() + " --trays " +
                           (dir.path / "trays").string() + "/*.json";
  CHECK(run(base + " --method multi >/dev/null 2>&1") == 1);
  CHECK(run(base + " --method single --theta 0.5 >/dev/null 2>&1") == 1);
  CHECK(run(base + " --method multi --theta 0.5 >/dev/null 2>&1") == 0);
}

TEST_CASE("cli single and hierarchical agree on a trigger-free menu") {
  TempDir dir;
  REQUIRE(run(generate_dataset(dir.path, 0, 0.0)) == 0);
  const std::string base = cli_path() + " recognize --meal " +
                           (dir.path / "manifest.json").string() + " --features " +
                           (dir.path / "features.tsv").string() + " --trays " +
                           (dir.path / "trays").string() + "/*.json";
  REQUIRE(run(base + " --method single --out " + (dir.path / "s.jsonl").string() +
              " 2>/dev/null") == 0);
  REQUIRE(run(base + " --method hierarchical --out " + (dir.path / "h.jsonl").string() +
              " 2>/dev/null") == 0);
  CHECK(slurp(dir.path / "s.jsonl") == slurp(dir.path / "h.jsonl"));
}

TEST_CASE("cli evaluate scores a predictions file") {
  TempDir dir;
  REQUIRE(run(generate_dataset(dir.path)) == 0);

  // Predictions copied from ground truth: a perfect recognizer.
  const fs::path pred = dir.path / "pred.jsonl";
  {
    std::ofstream out(pred);
    for (int i = 0; i < 6; ++i) {
      const std::string name = "tray_0000" + std::to_string(i) + ".json";
      const json tray = json::parse(slurp(dir.path / "trays" / name));
      const json line = {{"photo_id", tray.at("photo_id")},
                         {"predicted_items", tray.at("ground_truth")}};
      out << line.dump() << "\n";
    }
  }
  const fs::path report_path = dir.path / "report.json";
  const fs::path scatter_path = dir.path / "scatter.csv";
  const std::string cmd = cli_path() + " evaluate --meal " +
                          (dir.path / "manifest.json").string() + " --predictions " +
                          pred.string() + " --trays " + (dir.path / "trays").string() +
                          "/*.json --scatter " + scatter_path.string() + " --out " +
                          report_path.string() + " 2>/dev/null";
  REQUIRE(run(cmd) == 0);

  const json report = json::parse(slurp(report_path));
  CHECK(report.at("precision") == 1.0);
  CHECK(report.at("recall") == 1.0);
  CHECK(report.at("f_measure") == 1.0);
  CHECK(report.at("n_photos") == 6);
  CHECK(report.at("mae").at("energy_kcal").at("mae") == 0.0);

  std::istringstream scatter(slurp(scatter_path));
  std::string line;
  int rows = -1;  // header
  while (std::getline(scatter, line)) {
    if (!line.empty()) {
      ++rows;
    }
  }
  CHECK(rows == 6);
}

TEST_CASE("cli evaluate insists on ground truth") {
  TempDir dir;
  REQUIRE(run(generate_dataset(dir.path)) == 0);
  // Strip the ground truth from one tray.
  const fs::path tray_path = dir.path / "trays" / "tray_00000.json";
  json tray = json::parse(slurp(tray_path));
  tray.erase("ground_truth");
  {
    std::ofstream out(tray_path);
    out << tray.dump(2) << "\n";
  }
  const fs::path pred = dir.path / "pred.jsonl";
  {
    std::ofstream out(pred);
    for (int i = 0; i < 6; ++i) {
      out << json{{"photo_id", "tray_0000" + std::to_string(i)},
                  {"predicted_items", json::array()}}
                 .dump()
          << "\n";
    }
  }
  const std::string cmd = cli_path() + " evaluate --meal " +
                          (dir.path / "manifest.json").string() + " --predictions " +
                          pred.string() + " --trays " + (dir.path / "trays").string() +
                          "/*.json >/dev/null 2>&1";
  CHECK(run(cmd) == 1);
}

TEST_CASE("cli tune cross-validates and reports per-fold thetas") {
  TempDir dir;
  REQUIRE(run(generate_dataset(dir.path)) == 0);
  const fs::path out = dir.path / "tune.json";
  const std::string base = cli_path() + " tune --meal " +
                           (dir.path / "manifest.json").string() + " --features " +
                           (dir.path / "features.tsv").string() + " --trays " +
                           (dir.path / "trays").string() + "/*.json --grid-step 0.05 --seed 3";
  REQUIRE(run(base + " --out " + out.string() + " 2>/dev/null") == 0);
  const json doc = json::parse(slurp(out));
  REQUIRE(doc.at("folds").size() == 3);
  for (const json& fold : doc.at("folds")) {
    CHECK(fold.contains("theta"));
    CHECK(fold.at("report").contains("f_measure"));
  }
  CHECK(doc.at("pooled").contains("f_measure"));

  CHECK(run(base + " --folds 1 >/dev/null 2>&1") == 1);
}

TEST_CASE("cli reads options from a config file with flags taking precedence") {
  TempDir dir;
  REQUIRE(run(generate_dataset(dir.path)) == 0);
  const fs::path cfg = dir.path / "trayrec.toml";
  {
    std::ofstream out(cfg);
    out << "[recognize]\n"
        << "meal = \"" << (dir.path / "manifest.json").string() << "\"\n"
        << "features = \"" << (dir.path / "features.tsv").string() << "\"\n"
        << "method = \"single\"\n";
  }
  const std::string trays = (dir.path / "trays").string() + "/*.json";
  REQUIRE(run(cli_path() + " --config " + cfg.string() + " recognize --trays " + trays +
              " --out " + (dir.path / "from_config.jsonl").string() + " 2>/dev/null") == 0);
  REQUIRE(run(cli_path() + " --config " + cfg.string() + " recognize --method hierarchical" +
              " --trays " + trays + " --out " + (dir.path / "flag_wins.jsonl").string() +
              " 2>/dev/null") == 0);
  REQUIRE(run(cli_path() + " recognize --meal " + (dir.path / "manifest.json").string() +
              " --features " + (dir.path / "features.tsv").string() +
              " --method hierarchical --trays " + trays + " --out " +
              (dir.path / "no_config.jsonl").string() + " 2>/dev/null") == 0);

  CHECK(slurp(dir.path / "flag_wins.jsonl") == slurp(dir.path / "no_config.jsonl"));
  CHECK(slurp(dir.path / "from_config.jsonl") != slurp(dir.path / "flag_wins.jsonl"));
}

TEST_CASE("cli reports missing files as I/O errors") {
  TempDir dir;
  const std::string cmd = cli_path() + " recognize --meal missing.json --features missing.tsv" +
                          " --trays nothing.json --method single >/dev/null 2>&1";
  CHECK(run(cmd) == 2);
}
