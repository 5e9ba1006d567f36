#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "adsflux/mesh.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("adsflux_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  std::string cmd = std::string(ADSFLUX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

// small enough to run in a few seconds
json small_config() {
  return json::parse(R"({
    "samples": {"metric": 20, "fiber": 20, "sasaki": 5, "foliation": 5, "squares": 3, "lagrangian": 20},
    "loops": ["a1"],
    "curvature": {"eps": [0.02]},
    "harmonic": {"mesh_resolution": 8, "durations": [0.05], "flux_panels": 8, "holonomy_samples": 200},
    "hamiltonian": {"duration": 0.1, "ode_step": 0.005, "holonomy_samples": 100}
  })");
}

}  // namespace

TEST(Cli, SchemaErrorsExitTwo) {
  fs::path d = scratch("schema");
  auto cfg = [&](const std::string& name, const std::string& text) {
    return "verify --out " + (d / "o").string() + " --config " + write_config(d, name, text).string();
  };
  EXPECT_EQ(run(cfg("unknown.json", R"({"samples": {"metric": 10, "colour": 3}})")), 2);
  EXPECT_EQ(run(cfg("malformed.json", R"({"samples": )")), 2);
  EXPECT_EQ(run(cfg("type.json", R"({"loops": "a1"})")), 2);
  EXPECT_EQ(run(cfg("negative.json", R"({"tolerances": {"metric": -1}})")), 2);
  EXPECT_EQ(run(cfg("word.json", R"({"loops": ["a3"]})")), 2);
  EXPECT_EQ(run(cfg("det.json", R"({"representation": {"kind": "conjugate", "beta": [1, 1, 1, 1]}})")), 2);
  EXPECT_EQ(run("verify --config " + (d / "missing.json").string()), 2);
  EXPECT_EQ(run("verify --tol-scale -1 --out " + (d / "o").string()), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_FALSE(fs::exists(d / "o" / "report.json"));
}

TEST(Cli, ToleranceZeroFailsEveryCheck) {
  fs::path d = scratch("tol0");
  json c = small_config();
  json tol = json::object();
  for (const char* k : {"metric", "fiber", "sasaki", "foliation_mismatch", "curvature", "curvature_scan", "gauss_graph",
                        "horizontality", "lagrangian", "lagrangian_mesh", "induced_metric", "equivariance",
                        "hamiltonian", "agreement_rel", "agreement_abs", "closure", "relator", "periods", "coclosed"})
    tol[k] = 0;
  c["tolerances"] = tol;
  fs::path p = write_config(d, "c.json", c.dump());
  ASSERT_EQ(run("verify --config " + p.string() + " --out " + (d / "o").string()), 1);
  json r = json::parse(slurp(d / "o" / "report.json"));
  EXPECT_FALSE(r["pass"].get<bool>());
  int n = 0;
  for (const auto& s : r["suites"])
    for (const auto& k : s["checks"]) {
      EXPECT_FALSE(k["pass"].get<bool>()) << k["name"];
      ++n;
    }
  EXPECT_GT(n, 20);
  // same through the scale flag
  fs::path q = write_config(d, "s.json", small_config().dump());
  ASSERT_EQ(run("verify --tol-scale 0 --config " + q.string() + " --out " + (d / "z").string()), 1);
  for (const auto& s : json::parse(slurp(d / "z" / "report.json"))["suites"])
    for (const auto& k : s["checks"]) EXPECT_FALSE(k["pass"].get<bool>()) << k["name"];
}

TEST(Cli, ReportsAreByteIdenticalForAFixedSeed) {
  fs::path d = scratch("det");
  fs::path p = write_config(d, "c.json", small_config().dump());
  std::string base = "verify --config " + p.string() + " --out ";
  run(base + (d / "a").string() + " --seed 7");
  run(base + (d / "b").string() + " --seed 7");
  run(base + (d / "c").string() + " --seed 8");
  std::string a = slurp(d / "a" / "report.json"), b = slurp(d / "b" / "report.json");
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_NE(a, slurp(d / "c" / "report.json"));
  EXPECT_EQ(json::parse(a)["seed"].get<int>(), 7);
  for (const auto& f : fs::directory_iterator(d / "a" / "suites"))
    EXPECT_EQ(slurp(f.path()), slurp(d / "b" / "suites" / f.path().filename())) << f.path();
  // timings live apart from the report
  EXPECT_TRUE(fs::exists(d / "a" / "timings.json"));
  EXPECT_EQ(a.find("seconds"), std::string::npos);
}

TEST(Cli, ChecksAreSortedByName) {
  fs::path d = scratch("sorted");
  fs::path p = write_config(d, "c.json", small_config().dump());
  run("verify --config " + p.string() + " --out " + (d / "o").string());
  json r = json::parse(slurp(d / "o" / "report.json"));
  std::vector<std::string> suites;
  for (const auto& s : r["suites"]) {
    suites.push_back(s["name"]);
    std::vector<std::string> names;
    for (const auto& k : s["checks"]) names.push_back(k["name"]);
    EXPECT_TRUE(std::is_sorted(names.begin(), names.end())) << s["name"];
  }
  EXPECT_EQ(suites.size(), 9u);
  EXPECT_TRUE(std::is_sorted(suites.begin(), suites.end()));
}

TEST(Cli, CurvatureScanTable) {
  fs::path d = scratch("scan");
  ASSERT_EQ(run("scan curvature --out " + (d / "o").string()), 0);
  std::istringstream csv(slurp(d / "o" / "scan_curvature.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "eps,defect,symplectic_area,defect_over_area,defect_over_eps2");
  std::vector<double> eps;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    eps.push_back(std::stod(cell));
    for (int k = 0; k < 3; ++k) std::getline(row, cell, ',');
    EXPECT_NEAR(std::stod(cell), -0.5, 0.05 * 0.5);
  }
  EXPECT_EQ(eps, (std::vector<double>{0.01, 0.02, 0.04}));

  fs::path p = write_config(d, "empty.json", R"({"curvature": {"eps": []}})");
  ASSERT_EQ(run("scan curvature --config " + p.string() + " --out " + (d / "e").string()), 0);
  EXPECT_EQ(slurp(d / "e" / "scan_curvature.csv"), "eps,defect,symplectic_area,defect_over_area,defect_over_eps2\n");
}

TEST(Cli, EmptyFluxHolonomyScanIsHeaderOnly) {
  fs::path d = scratch("fhscan");
  fs::path p = write_config(d, "empty.json", R"({"harmonic": {"durations": []}})");
  ASSERT_EQ(run("scan flux-holonomy --config " + p.string() + " --out " + (d / "o").string()), 0);
  EXPECT_EQ(slurp(d / "o" / "scan_flux_holonomy.csv"),
            "duration,loop,flux,relative_holonomy,duration_times_period\n");
}

TEST(Cli, MeshExportReadsBack) {
  fs::path d = scratch("mesh");
  fs::path p = write_config(d, "c.json", R"({"harmonic": {"mesh_resolution": 6}})");
  ASSERT_EQ(run("mesh-export --config " + p.string() + " --out " + (d / "o").string()), 0);
  std::ifstream in(d / "o" / "mesh.txt");
  adsflux::SurfaceMesh m = adsflux::SurfaceMesh::read(in, adsflux::octagon_rep());
  adsflux::SurfaceMesh ref = adsflux::SurfaceMesh::build(adsflux::octagon_rep(), 6);
  EXPECT_EQ(m.triangles.size(), ref.triangles.size());
  EXPECT_EQ(m.vertices.size(), ref.vertices.size());
  EXPECT_EQ(m.euler_characteristic(), -2);
}

TEST(Cli, ProjectPrintsTheBasePoint) {
  std::string cmd = std::string(ADSFLUX_CLI_PATH) + " project --g 2 1 1 1 --u 1 0 0 2>&1";
  FILE* f = popen(cmd.c_str(), "r");
  ASSERT_NE(f, nullptr);
  std::string out;
  char buf[512];
  while (fgets(buf, sizeof buf, f)) out += buf;
  ASSERT_EQ(WEXITSTATUS(pclose(f)), 0) << out;
  json j = json::parse(out);
  adsflux::Mat2 g;
  g << 2, 1, 1, 1;
  adsflux::BiPoint b = adsflux::project({adsflux::GroupElt(g), adsflux::AlgVec::from_coords(1, 0, 0)});
  EXPECT_NEAR(j["left"][0].get<double>(), b.left.x, 1e-12);
  EXPECT_NEAR(j["left"][1].get<double>(), b.left.y, 1e-12);
  EXPECT_NEAR(j["right"][0].get<double>(), b.right.x, 1e-12);
  EXPECT_NEAR(j["right"][1].get<double>(), b.right.y, 1e-12);
  // not unit timelike
  EXPECT_EQ(run("project --g 1 0 0 1 --u 0 1 0"), 1);
}

// the default scenario is expected to pass every check
TEST(Cli, DefaultVerifyPasses) {
  fs::path d = scratch("default");
  EXPECT_EQ(run("verify --out " + (d / "o").string()), 0);
  ASSERT_TRUE(fs::exists(d / "o" / "report.json"));
  json r = json::parse(slurp(d / "o" / "report.json"));
  for (const auto& s : r["suites"]) EXPECT_TRUE(s["pass"].get<bool>()) << s["name"];
}
