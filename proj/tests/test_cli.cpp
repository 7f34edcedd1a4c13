#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "momx/cli.hpp"
#include "momx/json_io.hpp"
#include "momx/scenarios.hpp"
#include "momx/solution_factory.hpp"

using namespace momx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "momentx");
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("momentx_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string write(const std::string& name, const io::json& j) const {
    io::write_json_file(file(name), j);
    return file(name);
  }
  std::string write_text(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("check subcommand") {
  TempDir dir;
  const std::string e2 = dir.write("e2.json", io::to_json(moments_of_measure(scenarios::e2_measure(), 4, 8)));
  const Run ok = run_cli({"check", "--table", e2, "--carleman-k", "4"});
  CHECK(ok.code == cli::kOk);
  const io::json report = io::json::parse(ok.out);
  CHECK(report["psd_pass"].get<bool>());
  REQUIRE(!report["carleman"].empty());
  CHECK(report["carleman"][0]["verdict"] == "diverging-trend");

  MomentTable neg = moments_of_measure(scenarios::e2_measure(), 2, 2);
  neg(0, 0) = -1.0;
  CHECK(run_cli({"check", "--table", dir.write("neg.json", io::to_json(neg))}).code ==
        cli::kVerificationFailed);

  io::json missing = io::to_json(moments_of_measure(scenarios::e2_measure(), 2, 2));
  missing["entries"].erase(missing["entries"].begin() + 3);
  const Run miss = run_cli({"check", "--table", dir.write("missing.json", missing)});
  CHECK(miss.code == cli::kInputError);
  CHECK(miss.err.find("missing s_{") != std::string::npos);

  const Run malformed = run_cli({"check", "--table", dir.write_text("bad.json", "{\n  \"max_m\": 2,\n  oops\n}")});
  CHECK(malformed.code == cli::kInputError);
  CHECK(malformed.err.find("line 3") != std::string::npos);

  CHECK(run_cli({"check"}).code == cli::kInputError);
  CHECK(run_cli({"check", "--table", dir.file("nope.json")}).code == cli::kInputError);
  CHECK(run_cli({"check", "--table", e2, "--rank-tol", "0"}).code == cli::kInputError);
  CHECK(run_cli({}).code == cli::kInputError);
}

TEST_CASE("solve-canonical subcommand") {
  TempDir dir;
  const std::string e2 = dir.write("e2.json", io::to_json(moments_of_measure(scenarios::e2_measure(), 4, 4)));
  const Run r = run_cli({"solve-canonical", "--table", e2, "--out-dir", dir.file("out")});
  CHECK(r.code == cli::kOk);
  const io::json sol = io::read_json_file(dir.file("out/solution_000.json"));
  CHECK_FALSE(fs::exists(dir.file("out/solution_001.json")));
  REQUIRE(sol["atoms"].size() == 2);
  CHECK(sol["atoms"][0][0].get<double>() == doctest::Approx(-1.0));
  CHECK(sol["atoms"][1][1].get<double>() == doctest::Approx(1.0));
  CHECK(sol["atoms"][0][2].get<double>() == doctest::Approx(0.5));
  CHECK(sol["max_abs_moment_error"].get<double>() <= 1e-10);
  CHECK(sol["determinate"].get<bool>());
  CHECK(sol["degrees_checked"] == io::json::array({4, 4}));

  // round trip through verify
  CHECK(run_cli({"verify", "--measure", dir.file("out/solution_000.json"), "--table", e2}).code ==
        cli::kOk);

  const std::string e1 = dir.write("e1.json", io::to_json(moments_of_measure(scenarios::e1_measure(), 2, 2)));
  CHECK(run_cli({"solve-canonical", "--table", e1, "--out-dir", dir.file("e1")}).code == cli::kOk);
  const io::json s1 = io::read_json_file(dir.file("e1/solution_000.json"));
  REQUIRE(s1["atoms"].size() == 1);
  CHECK(s1["atoms"][0][2].get<double>() == doctest::Approx(1.0));

  const std::string e3 = dir.write("e3.json", io::to_json(scenarios::e3_pair()));
  CHECK(run_cli({"solve-canonical", "--pair", e3, "--sampler", "phases", "--grid", "4",
                 "--out-dir", dir.file("e3")})
            .code == cli::kOk);
  std::vector<AtomicMeasure> measures;
  for (int i = 0; i < 4; ++i) {
    const std::string p = dir.file("e3/solution_00" + std::to_string(i) + ".json");
    if (fs::exists(p)) measures.push_back(io::measure_from_json(io::read_json_file(p)));
  }
  CHECK(measures.size() >= 2);
  for (std::size_t a = 0; a < measures.size(); ++a) {
    for (std::size_t b = a + 1; b < measures.size(); ++b) {
      const MomentTable ma = moments_of_measure(measures[a], 6, 0);
      const MomentTable mb = moments_of_measure(measures[b], 6, 0);
      CHECK((ma.values() - mb.values()).cwiseAbs().maxCoeff() > 1e-6);
    }
  }

  CHECK(run_cli({"solve-canonical", "--pair", e3, "--sampler", "haar", "--out-dir", dir.file("x")})
            .code == cli::kInputError);
  CHECK(run_cli({"solve-canonical", "--pair", e3, "--table", e2}).code == cli::kInputError);
  CHECK(run_cli({"solve-canonical", "--pair", e3, "--sampler", "bogus"}).code == cli::kInputError);

  AtomicMeasure grid;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) grid.atoms.push_back({0.7 * a, 0.9 * b + 0.1 * a, 1.0 / 9.0});
  }
  const Run gate = run_cli({"solve-canonical", "--table",
                            dir.write("grid.json", io::to_json(moments_of_measure(grid, 4, 4))),
                            "--out-dir", dir.file("g")});
  CHECK(gate.code == cli::kStructuralGate);
  CHECK(gate.err.find("defect of A2") != std::string::npos);
}

TEST_CASE("solve-canonical is deterministic") {
  TempDir dir;
  const std::string e3 = dir.write("e3.json", io::to_json(scenarios::e3_pair()));
  for (const char* d : {"a", "b"}) {
    CHECK(run_cli({"solve-canonical", "--pair", e3, "--sampler", "haar", "--count", "3", "--seed",
                   "77", "--out-dir", dir.file(d)})
              .code == cli::kOk);
  }
  int compared = 0;
  for (int i = 0; i < 3; ++i) {
    const std::string name = "solution_00" + std::to_string(i) + ".json";
    if (!fs::exists(dir.file(std::string("a/") + name))) continue;
    CHECK(slurp(dir.file(std::string("a/") + name)) == slurp(dir.file(std::string("b/") + name)));
    ++compared;
  }
  CHECK(compared >= 1);
}

TEST_CASE("eval-resolvent subcommand") {
  TempDir dir;
  const std::string e1 = dir.write("e1.json", io::to_json(moments_of_measure(scenarios::e1_measure(), 2, 2)));
  const std::vector<std::string> args = {"eval-resolvent", "--table", e1, "--l1-from", "0,2",
                                         "--l1-to", "0,3", "--l1-count", "2", "--l2-from", "0,2",
                                         "--l2-to", "0,3", "--l2-count", "2"};
  const Run r = run_cli(args);
  CHECK(r.code == cli::kOk);
  CHECK(r.out.rfind("l1_re,l1_im,l2_re,l2_im,value_re,value_im\n", 0) == 0);
  CHECK(r.out.find("# skipped_excluded_points=0") != std::string::npos);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  const double expect[] = {-0.25, -1.0 / 6.0, -1.0 / 6.0, -1.0 / 9.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(rows[i][4] - expect[i]) < 1e-15);
    CHECK(std::abs(rows[i][5]) < 1e-15);
  }
  CHECK(rows[1][1] == 2.0);
  CHECK(rows[1][3] == 3.0);
  CHECK(run_cli(args).out == r.out);

  auto with_out = args;
  with_out.insert(with_out.end(), {"--out", dir.file("grid.csv")});
  CHECK(run_cli(with_out).code == cli::kOk);
  CHECK(slurp(dir.file("grid.csv")) == r.out);

  auto matrix = args;
  matrix.insert(matrix.end(), {"--mode", "matrix"});
  const Run m = run_cli(matrix);
  CHECK(m.code == cli::kOk);
  CHECK(csv_rows(m.out).size() == 4);

  const Run excluded = run_cli({"eval-resolvent", "--table", e1, "--l1-from", "0,1", "--l1-to",
                                "0,2", "--l1-count", "2", "--l2-from", "0,2", "--l2-count", "1"});
  CHECK(excluded.code == cli::kOk);
  CHECK(excluded.out.find("# skipped_excluded_points=1") != std::string::npos);
  CHECK(csv_rows(excluded.out).size() == 1);

  CHECK(run_cli({"eval-resolvent", "--table", e1}).code == cli::kInputError);
  CHECK(run_cli({"eval-resolvent", "--table", e1, "--l1-from", "0,2", "--l1-count", "0",
                 "--l2-from", "0,2", "--l2-count", "1"})
            .code == cli::kInputError);
  CHECK(run_cli({"eval-resolvent", "--table", e1, "--l1-from", "2i", "--l1-count", "1",
                 "--l2-from", "0,2", "--l2-count", "1"})
            .code == cli::kInputError);
}

TEST_CASE("eval-resolvent parameter gate") {
  TempDir dir;
  std::mt19937_64 rng(41);
  for (;;) {
    const scenarios::OperatorSetup s = scenarios::random_operator_setup(rng, 6, 2);
    const IsometricPair iso = make_isometric_pair(s.pair);
    const linalg::NormalEigen e = linalg::normal_eigen(iso.n0.adjoint() * iso.u * iso.n0);
    if (std::abs(e.values(0) - e.values(1)) < 1e-2) continue;
    const CMatrix good = scenarios::random_commuting_unitary(iso, rng);
    CMatrix mix(2, 2);
    mix << 0, 1, 1, 0;
    const CMatrix bad = good * e.vectors * mix * e.vectors.adjoint();
    const std::string pair = dir.write("pair.json", io::to_json(s.pair));
    auto args = [&](const std::string& phi) {
      return std::vector<std::string>{"eval-resolvent", "--pair", pair, "--phi", phi,
                                      "--l1-from", "0.5,1.5", "--l1-count", "1",
                                      "--l2-from", "-0.5,0.7", "--l2-count", "1"};
    };
    const io::json good_j = {{"phi", io::to_json(CMatrix(iso.ninf * good * iso.n0.adjoint()))}};
    const io::json bad_j = {{"phi", io::to_json(CMatrix(iso.ninf * bad * iso.n0.adjoint()))}};
    CHECK(run_cli(args(dir.write("good.json", good_j))).code == cli::kOk);
    CHECK(run_cli(args(dir.write("bad.json", bad_j))).code == cli::kParameterGate);
    const io::json big = {{"phi", io::to_json(CMatrix(2.0 * iso.ninf * good * iso.n0.adjoint()))}};
    CHECK(run_cli(args(dir.write("big.json", big))).code == cli::kParameterGate);
    const io::json wrong = {{"phi", io::to_json(CMatrix(CMatrix::Identity(2, 2)))}};
    CHECK(run_cli(args(dir.write("wrong.json", wrong))).code == cli::kInputError);
    break;
  }
}

TEST_CASE("verify subcommand") {
  TempDir dir;
  const std::string e2t = dir.write("e2t.json", io::to_json(moments_of_measure(scenarios::e2_measure(), 4, 4)));
  const std::string e2m = dir.write("e2m.json", io::to_json(scenarios::e2_measure()));
  const std::string e1m = dir.write("e1m.json", io::to_json(scenarios::e1_measure()));
  CHECK(run_cli({"verify", "--measure", e2m, "--table", e2t}).code == cli::kOk);
  const Run bad = run_cli({"verify", "--measure", e1m, "--table", e2t});
  CHECK(bad.code == cli::kVerificationFailed);
  CHECK(io::json::parse(bad.out)["max_abs_moment_error"].get<double>() == doctest::Approx(1.0));
  CHECK(run_cli({"verify", "--measure", dir.write("empty.json", io::json{{"atoms", io::json::array()}}),
                 "--table", dir.write("zero.json", io::to_json(MomentTable(2, 2)))})
            .code == cli::kOk);
  CHECK(run_cli({"verify", "--measure", dir.write("broken.json", io::json{{"atom", 1}}), "--table",
                 e2t})
            .code == cli::kInputError);
}

TEST_CASE("config file overrides") {
  TempDir dir;
  const std::string e2t = dir.write("e2t.json", io::to_json(moments_of_measure(scenarios::e2_measure(), 4, 4)));
  const std::string e1m = dir.write("e1m.json", io::to_json(scenarios::e1_measure()));
  const std::string loose = dir.write("loose.json", io::json{{"tol", 2.0}});
  CHECK(run_cli({"verify", "--measure", e1m, "--table", e2t, "--config", loose}).code == cli::kOk);
  CHECK(run_cli({"verify", "--measure", e1m, "--table", e2t, "--config", loose, "--tol", "0.5"})
            .code == cli::kVerificationFailed);
  const std::string unknown = dir.write("unknown.json", io::json{{"no_such_flag", 1}});
  CHECK(run_cli({"verify", "--measure", e1m, "--table", e2t, "--config", unknown}).code ==
        cli::kInputError);
}

TEST_CASE("demo subcommand") {
  TempDir dir;
  const Run r = run_cli({"demo", "--out-dir", dir.file("demo")});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("e2: determinate=1 atoms=2") != std::string::npos);
  CHECK(r.out.find("e3: U2 grid index") != std::string::npos);
  CHECK(fs::exists(dir.file("demo/e3_pair.json")));
  CHECK(run_cli({"demo", "--scenario", "e9"}).code == cli::kInputError);
}

TEST_CASE("binary exit codes") {
  TempDir dir;
  const std::string bin = MOMENTX_BINARY;
  MomentTable neg = moments_of_measure(scenarios::e2_measure(), 2, 2);
  neg(0, 0) = -1.0;
  const std::string path = dir.write("neg.json", io::to_json(neg));
  auto status = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  CHECK(status("check --table " + path) == 2);
  CHECK(status("check --table " + dir.file("missing.json")) == 1);
  CHECK(status("--help") == 0);
}
