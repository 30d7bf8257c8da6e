#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "renyi/instance_io.hpp"
#include "renyi/oracle.hpp"

using oracle_ref::run_cli;
using oracle_ref::value_of;
using oracle_ref::write_temp;

namespace {

/// The single-feature data set in exact proportion to (0.4, 0.1, 0.1, 0.4).
std::string ten_rows_csv() {
  std::string s = "x,y\n";
  for (int i = 0; i < 4; ++i) s += "a,1\n";
  s += "a,0\nb,1\n";
  for (int i = 0; i < 4; ++i) s += "b,0\n";
  return s;
}

std::string quoted(const std::string& path) { return "'" + path + "'"; }

}  // namespace

TEST_CASE("cli train on the single-feature data") {
  const std::string data = write_temp("ten.csv", ten_rows_csv());
  const std::string model = oracle_ref::temp_path("ten_model.json");
  const auto r = run_cli("train --data " + quoted(data) + " --label y --out " + quoted(model));
  CHECK(r.exit_code == 0);
  CHECK(std::abs(value_of(r.out, "gamma") - 0.16) < 1e-12);
  CHECK(r.out.find("separable=true") != std::string::npos);

  const auto e = run_cli("evaluate --model " + quoted(model) + " --data " + quoted(data) + " --mode randomized-analytic");
  CHECK(e.exit_code == 0);
  CHECK(std::abs(value_of(e.out, "error_rate") - 8.0 / 34.0) < 1e-12);
}

TEST_CASE("cli usage errors") {
  const std::string data = write_temp("ten.csv", ten_rows_csv());
  CHECK(run_cli("train --data " + quoted(data) + " --label y --ridge -1").exit_code == 2);
  CHECK(run_cli("select --data " + quoted(data) + " --label y --lambda 0").exit_code == 2);
  CHECK(run_cli("no-such-command").exit_code == 2);
  CHECK(run_cli("train --data " + quoted(oracle_ref::temp_path("missing.csv")) + " --label y").exit_code == 3);
}

TEST_CASE("cli pair features") {
  const std::string data = write_temp("pairs.csv", "a,b,y\n1,1,1\n1,2,1\n2,1,0\n2,2,0\n");
  const auto r = run_cli("train --data " + quoted(data) + " --label y --pairs");
  CHECK(r.exit_code == 0);
  CHECK(value_of(r.out, "features") == 1.0);
}

TEST_CASE("cli evaluation of trivial models") {
  const std::string indep = write_temp("indep.csv", "x,y\n1,1\n1,0\n2,1\n2,0\n");
  const std::string zero_model = oracle_ref::temp_path("zero_model.json");
  REQUIRE(run_cli("train --data " + quoted(indep) + " --label y --out " + quoted(zero_model)).exit_code == 0);
  const auto e = run_cli("evaluate --model " + quoted(zero_model) + " --data " + quoted(indep) + " --mode randomized-analytic");
  CHECK(value_of(e.out, "error_rate") == 0.5);

  const std::string det = write_temp("det.csv", "x,y\n1,1\n2,0\n1,1\n2,0\n3,0\n");
  const std::string det_model = oracle_ref::temp_path("det_model.json");
  REQUIRE(run_cli("train --data " + quoted(det) + " --label y --out " + quoted(det_model)).exit_code == 0);
  const auto m = run_cli("evaluate --model " + quoted(det_model) + " --data " + quoted(det) + " --mode map");
  CHECK(m.exit_code == 0);
  CHECK(value_of(m.out, "error_rate") == 0.0);

  const std::string unseen = write_temp("unseen.csv", "x,y\n1,1\n9,0\n");
  const auto strict = run_cli("evaluate --strict --model " + quoted(det_model) + " --data " + quoted(unseen), true);
  CHECK(strict.exit_code != 0);
  CHECK(strict.out.find("'x'") != std::string::npos);
  CHECK(strict.out.find("row 2") != std::string::npos);
}

TEST_CASE("cli feature selection") {
  const std::string data = write_temp("ten.csv", ten_rows_csv());
  const auto r = run_cli("select --data " + quoted(data) + " --label y --lambda 1000");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("selected: (none)") != std::string::npos);

  // Feature u carries the label, feature v is independent of everything.
  std::string csv = "u,v,y\n";
  const int counts[2][2] = {{3, 7}, {7, 3}};  // [u][y]
  for (int u = 0; u < 2; ++u)
    for (int y = 0; y < 2; ++y)
      for (int v = 0; v < 3; ++v)
        for (int k = 0; k < counts[u][y]; ++k) csv += std::to_string(u) + "," + std::to_string(v) + "," + std::to_string(y) + "\n";
  const std::string two = write_temp("two.csv", csv);
  const auto path = run_cli("select --data " + quoted(two) + " --label y --path 1e-4:1:20");
  REQUIRE(path.exit_code == 0);
  // The last grid point with a non-empty selection keeps u alone.
  std::string last;
  std::size_t pos = 0;
  while ((pos = path.out.find("selected=", pos)) != std::string::npos) {
    const auto end = path.out.find('\n', pos);
    const std::string sel = path.out.substr(pos + 9, end - pos - 9);
    if (sel != "(none)") last = sel;
    pos = end;
  }
  CHECK(last == "u");
  CHECK(path.out.find("selected=v") == std::string::npos);
}

TEST_CASE("cli oracle commands") {
  const renyi::JointDistribution p(renyi::CategoricalSchema::uniform(1, 2), Eigen::Vector4d(0.1, 0.4, 0.4, 0.1));
  const std::string inst = oracle_ref::temp_path("d1_instance.csv");
  renyi::write_instance_file(p, inst);
  const auto e = run_cli("oracle estar --instance " + quoted(inst));
  CHECK(e.exit_code == 0);
  CHECK(std::abs(value_of(e.out, "e_star") - 0.2) < 1e-12);
  const auto t = run_cli("oracle theta --instance " + quoted(inst));
  CHECK(t.exit_code == 0);
  CHECK(std::abs(value_of(t.out, "theta") - 0.16) <= 1e-7);
  const auto h = run_cli("oracle hgr --instance " + quoted(inst));
  CHECK(std::abs(value_of(h.out, "hgr_binary") - 0.6) < 1e-12);
  CHECK(std::abs(value_of(h.out, "hgr_bruteforce") - 0.6) < 1e-12);
  const auto w = run_cli("oracle worst-case --instance " + quoted(inst) + " --rule renyi");
  CHECK(std::abs(value_of(w.out, "worst_case_error") - 8.0 / 34.0) < 1e-9);
  CHECK(run_cli("oracle estar").exit_code == 2);
}

TEST_CASE("cli verify passes on defaults") {
  const auto v = run_cli("oracle verify --trials 100");
  CHECK(v.exit_code == 0);
  CHECK(value_of(v.out, "violations") == 0.0);
}

TEST_CASE("cli output is reproducible") {
  const std::string data = write_temp("ten.csv", ten_rows_csv());
  const std::string model = oracle_ref::temp_path("repro_model.json");
  REQUIRE(run_cli("train --data " + quoted(data) + " --label y --out " + quoted(model)).exit_code == 0);
  for (const std::string& args : std::vector<std::string>{
           "experiment-synthetic --d 300 --n 60 --runs 5 --seed 4 --per-run", "oracle theta --random 3,2,2,generic",
        "oracle verify --trials 5 --seed 9 --d 3 --m 2",
        "evaluate --model " + quoted(model) + " --data " + quoted(data) + " --mode randomized-sampled --seed 8",
        "predict --model " + quoted(model) + " --data " + quoted(data) + " --mode randomized-sampled --seed 8"}) {
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
  }
}
