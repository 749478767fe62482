#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sandwich/cli.hpp"
#include "sandwich/incidence.hpp"
#include "sandwich/plumbing.hpp"

using namespace sandwich;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string germ_file(const std::string& name) { return oracle::data_path("germs/" + name + ".germ"); }

// A scratch file removed at scope exit.
struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& text) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("sandwich-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::ofstream(path) << text;
  }
  ~TempFile() { std::filesystem::remove(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("exit codes") {
  CHECK(cli({"germ", "check", germ_file("six-lines")}).status == 0);

  auto io = cli({"germ", "check", "/nonexistent/file.germ"});
  CHECK(io.status == 1);
  CHECK(io.err.rfind("IoError", 0) == 0);

  TempFile bad("point q0\nbranch a chain=q0 l=x\n");
  auto parse = cli({"germ", "check", bad.str()});
  CHECK(parse.status == 2);
  CHECK(parse.err.rfind("ParseError at 2:", 0) == 0);

  CHECK(cli({}).status == 2);
  CHECK(cli({"frobnicate"}).status == 2);
  CHECK(cli({"--format", "yaml", "germ", "check", germ_file("six-lines")}).status == 2);
  CHECK(cli({"--m-big-rule", "nonsense", "germ", "check", germ_file("six-lines")}).status == 2);
  CHECK(cli({"--help"}).status == 0);

  TempFile invalid("point q0\npoint q1 parent=q0 proximate=q0\nbranch a chain=q0,q1 l=3\n");
  auto v = cli({"germ", "check", invalid.str()});
  CHECK(v.status == 1);
}

TEST_CASE("germ commands") {
  auto inv = cli({"germ", "invariants", germ_file("cusp-line")});
  REQUIRE(inv.status == 0);
  CHECK(inv.out.find("m: 3 2\n") != std::string::npos);
  CHECK(inv.out.find("M: 5 2\n") != std::string::npos);
  CHECK(inv.out.find("standard: true\n") != std::string::npos);

  auto plain = cli({"--m-big-rule", "plain-nc", "germ", "invariants", germ_file("cusp-line")});
  CHECK(plain.out.find("M: 4 2\n") != std::string::npos);

  auto json = cli({"--format", "json", "germ", "invariants", germ_file("cusp-line")});
  REQUIRE(json.status == 0);
  CHECK(json.out.find("\"m\":[3,2]") != std::string::npos);

  auto same = cli({"germ", "equivalent", germ_file("cusp-line"), germ_file("cusp-line")});
  CHECK(same.status == 0);
  CHECK(same.out.rfind("equivalent\n", 0) == 0);
  auto diff = cli({"germ", "equivalent", germ_file("cusp-line"), germ_file("cusp5-line")});
  CHECK(diff.status == 0);
  CHECK(diff.out == "not equivalent\n");
}

TEST_CASE("resolve") {
  auto r = cli({"resolve", germ_file("six-lines")});
  REQUIRE(r.status == 0);
  auto doc = parse_graph(r.out);
  std::vector<std::size_t> keep;
  for (std::size_t v = 0; v < doc.tree.size(); ++v)
    if (doc.in_ecl[v]) keep.push_back(v);
  CHECK(trees_isomorphic(doc.tree.induced(keep),
                         oracle::star(-7, std::vector<std::vector<int>>(6, {-2, -2, -2}))));
  CHECK(r.out.find("# E(C,l): 19 vertices, connected, negative definite") != std::string::npos);

  auto j = cli({"--format", "json", "resolve", germ_file("six-lines")});
  REQUIRE(j.status == 0);
  auto jdoc = parse_graph(j.out);
  CHECK(jdoc.tree == doc.tree);
  CHECK(jdoc.in_ecl == doc.in_ecl);
  CHECK(jdoc.attach == doc.attach);

  TempFile smooth("point q0\npoint a parent=q0\npoint b parent=q0\n"
                  "branch A chain=q0,a l=1\nbranch B chain=q0,b l=1\n");
  auto e = cli({"resolve", smooth.str()});
  CHECK(e.status == 1);
  CHECK(e.err.rfind("EmptyGraph: X(C,l) is a smooth point", 0) == 0);
}

TEST_CASE("graph commands") {
  auto chain = oracle::data_path("graphs/chain-323.graph");
  auto def = cli({"graph", "definite", chain});
  CHECK(def.status == 0);
  CHECK(def.out.find("negative definite: true") != std::string::npos);

  auto rec = cli({"graph", "recognize", chain});
  CHECK(rec.status == 0);
  CHECK(rec.out.find("status: sandwiched") != std::string::npos);
  CHECK(rec.out.find("certificate verified: true") != std::string::npos);

  auto capped = cli({"graph", "recognize", "--max-extra", "0", chain});
  CHECK(capped.out.find("status: unknown") != std::string::npos);

  auto bd = cli({"graph", "blowdown", chain});
  CHECK(bd.status == 0);
  CHECK(bd.out.find("# result: minimal graph") != std::string::npos);

  TempFile cyclic("vertex a weight=-2\nvertex b weight=-2\nvertex c weight=-2\nedge a b\nedge b c\nedge c a\n");
  auto cyc = cli({"graph", "definite", cyclic.str()});
  CHECK(cyc.status == 1);
  CHECK(cyc.err.rfind("NotATree", 0) == 0);
}

TEST_CASE("enumerate and realizable") {
  auto one = cli({"enumerate", "--germ", germ_file("one-line-l2")});
  REQUIRE(one.status == 0);
  CHECK(one.out == "1 1\n");

  auto cusp = cli({"enumerate", "--germ", germ_file("cusp-line")});
  REQUIRE(cusp.status == 0);
  CHECK(parse_matrix_set(cusp.out).size() == 2);
  auto cusp_json = cli({"--format", "json", "enumerate", "--germ", germ_file("cusp-line")});
  CHECK(parse_matrix_set(cusp_json.out) == parse_matrix_set(cusp.out));

  auto six1 = cli({"--jobs", "1", "enumerate", "--germ", germ_file("six-lines")});
  auto six4 = cli({"--jobs", "4", "enumerate", "--germ", germ_file("six-lines")});
  CHECK(six1.out == six4.out);
  CHECK(parse_matrix_set(six1.out).size() == 353);

  auto gen = cli({"--seed", "2", "realizable", "--germ", germ_file("six-lines"), "--slopes", "generic"});
  REQUIRE(gen.status == 0);
  CHECK(gen.out.find("# realizable classes: 323") != std::string::npos);

  auto mismatch = cli({"realizable", "--germ", germ_file("six-lines"), "--slopes", "1,2,3"});
  CHECK(mismatch.status == 1);
  CHECK(mismatch.err.rfind("PreconditionViolated", 0) == 0);
  auto bad_slope = cli({"realizable", "--germ", germ_file("six-lines"), "--slopes", "1,2,3,4,5,x"});
  CHECK(bad_slope.status != 0);
}

TEST_CASE("fillings commands") {
  TempFile cusp_set(cli({"enumerate", "--germ", germ_file("cusp-line")}).out);
  auto rep = cli({"fillings", "report", "--germ", germ_file("cusp-line"), "--matrices", cusp_set.str()});
  REQUIRE(rep.status == 0);
  CHECK(rep.out.find("framing=-8") != std::string::npos);
  CHECK(rep.out.find("necessary-condition classes: 2") != std::string::npos);

  auto dis = cli({"fillings", "distinguish", "--germ", germ_file("cusp-line"), "--matrices", cusp_set.str()});
  REQUIRE(dis.status == 0);
  CHECK(dis.out.find("DistinctFillings") != std::string::npos);

  auto cnt = cli({"fillings", "count", "--germs", germ_file("cusp-line"), "--matrices", cusp_set.str()});
  REQUIRE(cnt.status == 0);
  CHECK(cnt.out.find("necessary-condition classes: 2") != std::string::npos);

  auto neq = cli({"fillings", "count", "--germs", germ_file("cusp-line"), germ_file("six-lines")});
  CHECK(neq.status == 1);
  CHECK(neq.err.rfind("NotEquivalentGerms", 0) == 0);
}

TEST_CASE("reproductions match their golden files") {
  for (std::string name : {"six-lines", "cusp-line", "fig1-graph"}) {
    CAPTURE(name);
    auto r = cli({"--jobs", "2", "--data-dir", SANDWICH_TEST_DATA_DIR, "reproduce", name});
    CHECK(r.status == 0);
    CHECK(r.err.empty());
    CHECK(r.out == oracle::slurp(oracle::data_path("golden/" + name + ".txt")));
  }
  auto unknown = cli({"reproduce", "nothing"});
  CHECK(unknown.status == 1);

  RunConfig a;
  a.jobs = 1;
  RunConfig b;
  b.jobs = 3;
  CHECK(reproduction_report("cusp-line", a) == reproduction_report("cusp-line", b));
}

TEST_CASE("a tampered golden file is reported") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / ("sandwich-golden-" + std::to_string(::getpid()));
  fs::create_directories(dir / "golden");
  fs::copy(oracle::data_path("germs"), dir / "germs", fs::copy_options::recursive);
  fs::copy(oracle::data_path("graphs"), dir / "graphs", fs::copy_options::recursive);
  auto golden = oracle::slurp(oracle::data_path("golden/cusp-line.txt"));
  golden.insert(golden.find('\n') + 1, "an extra line\n");
  std::ofstream(dir / "golden" / "cusp-line.txt") << golden;

  auto r = cli({"--data-dir", dir.string(), "reproduce", "cusp-line"});
  CHECK(r.status == 1);
  CHECK(r.err.rfind("GoldenMismatch", 0) == 0);
  CHECK(r.err.find("line 2") != std::string::npos);
  fs::remove_all(dir);
}
