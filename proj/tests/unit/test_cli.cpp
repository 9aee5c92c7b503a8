#include <gtest/gtest.h>

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "httplib.h"
#include "json.hpp"
#include "surgscan/codec.hpp"
#include "surgscan/dataset/manifest.hpp"
#include "surgscan/fixtures.hpp"
#include "test_support.hpp"

using namespace surgscan;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string cli_path() {
  const char* p = std::getenv("SURGSCAN_CLI");
  return p ? p : SURGSCAN_CLI_PATH;
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

CliResult run(const std::vector<std::string>& args) {
  surgscan::testkit::TempDir io("surgscan-cli-io");
  std::string cmd = quote(cli_path());
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " >" + quote((io / "out").string()) + " 2>" + quote((io / "err").string());
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(io / "out");
  r.err = slurp(io / "err");
  return r;
}

fs::path make_corpus(const surgscan::testkit::TempDir& dir, int defective = 2, int clean = 2) {
  const CliResult r = run({"fixtures", "--out", (dir / "corpus").string(), "--defective", std::to_string(defective),
                     "--clean", std::to_string(clean), "--width", "48", "--height", "40"});
  EXPECT_EQ(r.code, 0) << r.err;
  return dir / "corpus";
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"split", "--help"}).code, 0);
  EXPECT_EQ(run({"split", "--bogus"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"convert", "--in", "/definitely/missing", "--images", ".", "--out", "x"}).code, 1);
}

TEST(Cli, ConvertReportsCounts) {
  surgscan::testkit::TempDir dir;
  const auto corpus = make_corpus(dir);
  const CliResult r = run({"convert", "--in", (corpus / "annotations").string(), "--images", (corpus / "images").string(),
                     "--out", (dir / "labels").string(), "--manifest", (dir / "m.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto truth = dataset::load_manifest(corpus / "manifest.jsonl");
  std::size_t boxes = 0;
  for (const auto& e : truth.entries) boxes += e.defects.size();
  EXPECT_EQ(r.out, "converted " + std::to_string(truth.entries.size()) + " images, " + std::to_string(boxes) +
                       " boxes\n");
  EXPECT_NE(r.err.find("surgscan convert effective config:"), std::string::npos);
  EXPECT_EQ(dataset::load_manifest(dir / "m.jsonl").entries.size(), truth.entries.size());
}

TEST(Cli, ConvertEmptyAndMalformed) {
  surgscan::testkit::TempDir dir;
  fs::create_directories(dir / "ann");
  fs::create_directories(dir / "img");
  CliResult r = run({"convert", "--in", (dir / "ann").string(), "--images", (dir / "img").string(), "--out",
               (dir / "labels").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "converted 0 images, 0 boxes\n");

  std::ofstream(dir / "ann/broken.xml") << "<annotation><filename>";
  r = run({"convert", "--in", (dir / "ann").string(), "--images", (dir / "img").string(), "--out",
           (dir / "labels").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("broken.xml"), std::string::npos) << r.err;
}

TEST(Cli, SplitIsDeterministic) {
  surgscan::testkit::TempDir dir;
  const auto corpus = make_corpus(dir, 5, 5);
  const auto m = (corpus / "manifest.jsonl").string();
  CliResult a = run({"split", "--manifest", m, "--out", (dir / "a.jsonl").string(), "--seed", "7"});
  CliResult b = run({"split", "--manifest", m, "--out", (dir / "b.jsonl").string(), "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(dir / "a.jsonl"), slurp(dir / "b.jsonl"));
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("88 train, 22 val"), std::string::npos) << a.out;
  EXPECT_EQ(run({"split", "--manifest", m, "--out", (dir / "c.jsonl").string(), "--train-fraction", "1.5"}).code, 1);
}

TEST(Cli, PipelineThroughValidate) {
  surgscan::testkit::TempDir dir;
  const auto corpus = make_corpus(dir, 2, 1);
  ASSERT_EQ(run({"split", "--manifest", (corpus / "manifest.jsonl").string(), "--out", (dir / "s.jsonl").string()})
                .code,
            0);
  CliResult r = run({"augment", "--manifest", (dir / "s.jsonl").string(), "--out-manifest", (dir / "a.jsonl").string(),
               "--images-out", (dir / "aug").string(), "--rotations", "90,180", "--noise-sigma", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  // augmenting twice is refused
  EXPECT_EQ(run({"augment", "--manifest", (dir / "a.jsonl").string(), "--out-manifest",
                 (dir / "a2.jsonl").string(), "--images-out", (dir / "aug2").string()})
                .code,
            1);
  r = run({"package", "--manifest", (dir / "a.jsonl").string(), "--root", (dir / "ds").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "ds/dataset.yaml"));
  r = run({"validate", "--root", (dir / "ds").string()});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("0 finding(s)"), std::string::npos);

  std::ofstream(dir / "ds/labels/val/orphan.txt") << "0 0.5 0.5 0.1 0.1\n";
  r = run({"validate", "--root", (dir / "ds").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("orphan-label"), std::string::npos);
}

TEST(Cli, Report) {
  const char* tables = SURGSCAN_TABLES_DIR;
  surgscan::testkit::TempDir dir;
  const CliResult r = run({"report", "--csv", (fs::path(tables) / "ex_probe.csv").string(), "--title", "Ex Probe",
                     "--out-csv", (dir / "o.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Ex Probe"), std::string::npos);
  EXPECT_NE(r.out.find("0.9974*"), std::string::npos);
  EXPECT_EQ(slurp(dir / "o.csv"), slurp(fs::path(tables) / "ex_probe.csv"));
  std::ofstream(dir / "bad.csv") << "Model,Foo\n";
  EXPECT_EQ(run({"report", "--csv", (dir / "bad.csv").string()}).code, 1);
}

TEST(Cli, InspectAndUserAdd) {
  surgscan::testkit::TempDir dir;
  const auto corpus = make_corpus(dir, 1, 1);
  const auto truth = dataset::load_manifest(corpus / "manifest.jsonl");
  const auto& e = truth.entries.front();
  CliResult r = run({"inspect", "--image", e.path});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("instrument"), std::string(to_string(e.instrument)));
  EXPECT_EQ(j.at("overall"), e.is_defective() ? "Defective" : "NonDefective");

  surgscan::imaging::save_png(surgscan::testkit::random_raster(20, 20, 1), dir / "unknown.png");
  EXPECT_EQ(run({"inspect", "--image", (dir / "unknown.png").string()}).code, 2);

  const auto data = (dir / "data").string();
  r = run({"user-add", "--data-dir", data, "--fixtures", corpus.string(), "--name", "Ann", "--email",
           "ann@example.com", "--password", "pw", "--role", "admin"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"user-add", "--data-dir", data, "--fixtures", corpus.string(), "--name", "Ann", "--email",
                 "ann@example.com", "--password", "pw"})
                .code,
            1);
  EXPECT_EQ(run({"user-add", "--data-dir", data, "--fixtures", corpus.string(), "--name", "X", "--email",
                 "x@example.com", "--password", "pw", "--role", "emperor"})
                .code,
            1);
}

TEST(Cli, ServeAnswersAndStopsOnSignal) {
  surgscan::testkit::TempDir dir;
  const auto corpus = make_corpus(dir, 1, 1);
  ASSERT_EQ(run({"user-add", "--data-dir", (dir / "data").string(), "--fixtures", corpus.string(), "--name", "U",
                 "--email", "u@example.com", "--password", "pw"})
                .code,
            0);

  int out_pipe[2];
  ASSERT_EQ(::pipe(out_pipe), 0);
  const std::string cli = cli_path();
  const std::string data = (dir / "data").string();
  const std::string fixtures = corpus.string();
  const pid_t pid = ::fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl(cli.c_str(), cli.c_str(), "serve", "--port", "0", "--data-dir", data.c_str(), "--fixtures",
            fixtures.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(out_pipe[1]);
  std::string line;
  char c;
  while (::read(out_pipe[0], &c, 1) == 1 && c != '\n') line += c;
  ::close(out_pipe[0]);
  ASSERT_EQ(line.rfind("listening on 127.0.0.1:", 0), 0u) << line;
  const int port = std::stoi(line.substr(line.rfind(':') + 1));

  httplib::Client client("127.0.0.1", port);
  auto res = client.Post("/api/login", R"({"email":"u@example.com","password":"pw"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200) << res->body;

  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
}
