// end-to-end checks of the command-line driver: artifact layout, exit codes,
// config-file merging, and byte-level idempotency. argv[1] is the binary.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_cli;
fs::path g_dir;

void expect(bool ok, const std::string& what) {
  if (ok) {
    std::printf("ok      %s\n", what.c_str());
  } else {
    std::printf("FAILED  %s\n", what.c_str());
    ++g_failures;
  }
}

int run(const std::string& args) {
  std::string cmd = g_cli + " " + args + " >" + (g_dir / "out.txt").string() + " 2>" +
                    (g_dir / "err.txt").string();
  int status = std::system(cmd.c_str());
  if (status < 0) return -1;
#ifdef _WIN32
  return status;
#else
  return (status >> 8) & 0xff;
#endif
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string out_text() { return slurp(g_dir / "out.txt"); }

std::string cohort_args(const fs::path& dir) {
  return "--events " + (dir / "events.jsonl").string() + " --manifest " +
         (dir / "manifest.json").string() + " --catalog " + (dir / "catalog.csv").string() +
         " --labels " + (dir / "labels.csv").string();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-cli>\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];
  g_dir = fs::temp_directory_path() / "phenoscreen_cli_test";
  fs::remove_all(g_dir);
  fs::create_directories(g_dir);

  expect(run("--help") == 0, "--help exits 0");
  for (const char* sub :
       {"synth", "featurize", "select", "evaluate", "stack-evaluate", "explain", "report"})
    expect(out_text().find(sub) != std::string::npos, std::string("--help lists ") + sub);
  expect(run("") == 1, "missing subcommand exits 1");
  expect(run("evaluate --definitely-not-a-flag") == 1, "unknown flag exits 1");
  expect(run("evaluate --help") == 0, "subcommand help exits 0");

  fs::path cohort = g_dir / "cohort";
  expect(run("synth --seed 5 --n 25 --events-target 1200 --out " + cohort.string()) == 0,
         "synth runs");
  for (const char* f : {"events.jsonl", "manifest.json", "catalog.csv", "labels.csv"})
    expect(fs::exists(cohort / f), std::string("synth writes ") + f);

  fs::path cohort2 = g_dir / "cohort2";
  run("synth --seed 5 --n 25 --events-target 1200 --out " + cohort2.string());
  expect(slurp(cohort / "events.jsonl") == slurp(cohort2 / "events.jsonl"),
         "same seed reproduces events byte for byte");
  fs::path cohort3 = g_dir / "cohort3";
  run("synth --seed 6 --n 25 --events-target 1200 --out " + cohort3.string());
  expect(slurp(cohort / "events.jsonl") != slurp(cohort3 / "events.jsonl"),
         "different seed changes the stream");
  expect(run("synth --n 10 --out " + (g_dir / "tiny").string()) == 1,
         "undersized cohort is a config error");

  fs::path feat = g_dir / "features";
  expect(run("featurize " + cohort_args(cohort) + " --out " + feat.string()) == 0,
         "featurize runs");
  {
    std::ifstream in(feat / "matrix.csv");
    std::string header;
    std::getline(in, header);
    std::size_t cols = std::count(header.begin(), header.end(), ',');
    expect(cols == 864, "matrix has 864 feature columns");
    expect(fs::exists(feat / "matrix_meta.json"), "featurize writes matrix_meta.json");
  }

  fs::path sel = g_dir / "selection.json";
  expect(run("select --matrix " + (feat / "matrix.csv").string() + " --labels " +
             (cohort / "labels.csv").string() + " --standardize --fs ig --k 6 --out " +
             sel.string()) == 0,
         "select runs");
  expect(slurp(sel).find("\"selected\"") != std::string::npos, "selection json has selected");

  // config file supplies k; an explicit flag wins over it
  fs::path cfg = g_dir / "cfg.json";
  std::ofstream(cfg) << "{\"fs\": {\"method\": \"ig\", \"k\": 7}}";
  fs::path sel7 = g_dir / "sel7.json";
  run("select --matrix " + (feat / "matrix.csv").string() + " --labels " +
      (cohort / "labels.csv").string() + " --standardize --config " + cfg.string() +
      " --out " + sel7.string());
  fs::path sel5 = g_dir / "sel5.json";
  run("select --matrix " + (feat / "matrix.csv").string() + " --labels " +
      (cohort / "labels.csv").string() + " --standardize --config " + cfg.string() +
      " --k 5 --out " + sel5.string());
  auto count_selected = [](const std::string& text) {
    auto at = text.find("\"selected\"");
    auto end = text.find(']', at);
    return std::count(text.begin() + at, text.begin() + end, '\n') - 1;
  };
  expect(count_selected(slurp(sel7)) == 7, "config file sets k=7");
  expect(count_selected(slurp(sel5)) == 5, "explicit --k overrides the config file");

  fs::path rep1 = g_dir / "dummy.json";
  expect(run("evaluate " + cohort_args(cohort) + " --spec dummy --out " + rep1.string()) == 0,
         "evaluate dummy runs");
  std::string rep_text = slurp(rep1);
  expect(rep_text.find("\"leakage\"") != std::string::npos, "report carries leakage counters");
  expect(rep_text.find("\"violations\": 0") != std::string::npos, "zero leakage violations");
  fs::path rep1b = g_dir / "dummy_b.json";
  run("evaluate " + cohort_args(cohort) + " --spec dummy --out " + rep1b.string());
  expect(slurp(rep1) == slurp(rep1b), "evaluation is byte-idempotent");

  fs::path rep2 = g_dir / "logit.json";
  expect(run("evaluate " + cohort_args(cohort) + " --spec logit --fs ig --k 5 --out " +
             rep2.string()) == 0,
         "evaluate logit+ig runs");

  expect(run("evaluate " + cohort_args(cohort) + " --spec no_such_model --out " +
             (g_dir / "x.json").string()) == 1,
         "unknown model kind is a config error");
  expect(run("evaluate --events /does/not/exist.jsonl --manifest " +
             (cohort / "manifest.json").string() + " --catalog " +
             (cohort / "catalog.csv").string() + " --labels " +
             (cohort / "labels.csv").string()) == 1,
         "missing input path is a config error");
  fs::path broken = g_dir / "broken.jsonl";
  std::ofstream(broken) << "this is not json\n";
  expect(run("evaluate --events " + broken.string() + " --manifest " +
             (cohort / "manifest.json").string() + " --catalog " +
             (cohort / "catalog.csv").string() + " --labels " +
             (cohort / "labels.csv").string()) == 2,
         "malformed events are a data error");

  fs::path ex = g_dir / "explain";
  expect(run("explain " + cohort_args(cohort) +
             " --spec logit --fs ig --k 4 --participant P001 --out " + ex.string()) == 0,
         "explain runs");
  expect(fs::exists(ex / "explanation.json"), "explanation json written");
  expect(fs::exists(ex / "summary.svg"), "summary svg written");
  expect(fs::exists(ex / "force_P001.svg"), "force svg written");
  expect(slurp(ex / "summary.svg").rfind("<svg", 0) == 0, "svg starts with <svg");

  fs::path report = g_dir / "report";
  expect(run("report --in " + rep1.string() + " --in " + rep2.string() + " --out " +
             report.string()) == 0,
         "report runs");
  std::string txt = slurp(report / "report.txt");
  expect(txt.find("dummy") != std::string::npos, "report lists the dummy run");
  expect(txt.find("logit") != std::string::npos, "report lists the logit run");
  expect(txt.find("best model per selection method") != std::string::npos,
         "report includes the per-method table");
  expect(fs::exists(report / "report.json"), "report json written");
  expect(run("report --out " + report.string()) == 1, "report without inputs exits 1");

  std::printf("%s\n", g_failures == 0 ? "ALL OK" : "FAILURES PRESENT");
  return g_failures == 0 ? 0 : 1;
}
