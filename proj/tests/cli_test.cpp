#include <gtest/gtest.h>

#include "cli.hpp"
#include "support.hpp"

using namespace flowgebd;
using testsupport::TempDir;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "flowgebd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string kGolden = std::string(FLOWGEBD_FIXTURES) + "/eval_golden";

}  // namespace

TEST(Cli, UsageErrors) {
  TempDir tmp("cli_usage");
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"detect", "--mode", "x", "--input", "a", "--out", tmp.path()}).code, 2);
  EXPECT_EQ(run({"detect", "--grid-n", "0", "--input", "a", "--out", tmp.path()}).code, 2);
  EXPECT_EQ(run({"detect", "--theta1", "1.5", "--input", "a", "--out", tmp.path()}).code, 2);
  EXPECT_EQ(run({"eval", "--pred-dir", tmp.path(), "--annotations", "a.json", "--taus", "0,1"}).code, 2);
  EXPECT_EQ(run({"synth", "--kind", "nope", "--out", tmp.path()}).code, 2);
  EXPECT_EQ(run({"detect", "--survival", "maybe", "--input", "a", "--out", tmp.path()}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, RuntimeErrors) {
  TempDir tmp("cli_rt");
  const CliResult r = run({"detect", "--input", (tmp.path() / "missing").string(), "--fps-native", "4", "--out",
                           (tmp.path() / "p").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"eval", "--pred-dir", kGolden + "/preds", "--annotations", (tmp.path() / "no.json").string()}).code,
            1);
  EXPECT_EQ(run({"eval", "--pred-dir", (tmp.path() / "nodir").string(), "--annotations",
                 kGolden + "/annotations.json"})
                .code,
            1);
}

TEST(Cli, EvalGoldenAndSingleTau) {
  TempDir tmp("cli_eval");
  const CliResult r = run({"eval", "--pred-dir", kGolden + "/preds", "--annotations", kGolden + "/annotations.json",
                           "--out", (tmp.path() / "rep").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string expected = testsupport::slurp(kGolden + "/expected_report.csv");
  EXPECT_EQ(r.out, expected);
  EXPECT_EQ(testsupport::slurp(tmp.path() / "rep" / "report.csv"), expected);
  EXPECT_TRUE(std::filesystem::exists(tmp.path() / "rep" / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(tmp.path() / "rep" / "per_video.csv"));

  const CliResult one = run({"eval", "--pred-dir", kGolden + "/preds", "--annotations", kGolden + "/annotations.json",
                             "--taus", "0.05"});
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out,
            "metric,tau_0.05,avg\nprecision,0.375000,0.375000\nrecall,0.428571,0.428571\nf1,0.400000,0.400000\n");
}

TEST(Cli, SynthDetectEvalPipeline) {
  TempDir tmp("cli_pipe");
  const auto corpus = tmp.path() / "corpus";
  ASSERT_EQ(run({"synth", "--kind", "scene-cut", "--corpus", "2", "--seed", "3", "--out", corpus.string()}).code, 0);
  for (const char* id : {"scene-cut_0", "scene-cut_1"}) {
    const CliResult d = run({"detect", "--input", (corpus / id).string(), "--fps-native", "4", "--out",
                             (tmp.path() / "preds").string(), "--threads", "2"});
    ASSERT_EQ(d.code, 0) << d.err;
  }
  const Prediction p = read_prediction(tmp.path() / "preds" / "scene-cut_0.json");
  EXPECT_EQ(p.method, "ensemble");
  EXPECT_DOUBLE_EQ(p.duration_s, 10.0);
  EXPECT_DOUBLE_EQ(p.config.at("theta1").get<double>(), 0.4);
  EXPECT_EQ(p.config.at("survival"), "tracked");
  const CliResult e = run({"eval", "--pred-dir", (tmp.path() / "preds").string(), "--annotations",
                           (corpus / "annotations.json").string(), "--taus", "0.05"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("f1,1.000000"), std::string::npos) << e.out;
}

TEST(Cli, FramewiseGridMatchesLibrary) {
  TempDir tmp("cli_frame");
  ASSERT_EQ(run({"synth", "--kind", "scene-cut", "--events", "2.5,6", "--seed", "1", "--out",
                 (tmp.path() / "v").string()})
                .code,
            0);
  ASSERT_EQ(run({"detect", "--mode", "pt", "--grid-n", "1", "--input", (tmp.path() / "v").string(), "--fps-native",
                 "4", "--out", (tmp.path() / "p").string()})
                .code,
            0);
  SynthSpec spec = corpus_spec(SynthKind::SceneCut, 1);
  spec.events = {2.5, 6.0};
  const SynthVideo v = render(spec);
  const BoundarySet lib = detect_pt(v.seq, make_grid(160, 160, 1, 1), PtConfig{}, true);
  EXPECT_EQ(read_prediction(tmp.path() / "p" / "v.json").boundaries_s, lib.timestamps);
  EXPECT_EQ(lib.timestamps, (std::vector<double>{2.5, 6.0}));
}

TEST(Cli, ThreadCountIsInvisibleInOutput) {
  TempDir tmp("cli_threads");
  const auto corpus = tmp.path() / "c";
  ASSERT_EQ(run({"synth", "--kind", "motion-onset", "--corpus", "2", "--out", corpus.string()}).code, 0);
  nlohmann::json manifest = nlohmann::json::array();
  for (const char* id : {"motion-onset_0", "motion-onset_1"}) {
    manifest.push_back({{"input", id}, {"fps_native", 4}});
  }
  testsupport::write_text(corpus / "manifest.json", manifest.dump());
  for (const char* t : {"1", "8"}) {
    const CliResult r = run({"detect", "--batch", (corpus / "manifest.json").string(), "--threads", t, "--out",
                             (tmp.path() / (std::string("t") + t)).string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* id : {"motion-onset_0.json", "motion-onset_1.json"}) {
    EXPECT_EQ(testsupport::slurp(tmp.path() / "t1" / id), testsupport::slurp(tmp.path() / "t8" / id));
  }
}

TEST(Cli, DumpSeries) {
  TempDir tmp("cli_dump");
  ASSERT_EQ(run({"synth", "--kind", "static", "--duration", "2", "--out", (tmp.path() / "s").string()}).code, 0);
  const CliResult r = run({"detect", "--mode", "fn", "--dump-series", "--grid-n", "2", "--input",
                           (tmp.path() / "s").string(), "--fps-native", "4", "--out", (tmp.path() / "p").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = testsupport::slurp(tmp.path() / "p" / "s.series.csv");
  // 5 patches x 7 transitions plus the header.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 36);
  EXPECT_TRUE(read_prediction(tmp.path() / "p" / "s.json").boundaries_s.empty());
}

TEST(Cli, SweepSliceMatchesDetectAtDefaults) {
  TempDir tmp("cli_sweep");
  const CliResult s = run({"sweep", "--synthetic", "3", "--kind", "scene-cut", "--theta1", "0.4", "--theta2", "0.25",
                           "--theta3", "1.0:1.0:1.0", "--modes", "pt,fn,ensemble"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(s.out,
            "theta1,theta2,theta3,mode,f1@0.05\n"
            "0.40,0.25,1.00,pt,1.000000\n"
            "0.40,0.25,1.00,fn,1.000000\n"
            "0.40,0.25,1.00,ensemble,1.000000\n");

  // Same cell through synth + detect + eval.
  const auto corpus = tmp.path() / "c";
  ASSERT_EQ(run({"synth", "--kind", "scene-cut", "--corpus", "3", "--out", corpus.string()}).code, 0);
  for (int i = 0; i < 3; ++i) {
    const std::string id = "scene-cut_" + std::to_string(i);
    ASSERT_EQ(run({"detect", "--input", (corpus / id).string(), "--fps-native", "4", "--theta3", "1.0", "--out",
                   (tmp.path() / "p").string()})
                  .code,
              0);
  }
  const CliResult e = run({"eval", "--pred-dir", (tmp.path() / "p").string(), "--annotations",
                           (corpus / "annotations.json").string(), "--taus", "0.05"});
  EXPECT_NE(e.out.find("f1,1.000000"), std::string::npos) << e.out;
}

TEST(Cli, SweepGridSize) {
  const CliResult s = run({"sweep", "--synthetic", "1", "--kind", "static", "--modes", "fn"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(std::count(s.out.begin(), s.out.end(), '\n'), 1 + 9 * 9 * 6);
}

TEST(Cli, LiteralSurvivalRuleFiresOnStaticVideo) {
  TempDir tmp("cli_survival");
  ASSERT_EQ(run({"synth", "--kind", "static", "--duration", "3", "--out", (tmp.path() / "s").string()}).code, 0);
  for (const char* rule : {"tracked", "nonzero-flow"}) {
    const CliResult r = run({"detect", "--mode", "pt", "--survival", rule, "--input", (tmp.path() / "s").string(),
                             "--fps-native", "4", "--out", (tmp.path() / rule).string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_TRUE(read_prediction(tmp.path() / "tracked" / "s.json").boundaries_s.empty());
  EXPECT_FALSE(read_prediction(tmp.path() / "nonzero-flow" / "s.json").boundaries_s.empty());
}
