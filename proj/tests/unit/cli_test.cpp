#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "bonefrag/feature_table.hpp"
#include "bonefrag/synthetic.hpp"
#include "cli.hpp"
#include "test_util.hpp"

using namespace bonefrag;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun bonefrag_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string box_ply(double sx, double sy, double sz) {
  std::ostringstream s;
  s << "ply\nformat ascii 1.0\nelement vertex 8\nproperty float x\nproperty float y\nproperty float z\n"
       "element face 6\nproperty list uchar int vertex_indices\nend_header\n";
  for (int i = 0; i < 8; ++i) s << (i & 1) * sx << ' ' << ((i >> 1) & 1) * sy << ' ' << ((i >> 2) & 1) * sz << '\n';
  s << "4 0 2 3 1\n4 4 5 7 6\n4 0 1 5 4\n4 2 6 7 3\n4 0 4 6 2\n4 1 3 7 5\n";
  return s.str();
}

// Two fragments: A with 3 breaks, B with 4.
struct Corpus {
  testutil::TempDir dir;
  std::string annotations = "fragment_id,break_id,point_index,x,y,z,angle_deg,is_endpoint\n";
  std::string break_meta = "fragment_id,break_id,interior_edge,interrupted,ridge_notch,interior_notch\n";

  Corpus() {
    fs::create_directories(dir / "meshes");
    dir.write("meshes/A.ply", box_ply(4, 2, 1));
    dir.write("meshes/B.ply", box_ply(3, 3, 1));
    add("A", 3);
    add("B", 4);
    dir.write("ann.csv", annotations);
    dir.write("bmeta.csv", break_meta);
    dir.write("fmeta.csv", "fragment_id,label,trabecula\nA,hominin,true\nB,carnivore,false\n");
  }

  void add(const std::string& frag, int n) {
    for (int b = 0; b < n; ++b) {
      const std::string id = "B" + std::to_string(b);
      const int pts = 3 + b % 2;
      for (int p = 0; p < pts; ++p) {
        const bool end = p == 0 || p == pts - 1;
        annotations += frag + "," + id + "," + std::to_string(p) + "," + std::to_string(p * 0.5) + "," +
                       std::to_string(0.1 * b + 0.05 * p * p) + ",0.2," + (end ? "" : std::to_string(80 + 5 * b + p)) +
                       "," + (end ? "true" : "false") + "\n";
      }
      break_meta += frag + "," + id + "," + (b % 2 ? "break" : "endosteal") + ",false," + (b == 1 ? "true" : "false") +
                    ",false\n";
    }
  }

  std::vector<std::string> extract_args(const std::string& prefix) const {
    return {"extract", "--mesh-dir", (dir / "meshes").string(), "--annotations", (dir / "ann.csv").string(),
            "--break-meta", (dir / "bmeta.csv").string(), "--fragment-meta", (dir / "fmeta.csv").string(),
            "--out-prefix", (dir / prefix).string()};
  }
};

}  // namespace

TEST(CliExtract, WritesBothLevels) {
  Corpus c;
  const CliRun r = bonefrag_cli(c.extract_args("x"));
  ASSERT_EQ(r.code, 0) << r.err;
  const FeatureTable breaks = read_features_csv(c.dir / "x_breaks.csv");
  const FeatureTable frags = read_features_csv(c.dir / "x_fragments.csv");
  EXPECT_EQ(breaks.size(), 7u);
  EXPECT_EQ(frags.size(), 2u);
  EXPECT_EQ(frags.width(), 66u);
  EXPECT_EQ(frags.rows(0, 0), 3.0);
  EXPECT_NEAR(frags.rows(0, 2), 8.0, 1e-9);
  EXPECT_TRUE(fs::exists(c.dir / "x_manifest.txt"));
  const auto cfg = nlohmann::json::parse(testutil::slurp(c.dir / "x_breaks.csv.config.json"));
  EXPECT_EQ(cfg["command"], "extract");

  ASSERT_EQ(bonefrag_cli(c.extract_args("y")).code, 0);
  EXPECT_EQ(testutil::slurp(c.dir / "x_breaks.csv"), testutil::slurp(c.dir / "y_breaks.csv"));
  EXPECT_EQ(testutil::slurp(c.dir / "x_fragments.csv"), testutil::slurp(c.dir / "y_fragments.csv"));
}

TEST(CliExtract, UnknownFragmentIsDataError) {
  Corpus c;
  c.dir.write("ann.csv", c.annotations + "Z,B0,0,0,0,0,,true\nZ,B0,1,1,0,0,90,false\nZ,B0,2,2,0,0,,true\n");
  const CliRun r = bonefrag_cli(c.extract_args("x"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("'Z'"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(c.dir / "x_breaks.csv"));
}

TEST(CliExtract, MissingMeshRemovesOutputs) {
  Corpus c;
  fs::remove(c.dir / "meshes/B.ply");
  const CliRun r = bonefrag_cli(c.extract_args("x"));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("B"), std::string::npos);
  EXPECT_FALSE(fs::exists(c.dir / "x_breaks.csv"));
  EXPECT_FALSE(fs::exists(c.dir / "x_fragments.csv"));
}

namespace {

fs::path blob_csv(const testutil::TempDir& dir, double sep = 6.0) {
  const auto p = dir / "blobs.csv";
  write_features_csv(generate_blob_dataset(30, 2, sep, 4), p);
  return p;
}

}  // namespace

TEST(CliExperiment, SevenAlgorithmsOneRowEach) {
  testutil::TempDir dir;
  const auto data = blob_csv(dir);
  const std::string seven = dir.write("seven.json", R"({"trials": 3, "specs": [)"
                                                    R"({"algorithm": "random_forest", "params": {"n_trees": 20}},)"
                                                    R"({"algorithm": "linear_svm"}, {"algorithm": "rbf_svm"},)"
                                                    R"({"algorithm": "neural_net", "params": {"profile": "compact", "epochs": 3}},)"
                                                    R"({"algorithm": "lda"}, {"algorithm": "gaussian_nb"},)"
                                                    R"({"algorithm": "knn", "params": {"k": 3}}]})")
                                .string();
  const std::string out = (dir / "a.csv").string();
  std::vector<std::string> texts;
  for (const char* threads : {"1", "2"}) {
    const CliRun r = bonefrag_cli({"--seed", "5", "--threads", threads, "--config", seven, "experiment", "--dataset",
                                   data.string(), "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    texts.push_back(testutil::slurp(out) + testutil::slurp(out + ".config.json"));
  }
  const std::string a = testutil::slurp(out);
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 8);
  EXPECT_EQ(texts[0], texts[1]);
  const auto rec = nlohmann::json::parse(testutil::slurp(out + ".config.json"));
  EXPECT_EQ(rec["config"]["trials"], 3);
  EXPECT_EQ(rec["config"]["seed"], 5);
  EXPECT_EQ(rec["config"]["specs"].size(), 7u);
  EXPECT_EQ(rec["config"]["specs"][6]["params"]["k"], 3);
  EXPECT_FALSE(rec["config"].contains("threads"));

  // flags beat the file
  const CliRun r = bonefrag_cli({"--seed", "5", "--config", seven, "experiment", "--dataset", data.string(), "--trials",
                                 "2", "--algorithms", "lda,knn", "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto over = nlohmann::json::parse(testutil::slurp(out + ".config.json"));
  EXPECT_EQ(over["config"]["trials"], 2);
  EXPECT_EQ(over["config"]["algorithms"], (nlohmann::json{"lda", "knn"}));
  EXPECT_EQ(over["config"]["specs"][1]["params"]["k"], 25);
}

TEST(CliExperiment, GeneratedSeedIsPrintedAndRecorded) {
  testutil::TempDir dir;
  const auto data = blob_csv(dir);
  const CliRun r = bonefrag_cli({"experiment", "--dataset", data.string(), "--trials", "2", "--algorithms", "lda", "--out",
                              (dir / "a.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = (r.out + r.err).find("seed: ");
  ASSERT_NE(pos, std::string::npos);
  const auto rec = nlohmann::json::parse(testutil::slurp(dir / "a.csv.config.json"));
  EXPECT_EQ(std::to_string(rec["config"]["seed"].get<std::uint64_t>()),
            (r.out + r.err).substr(pos + 6, (r.out + r.err).find('\n', pos) - pos - 6));
}

TEST(CliExperiment, ValidationFailures) {
  testutil::TempDir dir;
  const auto data = blob_csv(dir);
  RandomDatasetConfig rc;
  rc.n_fragments = 8;
  write_features_csv(generate_random_dataset(rc), dir / "breaks.csv");
  const std::string out = (dir / "o.csv").string();
  EXPECT_EQ(bonefrag_cli({"--seed", "1", "experiment", "--dataset", (dir / "breaks.csv").string(), "--trials", "2",
                          "--algorithms", "lda", "--out", out})
                .code,
            2);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(bonefrag_cli({"--seed", "1", "experiment", "--dataset", data.string(), "--algorithms", "svm", "--out", out}).code, 2);
  EXPECT_EQ(bonefrag_cli({"--seed", "1", "experiment", "--dataset", data.string(), "--trials", "x", "--out", out}).code, 2);
  EXPECT_EQ(bonefrag_cli({"--seed", "1", "experiment", "--out", out}).code, 2);
  EXPECT_EQ(bonefrag_cli({"experiment", "--bogus"}).code, 2);
  EXPECT_EQ(bonefrag_cli({}).code, 2);
  const std::string bad_cfg = dir.write("bad.json", R"({"trails": 3})").string();
  const CliRun r = bonefrag_cli({"--seed", "1", "--config", bad_cfg, "experiment", "--dataset", data.string(), "--out", out});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("config.trails"), std::string::npos) << r.err;
  EXPECT_EQ(bonefrag_cli({"--seed", "1", "experiment", "--dataset", (dir / "missing.csv").string(), "--out", out}).code, 3);
  EXPECT_EQ(bonefrag_cli({"--help"}).code, 0);
}

TEST(CliSpectral, BlobsClusterPerfectly) {
  testutil::TempDir dir;
  const auto data = blob_csv(dir, 10.0);
  const CliRun r = bonefrag_cli({"--seed", "3", "spectral", "--dataset", data.string(), "--out", (dir / "s.csv").string(),
                              "--scatter", (dir / "sc.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string rep = testutil::slurp(dir / "s.csv");
  EXPECT_NE(rep.find("\nfragment,2,1,"), std::string::npos) << rep;
  const std::string sc = testutil::slurp(dir / "sc.csv");
  EXPECT_EQ(std::count(sc.begin(), sc.end(), '\n'), 61);

  const CliRun bad = bonefrag_cli({"--seed", "3", "spectral", "--dataset", data.string(), "--k-dims", "3", "--out",
                                (dir / "t.csv").string(), "--scatter", (dir / "tc.csv").string()});
  EXPECT_EQ(bad.code, 2);
  EXPECT_FALSE(fs::exists(dir / "t.csv"));
}

TEST(CliAudit, RejectsZeroTrials) {
  testutil::TempDir dir;
  EXPECT_EQ(bonefrag_cli({"--seed", "1", "audit", "--trials", "0", "--out", (dir / "a.csv").string()}).code, 2);
  EXPECT_FALSE(fs::exists(dir / "a.csv"));
}

TEST(CliIngest, CleansAndReports) {
  testutil::TempDir dir;
  dir.write("raw.csv", "Length,Notch,Agent\n10,present,h\n12,absent,c\n15,2,h\n");
  dir.write("schema.json",
            R"({"level": "break", "columns": [{"name": "Length", "kind": "numeric"},)"
            R"({"name": "Notch", "kind": "boolean"}, {"name": "Agent", "kind": "label"}]})");
  const CliRun r = bonefrag_cli({"ingest", "--input", (dir / "raw.csv").string(), "--schema", (dir / "schema.json").string(),
                              "--out", (dir / "clean.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("dropped-corrupted"), std::string::npos) << r.out;
  const FeatureTable t = read_features_csv(dir / "clean.csv");
  EXPECT_EQ(t.column_names, std::vector<std::string>{"Length"});
  EXPECT_EQ(t.size(), 3u);
}
