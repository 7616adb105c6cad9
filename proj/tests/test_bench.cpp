#include <gtest/gtest.h>

#include <fstream>

#include "lakelet/bench.hpp"
#include "lakelet/classify.hpp"
#include "lakelet/config.hpp"
#include "lakelet/corpus.hpp"
#include "lakelet/extract.hpp"
#include "support.hpp"

namespace lakelet {
namespace {

using testing::error_of;

BenchConfig config_in(const testing::TempDir& dir) {
  BenchConfig c;
  c.workdir = dir.path();
  return c;
}

TEST(Corpus, Deterministic) {
  const auto a = gen_corpus(500, 9), b = gen_corpus(500, 9), c = gen_corpus(500, 10);
  ASSERT_EQ(a.records.size(), 500u);
  bool same = true, differs = false;
  for (std::size_t i = 0; i < 500; ++i) {
    same = same && a.records[i].payload == b.records[i].payload;
    differs = differs || a.records[i].payload != c.records[i].payload;
  }
  EXPECT_TRUE(same);
  EXPECT_TRUE(differs);
}

TEST(Corpus, CompositionAndClassification) {
  const auto all_structured = gen_corpus(200, 1, {1.0, 0.0, 0.0});
  for (const auto& r : all_structured.records) EXPECT_EQ(classify_format(r.payload), FormatClass::kStructured);

  const auto mixed = gen_corpus(1000, 2);
  std::map<FormatClass, int> counts;
  for (std::size_t i = 0; i < mixed.records.size(); ++i) {
    EXPECT_EQ(classify_format(mixed.records[i].payload), mixed.intended[i]);
    ++counts[mixed.intended[i]];
  }
  EXPECT_EQ(counts[FormatClass::kStructured], 200);
  EXPECT_EQ(counts[FormatClass::kSemiStructured], 500);
  EXPECT_EQ(counts[FormatClass::kUnstructured], 300);
  EXPECT_EQ(mixed.planted_group.size(), 700u);
}

TEST(Corpus, Errors) {
  EXPECT_EQ(error_of([] { gen_corpus(99, 1); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(error_of([] { parse_composition("0.5,0.5,0.5"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(error_of([] { parse_composition("1,0"); }), ErrorCode::kInvalidArgument);
  const auto c = parse_composition("0.1, 0.6, 0.3");
  EXPECT_DOUBLE_EQ(c.semi, 0.6);
}

TEST(Corpus, UciLoaderKeepsFirstEncounter) {
  testing::TempDir dir;
  std::ofstream out(dir / "diabetic_data.csv");
  out << "encounter_id,patient_nbr,race,gender,age,admission_type_id,time_in_hospital,num_lab_procedures,"
         "num_procedures,num_medications,number_outpatient,number_emergency,number_inpatient,number_diagnoses,"
         "max_glu_serum,A1Cresult,metformin,glipizide,glyburide,pioglitazone,change,diabetesMed,readmitted\n"
         "1,100,Caucasian,Female,[50-60),1,3,40,1,10,0,0,0,7,None,>7,Steady,No,No,No,Ch,Yes,NO\n"
         "2,100,Caucasian,Female,[50-60),1,5,41,1,11,0,0,0,7,None,>7,No,No,No,No,No,Yes,<30\n"
         "3,200,?,Male,[70-80),9,2,12,0,5,1,0,1,9,>200,None,No,Up,No,No,Ch,Yes,>30\n";
  out.close();
  const auto c = load_uci_csv(dir / "diabetic_data.csv", 1, {1.0, 0.0, 0.0});
  ASSERT_EQ(c.records.size(), 2u);
  const auto table = extract_patients(c.records, diabetes_spec());
  ASSERT_EQ(table.features.rows.size(), 2u);
  const auto age = *table.features.column_index("age");
  const auto race = *table.features.column_index("race");
  const auto med = *table.features.column_index("medication");
  EXPECT_EQ(table.features.rows[0][age], "55");
  EXPECT_EQ(table.features.rows[0][med], "metformin");
  EXPECT_EQ(table.features.rows[1][race], "Other");
  EXPECT_EQ(table.features.rows[1][med], "glipizide");
  EXPECT_EQ(table.labels[0], "NO");
}

TEST(Extract, NoteFacts) {
  const auto f = extract_note(
      "Patient 100123. Follow-up visit. BMI 31.5. Blood pressure 142/91 mmHg. Pain score 4/10. "
      "Reports fatigue and blurred vision. Non-smoker.");
  EXPECT_EQ(f.patient, "100123");
  EXPECT_DOUBLE_EQ(f.values.at("note_bmi"), 31.5);
  EXPECT_DOUBLE_EQ(f.values.at("note_systolic_bp"), 142);
  EXPECT_DOUBLE_EQ(f.values.at("note_diastolic_bp"), 91);
  EXPECT_DOUBLE_EQ(f.values.at("note_pain"), 4);
  EXPECT_DOUBLE_EQ(f.values.at("note_fatigue"), 1);
  EXPECT_DOUBLE_EQ(f.values.at("note_blurred_vision"), 1);
  EXPECT_DOUBLE_EQ(f.values.at("note_neuropathy"), 0);
  EXPECT_DOUBLE_EQ(f.values.at("note_smoker"), 0);
  EXPECT_FALSE(extract_note("no identifiers here").patient);
}

TEST(Extract, AssemblerJoinsFormatsPerPatient) {
  const auto corpus = gen_corpus(400, 3);
  const auto table = extract_patients(corpus.records, diabetes_spec());
  EXPECT_EQ(table.features.rows.size(), corpus.planted_group.size());
  EXPECT_TRUE(table.features.column_index("note_bmi"));
  EXPECT_TRUE(table.features.column_index("lab.results.hba1c"));
  EXPECT_FALSE(table.features.column_index("readmitted"));
  EXPECT_FALSE(table.features.column_index("patient_nbr"));
  EXPECT_TRUE(std::is_sorted(table.features.row_keys.begin(), table.features.row_keys.end(), key_less));
}

TEST(Config, ParsesKeys) {
  const auto c = parse_config("# lake\nroot=data\nclock=simulated\nk=6\nnode=a:2:1024\nnode=b:4:2048\n"
                              "capacity_bytes=100\n",
                              "/srv");
  EXPECT_EQ(c.root, std::filesystem::path("/srv/data"));
  EXPECT_EQ(c.clock, ClockMode::kSimulated);
  EXPECT_EQ(c.default_k, 6u);
  ASSERT_EQ(c.nodes.size(), 2u);
  EXPECT_EQ(c.nodes[1].memory_mb, 2048);
  EXPECT_EQ(c.capacity_bytes, 100u);
  EXPECT_EQ(c.policies_path(), std::filesystem::path("/srv/data/policies.tsv"));
  EXPECT_EQ(error_of([] { parse_config("colour=blue\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([] { parse_config("k=0\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([] { parse_node_spec("a:b:c"); }), ErrorCode::kParseError);
  EXPECT_EQ(load_config("/nonexistent/lakelet.conf").default_k, 8u);
}

TEST(Bench, Rq1SmallRun) {
  testing::TempDir dir;
  const auto r = run_rq1(gen_corpus(1000, 42), config_in(dir));
  EXPECT_EQ(r.lake_ingested, 1000u);
  EXPECT_EQ(r.dw_accepted + r.dw_rejected, 1000u);
  EXPECT_EQ(r.dw_rejected, 300u);  // every note
  EXPECT_GT(r.dropped_fields, 0u);
  EXPECT_GT(r.audit_events, 0u);
  EXPECT_GT(r.ratio, 0.0);
  EXPECT_LT(r.ratio, 1.0);
  for (const auto& c : r.per_class) {
    if (c.mean_it_dw) EXPECT_LT(*c.paired_lake, *c.mean_it_dw);
  }
  for (const auto& j : r.jobs) EXPECT_EQ(j.state, JobState::kReleased);
  EXPECT_EQ(r.series.size(), 1000u);
  EXPECT_NE(format_rq1_report(r).find("paired"), std::string::npos);
}

TEST(Bench, Rq1ZeroTransformCostStillFavoursLake) {
  testing::TempDir dir;
  auto cfg = config_in(dir);
  cfg.cost.transform_per_field_ms = 0.0;
  const auto r = run_rq1(gen_corpus(300, 5, {1.0, 0.0, 0.0}), cfg);
  EXPECT_EQ(r.dw_accepted, 300u);
  EXPECT_LT(r.ratio, 1.0);
  for (const auto& p : r.series) EXPECT_LE(*p.it_lake, *p.it_dw);
}

TEST(Bench, Rq2DegenerateSchemaGivesEqualPrecision) {
  testing::TempDir dir;
  const auto r = run_rq2(gen_corpus(600, 4, {1.0, 0.0, 0.0}), 8, 4, config_in(dir));
  EXPECT_EQ(r.lake_dims, r.dw_dims);
  ASSERT_EQ(r.rows.size(), 4u);
  for (const auto& row : r.rows) {
    EXPECT_NEAR(row.d_lake, row.d_dw, 1e-9);
    EXPECT_EQ(row.lake_size, row.dw_size);
  }
}

TEST(Bench, Rq2DeterministicAndLosesDims) {
  testing::TempDir d1, d2;
  const auto corpus = gen_corpus(1500, 8);
  const auto a = run_rq2(corpus, 8, 8, config_in(d1));
  const auto b = run_rq2(corpus, 8, 8, config_in(d2));
  EXPECT_EQ(format_rq2_report(a), format_rq2_report(b));
  EXPECT_LT(a.dw_dims, a.lake_dims);
  EXPECT_GT(a.audit_events, 0u);
}

TEST(Bench, PlantedGroupsRecoveredOnLabRichCorpus) {
  testing::TempDir dir;
  const auto r = run_rq2(gen_corpus(2000, 42, {0.0, 0.7, 0.3}), 8, 42, config_in(dir));
  EXPECT_GE(r.lake_purity, 0.9);
}

TEST(Bench, PurityHelper) {
  const std::vector<std::size_t> assign{0, 0, 0, 1, 1, 2};
  const std::vector<std::size_t> truth{5, 5, 6, 7, 7, 7};
  EXPECT_DOUBLE_EQ(cluster_purity(assign, {0, 1}, truth), 4.0 / 5.0);
}

}  // namespace
}  // namespace lakelet
