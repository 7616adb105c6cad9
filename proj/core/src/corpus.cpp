#include "lakelet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include "json.hpp"

#include "lakelet/classify.hpp"
#include "lakelet/error.hpp"
#include "lakelet/kmeans.hpp"
#include "lakelet/text.hpp"

namespace lakelet {

namespace {

using Json = nlohmann::ordered_json;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ = mix_seed(state_);
    return state_;
  }
  double uniform() { return unit_uniform(next()); }
  double normal(double mean, double sd) {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  // Normal draw clipped to two standard deviations.
  double bounded(double mean, double sd) { return mean + sd * std::clamp(normal(0.0, 1.0), -2.0, 2.0); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  bool chance(double p) { return uniform() < p; }
  const std::string& pick(const std::vector<std::string>& v, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    for (std::size_t i = 0; i < v.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return v[i];
    }
    return v.back();
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

std::int64_t clamp_round(double v, std::int64_t lo, std::int64_t hi) {
  return std::clamp<std::int64_t>(std::llround(v), lo, hi);
}

double round_to(double v, int decimals) {
  const double f = std::pow(10.0, decimals);
  return std::round(v * f) / f;
}

// Per-group shifts, in standard deviations, for the latent condition
// profiles: well-controlled, hyperglycemic, renal, cardiometabolic.
struct Profile {
  double glycemic = 0, renal = 0, cardio = 0;  // lab and note signal
  double acuity = 0;                            // weaker signal in core columns
};

Profile profile_for(std::size_t group) {
  static const Profile base[] = {
      {0.0, 0.0, 0.0, 0.0},
      {3.0, 0.0, 0.0, 0.6},
      {0.5, 4.5, 0.0, 1.2},
      {0.5, 0.0, 4.5, 0.9},
  };
  Profile p = base[group % 4];
  const double extra = static_cast<double>(group / 4);  // beyond four groups, push further out
  p.glycemic += 1.5 * extra;
  p.renal += 1.5 * extra * (group % 2);
  p.cardio += 1.5 * extra * ((group + 1) % 2);
  return p;
}

struct Patient {
  std::int64_t nbr = 0;
  std::int64_t encounter = 0;
  std::size_t group = 0;
  Profile profile;
};

Json encounter_fields(const Patient& p, Rng& rng) {
  const Profile& g = p.profile;
  Json j;
  j["encounter_id"] = p.encounter;
  j["patient_nbr"] = p.nbr;
  j["race"] = rng.pick({"Caucasian", "AfricanAmerican", "Hispanic", "Asian", "Other"}, {80, 12, 3, 1, 4});
  j["gender"] = rng.pick({"Female", "Male"}, {52, 48});
  j["age"] = clamp_round(rng.normal(52.0 + 8.0 * g.acuity, 12.0), 18, 95);
  j["admission_type_id"] = rng.pick({"1", "2", "3"}, {78, 10, 12});
  j["time_in_hospital"] = clamp_round(rng.normal(3.5 + 2.0 * g.acuity, 2.0), 1, 14);
  j["num_lab_procedures"] = clamp_round(rng.normal(38.0 + 9.0 * g.glycemic / 3.0 + 6.0 * g.acuity, 12.0), 1, 120);
  j["num_procedures"] = clamp_round(std::abs(rng.normal(1.0 + 0.5 * g.acuity, 1.2)), 0, 6);
  j["num_medications"] = clamp_round(rng.normal(12.0 + 6.0 * g.cardio / 3.0 + 4.0 * g.acuity, 5.0), 1, 80);
  j["number_outpatient"] = clamp_round(std::abs(rng.normal(0.0, 0.8 + 0.4 * g.acuity)), 0, 40);
  j["number_emergency"] = clamp_round(std::abs(rng.normal(0.0, 0.5 + 0.3 * g.acuity)), 0, 40);
  j["number_inpatient"] = clamp_round(std::abs(rng.normal(0.2 * g.acuity, 0.8)), 0, 20);
  j["number_diagnoses"] = clamp_round(rng.normal(6.0 + 1.0 * g.acuity, 1.8), 1, 16);
  return j;
}

}  // namespace

Composition parse_composition(std::string_view csv) {
  const auto parts = text::split(csv, ',');
  if (parts.size() != 3) fail(ErrorCode::kInvalidArgument, "composition needs three fractions");
  Composition c;
  double* slots[] = {&c.structured, &c.semi, &c.unstructured};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto v = text::parse_double(text::trim(parts[i]));
    if (!v || *v < 0.0) fail(ErrorCode::kInvalidArgument, "bad composition fraction: " + parts[i]);
    *slots[i] = *v;
  }
  if (std::abs(c.structured + c.semi + c.unstructured - 1.0) > 1e-9) {
    fail(ErrorCode::kInvalidArgument, "composition fractions must sum to 1");
  }
  return c;
}

WarehouseSchema DatasetSpec::warehouse_schema() const {
  WarehouseSchema s;
  s.columns = core;
  s.strict = true;
  return s;
}

const DatasetSpec& diabetes_spec() {
  static const DatasetSpec spec = [] {
    DatasetSpec d;
    auto num = [](std::string n) { return WarehouseColumn{std::move(n), ColumnType::kInteger, {}}; };
    auto cat = [](std::string n, std::vector<std::string> c) {
      return WarehouseColumn{std::move(n), ColumnType::kCategorical, std::move(c)};
    };
    d.core = {
        num("encounter_id"),
        num("patient_nbr"),
        cat("race", {"Caucasian", "AfricanAmerican", "Hispanic", "Asian", "Other"}),
        cat("gender", {"Female", "Male", "Unknown/Invalid"}),
        num("age"),
        cat("admission_type_id", {"1", "2", "3", "4", "5", "6", "7", "8"}),
        num("time_in_hospital"),
        num("num_lab_procedures"),
        num("num_procedures"),
        num("num_medications"),
        num("number_outpatient"),
        num("number_emergency"),
        num("number_inpatient"),
        num("number_diagnoses"),
        cat("max_glu_serum", {"None", "Norm", ">200", ">300"}),
        cat("A1Cresult", {"None", "Norm", ">7", ">8"}),
        cat("medication", {"metformin", "glipizide", "glyburide", "pioglitazone", "none"}),
        cat("change", {"No", "Ch"}),
        cat("diabetesMed", {"Yes", "No"}),
        cat("readmitted", {"NO", "<30", ">30"}),
    };
    d.key_column = "patient_nbr";
    d.label_column = "readmitted";
    d.positive_label = "NO";
    d.non_features = {"encounter_id", "patient_nbr", "readmitted"};
    d.medication_column = "medication";
    d.medications = {"metformin", "glipizide", "glyburide", "pioglitazone"};
    return d;
  }();
  return spec;
}

Corpus gen_corpus(std::size_t n, std::uint64_t seed, Composition composition, std::size_t groups) {
  if (n < 100) fail(ErrorCode::kInvalidArgument, "corpus needs at least 100 records");
  if (groups == 0) fail(ErrorCode::kInvalidArgument, "corpus needs at least one group");
  if (std::abs(composition.structured + composition.semi + composition.unstructured - 1.0) > 1e-9) {
    fail(ErrorCode::kInvalidArgument, "composition fractions must sum to 1");
  }
  const auto& spec = diabetes_spec();
  Rng rng(mix_seed(seed ^ 0x6c616b656c6574ULL));

  const auto n_struct = static_cast<std::size_t>(std::llround(composition.structured * static_cast<double>(n)));
  const auto n_semi =
      std::min(n - n_struct, static_cast<std::size_t>(std::llround(composition.semi * static_cast<double>(n))));
  const std::size_t n_notes = n - n_struct - n_semi;
  const std::size_t n_patients = std::max<std::size_t>(1, n_struct + n_semi > 0 ? n_struct + n_semi : n_notes);

  std::vector<Patient> patients(n_patients);
  for (std::size_t i = 0; i < n_patients; ++i) {
    patients[i].nbr = 100001 + static_cast<std::int64_t>(i) * 3 + static_cast<std::int64_t>(rng.below(3));
    patients[i].encounter = 2000001 + static_cast<std::int64_t>(i);
    patients[i].group = rng.below(groups);
    patients[i].profile = profile_for(patients[i].group);
  }

  Corpus corpus;
  corpus.seed = seed;
  corpus.composition = composition;
  corpus.groups = groups;
  for (const auto& p : patients) corpus.planted_group[std::to_string(p.nbr)] = p.group;

  struct Draft {
    IngestRecord record;
    FormatClass format;
  };
  std::vector<Draft> drafts;
  drafts.reserve(n);

  // Effective medication per group drives the readmission outcome.
  auto effective = [&](std::size_t group) { return spec.medications[group % spec.medications.size()]; };

  std::vector<std::size_t> order(n_patients);
  for (std::size_t i = 0; i < n_patients; ++i) order[i] = i;
  rng.shuffle(order);

  const std::size_t encounters = n_struct + n_semi;
  for (std::size_t e = 0; e < encounters; ++e) {
    const Patient& p = patients[order[e]];
    const Profile& g = p.profile;
    Json row = encounter_fields(p, rng);

    const double hba1c = round_to(rng.bounded(6.0 + 1.0 * g.glycemic, 0.5), 1);
    const double glucose = round_to(rng.bounded(105.0 + 28.0 * g.glycemic, 14.0), 0);
    const double creatinine = round_to(rng.bounded(0.9 + 0.3 * g.renal, 0.15), 2);
    const double egfr = round_to(rng.bounded(95.0 - 16.0 * g.renal, 8.0), 0);
    const double bun = round_to(rng.bounded(14.0 + 6.0 * g.renal, 3.0), 0);
    const double potassium = round_to(rng.bounded(4.2 + 0.3 * g.renal, 0.15), 1);
    const double albumin = round_to(rng.bounded(4.2 - 0.25 * g.renal - 0.1 * g.glycemic, 0.12), 1);
    const double ldl = round_to(rng.bounded(100.0 + 30.0 * g.cardio, 15.0), 0);
    const double hdl = round_to(rng.bounded(55.0 - 4.0 * g.cardio - 2.0 * g.renal, 4.0), 0);
    const double trig = round_to(rng.bounded(130.0 + 50.0 * g.cardio, 25.0), 0);
    const double crp = round_to(rng.bounded(2.0 + 1.5 * g.cardio + 0.5 * g.renal, 0.7), 1);
    const double alt = round_to(rng.bounded(24.0 + 6.0 * g.glycemic, 6.0), 0);
    const double hemoglobin = round_to(rng.bounded(14.0 - 0.5 * g.renal, 0.5), 1);
    const double uacr = round_to(rng.bounded(15.0 + 20.0 * g.renal + 8.0 * g.glycemic, 8.0), 0);
    const double sodium = round_to(rng.bounded(140.0 - 0.8 * g.renal, 1.5), 0);
    const double cholesterol = round_to(rng.bounded(180.0 + 25.0 * g.cardio, 12.0), 0);
    const double uric_acid = round_to(rng.bounded(5.0 + 0.5 * g.cardio + 0.4 * g.renal, 0.5), 1);
    const double ast = round_to(rng.bounded(22.0 + 5.0 * g.glycemic + 2.0 * g.cardio, 4.0), 0);
    const double ggt = round_to(rng.bounded(25.0 + 8.0 * g.glycemic, 6.0), 0);
    const double c_peptide = round_to(rng.bounded(2.0 + 0.5 * g.glycemic, 0.3), 1);
    const double phosphorus = round_to(rng.bounded(3.5 + 0.35 * g.renal, 0.25), 1);
    const double bicarbonate = round_to(rng.bounded(25.0 - 1.2 * g.renal, 1.0), 0);
    const double ferritin = round_to(rng.bounded(120.0 + 50.0 * g.renal, 30.0), 0);
    const double apob = round_to(rng.bounded(90.0 + 18.0 * g.cardio, 10.0), 0);
    const double bnp = round_to(rng.bounded(40.0 + 30.0 * g.cardio + 10.0 * g.renal, 15.0), 0);
    const double insulin_level = round_to(rng.bounded(10.0 + 4.0 * g.glycemic + 2.0 * g.cardio, 2.5), 1);

    std::string glu = "None";
    if (rng.chance(0.1)) glu = glucose < 150 ? "Norm" : (glucose < 200 ? ">200" : ">300");
    std::string a1c = "None";
    if (rng.chance(0.2)) a1c = hba1c < 7.0 ? "Norm" : (hba1c < 8.0 ? ">7" : ">8");
    row["max_glu_serum"] = glu;
    row["A1Cresult"] = a1c;
    const std::string& med = spec.medications[rng.below(spec.medications.size())];
    row["medication"] = med;
    row["change"] = rng.chance(0.2 + 0.05 * g.acuity) ? "Ch" : "No";
    row["diabetesMed"] = rng.chance(0.85) ? "Yes" : "No";
    const bool good = rng.chance(med == effective(p.group) ? 0.96 : 0.04);
    row["readmitted"] = good ? "NO" : (rng.chance(0.5) ? "<30" : ">30");

    if (e < n_struct) {
      std::vector<std::string> header;
      std::vector<std::string> values;
      for (const auto& col : spec.core) {
        header.push_back(col.name);
        const auto& v = row[col.name];
        values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
      drafts.push_back({{text::join(header, ",") + "\n" + text::join(values, ",") + "\n", SourceKind::kBulk,
                         "encounters.csv", 0},
                        FormatClass::kStructured});
    } else {
      Json lab;
      // The panel ordered usually follows the suspected condition.
      static const std::vector<std::string> panels = {"basic", "glycemic", "renal", "lipid"};
      lab["panel"] = rng.chance(0.85) ? panels[p.group % panels.size()] : panels[rng.below(panels.size())];
      lab["results"] = Json{{"hba1c", hba1c},
                            {"fasting_glucose", glucose},
                            {"creatinine", creatinine},
                            {"egfr", egfr},
                            {"bun", bun},
                            {"potassium", potassium},
                            {"albumin", albumin},
                            {"crp", crp},
                            {"ldl", ldl},
                            {"hdl", hdl},
                            {"triglycerides", trig},
                            {"alt", alt},
                            {"hemoglobin", hemoglobin},
                            {"uacr", uacr},
                            {"sodium", sodium},
                            {"cholesterol", cholesterol},
                            {"uric_acid", uric_acid},
                            {"fasting_insulin", insulin_level},
                            {"ast", ast},
                            {"ggt", ggt},
                            {"c_peptide", c_peptide},
                            {"phosphorus", phosphorus},
                            {"bicarbonate", bicarbonate},
                            {"ferritin", ferritin},
                            {"apob", apob},
                            {"bnp", bnp}};
      row["lab"] = lab;
      drafts.push_back({{row.dump(), SourceKind::kEvent, "ehr-events", 0}, FormatClass::kSemiStructured});
    }
  }

  // Clinical notes go round-robin over a shuffled patient order.
  static const std::vector<std::string> openings = {"Seen in clinic for follow-up.", "Routine diabetes review.",
                                                    "Telehealth visit.", "Post-discharge check."};
  std::vector<std::size_t> note_order = order;
  rng.shuffle(note_order);
  for (std::size_t i = 0; i < n_notes; ++i) {
    const Patient& p = patients[note_order[i % n_patients]];
    const Profile& g = p.profile;
    const double bmi = round_to(rng.bounded(25.0 + 2.0 * g.cardio + 0.8 * g.glycemic, 1.2), 1);
    const auto sys = clamp_round(rng.bounded(118.0 + 7.0 * g.cardio + 2.0 * g.renal, 4.0), 90, 220);
    const auto dia = clamp_round(rng.bounded(76.0 + 3.0 * g.cardio, 3.0), 50, 130);
    const auto pain = clamp_round(rng.bounded(2.0 + 1.0 * g.renal + 0.3 * g.glycemic, 0.8), 0, 10);
    std::string note = "Patient " + std::to_string(p.nbr) + ". " + openings[rng.below(openings.size())];
    note += " BMI " + text::format_double(bmi) + ".";
    note += " Blood pressure " + std::to_string(sys) + "/" + std::to_string(dia) + " mmHg.";
    note += " Pain score " + std::to_string(pain) + "/10.";
    std::vector<std::string> symptoms;
    if (rng.chance(std::min(0.9, 0.05 + 0.2 * g.renal))) symptoms.push_back("fatigue");
    if (rng.chance(std::min(0.9, 0.04 + 0.28 * g.glycemic))) symptoms.push_back("numbness in both feet");
    if (rng.chance(std::min(0.9, 0.03 + 0.25 * g.glycemic))) symptoms.push_back("blurred vision");
    if (symptoms.empty()) {
      note += " No new complaints.";
    } else {
      note += " Reports " + text::join(symptoms, " and ") + ".";
    }
    note += rng.chance(std::min(0.9, 0.06 + 0.18 * g.cardio)) ? " Current smoker." : " Non-smoker.";
    drafts.push_back({{std::move(note), SourceKind::kEvent, "clinical-notes", 0}, FormatClass::kUnstructured});
  }

  rng.shuffle(drafts);
  corpus.records.reserve(drafts.size());
  for (auto& d : drafts) {
    corpus.records.push_back(std::move(d.record));
    corpus.intended.push_back(d.format);
  }
  return corpus;
}

Corpus load_uci_csv(const std::filesystem::path& file, std::uint64_t seed, Composition composition) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::kIoFailure, "cannot read " + file.string());
  std::string header_line;
  if (!std::getline(in, header_line)) fail(ErrorCode::kParseError, "empty file " + file.string());
  if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
  const auto header = split_fields(header_line, ',');
  auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto& spec = diabetes_spec();
  for (const auto& c : spec.core) {
    if (c.name != "medication" && !col(c.name)) fail(ErrorCode::kParseError, "missing UCI column " + c.name);
  }

  Rng rng(mix_seed(seed ^ 0x7563692d637376ULL));
  const double semi_share = composition.structured + composition.semi > 0.0
                                ? composition.semi / (composition.structured + composition.semi)
                                : 0.0;
  Corpus corpus;
  corpus.seed = seed;
  corpus.composition = composition;
  std::unordered_map<std::string, bool> seen;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const auto f = split_fields(line, ',');
    if (f.size() != header.size()) continue;
    // Keep each patient's first encounter only.
    if (!seen.emplace(f[*col("patient_nbr")], true).second) continue;

    Json row;
    for (const auto& c : spec.core) {
      std::string v;
      if (c.name == "medication") {
        v = "none";
        for (const auto& m : spec.medications) {
          if (auto i = col(m); i && f[*i] != "No") {
            v = m;
            break;
          }
        }
      } else {
        v = f[*col(c.name)];
      }
      if (c.name == "age" && v.size() > 2 && v.front() == '[') {
        // "[50-60)" -> 55
        const auto lo = text::parse_int(v.substr(1, v.find('-') - 1)).value_or(0);
        v = std::to_string(lo + 5);
      }
      if (c.name == "race" && (v == "?" || v.empty())) v = "Other";
      if (c.name == "admission_type_id" &&
          std::find(c.categories.begin(), c.categories.end(), v) == c.categories.end()) {
        v = "6";
      }
      if (c.type == ColumnType::kCategorical) {
        row[c.name] = v;
      } else {
        row[c.name] = text::parse_int(v).value_or(0);
      }
    }
    if (rng.chance(semi_share)) {
      corpus.records.push_back({row.dump(), SourceKind::kEvent, file.filename().string(), 0});
      corpus.intended.push_back(FormatClass::kSemiStructured);
    } else {
      std::vector<std::string> names;
      std::vector<std::string> values;
      for (const auto& c : spec.core) {
        names.push_back(c.name);
        values.push_back(row[c.name].is_string() ? row[c.name].get<std::string>() : row[c.name].dump());
      }
      corpus.records.push_back(
          {text::join(names, ",") + "\n" + text::join(values, ",") + "\n", SourceKind::kBulk, file.filename().string(), 0});
      corpus.intended.push_back(FormatClass::kStructured);
    }
  }
  return corpus;
}

}  // namespace lakelet
