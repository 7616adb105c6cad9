#include "lakelet/extract.hpp"

#include <algorithm>
#include <regex>

#include "lakelet/classify.hpp"
#include "lakelet/text.hpp"
#include "lakelet/warehouse.hpp"

namespace lakelet {

namespace {

std::optional<std::vector<std::pair<std::string, std::string>>> csv_fields(
    std::string_view payload, const std::optional<std::vector<std::string>>& hint) {
  auto lines = payload_lines(payload);
  std::erase_if(lines, [](std::string_view l) { return text::trim(l).empty(); });
  if (lines.empty()) return std::nullopt;

  std::vector<std::string> header;
  std::vector<std::string> values;
  if (hint && lines.size() == 1) {
    for (char d : {',', '\t', ';', '|'}) {
      auto v = split_fields(lines.front(), d);
      if (v.size() == hint->size()) {
        header = *hint;
        values = std::move(v);
        break;
      }
    }
  } else if (lines.size() == 2) {
    const auto d = detect_delimiter(payload);
    if (!d) return std::nullopt;
    header = split_fields(lines[0], *d);
    values = split_fields(lines[1], *d);
  }
  if (header.empty() || header.size() != values.size()) return std::nullopt;
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    out.emplace_back(std::string(text::trim(header[i])), std::string(text::trim(values[i])));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& note_feature_names() {
  static const std::vector<std::string> names = {"note_bmi",     "note_systolic_bp", "note_diastolic_bp",
                                                 "note_pain",    "note_fatigue",     "note_neuropathy",
                                                 "note_blurred_vision", "note_smoker"};
  return names;
}

NoteFacts extract_note(std::string_view note) {
  static const std::regex patient_re(R"(\bPatient\s+#?(\d+))", std::regex::icase);
  static const std::regex bmi_re(R"(\bBMI\s*(?:of\s*)?(\d+(?:\.\d+)?))", std::regex::icase);
  static const std::regex bp_re(R"((\d{2,3})\s*/\s*(\d{2,3})\s*mm\s*Hg)", std::regex::icase);
  static const std::regex pain_re(R"(\bpain(?:\s+score)?\s*(\d{1,2})\s*/\s*10)", std::regex::icase);
  static const std::regex fatigue_re(R"(\bfatigue|\btired)", std::regex::icase);
  static const std::regex neuro_re(R"(\bnumbness|\btingling|\bneuropath)", std::regex::icase);
  static const std::regex vision_re(R"(\bblurred vision|\bblurry vision)", std::regex::icase);
  static const std::regex nonsmoker_re(R"(\bnon-?smoker|\bnever smok|\bdenies smoking)", std::regex::icase);
  static const std::regex smoker_re(R"(\bcurrent smoker|\bsmokes\b)", std::regex::icase);

  const std::string s(note);
  NoteFacts facts;
  std::smatch m;
  if (std::regex_search(s, m, patient_re)) facts.patient = m[1].str();
  if (std::regex_search(s, m, bmi_re)) facts.values["note_bmi"] = *text::parse_double(m[1].str());
  if (std::regex_search(s, m, bp_re)) {
    facts.values["note_systolic_bp"] = *text::parse_double(m[1].str());
    facts.values["note_diastolic_bp"] = *text::parse_double(m[2].str());
  }
  if (std::regex_search(s, m, pain_re)) facts.values["note_pain"] = *text::parse_double(m[1].str());
  facts.values["note_fatigue"] = std::regex_search(s, fatigue_re) ? 1.0 : 0.0;
  facts.values["note_neuropathy"] = std::regex_search(s, neuro_re) ? 1.0 : 0.0;
  facts.values["note_blurred_vision"] = std::regex_search(s, vision_re) ? 1.0 : 0.0;
  if (std::regex_search(s, nonsmoker_re)) {
    facts.values["note_smoker"] = 0.0;
  } else if (std::regex_search(s, smoker_re)) {
    facts.values["note_smoker"] = 1.0;
  }
  return facts;
}

bool key_less(const std::string& a, const std::string& b) {
  const auto ia = text::parse_int(a);
  const auto ib = text::parse_int(b);
  if (ia && ib) return *ia < *ib;
  if (ia != ib) return ia.has_value();  // numeric keys first
  return a < b;
}

PatientAssembler::PatientAssembler(const DatasetSpec& spec) : spec_(spec) {}

PatientAssembler::Patient& PatientAssembler::patient(const std::string& key) { return patients_[key]; }

void PatientAssembler::add_fields(const std::vector<std::pair<std::string, std::string>>& fields) {
  std::optional<std::string> key;
  for (const auto& [name, value] : fields) {
    if (name == spec_.key_column) key = value;
  }
  if (!key || key->empty()) return;
  Patient& p = patient(*key);
  for (const auto& [name, value] : fields) {
    const bool core = std::any_of(spec_.core.begin(), spec_.core.end(), [&](const auto& c) { return c.name == name; });
    if (core) {
      if (!value.empty()) p.core[name] = value;
      continue;
    }
    Accum& a = p.extra[name];
    auto& numeric = extra_numeric_.try_emplace(name, true).first->second;
    if (const auto v = text::parse_double(value)) {
      a.sum += *v;
      ++a.count;
    } else if (!value.empty()) {
      numeric = false;
      a.text = value;
    }
  }
}

void PatientAssembler::add(std::string_view payload, FormatClass format,
                           const std::optional<std::vector<std::string>>& schema_hint) {
  switch (format) {
    case FormatClass::kStructured:
      if (auto f = csv_fields(payload, schema_hint)) add_fields(*f);
      break;
    case FormatClass::kSemiStructured:
      if (auto f = flatten_document(payload)) add_fields(*f);
      break;
    case FormatClass::kUnstructured: {
      const NoteFacts facts = extract_note(payload);
      if (!facts.patient) break;
      saw_notes_ = true;
      Patient& p = patient(*facts.patient);
      for (const auto& [name, v] : facts.values) {
        p.notes[name].sum += v;
        ++p.notes[name].count;
      }
      break;
    }
  }
}

PatientTable PatientAssembler::table() const {
  PatientTable out;
  RawTable& t = out.features;
  for (const auto& c : spec_.core) {
    if (std::find(spec_.non_features.begin(), spec_.non_features.end(), c.name) != spec_.non_features.end()) continue;
    t.columns.push_back(
        {c.name, c.type == ColumnType::kCategorical ? ColumnKind::kCategorical : ColumnKind::kNumeric});
  }
  const std::size_t n_core = t.columns.size();
  std::vector<std::string> extras;
  for (const auto& [name, numeric] : extra_numeric_) {
    extras.push_back(name);
    t.columns.push_back({name, numeric ? ColumnKind::kNumeric : ColumnKind::kCategorical});
  }
  if (saw_notes_) {
    for (const auto& name : note_feature_names()) t.columns.push_back({name, ColumnKind::kNumeric});
  }

  std::vector<std::string> keys;
  for (const auto& [k, _] : patients_) keys.push_back(k);
  std::sort(keys.begin(), keys.end(), key_less);

  auto mean_of = [](const Accum& a) -> std::optional<std::string> {
    if (a.count == 0) return std::nullopt;
    return text::format_double(a.sum / static_cast<double>(a.count));
  };

  for (const auto& key : keys) {
    const Patient& p = patients_.at(key);
    RawRow row;
    for (std::size_t i = 0; i < n_core; ++i) {
      auto it = p.core.find(t.columns[i].name);
      row.push_back(it == p.core.end() ? std::nullopt : std::optional<std::string>(it->second));
    }
    for (const auto& name : extras) {
      auto it = p.extra.find(name);
      if (it == p.extra.end()) {
        row.push_back(std::nullopt);
      } else if (extra_numeric_.at(name)) {
        row.push_back(mean_of(it->second));
      } else {
        row.push_back(it->second.text);
      }
    }
    if (saw_notes_) {
      for (const auto& name : note_feature_names()) {
        auto it = p.notes.find(name);
        row.push_back(it == p.notes.end() ? std::nullopt : mean_of(it->second));
      }
    }
    t.rows.push_back(std::move(row));
    t.row_keys.push_back(key);
    auto label = p.core.find(spec_.label_column);
    out.labels.push_back(label == p.core.end() ? std::nullopt : std::optional<std::string>(label->second));
  }
  return out;
}

PatientTable extract_patients(Lake& lake, const Ticket& ticket, const DatasetSpec& spec) {
  PatientAssembler assembler(spec);
  for (const auto& entry : lake.catalog().all()) {
    const std::string payload = lake.read(entry.entity, ticket);
    assembler.add(payload, entry.technical.format, entry.technical.schema_hint);
  }
  return assembler.table();
}

PatientTable extract_patients(const std::vector<IngestRecord>& records, const DatasetSpec& spec) {
  PatientAssembler assembler(spec);
  for (const auto& r : records) assembler.add(r.payload, classify_format(r.payload));
  return assembler.table();
}

}  // namespace lakelet
