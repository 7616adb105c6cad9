#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lakelet/corpus.hpp"
#include "lakelet/features.hpp"
#include "lakelet/lake.hpp"

namespace lakelet {

// Numeric facts pulled out of one free-text clinical note.
struct NoteFacts {
  std::optional<std::string> patient;
  std::map<std::string, double> values;  // feature name -> value
};

NoteFacts extract_note(std::string_view note);

// Note-derived feature columns, in table order.
const std::vector<std::string>& note_feature_names();

struct PatientTable {
  RawTable features;  // row_keys hold the patient key
  std::vector<std::optional<std::string>> labels;
};

// Schema-on-read assembly of one row per patient. Core encounter columns
// come from CSV rows (header or schema hint) and JSON documents; any other
// JSON leaf becomes its own column under its dotted path, averaged when
// numeric; notes contribute averaged note features. Rows are ordered by
// patient key.
class PatientAssembler {
 public:
  explicit PatientAssembler(const DatasetSpec& spec);

  void add(std::string_view payload, FormatClass format,
           const std::optional<std::vector<std::string>>& schema_hint = std::nullopt);

  PatientTable table() const;

 private:
  struct Accum {
    double sum = 0.0;
    std::size_t count = 0;
    std::optional<std::string> text;
    bool numeric = true;
  };
  struct Patient {
    std::map<std::string, std::string> core;
    std::map<std::string, Accum> extra;
    std::map<std::string, Accum> notes;
  };

  void add_fields(const std::vector<std::pair<std::string, std::string>>& fields);
  Patient& patient(const std::string& key);

  const DatasetSpec& spec_;
  std::map<std::string, Patient> patients_;
  std::map<std::string, bool> extra_numeric_;
  bool saw_notes_ = false;
};

// Reads every cataloged entity through the guarded read path.
PatientTable extract_patients(Lake& lake, const Ticket& ticket, const DatasetSpec& spec);

// Same assembly straight from records, classifying each payload.
PatientTable extract_patients(const std::vector<IngestRecord>& records, const DatasetSpec& spec);

// Sorts patient keys numerically when both parse as integers.
bool key_less(const std::string& a, const std::string& b);

}  // namespace lakelet
