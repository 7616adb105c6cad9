#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lakelet/ingest.hpp"
#include "lakelet/warehouse.hpp"

namespace lakelet {

// Record-share of each format class; must sum to 1.
struct Composition {
  double structured = 0.2;
  double semi = 0.5;
  double unstructured = 0.3;
};

Composition parse_composition(std::string_view csv);

// Attribute layout of the diabetes encounter data: the core encounter
// columns (in order), which of them identify rows or hold the outcome, and
// the medication column used for recommendations.
struct DatasetSpec {
  std::vector<WarehouseColumn> core;
  std::string key_column;
  std::string label_column;
  std::string positive_label;  // outcome counted as success
  std::vector<std::string> non_features;
  std::string medication_column;
  std::vector<std::string> medications;

  WarehouseSchema warehouse_schema() const;
};

const DatasetSpec& diabetes_spec();

struct Corpus {
  std::vector<IngestRecord> records;
  std::vector<FormatClass> intended;  // generator's format per record
  std::uint64_t seed = 0;
  Composition composition;
  std::size_t groups = 0;
  std::unordered_map<std::string, std::size_t> planted_group;  // patient key -> group
};

// Deterministic synthetic corpus over the diabetes attribute set. Each
// patient has one encounter, written either as a two-line CSV record or as
// a JSON document that also carries nested lab results; the unstructured
// share is free-text clinical notes about those patients. Patients come
// from `groups` latent health-condition groups.
Corpus gen_corpus(std::size_t n, std::uint64_t seed, Composition composition = {}, std::size_t groups = 4);

// Loads the public diabetic_data.csv: each row becomes one encounter record,
// CSV or JSON according to the structured/semi split of `composition`.
Corpus load_uci_csv(const std::filesystem::path& file, std::uint64_t seed, Composition composition = {});

}  // namespace lakelet
