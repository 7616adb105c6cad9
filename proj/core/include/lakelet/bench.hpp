#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lakelet/corpus.hpp"
#include "lakelet/cost_model.hpp"
#include "lakelet/scheduler.hpp"
#include "lakelet/security.hpp"
#include "lakelet/warehouse.hpp"

namespace lakelet {

inline constexpr UnixMillis kBenchEpochMs = 1'700'000'000'000;

struct BenchConfig {
  std::filesystem::path workdir = "bench";
  std::vector<NodeSpec> nodes = {{"node-1", 4, 8192}, {"node-2", 4, 8192}};
  CostModel cost;
  std::optional<Secret> secret;  // a fixed bench secret when unset
  std::optional<WarehouseSchema> warehouse_schema;  // core encounter columns when unset
  std::size_t kmeans_restarts = 10;
};

struct Rq1Point {
  std::size_t index = 0;
  FormatClass format = FormatClass::kUnstructured;
  std::optional<std::int64_t> it_lake;
  std::optional<std::int64_t> it_dw;  // unset when the warehouse rejected the record
};

struct Rq1ClassStats {
  FormatClass format = FormatClass::kUnstructured;
  std::size_t lake_records = 0;
  std::size_t dw_records = 0;
  double mean_it_lake = 0.0;            // all lake records of the class
  std::optional<double> paired_lake;    // records the warehouse also accepted
  std::optional<double> mean_it_dw;
};

struct Rq1Report {
  // Means over the records both pipelines loaded; ratio = lake / dw.
  double mean_it_lake = 0.0;
  double mean_it_dw = 0.0;
  double ratio = 0.0;
  double mean_it_lake_all = 0.0;
  std::size_t lake_ingested = 0;
  std::size_t dw_accepted = 0;
  std::size_t dw_rejected = 0;
  std::size_t dropped_fields = 0;
  std::size_t audit_events = 0;
  std::vector<Rq1ClassStats> per_class;
  std::vector<Rq1Point> series;
  std::vector<JobStatus> jobs;
};

// Ingests the corpus through the lake and the warehouse, each as a scheduled
// job with its own simulated clock starting at the same instant.
Rq1Report run_rq1(const Corpus& corpus, const BenchConfig& config);

struct Rq2Row {
  std::size_t rank = 0;
  std::size_t lake_cluster = 0;
  std::size_t lake_size = 0;
  double d_lake = 0.0;
  std::size_t dw_cluster = 0;
  std::size_t dw_size = 0;
  double d_dw = 0.0;
};

struct Rq2Report {
  std::vector<Rq2Row> rows;  // by lake cluster size, descending
  std::size_t lake_dims = 0;
  std::size_t dw_dims = 0;
  std::size_t lake_patients = 0;
  std::size_t dw_patients = 0;
  std::size_t audit_events = 0;
  double lake_purity = 0.0;  // top-4 lake clusters vs planted groups, when known
  std::vector<JobStatus> jobs;
};

// Clusters the lake's full patient matrix and the warehouse feature view,
// then scores both assignments in the lake's normalized space restricted to
// the patients the warehouse loaded.
Rq2Report run_rq2(const Corpus& corpus, std::size_t k, std::uint64_t seed, const BenchConfig& config);

std::string format_rq1_report(const Rq1Report& r);
std::string format_rq1_series(const Rq1Report& r);
std::string format_rq2_report(const Rq2Report& r);

// Fraction of members, over the given clusters, whose planted group is the
// cluster's majority group.
double cluster_purity(const std::vector<std::size_t>& assignments, const std::vector<std::size_t>& clusters,
                      const std::vector<std::size_t>& truth);

}  // namespace lakelet
