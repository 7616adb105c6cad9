#include "lakelet/bench.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <unordered_map>

#include "lakelet/error.hpp"
#include "lakelet/extract.hpp"
#include "lakelet/ingest.hpp"
#include "lakelet/kmeans.hpp"
#include "lakelet/lake.hpp"
#include "lakelet/text.hpp"

namespace lakelet {

namespace {

constexpr std::int64_t kTicketTtlMs = 7LL * 24 * 3600 * 1000;

Secret bench_secret(const BenchConfig& config) {
  if (config.secret) return *config.secret;
  std::vector<std::uint8_t> bytes;
  std::uint64_t x = 0x62656e6368ULL;
  while (bytes.size() < 32) {
    x = mix_seed(x);
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
  }
  return Secret(std::move(bytes));
}

std::vector<Policy> bench_policies() {
  return {make_policy("bench", "store/**", {Action::kRead, Action::kWrite}),
          make_policy("bench", "jobs/**", {Action::kSubmit, Action::kRead})};
}

JobSpec bench_job(std::string id, std::string kind) {
  JobSpec spec;
  spec.job_id = std::move(id);
  spec.kind = std::move(kind);
  spec.am_resources = {1, 512};
  spec.task_resources = {{1, 1024}, {1, 1024}};
  return spec;
}

// Both pipelines plus the scheduler that runs their jobs.
struct Bench {
  std::filesystem::path dir;
  Secret secret;
  SimulatedClock lake_clock{kBenchEpochMs};
  SimulatedClock dw_clock{kBenchEpochMs};
  SimulatedClock rm_clock{kBenchEpochMs};
  std::unique_ptr<Lake> lake;
  std::unique_ptr<Authorizer> rm_auth;
  std::unique_ptr<ResourceManager> rm;
  std::unique_ptr<Warehouse> warehouse;
  Ticket ticket;

  Bench(const std::filesystem::path& workdir, const std::string& name, const BenchConfig& config)
      : dir(workdir / name), secret(bench_secret(config)) {
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    lake = std::make_unique<Lake>(dir / "lake", secret, lake_clock, bench_policies());
    rm_auth = std::make_unique<Authorizer>(secret, rm_clock, lake->audit(), bench_policies());
    rm = std::make_unique<ResourceManager>(config.nodes, rm_clock, rm_auth.get(), dir / "jobs.log");
    const auto& spec = diabetes_spec();
    warehouse = std::make_unique<Warehouse>(dir / "warehouse", config.warehouse_schema.value_or(spec.warehouse_schema()),
                                            dw_clock, config.cost);
    ticket = issue_ticket("bench", {"bench"}, kBenchEpochMs, kTicketTtlMs, secret);
  }
};

struct Loaded {
  std::vector<std::optional<IngestEntry>> lake;
  DwLoadResult dw;
  std::vector<JobStatus> jobs;
};

Loaded load_both(Bench& b, const Corpus& corpus, const BenchConfig& config) {
  Loaded out;
  Ingestor ingestor(*b.lake, config.cost);
  out.jobs.push_back(execute_job(*b.rm, bench_job("lake-ingest", "IngestBenchJob"), b.ticket, [&] {
    b.lake->auth().require(b.ticket, "store/*", Action::kWrite);
    for (const auto& rec : corpus.records) {
      IngestRecord r = rec;
      r.da_time = b.lake_clock.now_ms();
      out.lake.push_back(ingestor.ingest(r, b.ticket));
    }
  }));
  out.jobs.push_back(execute_job(*b.rm, bench_job("dw-etl", "EtlBenchJob"), b.ticket,
                                 [&] { out.dw = b.warehouse->dw_load(corpus.records); }));
  return out;
}

std::string num(double v) { return text::format_double(v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

}  // namespace

Rq1Report run_rq1(const Corpus& corpus, const BenchConfig& config) {
  Bench bench(config.workdir, "rq1", config);
  Loaded loaded = load_both(bench, corpus, config);

  Rq1Report r;
  r.jobs = loaded.jobs;
  r.series.resize(corpus.records.size());
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    r.series[i].index = i;
    r.series[i].format = loaded.dw.input_format[i];
    if (loaded.lake[i]) {
      r.series[i].it_lake = loaded.lake[i]->it_millis;
      r.series[i].format = loaded.lake[i]->format;
    }
  }
  for (std::size_t j = 0; j < loaded.dw.accepted_input_index.size(); ++j) {
    r.series[loaded.dw.accepted_input_index[j]].it_dw = loaded.dw.report.entries[j].it_millis;
  }
  r.dw_accepted = loaded.dw.outcome.accepted_rows;
  r.dw_rejected = loaded.dw.outcome.rejected_rows;
  for (const auto& d : loaded.dw.outcome.dropped_fields) r.dropped_fields += d.size();

  struct Sums {
    double lake = 0, paired_lake = 0, dw = 0;
    std::size_t n_lake = 0, n_dw = 0;
  };
  std::map<FormatClass, Sums> by_class;
  Sums total;
  for (const auto& p : r.series) {
    Sums& s = by_class[p.format];
    if (p.it_lake) {
      s.lake += static_cast<double>(*p.it_lake);
      ++s.n_lake;
      total.lake += static_cast<double>(*p.it_lake);
      ++total.n_lake;
    }
    if (p.it_lake && p.it_dw) {
      s.paired_lake += static_cast<double>(*p.it_lake);
      s.dw += static_cast<double>(*p.it_dw);
      ++s.n_dw;
      total.paired_lake += static_cast<double>(*p.it_lake);
      total.dw += static_cast<double>(*p.it_dw);
      ++total.n_dw;
    }
  }
  for (auto f : {FormatClass::kStructured, FormatClass::kSemiStructured, FormatClass::kUnstructured}) {
    const Sums& s = by_class[f];
    Rq1ClassStats c;
    c.format = f;
    c.lake_records = s.n_lake;
    c.dw_records = s.n_dw;
    c.mean_it_lake = s.n_lake ? s.lake / static_cast<double>(s.n_lake) : 0.0;
    if (s.n_dw) {
      c.paired_lake = s.paired_lake / static_cast<double>(s.n_dw);
      c.mean_it_dw = s.dw / static_cast<double>(s.n_dw);
    }
    r.per_class.push_back(c);
  }
  r.lake_ingested = total.n_lake;
  r.mean_it_lake_all = total.n_lake ? total.lake / static_cast<double>(total.n_lake) : 0.0;
  if (total.n_dw) {
    r.mean_it_lake = total.paired_lake / static_cast<double>(total.n_dw);
    r.mean_it_dw = total.dw / static_cast<double>(total.n_dw);
    r.ratio = r.mean_it_dw > 0.0 ? r.mean_it_lake / r.mean_it_dw : 0.0;
  }
  r.audit_events = bench.lake->audit().size();
  return r;
}

double cluster_purity(const std::vector<std::size_t>& assignments, const std::vector<std::size_t>& clusters,
                      const std::vector<std::size_t>& truth) {
  std::size_t members = 0;
  std::size_t majority = 0;
  for (auto c : clusters) {
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      if (assignments[i] == c) ++counts[truth[i]];
    }
    std::size_t best = 0;
    for (const auto& [_, n] : counts) {
      members += n;
      best = std::max(best, n);
    }
    majority += best;
  }
  return members ? static_cast<double>(majority) / static_cast<double>(members) : 0.0;
}

Rq2Report run_rq2(const Corpus& corpus, std::size_t k, std::uint64_t seed, const BenchConfig& config) {
  Bench bench(config.workdir, "rq2", config);
  Loaded loaded = load_both(bench, corpus, config);
  const auto& spec = diabetes_spec();
  const WarehouseSchema& schema = bench.warehouse->schema();

  Rq2Report r;
  r.jobs = loaded.jobs;

  PatientTable patients;
  FeatureMatrix lake_matrix;
  ClusterModel lake_model;
  KMeansOptions opts;
  opts.k = k;
  opts.seed = seed;
  opts.restarts = config.kmeans_restarts;
  r.jobs.push_back(execute_job(*bench.rm, bench_job("lake-kmeans", "KMeansJob"), bench.ticket, [&] {
    patients = extract_patients(*bench.lake, bench.ticket, spec);
    lake_matrix = normalize(patients.features);
    lake_model = kmeans(lake_matrix, opts);
  }));

  // Warehouse rows in patient-key order, like the lake table.
  std::vector<WarehouseRow> rows = loaded.dw.rows;
  const auto key_idx = schema.column_index(spec.key_column);
  if (!key_idx) fail(ErrorCode::kInvalidSpec, "warehouse schema lacks key column " + spec.key_column);
  std::stable_sort(rows.begin(), rows.end(), [&](const WarehouseRow& a, const WarehouseRow& b) {
    return key_less(render_value(a[*key_idx]).value_or(""), render_value(b[*key_idx]).value_or(""));
  });
  FeatureMatrix dw_matrix;
  ClusterModel dw_model;
  r.jobs.push_back(execute_job(*bench.rm, bench_job("dw-kmeans", "KMeansJob"), bench.ticket, [&] {
    dw_matrix = dw_feature_view(rows, schema, spec.non_features, spec.key_column);
    dw_model = kmeans(dw_matrix, opts);
  }));

  std::unordered_map<std::string, std::size_t> lake_row;
  for (std::size_t i = 0; i < lake_matrix.row_keys.size(); ++i) lake_row[lake_matrix.row_keys[i]] = i;
  std::vector<std::size_t> eval_rows;
  std::vector<std::size_t> dw_kept;
  for (std::size_t i = 0; i < dw_matrix.row_keys.size(); ++i) {
    auto it = lake_row.find(dw_matrix.row_keys[i]);
    if (it == lake_row.end()) continue;
    eval_rows.push_back(it->second);
    dw_kept.push_back(i);
  }
  const FeatureMatrix eval = lake_matrix.select_rows(eval_rows);
  std::vector<std::size_t> lake_assign;
  std::vector<std::size_t> dw_assign;
  for (std::size_t i = 0; i < eval_rows.size(); ++i) {
    lake_assign.push_back(lake_model.assignments[eval_rows[i]]);
    dw_assign.push_back(dw_model.assignments[dw_kept[i]]);
  }
  const PrecisionReport lake_p = cluster_precision(lake_assign, k, eval);
  const PrecisionReport dw_p = cluster_precision(dw_assign, k, eval);
  for (std::size_t i = 0; i < lake_p.clusters.size() && i < dw_p.clusters.size(); ++i) {
    Rq2Row row;
    row.rank = i + 1;
    row.lake_cluster = lake_p.clusters[i].cluster_index;
    row.lake_size = lake_p.clusters[i].member_count;
    row.d_lake = lake_p.clusters[i].d_value;
    row.dw_cluster = dw_p.clusters[i].cluster_index;
    row.dw_size = dw_p.clusters[i].member_count;
    row.d_dw = dw_p.clusters[i].d_value;
    r.rows.push_back(row);
  }
  r.lake_dims = lake_matrix.dims();
  r.dw_dims = dw_matrix.dims();
  r.lake_patients = lake_matrix.rows();
  r.dw_patients = dw_matrix.rows();

  if (!corpus.planted_group.empty()) {
    std::vector<std::size_t> truth;
    for (const auto& key : lake_matrix.row_keys) {
      auto it = corpus.planted_group.find(key);
      truth.push_back(it == corpus.planted_group.end() ? corpus.groups : it->second);
    }
    const PrecisionReport top = cluster_precision(lake_model, lake_matrix);
    std::vector<std::size_t> clusters;
    for (const auto& c : top.clusters) clusters.push_back(c.cluster_index);
    r.lake_purity = cluster_purity(lake_model.assignments, clusters, truth);
  }
  r.audit_events = bench.lake->audit().size();
  return r;
}

std::string format_rq1_report(const Rq1Report& r) {
  std::string out = "class\tlake_records\tdw_records\tmean_it_lake\tpaired_it_lake\tmean_it_dw\tratio\n";
  for (const auto& c : r.per_class) {
    std::optional<double> ratio;
    if (c.paired_lake && c.mean_it_dw && *c.mean_it_dw > 0.0) ratio = *c.paired_lake / *c.mean_it_dw;
    out += std::string(to_string(c.format)) + "\t" + std::to_string(c.lake_records) + "\t" +
           std::to_string(c.dw_records) + "\t" + num(c.mean_it_lake) + "\t" + opt_num(c.paired_lake) + "\t" +
           opt_num(c.mean_it_dw) + "\t" + opt_num(ratio) + "\n";
  }
  out += "paired\t" + std::to_string(r.lake_ingested) + "\t" + std::to_string(r.dw_accepted) + "\t" +
         num(r.mean_it_lake_all) + "\t" + num(r.mean_it_lake) + "\t" + num(r.mean_it_dw) + "\t" + num(r.ratio) + "\n";
  return out;
}

std::string format_rq1_series(const Rq1Report& r) {
  std::string out = "index\tit_lake\tit_dw\n";
  for (const auto& p : r.series) {
    out += std::to_string(p.index) + "\t" + (p.it_lake ? std::to_string(*p.it_lake) : "NA") + "\t" +
           (p.it_dw ? std::to_string(*p.it_dw) : "NA") + "\n";
  }
  return out;
}

std::string format_rq2_report(const Rq2Report& r) {
  std::string out = "cluster\tlake_size\td_lake\tdw_size\td_dw\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.rank) + "\t" + std::to_string(row.lake_size) + "\t" + num(row.d_lake) + "\t" +
           std::to_string(row.dw_size) + "\t" + num(row.d_dw) + "\n";
  }
  return out;
}

}  // namespace lakelet
