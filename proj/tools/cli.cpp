#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "lakelet/bench.hpp"
#include "lakelet/config.hpp"
#include "lakelet/error.hpp"
#include "lakelet/extract.hpp"
#include "lakelet/ingest.hpp"
#include "lakelet/lake.hpp"
#include "lakelet/model_io.hpp"
#include "lakelet/recommend.hpp"
#include "lakelet/scheduler.hpp"
#include "lakelet/stream.hpp"
#include "lakelet/text.hpp"

namespace lakelet::cli {

namespace {

using Row = std::vector<std::string>;

class Printer {
 public:
  Printer(std::ostream& out, bool lines) : out_(out), lines_(lines) {}

  // Empty tables print nothing, not even the header.
  void table(const Row& header, const std::vector<Row>& rows) {
    if (rows.empty()) return;
    if (lines_) {
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out_ << (i ? " " : "") << header[i] << "=" << r[i];
        out_ << "\n";
      }
      return;
    }
    out_ << text::join(header, "\t") << "\n";
    for (const auto& r : rows) out_ << text::join(r, "\t") << "\n";
  }

 private:
  std::ostream& out_;
  bool lines_;
};

struct Globals {
  std::string config_file = "lakelet.conf";
  std::string root;
  std::string format = "tsv";
  std::string ticket_file;
};

std::string slurp(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoFailure, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Wires the lake from lakelet.conf and LAKELET_SECRET.
class Context {
 public:
  explicit Context(const Globals& g) : globals_(g) {
    config_ = load_config(g.config_file);
    if (!g.root.empty()) config_.root = g.root;
    if (config_.clock == ClockMode::kSimulated) {
      clock_ = std::make_unique<SimulatedClock>(kBenchEpochMs);
    } else {
      clock_ = std::make_unique<WallClock>();
    }
  }

  const LakeConfig& config() const { return config_; }
  Clock& clock() { return *clock_; }

  const Secret& secret() {
    if (!secret_) secret_ = Secret::from_env();
    return *secret_;
  }

  std::vector<Policy> policies() const {
    const auto path = config_.policies_path();
    return std::filesystem::exists(path) ? load_policies(path) : std::vector<Policy>{};
  }

  Lake& lake() {
    if (!lake_) {
      // Read-only commands work without a configured secret; nothing is
      // authorized against this placeholder.
      Secret s = std::getenv("LAKELET_SECRET") ? secret() : Secret(std::vector<std::uint8_t>(32, 0));
      lake_ = std::make_unique<Lake>(config_.root, std::move(s), *clock_, policies(), config_.capacity_bytes);
    }
    return *lake_;
  }

  // Mutating commands refuse to run without a ticket.
  Ticket ticket() {
    if (globals_.ticket_file.empty()) fail(ErrorCode::kAccessDenied, "this command requires --ticket");
    return Ticket::parse(slurp(globals_.ticket_file));
  }

  std::optional<Ticket> optional_ticket() {
    if (globals_.ticket_file.empty()) return std::nullopt;
    return ticket();
  }

 private:
  const Globals& globals_;
  LakeConfig config_;
  std::unique_ptr<Clock> clock_;
  std::optional<Secret> secret_;
  std::unique_ptr<Lake> lake_;
};

Row entry_row(const IngestEntry& e) {
  return {e.id.str(), std::string(to_string(e.format)), std::to_string(e.da_time), std::to_string(e.ml_time),
          std::to_string(e.it_millis)};
}

const Row kIngestHeader = {"id", "format", "da_time", "ml_time", "it_ms"};

void print_report(Printer& p, const IngestReport& r) {
  std::vector<Row> rows;
  for (const auto& e : r.entries) rows.push_back(entry_row(e));
  p.table(kIngestHeader, rows);
}

std::optional<UnixMillis> parse_time_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto v = text::parse_int(s);
  if (!v) fail(ErrorCode::kInvalidArgument, "not a millisecond timestamp: " + s);
  return *v;
}

std::set<std::string> csv_set(const std::string& s) {
  std::set<std::string> out;
  for (const auto& part : text::split(s, ',')) {
    if (!text::trim(part).empty()) out.emplace(text::trim(part));
  }
  return out;
}

// Patient table from every cataloged entity, labels mapped to +1/-1.
struct Dataset {
  PatientTable table;
  FeatureMatrix matrix;
  std::vector<EntityId> sources;
};

Dataset load_dataset(Context& ctx, const Ticket& ticket) {
  Dataset d;
  PatientAssembler assembler(diabetes_spec());
  for (const auto& entry : ctx.lake().catalog().all()) {
    if (entry.business.tags.count("model")) continue;
    assembler.add(ctx.lake().read(entry.entity, ticket), entry.technical.format, entry.technical.schema_hint);
    d.sources.push_back(entry.entity);
  }
  d.table = assembler.table();
  d.matrix = normalize(d.table.features);
  return d;
}

std::string model_path(Context& ctx, const std::string& given) {
  return given.empty() ? (ctx.config().root / "model.tsv").string() : given;
}

ResourceManager make_rm(Context& ctx, Authorizer& auth) {
  return ResourceManager(ctx.config().nodes, ctx.clock(), &auth, ctx.config().root / "jobs.log");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lakelet: a desk-scale data lake for healthcare records", "lakelet"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_file, "Config file (key=value)");
  app.add_option("--root", g.root, "Lake root directory (overrides config)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"tsv", "lines"}));
  app.add_option("--ticket", g.ticket_file, "Ticket file ('-' for stdin)");

  std::function<void(Context&, Printer&)> action;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load records into the lake")->require_subcommand(1);
  std::vector<std::string> bulk_files;
  bool bulk_split = false;
  std::vector<std::string> tags;
  std::string domain;
  std::string source;
  auto* bulk = ingest->add_subcommand("bulk", "Ingest files, one entity per file (or per row with --split)");
  bulk->add_option("files", bulk_files, "Files to ingest")->required()->check(CLI::ExistingFile);
  bulk->add_flag("--split,--split-records", bulk_split, "Store each delimited row as its own entity");
  bulk->add_option("--tag", tags, "Business tag (repeatable)");
  bulk->add_option("--domain", domain, "Business domain");
  bulk->add_option("--source", source, "Source name (defaults to the file name)");
  bulk->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      Ingestor ingestor(ctx.lake());
      BulkOptions opts;
      opts.split_records = bulk_split;
      opts.source_name = source;
      opts.tags = {tags.begin(), tags.end()};
      opts.domain = domain;
      std::vector<std::filesystem::path> paths(bulk_files.begin(), bulk_files.end());
      print_report(p, ingestor.ingest_bulk(paths, ctx.ticket(), opts));
    };
  });

  std::string events_file = "-";
  auto* events = ingest->add_subcommand("events", "Ingest one event document per input line");
  events->add_option("file", events_file, "Input file ('-' for stdin)");
  events->add_option("--source", source, "Source name");
  events->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      const Ticket ticket = ctx.ticket();
      std::vector<std::string> docs;
      for (const auto& line : text::split(slurp(events_file), '\n')) {
        if (!text::trim(line).empty()) docs.push_back(line);
      }
      Ingestor ingestor(ctx.lake());
      print_report(p, ingestor.ingest_events(docs, ticket, source.empty() ? "events" : source));
    };
  });

  std::string listen = "127.0.0.1:0";
  StreamOptions stream_opts;
  auto* stream = ingest->add_subcommand("stream", "Listen for newline-delimited records over TCP");
  stream->add_option("--listen", listen, "host:port to bind");
  stream->add_option("--max,--max-records", stream_opts.max_records, "Stop after this many records (0: no limit)");
  stream->add_option("--max-connections", stream_opts.max_connections,
                     "Stop after this many connections close (0: no limit)");
  stream->add_option("--source", stream_opts.source_name, "Source name");
  stream->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      const Ticket ticket = ctx.ticket();
      Ingestor ingestor(ctx.lake());
      StreamListener listener(ingestor, listen);
      err << "listening on port " << listener.port() << std::endl;
      print_report(p, listener.serve(ticket, stream_opts));
    };
  });

  // catalog
  auto* catalog = app.add_subcommand("catalog", "Search metadata, lineage and the audit log")->require_subcommand(1);
  std::string q_format, q_kind, q_creator, q_since, q_until;
  auto* search = catalog->add_subcommand("search", "Find cataloged entities");
  search->add_option("--tag", tags, "Required tag (repeatable)");
  search->add_option("--format-class", q_format, "Structured, SemiStructured or Unstructured");
  search->add_option("--source-kind", q_kind, "bulk, event or stream");
  search->add_option("--source", source, "Source name");
  search->add_option("--creator", q_creator, "Creating principal");
  search->add_option("--since", q_since, "Earliest ml_time (ms, inclusive)");
  search->add_option("--until", q_until, "Latest ml_time (ms, exclusive)");
  search->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      CatalogQuery q;
      if (!q_format.empty()) {
        q.format = parse_format(q_format);
        if (!q.format) fail(ErrorCode::kInvalidArgument, "unknown format class " + q_format);
      }
      if (!q_kind.empty()) {
        q.source_kind = parse_source_kind(q_kind);
        if (!q.source_kind) fail(ErrorCode::kInvalidArgument, "unknown source kind " + q_kind);
      }
      q.tags = {tags.begin(), tags.end()};
      if (!q_creator.empty()) q.creator = q_creator;
      if (!source.empty()) q.source_name = source;
      q.since = parse_time_opt(q_since);
      q.until = parse_time_opt(q_until);
      std::vector<Row> rows;
      for (const auto& e : ctx.lake().catalog().search(q)) {
        rows.push_back({e.entity.str(), std::string(to_string(e.technical.format)),
                        std::string(to_string(e.operational.source_kind)), e.operational.source_name,
                        e.operational.creator, std::to_string(e.operational.ml_time),
                        std::to_string(e.technical.size_bytes),
                        text::join({e.business.tags.begin(), e.business.tags.end()}, ",")});
      }
      p.table({"id", "format", "source_kind", "source", "creator", "ml_time", "size", "tags"}, rows);
    };
  });

  std::string entity_id;
  auto* lineage = catalog->add_subcommand("lineage", "List every ancestor of an entity");
  lineage->add_option("--id", entity_id, "Entity id")->required();
  lineage->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      const auto id = EntityId::parse(entity_id);
      if (!id) fail(ErrorCode::kInvalidArgument, "malformed entity id " + entity_id);
      std::vector<Row> rows;
      for (const auto& a : ctx.lake().catalog().lineage_of(*id)) rows.push_back({a.id.str(), a.transform});
      p.table({"ancestor", "transform"}, rows);
    };
  });

  std::string a_principal, a_outcome, a_resource;
  auto* audit = catalog->add_subcommand("audit", "Query the authorization audit log");
  audit->add_option("--principal", a_principal, "Principal");
  audit->add_option("--resource", a_resource, "Resource");
  audit->add_option("--outcome", a_outcome, "allow or deny");
  audit->add_option("--since", q_since, "Earliest time (ms, inclusive)");
  audit->add_option("--until", q_until, "Latest time (ms, exclusive)");
  audit->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      AuditFilter f;
      if (!a_principal.empty()) f.principal = a_principal;
      if (!a_resource.empty()) f.resource = a_resource;
      if (!a_outcome.empty()) {
        f.outcome = parse_outcome(a_outcome);
        if (!f.outcome) fail(ErrorCode::kInvalidArgument, "outcome must be allow or deny");
      }
      f.since = parse_time_opt(q_since);
      f.until = parse_time_opt(q_until);
      std::vector<Row> rows;
      for (const auto& e : ctx.lake().audit().query(f)) {
        rows.push_back({std::to_string(e.when), e.principal, e.resource, std::string(to_string(e.action)),
                        std::string(to_string(e.outcome)), e.detail});
      }
      p.table({"when", "principal", "resource", "action", "outcome", "detail"}, rows);
    };
  });

  // ticket
  auto* ticket = app.add_subcommand("ticket", "Issue and check signed tickets")->require_subcommand(1);
  std::string t_principal, t_roles;
  std::int64_t t_ttl = 3'600'000;
  auto* issue = ticket->add_subcommand("issue", "Sign a ticket with LAKELET_SECRET");
  issue->add_option("--principal", t_principal, "Principal name")->required();
  issue->add_option("--roles", t_roles, "Comma-separated roles")->required();
  issue->add_option("--ttl", t_ttl, "Lifetime in milliseconds");
  issue->callback([&] {
    action = [&](Context& ctx, Printer&) {
      out << issue_ticket(t_principal, csv_set(t_roles), ctx.clock().now_ms(), t_ttl, ctx.secret()).serialize()
          << "\n";
    };
  });
  auto* validate = ticket->add_subcommand("validate", "Check the --ticket signature and lifetime");
  validate->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      const Identity id = validate_ticket(ctx.ticket(), ctx.clock().now_ms(), ctx.secret());
      p.table({"principal", "roles"}, {{id.principal, text::join({id.roles.begin(), id.roles.end()}, ",")}});
    };
  });

  // policy
  auto* policy = app.add_subcommand("policy", "Manage access policies")->require_subcommand(1);
  std::string p_role, p_pattern, p_actions;
  auto* padd = policy->add_subcommand("add", "Grant actions on a resource pattern to a role");
  padd->add_option("--role", p_role, "Role")->required();
  padd->add_option("--pattern", p_pattern, "Resource glob, e.g. store/**")->required();
  padd->add_option("--actions", p_actions, "Comma-separated: read,write,submit,admin")->required();
  padd->callback([&] {
    action = [&](Context& ctx, Printer&) {
      const Ticket t = ctx.ticket();
      auto current = ctx.policies();
      // An empty policy set can only be seeded; after that, Admin is needed.
      if (!current.empty()) {
        ctx.lake().auth().require(t, "policies", Action::kAdmin);
      } else {
        validate_ticket(t, ctx.clock().now_ms(), ctx.secret());
      }
      Policy added{p_role, p_pattern, parse_actions(p_actions)};
      if (added.actions == 0) fail(ErrorCode::kInvalidArgument, "no actions given");
      current.push_back(added);
      std::filesystem::create_directories(ctx.config().policies_path().parent_path());
      save_policies(ctx.config().policies_path(), current);
      out << format_policy(added) << "\n";
    };
  });
  auto* plist = policy->add_subcommand("list", "Show policies");
  plist->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      std::vector<Row> rows;
      for (const auto& pol : ctx.policies()) {
        rows.push_back({pol.role, pol.resource_pattern, format_actions(pol.actions)});
      }
      p.table({"role", "pattern", "actions"}, rows);
    };
  });

  // job
  auto* job = app.add_subcommand("job", "Run and inspect scheduled jobs")->require_subcommand(1);
  std::string spec_file, job_id;
  auto* submit = job->add_subcommand("submit", "Submit a job spec and run it to completion");
  submit->add_option("--spec", spec_file, "Job spec file (key=value lines)")->required();
  submit->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      const Ticket t = ctx.ticket();
      const JobSpec spec = parse_job_spec(slurp(spec_file));
      Authorizer& auth = ctx.lake().auth();
      ResourceManager rm = make_rm(ctx, auth);
      const JobStatus s = execute_job(rm, spec, t, [] {});
      p.table({"job_id", "state", "progress"}, {{spec.job_id, std::string(to_string(s.state)),
                                                  text::format_double(s.progress)}});
    };
  });
  auto* status = job->add_subcommand("status", "Replay a job's recorded transitions");
  status->add_option("--id", job_id, "Job id")->required();
  status->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      if (auto t = ctx.optional_ticket()) ctx.lake().auth().require(*t, "jobs/" + job_id, Action::kRead);
      const auto s = read_job_status(ctx.config().root / "jobs.log", job_id);
      if (!s) fail(ErrorCode::kUnknownJob, "no such job " + job_id);
      p.table({"job_id", "state", "progress"}, {{job_id, std::string(to_string(s->state)),
                                                  text::format_double(s->progress)}});
    };
  });

  // analytics
  auto* analytics = app.add_subcommand("analytics", "Cluster patients and train outcome models")
                        ->require_subcommand(1);
  std::size_t k = 0;
  std::uint64_t seed = 42;
  std::string model_file, patient;
  auto* cluster = analytics->add_subcommand("cluster", "k-means over the lake's patient table");
  cluster->add_option("--k", k, "Number of clusters (default from config)");
  cluster->add_option("--seed", seed, "Random seed");
  cluster->add_option("--model", model_file, "Model output (default <root>/model.tsv)");
  cluster->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      const Ticket t = ctx.ticket();
      Dataset d = load_dataset(ctx, t);
      KMeansOptions opts;
      opts.k = k ? k : ctx.config().default_k;
      opts.seed = seed;
      ModelBundle bundle;
      bundle.clusters = kmeans(d.matrix, opts);
      bundle.feature_names = d.matrix.feature_names;
      const auto path = model_path(ctx, model_file);
      save_model(path, bundle);

      // The model is itself an entity, derived from everything it read.
      std::ostringstream body;
      write_model(body, bundle);
      Ingestor ingestor(ctx.lake());
      RecordMeta meta;
      meta.tags = {"model"};
      meta.domain = "analytics";
      meta.format = FormatClass::kUnstructured;
      const IngestEntry e = ingestor.ingest({body.str(), SourceKind::kBulk, "analytics", ctx.clock().now_ms()}, t, meta);
      ctx.lake().catalog().record_lineage(
          {e.id, d.sources, "kmeans k=" + std::to_string(opts.k) + " seed=" + std::to_string(seed)});

      const auto sizes = bundle.clusters.cluster_sizes();
      std::vector<Row> rows;
      const auto precision = cluster_precision(bundle.clusters, d.matrix, opts.k);
      for (const auto& c : precision.clusters) {
        rows.push_back({std::to_string(c.cluster_index), std::to_string(c.member_count),
                        c.member_count >= 2 ? text::format_double(c.d_value) : "NA"});
      }
      p.table({"cluster", "size", "d"}, rows);
      err << "model " << e.id.str() << " written to " << path << "\n";
    };
  });

  double lambda = 1e-3;
  std::size_t epochs = 50;
  auto* train = analytics->add_subcommand("train", "Per-cluster outcome SVMs with a holdout check");
  train->add_option("--model", model_file, "Cluster model (updated in place)");
  train->add_option("--lambda", lambda, "Regularization strength");
  train->add_option("--epochs", epochs, "Training epochs");
  train->add_option("--seed", seed, "Split and shuffle seed");
  auto print_outcomes = [&](Printer& p, const std::vector<OutcomeModel>& models) {
    std::vector<Row> rows;
    for (const auto& m : models) {
      rows.push_back({std::to_string(m.cluster_index), text::format_double(m.holdout_accuracy),
                      m.certified ? "true" : "false"});
    }
    p.table({"cluster", "accuracy", "certified"}, rows);
  };
  train->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      const Ticket t = ctx.ticket();
      const auto path = model_path(ctx, model_file);
      ModelBundle bundle = load_model(path);
      Dataset d = load_dataset(ctx, t);
      if (d.matrix.feature_names != bundle.feature_names) {
        fail(ErrorCode::kDimensionMismatch, "lake contents changed since the model was clustered");
      }
      const auto& spec = diabetes_spec();
      std::vector<std::size_t> labeled;
      std::vector<int> labels;
      for (std::size_t i = 0; i < d.table.labels.size(); ++i) {
        if (!d.table.labels[i]) continue;
        labeled.push_back(i);
        labels.push_back(*d.table.labels[i] == spec.positive_label ? 1 : -1);
      }
      ClusterModel subset = bundle.clusters;
      subset.assignments.clear();
      for (auto i : labeled) subset.assignments.push_back(nearest_centroid(bundle.clusters.centroids, d.matrix.row(i)));
      OutcomeTrainingOptions opts;
      opts.svm.lambda = lambda;
      opts.svm.epochs = epochs;
      opts.svm.seed = seed;
      opts.split_seed = seed;
      bundle.outcomes = train_outcome_models(d.matrix.select_rows(labeled), labels, subset, opts);
      save_model(path, bundle);
      print_outcomes(p, bundle.outcomes);
    };
  });

  auto* cert = analytics->add_subcommand("certify", "Show each outcome model's holdout accuracy");
  cert->add_option("--model", model_file, "Model file");
  cert->callback([&] {
    action = [&](Context& ctx, Printer& p) { print_outcomes(p, load_model(model_path(ctx, model_file)).outcomes); };
  });

  auto* rec = analytics->add_subcommand("recommend", "Suggest the medication with the best predicted outcome");
  rec->add_option("--model", model_file, "Model file");
  rec->add_option("--patient", patient, "Patient number")->required();
  rec->callback([&] {
    action = [&](Context& ctx, Printer& p) {
      const Ticket t = ctx.ticket();
      const ModelBundle bundle = load_model(model_path(ctx, model_file));
      Dataset d = load_dataset(ctx, t);
      if (d.matrix.feature_names != bundle.feature_names) {
        fail(ErrorCode::kDimensionMismatch, "lake contents changed since the model was clustered");
      }
      const auto it = std::find(d.matrix.row_keys.begin(), d.matrix.row_keys.end(), patient);
      if (it == d.matrix.row_keys.end()) fail(ErrorCode::kNotFound, "no patient " + patient);
      const auto row = static_cast<std::size_t>(it - d.matrix.row_keys.begin());
      const auto& spec = diabetes_spec();
      const auto med = medication_feature(d.matrix, spec.medication_column, spec.medications);
      const Recommendation r = recommend(d.matrix.row(row), bundle.clusters, bundle.outcomes, med, row);
      p.table({"patient", "cluster", "medication", "score"},
              {{patient, std::to_string(r.cluster_index), r.recommended_medication, text::format_double(r.score)}});
    };
  });

  // bench
  auto* bench = app.add_subcommand("bench", "Reproduce the lake-vs-warehouse experiments")->require_subcommand(1);
  std::size_t n = 10000;
  std::string composition = "0.2,0.5,0.3";
  std::string out_dir = ".";
  std::size_t bench_k = 8;
  auto add_bench_opts = [&](CLI::App* sub) {
    sub->add_option("--n", n, "Corpus size in records");
    sub->add_option("--seed", seed, "Corpus and clustering seed");
    sub->add_option("--composition", composition, "structured,semi,unstructured fractions");
    sub->add_option("--out", out_dir, "Directory for the report files");
  };
  auto bench_config = [&](Context& ctx) {
    BenchConfig c;
    c.workdir = std::filesystem::path(out_dir) / "bench-work";
    c.nodes = ctx.config().nodes;
    return c;
  };
  auto write_file = [](const std::filesystem::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << body;
    if (!f) fail(ErrorCode::kIoFailure, "cannot write " + path.string());
  };
  auto* rq1 = bench->add_subcommand("rq1", "Ingestion time, lake vs warehouse");
  add_bench_opts(rq1);
  rq1->callback([&] {
    action = [&](Context& ctx, Printer&) {
      const Corpus corpus = gen_corpus(n, seed, parse_composition(composition));
      const Rq1Report r = run_rq1(corpus, bench_config(ctx));
      std::filesystem::create_directories(out_dir);
      write_file(std::filesystem::path(out_dir) / "rq1_report.tsv", format_rq1_report(r));
      write_file(std::filesystem::path(out_dir) / "rq1_series.tsv", format_rq1_series(r));
      out << format_rq1_report(r);
    };
  });
  auto* rq2 = bench->add_subcommand("rq2", "Cluster precision, lake vs warehouse");
  add_bench_opts(rq2);
  rq2->add_option("--k", bench_k, "Number of clusters");
  rq2->callback([&] {
    action = [&](Context& ctx, Printer&) {
      const Corpus corpus = gen_corpus(n, seed, parse_composition(composition));
      const Rq2Report r = run_rq2(corpus, bench_k, seed, bench_config(ctx));
      std::filesystem::create_directories(out_dir);
      write_file(std::filesystem::path(out_dir) / "rq2_report.tsv", format_rq2_report(r));
      out << format_rq2_report(r);
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    Context ctx(g);
    Printer printer(out, g.format == "lines");
    if (action) action(ctx, printer);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace lakelet::cli
