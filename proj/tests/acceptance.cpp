// Acceptance checks 1-9. Prints one line per criterion; exits non-zero on any failure.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "lakelet/bench.hpp"
#include "lakelet/ingest.hpp"
#include "lakelet/kmeans.hpp"
#include "lakelet/recommend.hpp"
#include "lakelet/scheduler.hpp"
#include "lakelet/svm.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace lakelet {
namespace {

struct Check {
  bool ok = true;
  std::ostringstream why;
  void expect(bool cond, const std::string& what) {
    if (!cond && ok) why << what;
    ok = ok && cond;
  }
};

using Body = std::function<void(Check&)>;

bool run_criterion(int number, const std::string& title, double limit_s, const Body& body) {
  Check c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.expect(false, std::string("threw: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_s > 0) c.expect(secs < limit_s, "runtime " + std::to_string(secs) + " s over limit");
  std::cout << (c.ok ? "PASS" : "FAIL") << "  " << number << "  " << title << "  (" << std::fixed
            << std::setprecision(2) << secs << " s)";
  if (!c.ok) std::cout << "  " << c.why.str();
  std::cout << std::endl;
  return c.ok;
}

std::vector<std::vector<double>> gaussian_points(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(d));
  for (auto& p : pts) {
    for (auto& v : p) v = g(rng);
  }
  return pts;
}

void ingestion_time_pairs(Check& c) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10'000; ++i) {
    const std::int64_t da = static_cast<std::int64_t>(rng() % 4'000'000'000'000ULL);
    const std::int64_t ml = da + static_cast<std::int64_t>(rng() % 10'000'000);
    c.expect(ingestion_time(ml, da) == ml - da, "mismatch at pair " + std::to_string(i));
  }
}

void distance_oracle(Check& c) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10'000; ++i) {
    const auto p = gaussian_points(rng, 3, 1 + rng() % 100);
    const double got = euclidean_distance(p[0], p[1]);
    const double want = oracle::distance(p[0], p[1]);
    c.expect(std::abs(got - want) <= 1e-12 * std::max(want, 1e-300) || got == want, "oracle mismatch");
    c.expect(got >= 0, "negative distance");
    c.expect(std::abs(got - euclidean_distance(p[1], p[0])) <= 1e-9, "asymmetric");
    c.expect(euclidean_distance(p[0], p[0]) <= 1e-9, "identity");
    c.expect(got <= euclidean_distance(p[0], p[2]) + euclidean_distance(p[2], p[1]) + 1e-9, "triangle");
  }
}

void kmeans_optimality(Check& c) {
  std::mt19937_64 rng(3);
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 3 + rng() % 6;
    const auto pts = gaussian_points(rng, n, 1 + rng() % 3);
    KMeansOptions opts;
    opts.k = 2;
    opts.seed = static_cast<std::uint64_t>(inst);
    opts.restarts = 10;
    const auto model = kmeans(FeatureMatrix::from_rows(pts), opts);
    const double best = oracle::exhaustive_two_means(pts);
    c.expect(std::abs(model.inertia - best) <= 1e-9 * std::max(1.0, best),
             "instance " + std::to_string(inst) + " inertia above exhaustive minimum");
    for (std::size_t i = 1; i < model.inertia_history.size(); ++i) {
      c.expect(model.inertia_history[i] <= model.inertia_history[i - 1] + 1e-12, "inertia increased");
    }
  }
}

void svm_gate(Check& c) {
  const auto train = oracle::separable_toy_set(1);
  const auto hold = oracle::separable_toy_set(2);
  const auto model = train_svm(FeatureMatrix::from_rows(train.x), train.y);
  const auto cert = certify(make_outcome_model(0, model), FeatureMatrix::from_rows(hold.x), hold.y);
  c.expect(cert.holdout_accuracy >= 0.90, "toy accuracy " + std::to_string(cert.holdout_accuracy));
  c.expect(cert.certified, "toy model not certified");

  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  int problems = 0;
  while (problems < 20) {
    const std::size_t n = 5 + rng() % 10, d = 1 + rng() % 5;
    const auto x = FeatureMatrix::from_rows(gaussian_points(rng, n, d));
    std::vector<int> y(n);
    for (auto& v : y) v = rng() % 2 ? 1 : -1;
    LinearModel w{std::vector<double>(d), g(rng)};
    for (auto& v : w.weights) v = g(rng);
    bool kink = false;
    for (std::size_t i = 0; i < n; ++i) kink = kink || std::abs(1.0 - y[i] * w.decision(x.row(i))) < 1e-3;
    if (kink) continue;
    const auto grad = svm_subgradient(w, x, y, 0.1);
    auto fd = [&](double& param, double analytic) {
      const double keep = param, h = 1e-6;
      param = keep + h;
      const double up = svm_objective(w, x, y, 0.1);
      param = keep - h;
      const double down = svm_objective(w, x, y, 0.1);
      param = keep;
      const double numeric = (up - down) / (2 * h);
      c.expect(std::abs(numeric - analytic) <= 1e-4 * std::max(1.0, std::abs(numeric)), "sub-gradient mismatch");
    };
    for (std::size_t j = 0; j < d; ++j) fd(w.weights[j], grad.weights[j]);
    fd(w.bias, grad.bias);
    ++problems;
  }
}

void rq1(Check& c) {
  testing::TempDir dir;
  BenchConfig cfg;
  cfg.workdir = dir.path();
  const auto r = run_rq1(gen_corpus(10'000, 42, {0.2, 0.5, 0.3}), cfg);
  std::cout << format_rq1_report(r);
  for (const auto& cls : r.per_class) {
    if (!cls.mean_it_dw) continue;  // the warehouse accepts no record of this class
    c.expect(*cls.paired_lake < *cls.mean_it_dw, std::string(to_string(cls.format)) + ": lake not faster");
    c.expect(cls.mean_it_lake < *cls.mean_it_dw, std::string(to_string(cls.format)) + ": lake class mean not faster");
  }
  c.expect(r.ratio <= 0.6, "ratio " + std::to_string(r.ratio) + " above 0.6");
}

void rq2(Check& c) {
  testing::TempDir dir;
  BenchConfig cfg;
  cfg.workdir = dir.path();
  const auto r = run_rq2(gen_corpus(10'000, 42), 8, 42, cfg);
  std::cout << format_rq2_report(r);
  c.expect(r.rows.size() == 4, "expected four rows");
  for (const auto& row : r.rows) {
    c.expect(row.d_lake < row.d_dw, "row " + std::to_string(row.rank) + ": d_lake not below d_dw");
  }
}

void security_suite(Check& c) {
  // Deny by default.
  {
    SimulatedClock clock(testing::kT0);
    AuditLog audit;
    Authorizer auth(testing::test_secret(), clock, audit, {});
    const auto t = issue_ticket("a", {"admin"}, clock.now_ms(), 1000, testing::test_secret());
    for (const char* res : {"store/x", "store/*", "jobs/j", "policies"}) {
      for (auto a : {Action::kRead, Action::kWrite, Action::kSubmit, Action::kAdmin}) {
        c.expect(!auth.authorize(t, res, a).allowed(), "allowed with empty policy set");
      }
    }
  }
  // Every single-field mutation fails validation.
  {
    const auto t = issue_ticket("alice", {"analyst", "ops"}, 1000, 5000, testing::test_secret());
    std::vector<Ticket> mutants;
    auto m = t;
    m.principal += "x";
    mutants.push_back(m);
    m = t;
    m.roles.insert("admin");
    mutants.push_back(m);
    m = t;
    m.roles.erase("ops");
    mutants.push_back(m);
    m = t;
    m.issued_at += 1;
    mutants.push_back(m);
    m = t;
    m.expires_at += 1;
    mutants.push_back(m);
    for (std::size_t i = 0; i < t.signature.size(); ++i) {
      m = t;
      m.signature[i] = m.signature[i] == 'f' ? 'e' : 'f';
      mutants.push_back(m);
    }
    for (const auto& mt : mutants) {
      bool rejected = false;
      try {
        validate_ticket(mt, 2000, testing::test_secret());
      } catch (const Error& e) {
        rejected = e.code() == ErrorCode::kBadSignature;
      }
      c.expect(rejected, "mutated ticket accepted");
    }
  }
  // Audit completeness over a randomized session.
  {
    testing::LakeFixture f({make_policy("rw", "store/**", {Action::kRead, Action::kWrite}),
                            make_policy("reader", "store/**", {Action::kRead}),
                            make_policy("ops", "jobs/**", {Action::kSubmit, Action::kRead})});
    ResourceManager rm({{"n1", 64, 1 << 20}}, f.clock, &f.lake->auth());
    std::mt19937_64 rng(7);
    const auto secret = testing::test_secret();
    std::vector<Ticket> tickets = {f.ticket,
                                   issue_ticket("rita", {"reader"}, f.clock.now_ms(), 86'400'000, secret),
                                   issue_ticket("otto", {"ops"}, f.clock.now_ms(), 86'400'000, secret),
                                   issue_ticket("eve", {"rw"}, f.clock.now_ms(), 1, secret)};
    auto forged = f.ticket;
    forged.roles.insert("ops");
    tickets.push_back(forged);
    std::vector<EntityId> ids;
    std::size_t guarded = 0, denied = 0;
    const std::size_t before = f.lake->audit().size();
    f.clock.advance_ms(5);
    for (int op = 0; op < 1000; ++op) {
      const auto& t = tickets[rng() % tickets.size()];
      try {
        switch (rng() % 5) {
          case 0:
            ++guarded;
            ids.push_back(f.lake->store().put_blob(std::to_string(op), FormatClass::kUnstructured, t));
            break;
          case 1:
            if (ids.empty()) continue;
            ++guarded;
            f.lake->store().get_blob(ids[rng() % ids.size()], t);
            break;
          case 2:
            ++guarded;
            f.lake->store().list_entities(std::nullopt, t);
            break;
          case 3: {
            ++guarded;
            JobSpec s;
            s.job_id = "job" + std::to_string(op);
            s.kind = "Audit";
            s.am_resources = {1, 1};
            rm.submit_job(s, t);
            break;
          }
          default:
            ++guarded;
            rm.poll_status(rm.job_ids().empty() ? "none" : rm.job_ids().front(), t);
            break;
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kAccessDenied) ++denied;
      }
    }
    c.expect(f.lake->audit().size() - before == guarded,
             "audit events " + std::to_string(f.lake->audit().size() - before) + " vs guarded ops " +
                 std::to_string(guarded));
    AuditFilter deny;
    deny.outcome = Outcome::kDeny;
    c.expect(f.lake->audit().query(deny).size() == denied, "deny events differ from denied operations");
  }
}

void check_nodes(Check& c, const ResourceManager& rm) {
  std::map<std::string, Resources> held;
  for (const auto& id : rm.job_ids()) {
    for (const auto& k : rm.containers(id)) {
      held[k.node_id].cpu_slots += k.cpu_slots;
      held[k.node_id].memory_mb += k.memory_mb;
    }
  }
  for (const auto& n : rm.nodes()) {
    c.expect(n.allocated == held[n.spec.node_id], "allocation not conserved on " + n.spec.node_id);
    c.expect(n.allocated.cpu_slots + n.reserved.cpu_slots <= n.spec.cpu_slots &&
                 n.allocated.memory_mb + n.reserved.memory_mb <= n.spec.memory_mb,
             "capacity exceeded on " + n.spec.node_id);
  }
  rm.check_invariants();
}

void scheduler_suite(Check& c) {
  std::mt19937_64 rng(8);
  SimulatedClock clock(0);
  for (int w = 0; w < 100; ++w) {
    std::vector<NodeSpec> nodes;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 3); i < n; ++i) {
      nodes.push_back({"n" + std::to_string(i), 2 + static_cast<int>(rng() % 4), 1024 * (2 + static_cast<std::int64_t>(rng() % 4))});
    }
    ResourceManager rm(nodes, clock);
    std::map<std::string, JobSpec> jobs;
    for (int j = 0, n = 1 + static_cast<int>(rng() % 20); j < n; ++j) {
      JobSpec s;
      s.job_id = "j" + std::to_string(j);
      s.kind = "Fuzz";
      s.am_resources = {1, 256};
      for (int t = static_cast<int>(rng() % 4); t > 0; --t) {
        s.task_resources.push_back({1 + static_cast<int>(rng() % 2), 256 * (1 + static_cast<std::int64_t>(rng() % 4))});
      }
      try {
        rm.submit_job(s, Ticket{});
        jobs.emplace(s.job_id, s);
      } catch (const Error&) {
      }
    }
    bool drained = false;
    for (int step = 0; step < 5000 && !drained; ++step) {
      rm.step();
      check_nodes(c, rm);
      drained = true;
      for (const auto& [id, spec] : jobs) {
        // Illegal moves first: they must fail without side effects.
        const auto before = rm.nodes();
        try {
          switch (rng() % 3) {
            case 0: rm.complete_job(id, JobOutcome::kSucceeded); break;
            case 1: rm.negotiate(id, spec.task_resources); break;
            default: break;
          }
        } catch (const Error& e) {
          c.expect(e.code() == ErrorCode::kIllegalState, "unexpected error on illegal transition");
          const auto after = rm.nodes();
          for (std::size_t i = 0; i < after.size(); ++i) {
            c.expect(after[i].allocated == before[i].allocated && after[i].reserved == before[i].reserved,
                     "failed transition changed node state");
          }
        }
        check_nodes(c, rm);
        const auto st = rm.status(id).state;
        drained = drained && st == JobState::kReleased &&
                  rm.status(id, StatusView::kResourceManager).state == JobState::kReleased;
        if (st == JobState::kRunning && rng() % 3 == 0) rm.complete_job(id, JobOutcome::kSucceeded);
      }
    }
    c.expect(drained, "workload " + std::to_string(w) + " never reached all-Released");
  }
}

void lake_integrity(Check& c) {
  std::mt19937_64 rng(9);
  {
    testing::LakeFixture f;
    std::vector<std::pair<EntityId, std::string>> stored;
    for (int i = 0; i < 10'000; ++i) {
      std::string p(rng() % 256, '\0');
      for (auto& ch : p) ch = static_cast<char>(rng());
      stored.emplace_back(f.lake->store().put_blob(p, FormatClass::kUnstructured, f.ticket), p);
    }
    f.reopen();
    for (const auto& [id, p] : stored) c.expect(f.lake->store().get_blob(id, f.ticket) == p, "payload changed");
  }
  for (int round = 0; round < 5; ++round) {
    testing::LakeFixture f;
    std::vector<EntityId> nodes;
    for (int i = 0; i < 50; ++i) {
      const auto id = f.lake->store().put_blob(std::to_string(i), FormatClass::kUnstructured, f.ticket);
      std::set<std::string> tags;
      if (rng() % 2) tags.insert("lab");
      if (rng() % 3 == 0) tags.insert("icu");
      f.lake->catalog().register_entity(
          id, {FormatClass::kUnstructured, std::nullopt, 1, 0},
          {static_cast<SourceKind>(rng() % 3), "s", rng() % 2 ? "ann" : "bob", f.clock.now_ms(), 0, 0},
          {tags, ""});
      f.clock.advance_ms(static_cast<std::int64_t>(rng() % 3));
      nodes.push_back(id);
    }
    std::map<EntityId, std::vector<EntityId>> parents;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      std::vector<EntityId> ps;
      for (std::size_t j = 0; j < i; ++j) {
        if (rng() % 8 == 0) ps.push_back(nodes[j]);
      }
      if (ps.empty()) continue;
      f.lake->catalog().record_lineage({nodes[i], ps, "derive"});
      parents[nodes[i]] = ps;
    }
    for (const auto& n : nodes) {
      std::set<EntityId> got;
      for (const auto& a : f.lake->catalog().lineage_of(n)) got.insert(a.id);
      c.expect(got == oracle::dfs_ancestors(parents, n), "lineage closure differs from DFS");
    }
    const auto all = f.lake->catalog().all();
    for (int q = 0; q < 200; ++q) {
      CatalogQuery query;
      if (rng() % 2) query.source_kind = static_cast<SourceKind>(rng() % 3);
      if (rng() % 2) query.creator = rng() % 2 ? "ann" : "bob";
      if (rng() % 2) query.tags.insert(rng() % 2 ? "lab" : "icu");
      if (rng() % 3 == 0) query.since = all[rng() % all.size()].operational.ml_time;
      if (rng() % 3 == 0) query.until = all[rng() % all.size()].operational.ml_time;
      c.expect(f.lake->catalog().search(query) == oracle::filter_entries(all, query), "search differs from filter");
    }
  }
}

}  // namespace
}  // namespace lakelet

int main() {
  using namespace lakelet;
  bool ok = true;
  ok &= run_criterion(1, "ingestion time equals ml_time - da_time on 10^4 pairs", 1.0, ingestion_time_pairs);
  ok &= run_criterion(2, "euclidean distance vs sum-of-squares oracle, metric axioms", 0, distance_oracle);
  ok &= run_criterion(3, "k-means reaches the exhaustive 2-partition optimum, inertia monotone", 30.0,
                      kmeans_optimality);
  ok &= run_criterion(4, "SVM certifies the separable toy set, sub-gradient matches finite differences", 0,
                      svm_gate);
  ok &= run_criterion(5, "RQ1: lake ingestion faster per class, ratio <= 0.6", 120.0, rq1);
  ok &= run_criterion(6, "RQ2: d_lake < d_dw for the top-4 clusters", 120.0, rq2);
  ok &= run_criterion(7, "security: deny by default, tamper evidence, audit completeness", 0, security_suite);
  ok &= run_criterion(8, "scheduler: capacity and conservation over 100 workloads", 0, scheduler_suite);
  ok &= run_criterion(9, "lake integrity: round trip, lineage closure, search filter", 0, lake_integrity);
  return ok ? 0 : 1;
}
