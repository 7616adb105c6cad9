#include <gtest/gtest.h>

#include "lakelet/scheduler.hpp"
#include "support.hpp"

namespace lakelet {
namespace {

using testing::error_of;

// Accounting checked from outside: containers per node must sum to the
// node's allocation, and allocation plus reservation never exceeds capacity.
void check_accounting(const ResourceManager& rm) {
  std::map<std::string, Resources> held;
  for (const auto& id : rm.job_ids()) {
    for (const auto& c : rm.containers(id)) {
      held[c.node_id].cpu_slots += c.cpu_slots;
      held[c.node_id].memory_mb += c.memory_mb;
    }
  }
  for (const auto& n : rm.nodes()) {
    ASSERT_EQ(n.allocated, held[n.spec.node_id]) << n.spec.node_id;
    ASSERT_GE(n.reserved.cpu_slots, 0);
    ASSERT_GE(n.reserved.memory_mb, 0);
    ASSERT_LE(n.allocated.cpu_slots + n.reserved.cpu_slots, n.spec.cpu_slots);
    ASSERT_LE(n.allocated.memory_mb + n.reserved.memory_mb, n.spec.memory_mb);
  }
  rm.check_invariants();
}

JobSpec simple_job(const std::string& id, int tasks = 2) {
  JobSpec s;
  s.job_id = id;
  s.kind = "KMeansJob";
  s.am_resources = {1, 512};
  s.task_resources.assign(static_cast<std::size_t>(tasks), Resources{1, 1024});
  return s;
}

struct SchedFixture {
  SimulatedClock clock{1000};
  AuditLog audit;
  Authorizer auth{testing::test_secret(), clock, audit,
                  {make_policy("ops", "jobs/**", {Action::kSubmit, Action::kRead})}};
  Ticket ticket = issue_ticket("op", {"ops"}, 1000, 1'000'000, testing::test_secret());
};

TEST(Scheduler, WorkflowWalkthrough) {
  SchedFixture f;
  ResourceManager rm({{"n1", 4, 4096}}, f.clock, &f.auth);
  rm.submit_job(simple_job("j1"), f.ticket);
  EXPECT_EQ(rm.status("j1").state, JobState::kSubmitted);
  rm.step();
  EXPECT_EQ(rm.status("j1").state, JobState::kAmStarting);
  rm.step();
  EXPECT_EQ(rm.status("j1").state, JobState::kAmRegistered);
  const auto granted = rm.negotiate("j1", {{1, 1024}, {1, 1024}});
  EXPECT_EQ(granted.size(), 2u);
  EXPECT_EQ(rm.status("j1").state, JobState::kRunning);
  // The RM learns of AM transitions one step later.
  EXPECT_EQ(rm.poll_status("j1", f.ticket, StatusView::kResourceManager).state, JobState::kAmStarting);
  rm.step();
  EXPECT_EQ(rm.status("j1", StatusView::kResourceManager).state, JobState::kRunning);
  rm.complete_job("j1", JobOutcome::kSucceeded);
  rm.run_until_quiescent();
  EXPECT_EQ(rm.status("j1").state, JobState::kReleased);
  EXPECT_EQ(rm.status("j1", StatusView::kResourceManager).state, JobState::kReleased);
  EXPECT_DOUBLE_EQ(rm.status("j1").progress, 1.0);
  for (const auto& n : rm.nodes()) EXPECT_EQ(n.allocated, (Resources{0, 0}));
}

TEST(Scheduler, SubmitErrors) {
  SchedFixture f;
  ResourceManager rm({{"n1", 2, 2048}}, f.clock, &f.auth);
  auto big = simple_job("big");
  big.am_resources = {3, 10};
  EXPECT_EQ(error_of([&] { rm.submit_job(big, f.ticket); }), ErrorCode::kInvalidSpec);
  auto footprint = simple_job("fp", 4);
  EXPECT_EQ(error_of([&] { rm.submit_job(footprint, f.ticket); }), ErrorCode::kInvalidSpec);
  rm.submit_job(simple_job("ok", 1), f.ticket);
  EXPECT_EQ(error_of([&] { rm.submit_job(simple_job("ok", 1), f.ticket); }), ErrorCode::kInvalidSpec);
  const auto stranger = issue_ticket("x", {"guest"}, 1000, 10'000, testing::test_secret());
  EXPECT_EQ(error_of([&] { rm.submit_job(simple_job("s", 1), stranger); }), ErrorCode::kAccessDenied);
  EXPECT_EQ(error_of([&] { rm.status("nope"); }), ErrorCode::kUnknownJob);
}

TEST(Scheduler, QueuedJobWaitsForCapacity) {
  SchedFixture f;
  ResourceManager rm({{"n1", 3, 4096}}, f.clock, &f.auth);
  rm.submit_job(simple_job("a"), f.ticket);
  rm.submit_job(simple_job("b"), f.ticket);
  rm.run_until_quiescent();
  EXPECT_EQ(rm.status("a").state, JobState::kAmRegistered);
  EXPECT_EQ(rm.status("b").state, JobState::kSubmitted);
  rm.negotiate("a", {{1, 1024}, {1, 1024}});
  rm.complete_job("a", JobOutcome::kFailed);
  rm.run_until_quiescent();
  EXPECT_EQ(rm.status("a").state, JobState::kReleased);
  EXPECT_EQ(rm.status("b").state, JobState::kAmRegistered);
  check_accounting(rm);
}

TEST(Scheduler, EventLogReplay) {
  SchedFixture f;
  testing::TempDir dir;
  {
    ResourceManager rm({{"n1", 4, 4096}}, f.clock, &f.auth, dir / "jobs.log");
    const auto s = execute_job(rm, simple_job("j"), f.ticket, [] {});
    EXPECT_EQ(s.state, JobState::kReleased);
  }
  const auto replay = read_job_status(dir / "jobs.log", "j");
  ASSERT_TRUE(replay);
  EXPECT_EQ(replay->state, JobState::kReleased);
  EXPECT_FALSE(read_job_status(dir / "jobs.log", "other"));
}

TEST(Scheduler, ExecuteJobReportsPayloadFailure) {
  SchedFixture f;
  ResourceManager rm({{"n1", 4, 4096}}, f.clock, &f.auth);
  EXPECT_THROW(execute_job(rm, simple_job("j"), f.ticket, [] { throw std::runtime_error("boom"); }),
               std::runtime_error);
  rm.run_until_quiescent();
  EXPECT_EQ(rm.status("j").state, JobState::kReleased);
  for (const auto& n : rm.nodes()) EXPECT_EQ(n.allocated, (Resources{0, 0}));
}

TEST(Scheduler, ParseJobSpec) {
  const auto s = parse_job_spec("# kmeans\njob_id=k1\nkind=KMeansJob\nam_cpu=1\nam_memory_mb=512\ntasks=2:1024,1:256\nk=8\n");
  EXPECT_EQ(s.job_id, "k1");
  EXPECT_EQ(s.am_resources, (Resources{1, 512}));
  ASSERT_EQ(s.task_resources.size(), 2u);
  EXPECT_EQ(s.task_resources[1], (Resources{1, 256}));
  EXPECT_EQ(s.params.at("k"), "8");
  EXPECT_EQ(error_of([] { parse_job_spec("kind=x\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(error_of([] { parse_job_spec("job_id=a\ntasks=1x\n"); }), ErrorCode::kParseError);
  EXPECT_EQ(parse_job_spec("job_id=a\n").am_resources, (Resources{1, 256}));
}

TEST(Scheduler, RandomWorkloadsKeepInvariants) {
  std::mt19937_64 rng(21);
  for (int w = 0; w < 100; ++w) {
    SchedFixture f;
    std::vector<NodeSpec> nodes;
    const int n_nodes = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < n_nodes; ++i) {
      nodes.push_back({"node-" + std::to_string(i), 2 + static_cast<int>(rng() % 4),
                       2048 + 1024 * static_cast<std::int64_t>(rng() % 4)});
    }
    ResourceManager rm(nodes, f.clock, &f.auth);
    std::map<std::string, JobSpec> accepted;
    const int jobs = 1 + static_cast<int>(rng() % 20);
    for (int j = 0; j < jobs; ++j) {
      JobSpec s;
      s.job_id = "w" + std::to_string(w) + "-" + std::to_string(j);
      s.kind = "Fuzz";
      s.am_resources = {1, 256 + 256 * static_cast<std::int64_t>(rng() % 2)};
      for (int t = static_cast<int>(rng() % 4); t > 0; --t) {
        s.task_resources.push_back({1 + static_cast<int>(rng() % 2), 256 + 512 * static_cast<std::int64_t>(rng() % 3)});
      }
      try {
        rm.submit_job(s, f.ticket);
        accepted.emplace(s.job_id, s);
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::kInvalidSpec);
      }
      check_accounting(rm);
    }

    bool drained = false;
    for (int guard = 0; guard < 10'000 && !drained; ++guard) {
      rm.step();
      check_accounting(rm);
      drained = true;
      for (const auto& [id, spec] : accepted) {
        const auto st = rm.status(id).state;
        drained = drained && st == JobState::kReleased &&
                  rm.status(id, StatusView::kResourceManager).state == JobState::kReleased;
        if (st == JobState::kAmRegistered) {
          auto req = spec.task_resources;
          std::shuffle(req.begin(), req.end(), rng);
          rm.negotiate(id, req);
        } else if (st == JobState::kRunning && rng() % 2 == 0) {
          rm.complete_job(id, rng() % 4 ? JobOutcome::kSucceeded : JobOutcome::kFailed);
        }
        check_accounting(rm);
      }
    }
    ASSERT_TRUE(drained) << "workload " << w << " did not reach all-Released";
    for (const auto& n : rm.nodes()) {
      EXPECT_EQ(n.allocated, (Resources{0, 0}));
      EXPECT_EQ(n.reserved, (Resources{0, 0}));
    }
  }
}

TEST(Scheduler, IllegalTransitionsLeaveStateIntact) {
  SchedFixture f;
  std::mt19937_64 rng(33);
  ResourceManager rm({{"n1", 4, 8192}, {"n2", 2, 4096}}, f.clock, &f.auth);
  for (int j = 0; j < 6; ++j) rm.submit_job(simple_job("j" + std::to_string(j), 1 + j % 2), f.ticket);
  for (int op = 0; op < 3000; ++op) {
    const std::string id = "j" + std::to_string(rng() % 7);  // j6 does not exist
    const auto before = rm.nodes();
    const auto before_state = id == "j6" ? JobState::kSubmitted : rm.status(id).state;
    try {
      switch (rng() % 4) {
        case 0: rm.negotiate(id, {{1, 1024}}); break;
        case 1: rm.complete_job(id, JobOutcome::kSucceeded); break;
        case 2: rm.negotiate(id, {{0, 0}}); break;
        default: rm.step(); break;
      }
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kIllegalState || e.code() == ErrorCode::kUnknownJob ||
                  e.code() == ErrorCode::kInvalidSpec);
      if (id != "j6") EXPECT_EQ(rm.status(id).state, before_state);
      const auto after = rm.nodes();
      for (std::size_t i = 0; i < after.size(); ++i) {
        EXPECT_EQ(after[i].allocated, before[i].allocated);
        EXPECT_EQ(after[i].reserved, before[i].reserved);
      }
    }
    check_accounting(rm);
  }
}

}  // namespace
}  // namespace lakelet
