#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lakelet/clock.hpp"
#include "lakelet/security.hpp"

namespace lakelet {

struct Resources {
  int cpu_slots = 0;
  std::int64_t memory_mb = 0;

  bool fits_in(const Resources& free) const { return cpu_slots <= free.cpu_slots && memory_mb <= free.memory_mb; }
  bool operator==(const Resources&) const = default;
};

struct NodeSpec {
  std::string node_id;
  int cpu_slots = 0;
  std::int64_t memory_mb = 0;

  Resources capacity() const { return {cpu_slots, memory_mb}; }
};

struct JobSpec {
  std::string job_id;
  std::string kind;  // KMeansJob, SvmTrainJob, IngestBenchJob, ...
  std::map<std::string, std::string> params;
  Resources am_resources;
  std::vector<Resources> task_resources;
};

// Flat key=value document: job_id, kind, am_cpu, am_memory_mb,
// tasks=cpu:mem,cpu:mem; every other key becomes a parameter.
JobSpec parse_job_spec(std::string_view document);

struct ContainerAllocation {
  std::string container_id;
  std::string node_id;
  int cpu_slots = 0;
  std::int64_t memory_mb = 0;
  std::string holder;
  bool application_master = false;
};

enum class JobState { kSubmitted, kAmStarting, kAmRegistered, kNegotiating, kRunning, kSucceeded, kFailed, kReleased };
enum class JobOutcome { kSucceeded, kFailed };
enum class StatusView { kApplicationMaster, kResourceManager };

std::string_view to_string(JobState s);
std::optional<JobState> parse_job_state(std::string_view s);

struct JobStatus {
  JobState state = JobState::kSubmitted;
  double progress = 0.0;
  std::string detail;
};

struct NodeUsage {
  NodeSpec spec;
  Resources allocated;
  Resources reserved;
};

// Resource Manager with per-node Node Managers and per-job Application
// Masters, advanced in discrete steps.
//
// Placement is FIFO + first-fit in node_id order. A job is admitted (its AM
// container started) only when its whole declared footprint, AM plus every
// task request, can be placed; the task part is held as a reservation that
// negotiate() converts into containers. Requests beyond the declared
// footprint are granted from free capacity or deferred in FIFO order.
//
// RM-side transitions (AM container start) update both views; AM-reported
// transitions reach the RM view on the next step().
class ResourceManager {
 public:
  ResourceManager(std::vector<NodeSpec> nodes, Clock& clock, Authorizer* auth = nullptr,
                  std::optional<std::filesystem::path> event_log = std::nullopt);

  std::string submit_job(JobSpec spec, const Ticket& ticket);
  std::vector<ContainerAllocation> negotiate(const std::string& job_id, const std::vector<Resources>& requests);
  JobStatus poll_status(const std::string& job_id, const Ticket& ticket,
                        StatusView view = StatusView::kApplicationMaster);
  void complete_job(const std::string& job_id, JobOutcome outcome);

  // One simulation step. Returns false when nothing changed.
  bool step();
  // Steps until a step changes nothing; returns the number of steps taken.
  std::size_t run_until_quiescent(std::size_t max_steps = 10000);

  JobStatus status(const std::string& job_id, StatusView view = StatusView::kApplicationMaster) const;
  std::vector<NodeUsage> nodes() const;
  std::vector<ContainerAllocation> containers(const std::string& job_id) const;
  std::vector<std::string> job_ids() const;
  std::size_t pending_requests() const;

  // Throws IllegalState if any capacity or conservation invariant fails.
  void check_invariants() const;

 private:
  struct Reservation {
    std::size_t node;
    Resources amount;
  };
  struct Pending {
    std::string job_id;
    Resources amount;
  };
  struct Job {
    JobSpec spec;
    JobState am_state = JobState::kSubmitted;
    JobState rm_state = JobState::kSubmitted;
    std::vector<ContainerAllocation> containers;
    std::vector<Reservation> reservations;
    std::size_t requested = 0;
    std::size_t granted = 0;
    std::string detail;
  };
  struct Node {
    NodeSpec spec;
    Resources allocated;
    Resources reserved;

    Resources free() const {
      return {spec.cpu_slots - allocated.cpu_slots - reserved.cpu_slots,
              spec.memory_mb - allocated.memory_mb - reserved.memory_mb};
    }
  };

  Job& job(const std::string& id);
  const Job& job(const std::string& id) const;
  std::optional<std::size_t> first_fit(const Resources& r) const;
  ContainerAllocation grant(Job& j, std::size_t node, const Resources& r, bool am);
  bool try_admit(Job& j);
  void release_all(Job& j);
  void transition(Job& j, JobState to, bool rm_side, const std::string& detail = {});
  JobStatus status_of(const Job& j, StatusView view) const;
  bool drain_pending();

  Clock& clock_;
  Authorizer* auth_;
  mutable std::mutex mu_;
  std::vector<Node> nodes_;  // sorted by node_id
  std::map<std::string, Job> jobs_;
  std::deque<std::string> admission_queue_;
  std::deque<Pending> pending_;
  std::uint64_t next_container_ = 1;
  std::ofstream log_;
};

// Latest state of `job_id` according to an event log written by a
// ResourceManager.
std::optional<JobStatus> read_job_status(const std::filesystem::path& event_log, const std::string& job_id);

// Drives one job through the full workflow: submit, AM start and register,
// negotiate the declared tasks, run `payload` inside the granted
// containers, complete and release.
JobStatus execute_job(ResourceManager& rm, const JobSpec& spec, const Ticket& ticket,
                      const std::function<void()>& payload);

}  // namespace lakelet
