#include "lakelet/scheduler.hpp"

#include <algorithm>

#include "lakelet/error.hpp"
#include "lakelet/text.hpp"

namespace lakelet {
namespace {

Resources parse_resources(std::string_view s) {
  const auto parts = text::split(s, ':');
  const auto cpu = parts.size() == 2 ? text::parse_int(parts[0]) : std::nullopt;
  const auto mem = parts.size() == 2 ? text::parse_int(parts[1]) : std::nullopt;
  if (!cpu || !mem) fail(ErrorCode::kParseError, "resource must be cpu:memory_mb, got '" + std::string(s) + "'");
  return {static_cast<int>(*cpu), *mem};
}

bool legal_successor(JobState from, JobState to) {
  switch (from) {
    case JobState::kSubmitted: return to == JobState::kAmStarting;
    case JobState::kAmStarting: return to == JobState::kAmRegistered;
    case JobState::kAmRegistered: return to == JobState::kNegotiating || to == JobState::kRunning;
    case JobState::kNegotiating: return to == JobState::kRunning;
    case JobState::kRunning: return to == JobState::kSucceeded || to == JobState::kFailed;
    case JobState::kSucceeded:
    case JobState::kFailed: return to == JobState::kReleased;
    case JobState::kReleased: return false;
  }
  return false;
}

}  // namespace

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::kSubmitted: return "Submitted";
    case JobState::kAmStarting: return "AmStarting";
    case JobState::kAmRegistered: return "AmRegistered";
    case JobState::kNegotiating: return "Negotiating";
    case JobState::kRunning: return "Running";
    case JobState::kSucceeded: return "Succeeded";
    case JobState::kFailed: return "Failed";
    case JobState::kReleased: return "Released";
  }
  return "Submitted";
}

std::optional<JobState> parse_job_state(std::string_view s) {
  for (auto st : {JobState::kSubmitted, JobState::kAmStarting, JobState::kAmRegistered, JobState::kNegotiating,
                  JobState::kRunning, JobState::kSucceeded, JobState::kFailed, JobState::kReleased}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

JobSpec parse_job_spec(std::string_view document) {
  JobSpec spec;
  bool have_am_cpu = false, have_am_mem = false;
  for (auto line : text::split(document, '\n')) {
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::kParseError, "expected key=value, got '" + std::string(body) + "'");
    const std::string key(text::trim(body.substr(0, eq)));
    const std::string value(text::trim(body.substr(eq + 1)));
    if (key == "job_id") {
      spec.job_id = value;
    } else if (key == "kind") {
      spec.kind = value;
    } else if (key == "am_cpu") {
      const auto v = text::parse_int(value);
      if (!v) fail(ErrorCode::kParseError, "am_cpu must be an integer");
      spec.am_resources.cpu_slots = static_cast<int>(*v);
      have_am_cpu = true;
    } else if (key == "am_memory_mb") {
      const auto v = text::parse_int(value);
      if (!v) fail(ErrorCode::kParseError, "am_memory_mb must be an integer");
      spec.am_resources.memory_mb = *v;
      have_am_mem = true;
    } else if (key == "tasks") {
      if (!value.empty()) {
        for (const auto& t : text::split(value, ',')) spec.task_resources.push_back(parse_resources(t));
      }
    } else {
      spec.params[key] = value;
    }
  }
  if (spec.job_id.empty()) fail(ErrorCode::kParseError, "job spec needs job_id");
  if (!have_am_cpu) spec.am_resources.cpu_slots = 1;
  if (!have_am_mem) spec.am_resources.memory_mb = 256;
  return spec;
}

ResourceManager::ResourceManager(std::vector<NodeSpec> nodes, Clock& clock, Authorizer* auth,
                                 std::optional<std::filesystem::path> event_log)
    : clock_(clock), auth_(auth) {
  if (nodes.empty()) fail(ErrorCode::kInvalidSpec, "cluster needs at least one node");
  std::sort(nodes.begin(), nodes.end(), [](const NodeSpec& a, const NodeSpec& b) { return a.node_id < b.node_id; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].cpu_slots <= 0 || nodes[i].memory_mb <= 0) {
      fail(ErrorCode::kInvalidSpec, "node " + nodes[i].node_id + " needs positive capacity");
    }
    if (i > 0 && nodes[i].node_id == nodes[i - 1].node_id) {
      fail(ErrorCode::kInvalidSpec, "duplicate node id " + nodes[i].node_id);
    }
    nodes_.push_back(Node{nodes[i], {}, {}});
  }
  if (event_log) {
    log_.open(*event_log, std::ios::app);
    if (!log_) fail(ErrorCode::kIoFailure, "cannot open " + event_log->string());
  }
}

ResourceManager::Job& ResourceManager::job(const std::string& id) {
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) fail(ErrorCode::kUnknownJob, "no job " + id);
  return it->second;
}

const ResourceManager::Job& ResourceManager::job(const std::string& id) const {
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) fail(ErrorCode::kUnknownJob, "no job " + id);
  return it->second;
}

std::optional<std::size_t> ResourceManager::first_fit(const Resources& r) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (r.fits_in(nodes_[i].free())) return i;
  }
  return std::nullopt;
}

ContainerAllocation ResourceManager::grant(Job& j, std::size_t node, const Resources& r, bool am) {
  Node& n = nodes_[node];
  n.allocated.cpu_slots += r.cpu_slots;
  n.allocated.memory_mb += r.memory_mb;
  ContainerAllocation c{"c" + std::to_string(next_container_++), n.spec.node_id, r.cpu_slots, r.memory_mb,
                        j.spec.job_id, am};
  j.containers.push_back(c);
  return c;
}

void ResourceManager::transition(Job& j, JobState to, bool rm_side, const std::string& detail) {
  if (!legal_successor(j.am_state, to)) {
    fail(ErrorCode::kIllegalState, std::string(to_string(j.am_state)) + " -> " + std::string(to_string(to)));
  }
  const JobState from = j.am_state;
  j.am_state = to;
  if (rm_side) j.rm_state = to;
  if (!detail.empty()) j.detail = detail;
  if (log_.is_open()) {
    log_ << text::encode_kv({{"when", std::to_string(clock_.now_ms())},
                             {"job", j.spec.job_id},
                             {"kind", j.spec.kind},
                             {"from", std::string(to_string(from))},
                             {"to", std::string(to_string(to))},
                             {"detail", j.detail}})
         << '\n';
    log_.flush();
  }
}

std::string ResourceManager::submit_job(JobSpec spec, const Ticket& ticket) {
  if (auth_ != nullptr) auth_->require(ticket, "jobs/" + spec.job_id, Action::kSubmit);
  std::lock_guard lock(mu_);
  if (spec.job_id.empty() || spec.job_id.find('/') != std::string::npos) {
    fail(ErrorCode::kInvalidSpec, "job id must be non-empty and contain no '/'");
  }
  if (jobs_.count(spec.job_id)) fail(ErrorCode::kInvalidSpec, "job " + spec.job_id + " already submitted");

  auto positive = [](const Resources& r) { return r.cpu_slots > 0 && r.memory_mb > 0; };
  auto fits_some_node = [&](const Resources& r) {
    return std::any_of(nodes_.begin(), nodes_.end(), [&](const Node& n) { return r.fits_in(n.spec.capacity()); });
  };
  if (!positive(spec.am_resources) || !fits_some_node(spec.am_resources)) {
    fail(ErrorCode::kInvalidSpec, "AM request fits no node");
  }
  for (const auto& t : spec.task_resources) {
    if (!positive(t) || !fits_some_node(t)) fail(ErrorCode::kInvalidSpec, "task request fits no node");
  }
  // The whole footprint must be placeable on the empty cluster, otherwise
  // admission could never succeed.
  {
    std::vector<Resources> free;
    for (const auto& n : nodes_) free.push_back(n.spec.capacity());
    std::vector<Resources> all{spec.am_resources};
    all.insert(all.end(), spec.task_resources.begin(), spec.task_resources.end());
    for (const auto& r : all) {
      auto it = std::find_if(free.begin(), free.end(), [&](const Resources& f) { return r.fits_in(f); });
      if (it == free.end()) fail(ErrorCode::kInvalidSpec, "job footprint exceeds cluster capacity");
      it->cpu_slots -= r.cpu_slots;
      it->memory_mb -= r.memory_mb;
    }
  }

  const std::string id = spec.job_id;
  Job& j = jobs_[id];
  j.spec = std::move(spec);
  j.detail = "queued";
  if (log_.is_open()) {
    log_ << text::encode_kv({{"when", std::to_string(clock_.now_ms())},
                             {"job", id},
                             {"kind", j.spec.kind},
                             {"from", ""},
                             {"to", "Submitted"},
                             {"detail", j.detail}})
         << '\n';
    log_.flush();
  }
  admission_queue_.push_back(id);
  return id;
}

bool ResourceManager::try_admit(Job& j) {
  // Place AM and declared tasks on a scratch copy first; commit only if all fit.
  std::vector<Resources> free;
  for (const auto& n : nodes_) free.push_back(n.free());
  std::vector<std::size_t> placement;
  std::vector<Resources> all{j.spec.am_resources};
  all.insert(all.end(), j.spec.task_resources.begin(), j.spec.task_resources.end());
  for (const auto& r : all) {
    std::size_t i = 0;
    while (i < free.size() && !r.fits_in(free[i])) ++i;
    if (i == free.size()) return false;
    free[i].cpu_slots -= r.cpu_slots;
    free[i].memory_mb -= r.memory_mb;
    placement.push_back(i);
  }
  grant(j, placement[0], all[0], true);
  for (std::size_t k = 1; k < all.size(); ++k) {
    Node& n = nodes_[placement[k]];
    n.reserved.cpu_slots += all[k].cpu_slots;
    n.reserved.memory_mb += all[k].memory_mb;
    j.reservations.push_back(Reservation{placement[k], all[k]});
  }
  return true;
}

void ResourceManager::release_all(Job& j) {
  for (const auto& c : j.containers) {
    auto it = std::find_if(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.spec.node_id == c.node_id; });
    it->allocated.cpu_slots -= c.cpu_slots;
    it->allocated.memory_mb -= c.memory_mb;
  }
  j.containers.clear();
  for (const auto& r : j.reservations) {
    nodes_[r.node].reserved.cpu_slots -= r.amount.cpu_slots;
    nodes_[r.node].reserved.memory_mb -= r.amount.memory_mb;
  }
  j.reservations.clear();
  std::erase_if(pending_, [&](const Pending& p) { return p.job_id == j.spec.job_id; });
}

std::vector<ContainerAllocation> ResourceManager::negotiate(const std::string& job_id,
                                                            const std::vector<Resources>& requests) {
  std::lock_guard lock(mu_);
  Job& j = job(job_id);
  if (j.am_state != JobState::kAmRegistered && j.am_state != JobState::kNegotiating) {
    fail(ErrorCode::kIllegalState, "negotiate on job in state " + std::string(to_string(j.am_state)));
  }
  for (const auto& r : requests) {
    if (r.cpu_slots <= 0 || r.memory_mb <= 0) fail(ErrorCode::kInvalidSpec, "resource request must be positive");
  }
  std::vector<ContainerAllocation> granted;
  for (const auto& r : requests) {
    ++j.requested;
    auto res = std::find_if(j.reservations.begin(), j.reservations.end(),
                            [&](const Reservation& x) { return x.amount == r; });
    if (res != j.reservations.end()) {
      Node& n = nodes_[res->node];
      n.reserved.cpu_slots -= r.cpu_slots;
      n.reserved.memory_mb -= r.memory_mb;
      const std::size_t node = res->node;
      j.reservations.erase(res);
      granted.push_back(grant(j, node, r, false));
      ++j.granted;
      continue;
    }
    const auto node = pending_.empty() ? first_fit(r) : std::nullopt;
    if (node) {
      granted.push_back(grant(j, *node, r, false));
      ++j.granted;
    } else {
      pending_.push_back(Pending{job_id, r});
    }
  }
  if (j.am_state == JobState::kAmRegistered) transition(j, JobState::kNegotiating, false, "negotiating");
  if (j.granted == j.requested) transition(j, JobState::kRunning, false, "all containers granted");
  return granted;
}

bool ResourceManager::drain_pending() {
  bool changed = false;
  while (!pending_.empty()) {
    const Pending head = pending_.front();
    const auto node = first_fit(head.amount);
    if (!node) break;  // strict FIFO: the head blocks later requests
    pending_.pop_front();
    Job& j = job(head.job_id);
    grant(j, *node, head.amount, false);
    ++j.granted;
    changed = true;
    if (j.granted == j.requested && j.am_state == JobState::kNegotiating) {
      transition(j, JobState::kRunning, false, "deferred containers granted");
    }
  }
  return changed;
}

void ResourceManager::complete_job(const std::string& job_id, JobOutcome outcome) {
  std::lock_guard lock(mu_);
  Job& j = job(job_id);
  if (j.am_state != JobState::kRunning) {
    fail(ErrorCode::kIllegalState, "complete on job in state " + std::string(to_string(j.am_state)));
  }
  release_all(j);
  transition(j, outcome == JobOutcome::kSucceeded ? JobState::kSucceeded : JobState::kFailed, false,
             outcome == JobOutcome::kSucceeded ? "completed" : "failed");
}

bool ResourceManager::step() {
  std::lock_guard lock(mu_);
  bool changed = false;
  // AM reports from the previous step reach the RM.
  for (auto& [_, j] : jobs_) {
    if (j.rm_state != j.am_state) {
      j.rm_state = j.am_state;
      changed = true;
    }
  }
  for (auto& [_, j] : jobs_) {
    if (j.am_state == JobState::kSucceeded || j.am_state == JobState::kFailed) {
      transition(j, JobState::kReleased, false, "AM deregistered");
      changed = true;
    } else if (j.am_state == JobState::kAmStarting) {
      transition(j, JobState::kAmRegistered, false, "AM registered with RM");
      changed = true;
    }
  }
  changed = drain_pending() || changed;
  while (!admission_queue_.empty()) {
    Job& head = job(admission_queue_.front());
    if (!try_admit(head)) break;
    admission_queue_.pop_front();
    transition(head, JobState::kAmStarting, true, "AM container allocated");
    changed = true;
  }
  return changed;
}

std::size_t ResourceManager::run_until_quiescent(std::size_t max_steps) {
  std::size_t steps = 0;
  while (steps < max_steps) {
    ++steps;
    if (!step()) break;
  }
  return steps;
}

JobStatus ResourceManager::status_of(const Job& j, StatusView view) const {
  const JobState s = view == StatusView::kApplicationMaster ? j.am_state : j.rm_state;
  double progress = 0.0;
  switch (s) {
    case JobState::kSubmitted: progress = 0.0; break;
    case JobState::kAmStarting: progress = 0.1; break;
    case JobState::kAmRegistered: progress = 0.2; break;
    case JobState::kNegotiating:
      progress = 0.2 + 0.3 * (j.requested ? static_cast<double>(j.granted) / static_cast<double>(j.requested) : 0.0);
      break;
    case JobState::kRunning: progress = 0.5; break;
    case JobState::kSucceeded:
    case JobState::kFailed:
    case JobState::kReleased: progress = 1.0; break;
  }
  return JobStatus{s, progress, j.detail};
}

JobStatus ResourceManager::poll_status(const std::string& job_id, const Ticket& ticket, StatusView view) {
  if (auth_ != nullptr) auth_->require(ticket, "jobs/" + job_id, Action::kRead);
  return status(job_id, view);
}

JobStatus ResourceManager::status(const std::string& job_id, StatusView view) const {
  std::lock_guard lock(mu_);
  return status_of(job(job_id), view);
}

std::vector<NodeUsage> ResourceManager::nodes() const {
  std::lock_guard lock(mu_);
  std::vector<NodeUsage> out;
  for (const auto& n : nodes_) out.push_back(NodeUsage{n.spec, n.allocated, n.reserved});
  return out;
}

std::vector<ContainerAllocation> ResourceManager::containers(const std::string& job_id) const {
  std::lock_guard lock(mu_);
  return job(job_id).containers;
}

std::vector<std::string> ResourceManager::job_ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : jobs_) out.push_back(id);
  return out;
}

std::size_t ResourceManager::pending_requests() const {
  std::lock_guard lock(mu_);
  return pending_.size();
}

void ResourceManager::check_invariants() const {
  std::lock_guard lock(mu_);
  std::map<std::string, Resources> from_containers;
  std::map<std::size_t, Resources> from_reservations;
  for (const auto& [_, j] : jobs_) {
    for (const auto& c : j.containers) {
      auto& r = from_containers[c.node_id];
      r.cpu_slots += c.cpu_slots;
      r.memory_mb += c.memory_mb;
    }
    for (const auto& res : j.reservations) {
      auto& r = from_reservations[res.node];
      r.cpu_slots += res.amount.cpu_slots;
      r.memory_mb += res.amount.memory_mb;
    }
    const bool holds = !j.containers.empty() || !j.reservations.empty();
    const bool may_hold = j.am_state == JobState::kAmStarting || j.am_state == JobState::kAmRegistered ||
                          j.am_state == JobState::kNegotiating || j.am_state == JobState::kRunning;
    if (holds && !may_hold) fail(ErrorCode::kIllegalState, "job " + j.spec.job_id + " holds resources after completion");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    const Resources c = from_containers[n.spec.node_id];
    const Resources r = from_reservations[i];
    if (!(c == n.allocated) || !(r == n.reserved)) {
      fail(ErrorCode::kIllegalState, "node " + n.spec.node_id + " bookkeeping disagrees with its containers");
    }
    const Resources f = n.free();
    if (f.cpu_slots < 0 || f.memory_mb < 0 || n.allocated.cpu_slots < 0 || n.allocated.memory_mb < 0) {
      fail(ErrorCode::kIllegalState, "node " + n.spec.node_id + " over capacity");
    }
    if (n.allocated.cpu_slots + n.reserved.cpu_slots + f.cpu_slots != n.spec.cpu_slots ||
        n.allocated.memory_mb + n.reserved.memory_mb + f.memory_mb != n.spec.memory_mb) {
      fail(ErrorCode::kIllegalState, "node " + n.spec.node_id + " violates conservation");
    }
  }
}

std::optional<JobStatus> read_job_status(const std::filesystem::path& event_log, const std::string& job_id) {
  std::optional<JobStatus> out;
  for (const auto& line : text::read_lines(event_log.string())) {
    const auto rec = text::decode_kv(line);
    if (text::kv_get(rec, "job") != job_id) continue;
    const auto state = parse_job_state(text::kv_get(rec, "to").value_or(""));
    if (!state) continue;
    JobStatus s;
    s.state = *state;
    s.progress = (*state == JobState::kSucceeded || *state == JobState::kFailed || *state == JobState::kReleased) ? 1.0
                 : *state == JobState::kRunning                                                                   ? 0.5
                                                                                                                  : 0.0;
    s.detail = text::kv_get(rec, "detail").value_or("");
    out = s;
  }
  return out;
}

JobStatus execute_job(ResourceManager& rm, const JobSpec& spec, const Ticket& ticket,
                      const std::function<void()>& payload) {
  const std::string id = rm.submit_job(spec, ticket);
  rm.run_until_quiescent();
  if (rm.status(id).state != JobState::kAmRegistered) {
    fail(ErrorCode::kIllegalState, "job " + id + " was not admitted (state " + std::string(to_string(rm.status(id).state)) + ")");
  }
  rm.negotiate(id, spec.task_resources);
  rm.run_until_quiescent();
  if (rm.status(id).state != JobState::kRunning) {
    fail(ErrorCode::kIllegalState, "job " + id + " did not reach Running");
  }
  try {
    payload();
  } catch (...) {
    rm.complete_job(id, JobOutcome::kFailed);
    rm.run_until_quiescent();
    throw;
  }
  rm.complete_job(id, JobOutcome::kSucceeded);
  rm.run_until_quiescent();
  return rm.status(id);
}

}  // namespace lakelet
