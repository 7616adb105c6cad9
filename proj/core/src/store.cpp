#include "lakelet/store.hpp"

#include "lakelet/error.hpp"
#include "lakelet/text.hpp"

namespace lakelet {
namespace {

constexpr std::string_view kManifest = "objects.log";

std::uint64_t seed_entropy() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace

Store::Store(std::filesystem::path root, Authorizer& auth, std::uint64_t capacity_bytes)
    : root_(std::move(root)), auth_(auth), capacity_(capacity_bytes), rng_(seed_entropy()) {
  std::error_code ec;
  std::filesystem::create_directories(root_ / "objects", ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot create " + (root_ / "objects").string());

  for (const auto& line : text::read_lines((root_ / kManifest).string())) {
    const auto parts = text::split(line, '\t');
    if (parts.size() != 4) continue;  // torn tail from an interrupted append
    const auto id = EntityId::parse(parts[0]);
    const auto format = parse_format(parts[1]);
    const auto size = text::parse_int(parts[2]);
    const auto when = text::parse_int(parts[3]);
    if (!id || !format || !size || !when || index_.count(*id)) continue;
    index_.emplace(*id, order_.size());
    order_.push_back(EntityInfo{*id, *format, static_cast<std::uint64_t>(*size), *when});
    used_ += static_cast<std::uint64_t>(*size);
  }
  manifest_.open(root_ / kManifest, std::ios::app);
  if (!manifest_) fail(ErrorCode::kIoFailure, "cannot open manifest");
}

std::filesystem::path Store::object_path(const EntityId& id) const {
  const std::string hex = id.str();
  return root_ / "objects" / hex.substr(0, 2) / hex;
}

EntityId Store::fresh_id() {
  EntityId id;
  do {
    id = EntityId::random(rng_);
  } while (index_.count(id));
  return id;
}

EntityId Store::put_blob(std::string_view payload, FormatClass format, const Ticket& ticket) {
  EntityId id;
  {
    std::lock_guard lock(mu_);
    id = fresh_id();
    // Claim the id so a concurrent writer cannot draw it while we write.
    index_.emplace(id, static_cast<std::size_t>(-1));
  }
  auto release_claim = [&] {
    std::lock_guard lock(mu_);
    index_.erase(id);
  };

  try {
    auth_.require(ticket, "store/" + id.str(), Action::kWrite);
  } catch (...) {
    release_claim();
    throw;
  }

  {
    std::lock_guard lock(mu_);
    if (used_ + reserved_ + payload.size() > capacity_) {
      index_.erase(id);
      fail(ErrorCode::kStorageFull, "capacity of " + std::to_string(capacity_) + " bytes exceeded");
    }
    reserved_ += payload.size();
  }

  const auto path = object_path(id);
  const auto tmp = path.string() + ".part";
  try {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.close();
    if (!out) fail(ErrorCode::kIoFailure, "short write to " + tmp);
    std::filesystem::rename(tmp, path);
  } catch (const std::filesystem::filesystem_error& e) {
    std::lock_guard lock(mu_);
    reserved_ -= payload.size();
    index_.erase(id);
    fail(ErrorCode::kIoFailure, e.what());
  } catch (...) {
    std::lock_guard lock(mu_);
    reserved_ -= payload.size();
    index_.erase(id);
    throw;
  }

  const UnixMillis now = auth_.clock().now_ms();
  std::lock_guard lock(mu_);
  reserved_ -= payload.size();
  manifest_ << id.str() << '\t' << to_string(format) << '\t' << payload.size() << '\t' << now << '\n';
  manifest_.flush();
  if (!manifest_) {
    index_.erase(id);
    fail(ErrorCode::kIoFailure, "manifest append failed");
  }
  index_[id] = order_.size();
  order_.push_back(EntityInfo{id, format, payload.size(), now});
  used_ += payload.size();
  return id;
}

std::string Store::get_blob(const EntityId& id, const Ticket& ticket) {
  auth_.require(ticket, "store/" + id.str(), Action::kRead);
  if (!contains(id)) fail(ErrorCode::kNotFound, "no entity " + id.str());
  return read_verbatim(id);
}

std::vector<EntityInfo> Store::list_entities(std::optional<FormatClass> filter, const Ticket& ticket) {
  auth_.require(ticket, "store/*", Action::kRead);
  std::lock_guard lock(mu_);
  std::vector<EntityInfo> out;
  for (const auto& e : order_) {
    if (!filter || e.format == *filter) out.push_back(e);
  }
  return out;
}

bool Store::contains(const EntityId& id) const {
  std::lock_guard lock(mu_);
  const auto it = index_.find(id);
  return it != index_.end() && it->second != static_cast<std::size_t>(-1);
}

std::optional<EntityInfo> Store::info(const EntityId& id) const {
  std::lock_guard lock(mu_);
  const auto it = index_.find(id);
  if (it == index_.end() || it->second == static_cast<std::size_t>(-1)) return std::nullopt;
  return order_[it->second];
}

std::string Store::read_verbatim(const EntityId& id) const {
  const auto meta = info(id);
  if (!meta) fail(ErrorCode::kNotFound, "no entity " + id.str());
  std::ifstream in(object_path(id), std::ios::binary);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open object " + id.str());
  std::string bytes(meta->size_bytes, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::uint64_t>(in.gcount()) != meta->size_bytes) {
    fail(ErrorCode::kIoFailure, "short read on object " + id.str());
  }
  return bytes;
}

std::size_t Store::size() const {
  std::lock_guard lock(mu_);
  return order_.size();
}

std::uint64_t Store::used_bytes() const {
  std::lock_guard lock(mu_);
  return used_;
}

}  // namespace lakelet
