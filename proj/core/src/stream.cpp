#include "lakelet/stream.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <mutex>
#include <thread>
#include <vector>

#include "lakelet/error.hpp"
#include "lakelet/text.hpp"

namespace lakelet {
namespace {

constexpr int kPollMillis = 50;

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos) fail(ErrorCode::kInvalidArgument, "endpoint must be host:port");
  std::string host = endpoint.substr(0, colon);
  if (host.empty()) host = "0.0.0.0";
  return {host, endpoint.substr(colon + 1)};
}

addrinfo* resolve(const std::string& endpoint, bool passive) {
  const auto [host, port] = split_endpoint(endpoint);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), port.c_str(), &hints, &res) != 0 || res == nullptr) return nullptr;
  return res;
}

}  // namespace

StreamListener::StreamListener(Ingestor& ingestor, const std::string& endpoint) : ingestor_(ingestor) {
  addrinfo* res = resolve(endpoint, true);
  if (res == nullptr) fail(ErrorCode::kBindFailure, "cannot resolve " + endpoint);
  fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  const int one = 1;
  if (fd_ >= 0) ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  const bool ok = fd_ >= 0 && ::bind(fd_, res->ai_addr, res->ai_addrlen) == 0 && ::listen(fd_, 16) == 0;
  freeaddrinfo(res);
  if (!ok) {
    const std::string why = std::strerror(errno);
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    fail(ErrorCode::kBindFailure, "cannot listen on " + endpoint + ": " + why);
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

StreamListener::~StreamListener() {
  if (fd_ >= 0) ::close(fd_);
}

IngestReport StreamListener::serve(const Ticket& ticket, const StreamOptions& options) {
  ingestor_.lake().auth().require(ticket, "store/*", Action::kWrite);

  std::mutex report_mu;
  IngestReport report;
  std::atomic<std::size_t> claimed{0};
  std::atomic<std::size_t> closed{0};
  std::atomic<bool> failed{false};
  std::string failure;

  auto limit_reached = [&] { return options.max_records != 0 && claimed.load() >= options.max_records; };
  auto done = [&] {
    return stopping_.load() || failed.load() || limit_reached() ||
           (options.max_connections != 0 && closed.load() >= options.max_connections);
  };

  auto handle = [&](int client) {
    std::string frame;
    bool overflow = false;
    char buf[8192];
    while (!done()) {
      pollfd p{client, POLLIN, 0};
      const int ready = ::poll(&p, 1, kPollMillis);
      if (ready < 0 && errno != EINTR) break;
      if (ready <= 0) continue;
      const ssize_t n = ::recv(client, buf, sizeof(buf), 0);
      if (n <= 0) break;  // close (partial frame dropped) or error
      for (ssize_t i = 0; i < n; ++i) {
        if (buf[i] != '\n') {
          if (frame.size() < options.max_frame_bytes) {
            frame.push_back(buf[i]);
          } else {
            overflow = true;
          }
          continue;
        }
        const UnixMillis da_time = ingestor_.lake().clock().now_ms();
        if (overflow) {
          overflow = false;
          frame.clear();
          continue;
        }
        if (options.max_records != 0 && claimed.fetch_add(1) >= options.max_records) {
          frame.clear();
          break;
        }
        if (options.max_records == 0) claimed.fetch_add(1);
        try {
          const IngestEntry entry =
              ingestor_.ingest(IngestRecord{std::move(frame), SourceKind::kStream, options.source_name, da_time}, ticket);
          std::lock_guard lock(report_mu);
          report.add(entry);
        } catch (const std::exception& e) {
          std::lock_guard lock(report_mu);
          if (!failed.exchange(true)) failure = e.what();
        }
        frame.clear();
      }
    }
    ::close(client);
    closed.fetch_add(1);
  };

  std::vector<std::thread> workers;
  while (!done()) {
    pollfd p{fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, kPollMillis);
    if (ready <= 0) continue;
    const int client = ::accept(fd_, nullptr, nullptr);
    if (client < 0) continue;
    workers.emplace_back(handle, client);
  }
  for (auto& w : workers) w.join();
  if (failed) fail(ErrorCode::kIoFailure, "stream ingestion failed: " + failure);

  std::lock_guard lock(report_mu);
  return report;
}

IngestReport ingest_stream(Ingestor& ingestor, const std::string& endpoint, std::size_t max_records,
                           const Ticket& ticket) {
  StreamListener listener(ingestor, endpoint);
  StreamOptions options;
  options.max_records = max_records;
  return listener.serve(ticket, options);
}

void send_stream(const std::string& endpoint, std::string_view bytes) {
  addrinfo* res = resolve(endpoint, false);
  if (res == nullptr) fail(ErrorCode::kIoFailure, "cannot resolve " + endpoint);
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  const bool ok = fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0;
  freeaddrinfo(res);
  if (!ok) {
    if (fd >= 0) ::close(fd);
    fail(ErrorCode::kIoFailure, "cannot connect to " + endpoint);
  }
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) break;
    sent += static_cast<std::size_t>(n);
  }
  ::close(fd);
  if (sent != bytes.size()) fail(ErrorCode::kIoFailure, "short send to " + endpoint);
}

}  // namespace lakelet
