#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <string>

#include "lakelet/ingest.hpp"

namespace lakelet {

struct StreamOptions {
  std::size_t max_records = 0;       // 0: unbounded
  std::size_t max_connections = 1;  // stop once this many connections have closed; 0: unbounded
  std::size_t max_frame_bytes = 1 << 20;
  std::string source_name = "stream";
};

// TCP listener for newline-delimited frames. Each complete frame becomes
// one entity; da_time is stamped when the frame's terminator arrives. A
// frame cut off by connection close, or longer than max_frame_bytes, is
// discarded.
class StreamListener {
 public:
  // `endpoint` is host:port; port 0 picks an ephemeral port.
  StreamListener(Ingestor& ingestor, const std::string& endpoint);
  ~StreamListener();

  StreamListener(const StreamListener&) = delete;
  StreamListener& operator=(const StreamListener&) = delete;

  std::uint16_t port() const { return port_; }

  IngestReport serve(const Ticket& ticket, const StreamOptions& options);
  void stop() { stopping_ = true; }

 private:
  Ingestor& ingestor_;
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
};

IngestReport ingest_stream(Ingestor& ingestor, const std::string& endpoint, std::size_t max_records,
                           const Ticket& ticket);

// Client helper: connects, writes `bytes`, closes.
void send_stream(const std::string& endpoint, std::string_view bytes);

}  // namespace lakelet
