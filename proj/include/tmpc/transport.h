#pragma once

#include <array>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tmpc/prg.h"

namespace tmpc {

// Exit-code mapping used by the CLI: ConfigError -> 2, ProtocolAbort (and
// derived) -> 3, VerificationError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ProtocolAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RoundMismatch : ProtocolAbort {
  using ProtocolAbort::ProtocolAbort;
};
struct PeerDisconnected : ProtocolAbort {
  using ProtocolAbort::ProtocolAbort;
};
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Parcel {
  u32 round = 0;
  std::vector<u8> bytes;
  u64 logical_bits = 0;
};

// Test-only rendezvous callback: receives the three deposited payloads and a
// hub-owned generator, returns the three responses.
using IdealFn =
    std::function<std::array<std::vector<u64>, 3>(const std::array<std::vector<u64>, 3>&, Prg&)>;

// Message fabric between the three parties of one session.
class Hub {
 public:
  virtual ~Hub() = default;
  virtual void send(int from, int to, u32 round, std::vector<u8> bytes, u64 logical_bits) = 0;
  virtual Parcel recv(int to, int from, u32 round) = 0;
  // Synchronous trusted-party evaluation; only in-process hubs support it.
  virtual std::vector<u64> ideal(int party, std::vector<u64> payload, const IdealFn& fn);
  // Unblocks all waiters after a failure so sibling threads can unwind.
  virtual void poison() {}
};

// In-process hub: one mailbox per directed party pair.
class LocalHub : public Hub {
 public:
  explicit LocalHub(u64 ideal_seed = 0) : ideal_prg_(ideal_seed, 0xdecaf) {}

  void send(int from, int to, u32 round, std::vector<u8> bytes, u64 logical_bits) override;
  Parcel recv(int to, int from, u32 round) override;
  std::vector<u64> ideal(int party, std::vector<u64> payload, const IdealFn& fn) override;
  void poison() override;

 private:
  struct Box {
    std::mutex m;
    std::condition_variable cv;
    std::deque<Parcel> q;
  };
  struct Cell {
    std::array<std::vector<u64>, 3> in;
    std::array<std::vector<u64>, 3> out;
    IdealFn fn;
    int arrived = 0;
    int taken = 0;
    bool done = false;
  };

  Box box_[3][3];
  std::mutex ideal_m_;
  std::condition_variable ideal_cv_;
  std::map<u64, Cell> cells_;
  u64 ideal_idx_[3] = {0, 0, 0};
  Prg ideal_prg_;
  bool dead_ = false;
};

// TCP hub: pairwise sockets, lower party id listens.  A reader thread per
// peer demultiplexes frames into per-sender queues.
class TcpHub : public Hub {
 public:
  TcpHub(int party, u64 session, const std::array<std::string, 3>& hosts, int base_port,
         int timeout_ms = 30000);
  ~TcpHub() override;

  void send(int from, int to, u32 round, std::vector<u8> bytes, u64 logical_bits) override;
  Parcel recv(int to, int from, u32 round) override;
  void poison() override;

 private:
  struct Box {
    std::mutex m;
    std::condition_variable cv;
    std::deque<Parcel> q;
    bool closed = false;
  };

  void reader_loop(int peer);

  int party_;
  u64 session_;
  int fd_[3] = {-1, -1, -1};
  std::mutex wmtx_[3];
  Box box_[3];
  std::thread readers_[3];
};

}  // namespace tmpc
