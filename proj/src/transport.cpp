#include "tmpc/transport.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

#include "tmpc/serial.h"

namespace tmpc {

std::vector<u64> Hub::ideal(int, std::vector<u64>, const IdealFn&) {
  throw ProtocolAbort("transport: ideal evaluation not supported by this hub");
}

void LocalHub::send(int from, int to, u32 round, std::vector<u8> bytes, u64 logical_bits) {
  Box& b = box_[from][to];
  {
    std::lock_guard<std::mutex> lk(b.m);
    b.q.push_back(Parcel{round, std::move(bytes), logical_bits});
  }
  b.cv.notify_all();
}

Parcel LocalHub::recv(int to, int from, u32 round) {
  Box& b = box_[from][to];
  std::unique_lock<std::mutex> lk(b.m);
  b.cv.wait(lk, [&] { return !b.q.empty() || dead_; });
  if (b.q.empty()) throw PeerDisconnected("transport: session torn down while receiving");
  Parcel p = std::move(b.q.front());
  b.q.pop_front();
  if (p.round != round)
    throw RoundMismatch("transport: expected round " + std::to_string(round) + ", got " +
                        std::to_string(p.round));
  return p;
}

std::vector<u64> LocalHub::ideal(int party, std::vector<u64> payload, const IdealFn& fn) {
  std::unique_lock<std::mutex> lk(ideal_m_);
  u64 key = ideal_idx_[party]++;
  Cell& c = cells_[key];
  c.in[party] = std::move(payload);
  c.fn = fn;
  if (++c.arrived == 3) {
    c.out = c.fn(c.in, ideal_prg_);
    c.done = true;
    ideal_cv_.notify_all();
  } else {
    ideal_cv_.wait(lk, [&] { return c.done || dead_; });
    if (!c.done) throw PeerDisconnected("transport: session torn down during ideal call");
  }
  std::vector<u64> out = std::move(c.out[party]);
  if (++c.taken == 3) cells_.erase(key);
  return out;
}

void LocalHub::poison() {
  {
    std::lock_guard<std::mutex> lk(ideal_m_);
    dead_ = true;
  }
  ideal_cv_.notify_all();
  for (auto& row : box_)
    for (auto& b : row) {
      std::lock_guard<std::mutex> lk(b.m);
      b.cv.notify_all();
    }
}

namespace {

constexpr u32 kFrameMagic = 0x43504d54;  // "TMPC"

int pair_index(int a, int b) {
  if (a > b) std::swap(a, b);
  if (a == 0 && b == 1) return 0;
  if (a == 0 && b == 2) return 1;
  return 2;
}

void write_all(int fd, const u8* data, size_t n) {
  while (n > 0) {
    ssize_t w = ::write(fd, data, n);
    if (w <= 0) throw PeerDisconnected("transport: write failed");
    data += w;
    n -= static_cast<size_t>(w);
  }
}

bool read_all(int fd, u8* data, size_t n) {
  while (n > 0) {
    ssize_t r = ::read(fd, data, n);
    if (r <= 0) return false;
    data += r;
    n -= static_cast<size_t>(r);
  }
  return true;
}

int listen_accept(int port, int timeout_ms) {
  int lfd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (lfd < 0) throw PeerDisconnected("transport: socket() failed");
  int one = 1;
  ::setsockopt(lfd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::bind(lfd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(lfd, 1) < 0) {
    ::close(lfd);
    throw PeerDisconnected("transport: bind/listen failed on port " + std::to_string(port));
  }
  timeval tv{timeout_ms / 1000, (timeout_ms % 1000) * 1000};
  ::setsockopt(lfd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  int fd = ::accept(lfd, nullptr, nullptr);
  ::close(lfd);
  if (fd < 0) throw PeerDisconnected("transport: accept timed out on port " + std::to_string(port));
  return fd;
}

int connect_retry(const std::string& host, int port, int timeout_ms) {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  for (;;) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) == 0 && res) {
      int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
      if (fd >= 0) {
        if (::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
          ::freeaddrinfo(res);
          return fd;
        }
        ::close(fd);
      }
      ::freeaddrinfo(res);
    }
    if (std::chrono::steady_clock::now() > deadline)
      throw PeerDisconnected("transport: connect to " + host + ":" + std::to_string(port) +
                             " timed out");
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
}

}  // namespace

TcpHub::TcpHub(int party, u64 session, const std::array<std::string, 3>& hosts, int base_port,
               int timeout_ms)
    : party_(party), session_(session) {
  for (int peer = 0; peer < 3; ++peer) {
    if (peer == party_) continue;
    int port = base_port + pair_index(party_, peer);
    fd_[peer] = party_ < peer ? listen_accept(port, timeout_ms)
                              : connect_retry(hosts[static_cast<size_t>(peer)], port, timeout_ms);
    int one = 1;
    ::setsockopt(fd_[peer], IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  for (int peer = 0; peer < 3; ++peer)
    if (peer != party_) readers_[peer] = std::thread([this, peer] { reader_loop(peer); });
}

TcpHub::~TcpHub() {
  poison();
  for (int peer = 0; peer < 3; ++peer) {
    if (fd_[peer] >= 0) ::shutdown(fd_[peer], SHUT_RDWR);
    if (readers_[peer].joinable()) readers_[peer].join();
    if (fd_[peer] >= 0) ::close(fd_[peer]);
  }
}

void TcpHub::send(int from, int to, u32 round, std::vector<u8> bytes, u64 logical_bits) {
  if (from != party_) throw ProtocolAbort("transport: sending on behalf of another party");
  std::vector<u8> frame;
  frame.reserve(bytes.size() + 29);
  put_u32(frame, kFrameMagic);
  put_u32(frame, static_cast<u32>(bytes.size()));
  put_u64(frame, session_);
  put_u32(frame, round);
  frame.push_back(static_cast<u8>(from));
  put_u64(frame, logical_bits);
  frame.insert(frame.end(), bytes.begin(), bytes.end());
  std::lock_guard<std::mutex> lk(wmtx_[to]);
  write_all(fd_[to], frame.data(), frame.size());
}

Parcel TcpHub::recv(int to, int from, u32 round) {
  if (to != party_) throw ProtocolAbort("transport: receiving on behalf of another party");
  Box& b = box_[from];
  std::unique_lock<std::mutex> lk(b.m);
  b.cv.wait(lk, [&] { return !b.q.empty() || b.closed; });
  if (b.q.empty()) throw PeerDisconnected("transport: peer " + std::to_string(from) + " closed");
  Parcel p = std::move(b.q.front());
  b.q.pop_front();
  if (p.round != round)
    throw RoundMismatch("transport: expected round " + std::to_string(round) + ", got " +
                        std::to_string(p.round));
  return p;
}

void TcpHub::poison() {
  for (auto& b : box_) {
    std::lock_guard<std::mutex> lk(b.m);
    b.closed = true;
    b.cv.notify_all();
  }
}

void TcpHub::reader_loop(int peer) {
  Box& b = box_[peer];
  for (;;) {
    u8 hdr[29];
    if (!read_all(fd_[peer], hdr, sizeof(hdr))) break;
    if (get_u32(hdr) != kFrameMagic || get_u64(hdr + 8) != session_ || hdr[20] != peer) break;
    Parcel p;
    p.round = get_u32(hdr + 16);
    p.logical_bits = get_u64(hdr + 21);
    p.bytes.resize(get_u32(hdr + 4));
    if (!p.bytes.empty() && !read_all(fd_[peer], p.bytes.data(), p.bytes.size())) break;
    {
      std::lock_guard<std::mutex> lk(b.m);
      b.q.push_back(std::move(p));
    }
    b.cv.notify_all();
  }
  {
    std::lock_guard<std::mutex> lk(b.m);
    b.closed = true;
  }
  b.cv.notify_all();
}

}  // namespace tmpc
