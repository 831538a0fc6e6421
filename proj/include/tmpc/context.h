#pragma once

#include <exception>
#include <thread>
#include <type_traits>

#include "tmpc/serial.h"
#include "tmpc/transport.h"

namespace tmpc {

struct Metrics {
  u64 rounds = 0;
  u64 bits_sent = 0;
  u64 messages = 0;
  void reset() { *this = Metrics{}; }
};

// Per-party protocol state.  prg_next is shared with party id+1, prg_prev
// with party id-1 (the standard pairwise setup), prg_priv is private.
struct PartyCtx {
  int id;
  Field F;
  Hub* hub;
  Prg prg_next;
  Prg prg_prev;
  Prg prg_priv;
  bool ideal = false;
  Metrics metrics;

  PartyCtx(int id_, const Field& f, Hub* h, u64 seed_next, u64 seed_prev, u64 seed_priv,
           bool ideal_mode = false)
      : id(id_),
        F(f),
        hub(h),
        prg_next(seed_next),
        prg_prev(seed_prev),
        prg_priv(seed_priv),
        ideal(ideal_mode) {}

  int next() const { return (id + 1) % 3; }
  int prev() const { return (id + 2) % 3; }
};

// Staged exchange for one communication round.  Parcels carry a field-element
// section and a packed-bit section; go() always exchanges with both peers
// (possibly empty parcels) so every party advances its round counter in
// lockstep.  Reusable: each go() starts a fresh round.
class RoundIO {
 public:
  explicit RoundIO(PartyCtx& ctx) : ctx_(ctx) {}

  void put_field(int to, u64 v) { out_f_[to].push_back(v); }
  void put_bit(int to, int b) { out_b_[to].push_back(static_cast<u8>(b & 1)); }

  u64 get_field(int from) { return in_f_[from][cur_f_[from]++]; }
  int get_bit(int from) { return in_b_[from][cur_b_[from]++]; }

  void go() {
    int me = ctx_.id;
    u32 round = static_cast<u32>(ctx_.metrics.rounds);
    for (int to : {ctx_.next(), ctx_.prev()}) {
      std::vector<u8> bytes;
      bytes.reserve(8 + out_f_[to].size() * 8 + out_b_[to].size() / 8 + 1);
      put_u32(bytes, static_cast<u32>(out_f_[to].size()));
      for (u64 v : out_f_[to]) put_u64(bytes, v);
      put_u32(bytes, static_cast<u32>(out_b_[to].size()));
      u8 acc = 0;
      for (size_t i = 0; i < out_b_[to].size(); ++i) {
        acc |= static_cast<u8>(out_b_[to][i] << (i % 8));
        if (i % 8 == 7 || i + 1 == out_b_[to].size()) {
          bytes.push_back(acc);
          acc = 0;
        }
      }
      u64 bits = static_cast<u64>(out_f_[to].size()) * static_cast<u64>(ctx_.F.k) +
                 out_b_[to].size();
      ctx_.metrics.bits_sent += bits;
      ctx_.metrics.messages += 1;
      ctx_.hub->send(me, to, round, std::move(bytes), bits);
      out_f_[to].clear();
      out_b_[to].clear();
    }
    for (int from : {ctx_.next(), ctx_.prev()}) {
      Parcel p = ctx_.hub->recv(me, from, round);
      const u8* d = p.bytes.data();
      u32 nf = get_u32(d);
      in_f_[from].assign(nf, 0);
      for (u32 i = 0; i < nf; ++i) in_f_[from][i] = get_u64(d + 4 + 8 * i);
      const u8* bd = d + 4 + 8 * nf;
      u32 nb = get_u32(bd);
      in_b_[from].assign(nb, 0);
      for (u32 i = 0; i < nb; ++i) in_b_[from][i] = (bd[4 + i / 8] >> (i % 8)) & 1;
      cur_f_[from] = cur_b_[from] = 0;
    }
    ctx_.metrics.rounds += 1;
  }

 private:
  PartyCtx& ctx_;
  std::vector<u64> out_f_[3];
  std::vector<u8> out_b_[3];
  std::vector<u64> in_f_[3];
  std::vector<u8> in_b_[3];
  size_t cur_f_[3] = {};
  size_t cur_b_[3] = {};
};

struct SessionSeeds {
  u64 pair[3];
  u64 priv[3];
  u64 hub;

  static SessionSeeds derive(u64 master) {
    SessionSeeds s{};
    for (auto& v : s.pair) v = splitmix64(master);
    for (auto& v : s.priv) v = splitmix64(master);
    s.hub = splitmix64(master);
    return s;
  }
};

template <class R>
struct Run3Result {
  std::array<R, 3> out;
  Metrics metrics;  // rounds of party 0 (asserted equal), bits summed over parties
};

// Runs fn(PartyCtx&) on three threads over an in-process hub and returns the
// per-party results plus aggregated communication metrics.
template <class Fn>
auto run3(const Field& F, u64 seed, Fn&& fn, bool ideal_mode = false)
    -> Run3Result<std::invoke_result_t<Fn&, PartyCtx&>> {
  using R = std::invoke_result_t<Fn&, PartyCtx&>;
  SessionSeeds seeds = SessionSeeds::derive(seed);
  LocalHub hub(seeds.hub);
  Run3Result<R> result;
  std::array<std::exception_ptr, 3> errs{};
  std::array<Metrics, 3> metrics{};
  std::array<std::thread, 3> threads;
  for (int i = 0; i < 3; ++i) {
    threads[static_cast<size_t>(i)] = std::thread([&, i] {
      PartyCtx ctx(i, F, &hub, seeds.pair[i], seeds.pair[(i + 2) % 3], seeds.priv[i], ideal_mode);
      try {
        result.out[static_cast<size_t>(i)] = fn(ctx);
      } catch (...) {
        errs[static_cast<size_t>(i)] = std::current_exception();
        hub.poison();
      }
      metrics[static_cast<size_t>(i)] = ctx.metrics;
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errs) {  // prefer the root cause over teardown fallout
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const PeerDisconnected&) {
    } catch (...) {
      std::rethrow_exception(e);
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  if (metrics[0].rounds != metrics[1].rounds || metrics[1].rounds != metrics[2].rounds)
    throw ProtocolAbort("session: parties disagree on round count");
  result.metrics.rounds = metrics[0].rounds;
  result.metrics.bits_sent = metrics[0].bits_sent + metrics[1].bits_sent + metrics[2].bits_sent;
  result.metrics.messages = metrics[0].messages + metrics[1].messages + metrics[2].messages;
  return result;
}

}  // namespace tmpc
