#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "nasbo/search_space.hpp"

namespace nasbo {

/// True objective with an exact evaluation counter.
class Benchmark {
 public:
  virtual ~Benchmark() = default;

  double evaluate(const Architecture& arch) {
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    return evaluate_impl(arch);
  }
  std::uint64_t evaluation_count() const { return evaluations_.load(std::memory_order_relaxed); }
  virtual std::string name() const = 0;

 protected:
  virtual double evaluate_impl(const Architecture& arch) = 0;

 private:
  std::atomic<std::uint64_t> evaluations_{0};
};

inline constexpr std::uint64_t kDefaultBenchmarkSeed = 301;

struct SyntheticOracleConfig {
  std::uint64_t benchmark_seed = kDefaultBenchmarkSeed;
  double accuracy_floor = 0.88;
  double accuracy_ceiling = 0.95;
  double locality_weight = 0.6;     // per-edge operation effects
  double interaction_weight = 0.3;  // pairs of adjacent edges
  double pattern_weight = 0.3;      // per-node input-pair pattern

  void validate() const;
};

/// Deterministic desk-scale stand-in for a tabular NAS benchmark.
///
/// raw(a) = locality_weight    * sum over edges  u(cell, node, predecessor, op)
///        + interaction_weight * (sum over nodes  s(cell, node, op_low, op_high)
///                                + sum over chains c(cell, mid, op_in, op_out))
///        + pattern_weight     * sum over nodes  b(cell, node, input pair)
///
/// A chain is an edge into intermediate node `mid` followed by an edge from
/// `mid` into a later node. All tables are hash-derived from benchmark_seed.
/// raw is mapped affinely onto [floor, ceiling] using guaranteed bounds.
class SyntheticOracle {
 public:
  SyntheticOracle(SpecPtr spec, SyntheticOracleConfig cfg = {});

  double evaluate(const Architecture& arch) const;
  double raw_score(const Architecture& arch) const;

  /// Largest possible change of evaluate() under one edit.
  double locality_bound() const { return locality_bound_; }
  double raw_lower_bound() const { return raw_lo_; }
  double raw_upper_bound() const { return raw_hi_; }

  const SyntheticOracleConfig& config() const { return cfg_; }
  const SearchSpaceSpec& spec() const { return *spec_; }

 private:
  double unit(std::uint64_t table, std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) const;
  std::size_t u_index(int cell, int node, int pred, int op) const;
  std::size_t s_index(int cell, int node, int op_a, int op_b) const;
  std::size_t c_index(int cell, int mid, int op_in, int op_out) const;
  std::size_t b_index(int cell, int node, int pair) const;
  void compute_bounds();

  SpecPtr spec_;
  SyntheticOracleConfig cfg_;
  std::vector<double> u_, s_, c_, b_;
  std::vector<std::size_t> u_offset_, b_offset_;
  double raw_lo_ = 0.0;
  double raw_hi_ = 1.0;
  double locality_bound_ = 0.0;
};

class SyntheticBenchmark final : public Benchmark {
 public:
  explicit SyntheticBenchmark(std::shared_ptr<const SyntheticOracle> oracle) : oracle_(std::move(oracle)) {}
  std::string name() const override { return "synthetic"; }
  const SyntheticOracle& oracle() const { return *oracle_; }

 protected:
  double evaluate_impl(const Architecture& arch) override { return oracle_->evaluate(arch); }

 private:
  std::shared_ptr<const SyntheticOracle> oracle_;
};

// --- External bridge -----------------------------------------------------------

class BridgeError : public std::runtime_error {
 public:
  enum class Kind { unavailable, protocol, remote };

  BridgeError(Kind kind, const std::string& what, std::string payload = {})
      : std::runtime_error(what), kind_(kind), payload_(std::move(payload)) {}

  Kind kind() const { return kind_; }
  /// Raw response line for protocol errors.
  const std::string& payload() const { return payload_; }

 private:
  Kind kind_;
  std::string payload_;
};

struct BridgeInfo {
  std::string benchmark;
  std::string version;
};

/// Client for the line-delimited JSON bridge protocol over a child process's
/// stdin/stdout. One request is in flight at a time; concurrent callers queue.
class BridgeClient {
 public:
  /// Launches `command` through /bin/sh and performs the hello handshake.
  explicit BridgeClient(const std::string& command,
                        std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~BridgeClient();

  BridgeClient(const BridgeClient&) = delete;
  BridgeClient& operator=(const BridgeClient&) = delete;

  const BridgeInfo& info() const { return info_; }
  double evaluate(const Architecture& arch);

  /// Sends one raw line and returns the raw response line (testing hook).
  std::string round_trip(const std::string& line);

 private:
  void write_line(const std::string& line);
  std::string read_line();
  void shutdown();

  std::mutex mutex_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::chrono::milliseconds timeout_;
  std::int64_t next_id_ = 1;
  BridgeInfo info_;
};

class BridgeBenchmark final : public Benchmark {
 public:
  explicit BridgeBenchmark(std::shared_ptr<BridgeClient> client) : client_(std::move(client)) {}
  std::string name() const override { return client_->info().benchmark; }

 protected:
  double evaluate_impl(const Architecture& arch) override { return client_->evaluate(arch); }

 private:
  std::shared_ptr<BridgeClient> client_;
};

}  // namespace nasbo
