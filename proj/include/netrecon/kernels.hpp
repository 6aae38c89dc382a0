#pragma once

// Application kernels expressed as dependent transfer schedules.

#include <cstdint>
#include <string>
#include <vector>

#include "netrecon/platform_io.hpp"

namespace netrecon {

struct Transfer {
  std::size_t id = 0;
  std::string src;
  std::string dst;
  double size_mb = 0.0;
  std::vector<std::size_t> deps;

  bool operator==(const Transfer&) const = default;
};

/// transfers[i].id == i for every i.
struct AppTrace {
  std::string name;
  Json params = Json::object();
  std::vector<Transfer> transfers;

  bool operator==(const AppTrace&) const = default;
};

/// Checks ids, endpoints, sizes and that dependencies are acyclic.
void validate(const AppTrace& trace);

Json trace_to_json(const AppTrace& trace);
AppTrace trace_from_json(const Json& doc);

/// The token goes three times around a ring whose order is a seeded
/// permutation of `hosts`. Every hop waits for the previous one.
AppTrace token_ring_trace(const std::vector<std::string>& hosts, std::uint64_t seed, double token_mb);

/// A seeded root sends the message to every other host, one after the other.
AppTrace broadcast_trace(const std::vector<std::string>& hosts, std::uint64_t seed, double message_mb);

/// One independent transfer per ordered host pair.
AppTrace all2all_trace(const std::vector<std::string>& hosts, double message_mb);

/// Outer-product matrix multiplication over a rows x cols process grid laid
/// out row-major on `hosts` (the first rows*cols entries). At step k the
/// owners of block column k broadcast along their process row and the owners
/// of block row k broadcast along their process column; each step waits for
/// the whole previous step. Blocks are doubles, sizes in MB (1e6 bytes).
AppTrace pmm_trace(const std::vector<std::string>& hosts, std::size_t rows, std::size_t cols,
                   std::size_t matrix_dim, std::size_t block);

enum class Kernel { token, broadcast, all2all, pmm };

Kernel parse_kernel(std::string_view text);
std::string_view to_string(Kernel k);

struct KernelParams {
  double token_mb = 0.001;
  double broadcast_mb = 1.0;
  double all2all_mb = 1.0;
  std::size_t pmm_matrix_dim = 2000;
  /// 0 selects the grid and block size from the host count.
  std::size_t pmm_rows = 0;
  std::size_t pmm_cols = 0;
  std::size_t pmm_block = 0;
};

Json kernel_params_to_json(const KernelParams& k);
KernelParams kernel_params_from_json(const Json& doc);

/// Builds the trace of `kernel` over `hosts`. pmm uses a grid of at most
/// 4x4 processes drawn from a seeded shuffle of the hosts, with block size
/// N / max(rows, cols) unless overridden. Throws when the kernel cannot run
/// on that many hosts.
AppTrace make_trace(Kernel kernel, const std::vector<std::string>& hosts, const KernelParams& params,
                    std::uint64_t seed);

}  // namespace netrecon
