#include "netrecon/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "netrecon/platform.hpp"
#include "netrecon/rng.hpp"

namespace netrecon {

void validate(const AppTrace& trace) {
  const auto& ts = trace.transfers;
  std::vector<std::size_t> indegree(ts.size(), 0);
  std::vector<std::vector<std::size_t>> dependents(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto& t = ts[i];
    if (t.id != i) throw Error("trace " + trace.name + ": transfer " + std::to_string(i) + " has id " + std::to_string(t.id));
    if (t.src == t.dst) throw Error("trace " + trace.name + ": transfer " + std::to_string(i) + " has src == dst");
    if (!std::isfinite(t.size_mb) || t.size_mb < 0.0)
      throw Error("trace " + trace.name + ": transfer " + std::to_string(i) + " has a negative size");
    std::set<std::size_t> unique(t.deps.begin(), t.deps.end());
    for (std::size_t d : unique) {
      if (d >= ts.size()) throw Error("trace " + trace.name + ": transfer " + std::to_string(i) + " depends on unknown id " + std::to_string(d));
      dependents[d].push_back(i);
      ++indegree[i];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::size_t seen = 0;
  while (!ready.empty()) {
    std::size_t u = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t v : dependents[u])
      if (--indegree[v] == 0) ready.push_back(v);
  }
  if (seen != ts.size()) throw Error("trace " + trace.name + ": cyclic dependencies");
}

Json trace_to_json(const AppTrace& trace) {
  Json transfers = Json::array();
  for (const auto& t : trace.transfers)
    transfers.push_back({{"id", t.id}, {"src", t.src}, {"dst", t.dst}, {"size_mb", t.size_mb}, {"deps", t.deps}});
  return Json{{"name", trace.name}, {"params", trace.params}, {"transfers", std::move(transfers)}};
}

AppTrace trace_from_json(const Json& doc) {
  require_fields(doc, {"name", "params", "transfers"}, "trace");
  AppTrace trace;
  try {
    trace.name = doc.at("name").get<std::string>();
    if (doc.contains("params")) trace.params = doc["params"];
    std::size_t i = 0;
    for (const auto& t : doc.at("transfers")) {
      require_fields(t, {"id", "src", "dst", "size_mb", "deps"}, "transfers[" + std::to_string(i++) + "]");
      trace.transfers.push_back(Transfer{t.at("id").get<std::size_t>(), t.at("src").get<std::string>(),
                                         t.at("dst").get<std::string>(), t.at("size_mb").get<double>(),
                                         t.value("deps", std::vector<std::size_t>{})});
    }
  } catch (const Json::exception& e) {
    throw Error(std::string("trace: ") + e.what());
  }
  validate(trace);
  return trace;
}

namespace {

void require_hosts(const std::vector<std::string>& hosts, std::size_t minimum, const char* kernel) {
  if (hosts.size() < minimum)
    throw Error(std::string(kernel) + " needs at least " + std::to_string(minimum) + " hosts");
  std::set<std::string> unique(hosts.begin(), hosts.end());
  if (unique.size() != hosts.size()) throw Error(std::string(kernel) + ": duplicate hosts");
}

}  // namespace

AppTrace token_ring_trace(const std::vector<std::string>& hosts, std::uint64_t seed, double token_mb) {
  require_hosts(hosts, 2, "token ring");
  std::vector<std::string> ring = hosts;
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(ring));
  AppTrace trace{"token", {{"seed", seed}, {"token_mb", token_mb}, {"ring", ring}}, {}};
  const std::size_t n = ring.size();
  for (std::size_t k = 0; k < 3 * n; ++k) {
    Transfer t{k, ring[k % n], ring[(k + 1) % n], token_mb, {}};
    if (k > 0) t.deps.push_back(k - 1);
    trace.transfers.push_back(std::move(t));
  }
  return trace;
}

AppTrace broadcast_trace(const std::vector<std::string>& hosts, std::uint64_t seed, double message_mb) {
  require_hosts(hosts, 2, "broadcast");
  Rng rng(seed);
  const std::string root = hosts[rng.below(hosts.size())];
  AppTrace trace{"broadcast", {{"seed", seed}, {"message_mb", message_mb}, {"root", root}}, {}};
  for (const auto& h : hosts) {
    if (h == root) continue;
    std::size_t id = trace.transfers.size();
    Transfer t{id, root, h, message_mb, {}};
    if (id > 0) t.deps.push_back(id - 1);
    trace.transfers.push_back(std::move(t));
  }
  return trace;
}

AppTrace all2all_trace(const std::vector<std::string>& hosts, double message_mb) {
  require_hosts(hosts, 2, "all2all");
  AppTrace trace{"all2all", {{"message_mb", message_mb}}, {}};
  for (const auto& a : hosts)
    for (const auto& b : hosts)
      if (a != b) trace.transfers.push_back(Transfer{trace.transfers.size(), a, b, message_mb, {}});
  return trace;
}

AppTrace pmm_trace(const std::vector<std::string>& hosts, std::size_t rows, std::size_t cols,
                   std::size_t matrix_dim, std::size_t block) {
  if (rows < 1 || cols < 1) throw Error("pmm: grid dimensions must be positive");
  if (block < 1 || matrix_dim < 1) throw Error("pmm: matrix and block sizes must be positive");
  if (hosts.size() < rows * cols)
    throw Error("pmm: " + std::to_string(rows) + "x" + std::to_string(cols) + " grid needs more hosts than " +
                std::to_string(hosts.size()));
  std::vector<std::string> grid(hosts.begin(), hosts.begin() + static_cast<std::ptrdiff_t>(rows * cols));
  require_hosts(grid, 1, "pmm");
  auto at = [&](std::size_t r, std::size_t c) -> const std::string& { return grid[r * cols + c]; };

  AppTrace trace{"pmm",
                 {{"rows", rows}, {"cols", cols}, {"matrix_dim", matrix_dim}, {"block", block}, {"grid", grid}},
                 {}};
  const double n = static_cast<double>(matrix_dim);
  const std::size_t steps = (matrix_dim + block - 1) / block;
  std::vector<std::size_t> previous;
  for (std::size_t k = 0; k < steps; ++k) {
    const double width = static_cast<double>(std::min(block, matrix_dim - k * block));
    const double row_piece_mb = width * (n / static_cast<double>(rows)) * 8.0 / 1e6;
    const double col_piece_mb = width * (n / static_cast<double>(cols)) * 8.0 / 1e6;
    std::vector<std::size_t> current;
    auto emit = [&](const std::string& src, const std::string& dst, double size) {
      std::size_t id = trace.transfers.size();
      trace.transfers.push_back(Transfer{id, src, dst, size, previous});
      current.push_back(id);
    };
    const std::size_t owner_col = k % cols;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        if (c != owner_col) emit(at(r, owner_col), at(r, c), row_piece_mb);
    const std::size_t owner_row = k % rows;
    for (std::size_t c = 0; c < cols; ++c)
      for (std::size_t r = 0; r < rows; ++r)
        if (r != owner_row) emit(at(owner_row, c), at(r, c), col_piece_mb);
    if (!current.empty()) previous = std::move(current);
  }
  return trace;
}

Kernel parse_kernel(std::string_view text) {
  if (text == "token") return Kernel::token;
  if (text == "broadcast") return Kernel::broadcast;
  if (text == "all2all") return Kernel::all2all;
  if (text == "pmm") return Kernel::pmm;
  throw Error("unknown kernel '" + std::string(text) + "' (expected token, broadcast, all2all, pmm)");
}

std::string_view to_string(Kernel k) {
  switch (k) {
    case Kernel::token: return "token";
    case Kernel::broadcast: return "broadcast";
    case Kernel::all2all: return "all2all";
    case Kernel::pmm: return "pmm";
  }
  return "?";
}

Json kernel_params_to_json(const KernelParams& k) {
  return Json{{"token_mb", k.token_mb},
              {"broadcast_mb", k.broadcast_mb},
              {"all2all_mb", k.all2all_mb},
              {"pmm_matrix_dim", k.pmm_matrix_dim},
              {"pmm_rows", k.pmm_rows},
              {"pmm_cols", k.pmm_cols},
              {"pmm_block", k.pmm_block}};
}

KernelParams kernel_params_from_json(const Json& doc) {
  require_fields(doc, {"token_mb", "broadcast_mb", "all2all_mb", "pmm_matrix_dim", "pmm_rows", "pmm_cols", "pmm_block"},
                 "kernel params");
  KernelParams k;
  try {
    k.token_mb = doc.value("token_mb", k.token_mb);
    k.broadcast_mb = doc.value("broadcast_mb", k.broadcast_mb);
    k.all2all_mb = doc.value("all2all_mb", k.all2all_mb);
    k.pmm_matrix_dim = doc.value("pmm_matrix_dim", k.pmm_matrix_dim);
    k.pmm_rows = doc.value("pmm_rows", k.pmm_rows);
    k.pmm_cols = doc.value("pmm_cols", k.pmm_cols);
    k.pmm_block = doc.value("pmm_block", k.pmm_block);
  } catch (const Json::exception& e) {
    throw Error(std::string("kernel params: ") + e.what());
  }
  return k;
}

AppTrace make_trace(Kernel kernel, const std::vector<std::string>& hosts, const KernelParams& params,
                    std::uint64_t seed) {
  switch (kernel) {
    case Kernel::token: return token_ring_trace(hosts, seed, params.token_mb);
    case Kernel::broadcast: return broadcast_trace(hosts, seed, params.broadcast_mb);
    case Kernel::all2all: return all2all_trace(hosts, params.all2all_mb);
    case Kernel::pmm: {
      if (hosts.size() < 2) throw Error("pmm needs at least 2 hosts");
      std::size_t rows = params.pmm_rows;
      std::size_t cols = params.pmm_cols;
      if (rows == 0 || cols == 0) {
        rows = std::min<std::size_t>(4, static_cast<std::size_t>(std::sqrt(static_cast<double>(hosts.size()))));
        cols = std::min<std::size_t>(4, hosts.size() / rows);
      }
      std::size_t block = params.pmm_block;
      if (block == 0) {
        double b = static_cast<double>(params.pmm_matrix_dim) / static_cast<double>(std::max(rows, cols));
        block = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(b)));
      }
      std::vector<std::string> shuffled = hosts;
      Rng rng(seed);
      rng.shuffle(std::span<std::string>(shuffled));
      return pmm_trace(shuffled, rows, cols, params.pmm_matrix_dim, block);
    }
  }
  throw Error("unknown kernel");
}

}  // namespace netrecon
