#include "hitsm/oracle.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace hitsm {

namespace {

constexpr std::size_t kBlock = 4096;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Edge {
  int to;
  double cum;  // cumulative exit probability
  AtomKind kind;
  double scale;
};

struct Row {
  double loop = 0;  // probability of a virtual transition (exterior rows only)
  AtomKind loop_kind = AtomKind::Dirac;
  double loop_scale = 0;
  std::vector<Edge> exits;
};

std::vector<Row> build_rows(const SemiMarkovModel& m, double eps) {
  std::vector<Row> rows(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    Row& r = rows[i];
    bool batch = !m.in_domain[i] && !m.p[i][i].is_zero();
    ComparableFn out = ComparableFn::constant(1);
    if (batch) {
      out = out - m.p[i][i];
      r.loop = cf_eval(m.p[i][i], eps);
      r.loop_kind = m.times[i][i]->sampler;
      r.loop_scale = cf_eval(m.times[i][i]->scale, eps);
    }
    double denom = cf_eval(out, eps);
    double cum = 0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m.p[i][j].is_zero() || (batch && j == i)) continue;
      cum += cf_eval(m.p[i][j], eps) / denom;
      r.exits.push_back({static_cast<int>(j), cum, m.times[i][j]->sampler, cf_eval(m.times[i][j]->scale, eps)});
    }
    if (!r.exits.empty()) r.exits.back().cum = 1.0;
  }
  return rows;
}

double draw_time(AtomKind k, double a, std::mt19937_64& g) {
  switch (k) {
    case AtomKind::Dirac: return a;
    case AtomKind::Exponential: return std::exponential_distribution<double>(1.0 / a)(g);
    case AtomKind::Uniform: return std::uniform_real_distribution<double>(0.0, a)(g);
  }
  return 0;
}

unsigned default_workers() {
  if (const char* w = std::getenv("HITSM_WORKERS")) {
    int v = std::atoi(w);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned h = std::thread::hardware_concurrency();
  return h ? h : 1;
}

}  // namespace

std::vector<HitSample> simulate_hitting(const SemiMarkovModel& m, double eps, int start, std::size_t n_samples,
                                        std::uint64_t seed, unsigned workers) {
  if (n_samples == 0) throw PreconditionError("need at least one sample");
  if (start < 0 || static_cast<std::size_t>(start) >= m.size()) throw PreconditionError("unknown start state");
  if (!(eps > 0 && eps <= 1)) throw PreconditionError("eps must lie in (0, 1]");
  const auto rows = build_rows(m, eps);
  std::vector<HitSample> out(n_samples);
  const std::size_t blocks = (n_samples + kBlock - 1) / kBlock;
  std::atomic<std::uint64_t> steps{0};
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;

  auto run_block = [&](std::size_t b) {
    std::mt19937_64 g(splitmix64(seed ^ splitmix64(b + 1)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uint64_t local = 0;
    const std::size_t lo = b * kBlock, hi = std::min(n_samples, lo + kBlock);
    for (std::size_t idx = lo; idx < hi; ++idx) {
      int s = start;
      double tau = 0;
      do {
        const Row& r = rows[s];
        if (r.exits.empty()) throw PreconditionError("state without exits");
        if (r.loop > 0) {
          long long n = std::geometric_distribution<long long>(1.0 - r.loop)(g);
          if (n > 0) {
            switch (r.loop_kind) {
              case AtomKind::Dirac: tau += static_cast<double>(n) * r.loop_scale; break;
              case AtomKind::Exponential:
                tau += std::gamma_distribution<double>(static_cast<double>(n), r.loop_scale)(g);
                break;
              case AtomKind::Uniform:
                for (long long q = 0; q < n; ++q) tau += draw_time(AtomKind::Uniform, r.loop_scale, g);
                local += static_cast<std::uint64_t>(n);
                break;
            }
          }
          ++local;
        }
        double u = unif(g);
        const Edge* e = &r.exits.back();
        for (const auto& x : r.exits)
          if (u < x.cum) {
            e = &x;
            break;
          }
        tau += draw_time(e->kind, e->scale, g);
        s = e->to;
        ++local;
        if (local >= 4096) {
          if (steps.fetch_add(local) + local > kStepBudget) throw StepBudgetError("simulation step budget exceeded");
          local = 0;
        }
      } while (!m.in_domain[s]);
      out[idx] = {tau, s};
    }
    if (steps.fetch_add(local) + local > kStepBudget) throw StepBudgetError("simulation step budget exceeded");
  };

  unsigned w = workers ? workers : default_workers();
  w = static_cast<unsigned>(std::min<std::size_t>(w, blocks));
  auto worker = [&] {
    try {
      for (std::size_t b; (b = next.fetch_add(1)) < blocks;) {
        {
          std::lock_guard lk(err_mu);
          if (err) return;
        }
        run_block(b);
      }
    } catch (...) {
      std::lock_guard lk(err_mu);
      if (!err) err = std::current_exception();
    }
  };
  if (w <= 1) {
    worker();
  } else {
    std::vector<std::thread> ts;
    for (unsigned k = 0; k < w; ++k) ts.emplace_back(worker);
    for (auto& t : ts) t.join();
  }
  if (err) std::rethrow_exception(err);
  return out;
}

SampleStats sample_stats(const std::vector<HitSample>& xs, double scale, double s) {
  SampleStats st;
  st.n = xs.size();
  st.scale = scale;
  st.s = s;
  if (xs.empty()) return st;
  double sum = 0, sum2 = 0, ts = 0, ts2 = 0;
  for (const auto& x : xs) {
    double y = x.tau / scale;
    sum += y;
    sum2 += y * y;
    double e = std::exp(-s * y);
    ts += e;
    ts2 += e * e;
    st.entry_freq[x.entry] += 1.0;
  }
  double n = static_cast<double>(xs.size());
  st.mean = sum / n;
  st.transform = ts / n;
  if (xs.size() > 1) {
    st.mean_se = std::sqrt(std::max(0.0, (sum2 - n * st.mean * st.mean) / (n - 1)) / n);
    st.transform_se = std::sqrt(std::max(0.0, (ts2 - n * st.transform * st.transform) / (n - 1)) / n);
  }
  for (auto& [k, v] : st.entry_freq) v /= n;
  return st;
}

}  // namespace hitsm
