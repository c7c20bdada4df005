#include "thicknerve/homology.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

#include "thicknerve/errors.hpp"

namespace thicknerve {

namespace {

struct Overflow {};

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Overflow{};
  return r;
}
std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow{};
  return r;
}
// a - q b
std::int64_t checked_msub(std::int64_t a, std::int64_t q, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, checked_mul(q, b), &r)) throw Overflow{};
  return r;
}
BigInt checked_add(const BigInt& a, const BigInt& b) { return a + b; }
BigInt checked_msub(const BigInt& a, const BigInt& q, const BigInt& b) { return a - q * b; }

template <typename I>
I abs_of(const I& v) {
  return v < 0 ? I(-v) : v;
}

template <typename I>
I floor_div(const I& a, const I& b) {
  I q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

template <typename I>
std::vector<I> smith_dense(std::vector<std::vector<I>> a) {
  const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
  std::vector<I> diag;
  std::size_t t = 0;
  while (t < rows && t < cols) {
    // Smallest nonzero entry of the remaining block becomes the pivot.
    std::size_t pr = rows, pc = cols;
    I best = 0;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (a[i][j] != 0 && (pr == rows || abs_of(a[i][j]) < best)) {
          best = abs_of(a[i][j]);
          pr = i;
          pc = j;
        }
    if (pr == rows) break;
    std::swap(a[t], a[pr]);
    for (auto& r : a) std::swap(r[t], r[pc]);
    for (;;) {
      bool dirty = false;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a[i][t] == 0) continue;
        const I q = floor_div(a[i][t], a[t][t]);
        for (std::size_t j = t; j < cols; ++j) a[i][j] = checked_msub(a[i][j], q, a[t][j]);
        if (a[i][t] != 0) {
          std::swap(a[t], a[i]);
          dirty = true;
        }
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a[t][j] == 0) continue;
        const I q = floor_div(a[t][j], a[t][t]);
        for (std::size_t i = t; i < rows; ++i) a[i][j] = checked_msub(a[i][j], q, a[i][t]);
        if (a[t][j] != 0) {
          for (auto& r : a) std::swap(r[t], r[j]);
          dirty = true;
        }
      }
      if (dirty) continue;
      // Pivot must divide the rest of the block; otherwise fold in the row.
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (a[i][j] % a[t][t] != 0) {
            for (std::size_t k = t; k < cols; ++k) a[t][k] = checked_add(a[t][k], a[i][k]);
            divides = false;
            break;
          }
      if (divides) break;
    }
    diag.push_back(abs_of(a[t][t]));
    ++t;
  }
  return diag;
}

}  // namespace

std::vector<BigInt> smith_diagonal(const std::vector<std::vector<std::int64_t>>& dense, bool* used_bigint) {
  if (used_bigint) *used_bigint = false;
  try {
    const auto d = smith_dense<std::int64_t>(dense);
    return {d.begin(), d.end()};
  } catch (const Overflow&) {
    if (used_bigint) *used_bigint = true;
    std::vector<std::vector<BigInt>> big(dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i) big[i].assign(dense[i].begin(), dense[i].end());
    return smith_dense<BigInt>(std::move(big));
  }
}

EliminationResult eliminate(const SparseIntMatrix& m) {
  EliminationResult out;
  // Columns as sorted (row, value) lists; rows as sets of columns.
  std::vector<std::map<std::uint32_t, std::int64_t>> col(m.cols);
  std::vector<std::vector<std::uint32_t>> row_cols(m.rows);
  for (std::size_t j = 0; j < m.cols; ++j)
    for (std::uint64_t e = m.start[j]; e < m.start[j + 1]; ++e)
      if (m.value[e] != 0) {
        col[j][m.row[e]] += m.value[e];
        row_cols[m.row[e]].push_back(static_cast<std::uint32_t>(j));
      }
  std::vector<char> col_alive(m.cols, 1), row_alive(m.rows, 1);
  auto row_count = [&](std::uint32_t r) {
    std::size_t n = 0;
    for (const auto j : row_cols[r]) n += col_alive[j] && col[j].count(r);
    return n;
  };
  bool overflow = false;
  try {
    // Columns in order of increasing length; revisit until no unit pivot is left.
    bool progress = true;
    while (progress) {
      progress = false;
      std::vector<std::uint32_t> order;
      for (std::uint32_t j = 0; j < m.cols; ++j)
        if (col_alive[j] && !col[j].empty()) order.push_back(j);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return col[a].size() < col[b].size(); });
      for (const auto j : order) {
        if (!col_alive[j] || col[j].empty()) continue;
        std::uint32_t pivot_row = 0;
        std::size_t best = SIZE_MAX;
        for (const auto& [r, v] : col[j])
          if (v == 1 || v == -1) {
            const std::size_t c = row_count(r);
            if (c < best) {
              best = c;
              pivot_row = r;
            }
          }
        if (best == SIZE_MAX) continue;
        const std::int64_t pv = col[j].at(pivot_row);
        const auto pcol = col[j];
        for (const auto k : row_cols[pivot_row]) {
          if (k == j || !col_alive[k]) continue;
          auto it = col[k].find(pivot_row);
          if (it == col[k].end()) continue;
          const std::int64_t q = checked_mul(it->second, pv);  // pv = +-1 so a_k / pv = a_k * pv
          for (const auto& [r, v] : pcol) {
            auto& dst = col[k][r];
            dst = checked_msub(dst, q, v);
            if (dst == 0) col[k].erase(r);
            else if (r != pivot_row) row_cols[r].push_back(k);
          }
        }
        col_alive[j] = 0;
        row_alive[pivot_row] = 0;
        col[j].clear();
        ++out.rank;
        progress = true;
      }
      for (auto& rc : row_cols) {
        std::sort(rc.begin(), rc.end());
        rc.erase(std::unique(rc.begin(), rc.end()), rc.end());
      }
    }
  } catch (const Overflow&) {
    overflow = true;
  }
  if (overflow) {
    // Start over densely with arbitrary precision.
    std::vector<std::vector<BigInt>> big(m.rows, std::vector<BigInt>(m.cols, 0));
    for (std::size_t j = 0; j < m.cols; ++j)
      for (std::uint64_t e = m.start[j]; e < m.start[j + 1]; ++e) big[m.row[e]][j] += m.value[e];
    const auto d = smith_dense<BigInt>(std::move(big));
    out.rank = d.size();
    out.invariant_factors.clear();
    for (const auto& v : d)
      if (v > 1) out.invariant_factors.push_back(v);
    out.arbitrary_precision = true;
    return out;
  }
  std::vector<std::uint32_t> rows_left, cols_left;
  for (std::uint32_t r = 0; r < m.rows; ++r)
    if (row_alive[r]) rows_left.push_back(r);
  for (std::uint32_t j = 0; j < m.cols; ++j)
    if (col_alive[j] && !col[j].empty()) cols_left.push_back(j);
  if (cols_left.empty()) return out;
  std::vector<std::uint32_t> row_pos(m.rows, 0);
  for (std::size_t i = 0; i < rows_left.size(); ++i) row_pos[rows_left[i]] = static_cast<std::uint32_t>(i);
  std::vector<std::vector<std::int64_t>> dense(rows_left.size(), std::vector<std::int64_t>(cols_left.size(), 0));
  for (std::size_t c = 0; c < cols_left.size(); ++c)
    for (const auto& [r, v] : col[cols_left[c]]) dense[row_pos[r]][c] = v;
  bool big = false;
  const auto d = smith_diagonal(dense, &big);
  out.arbitrary_precision = big;
  out.rank += d.size();
  for (const auto& v : d)
    if (v > 1) out.invariant_factors.push_back(v);
  return out;
}

bool ChainComplexRep::boundary_squared_zero() const {
  for (int k = 2; k <= top(); ++k) {
    const auto& hi = boundary[k];
    const auto& lo = boundary[k - 1];
    std::map<std::uint32_t, std::int64_t> acc;
    for (std::size_t j = 0; j < hi.cols; ++j) {
      acc.clear();
      for (std::uint64_t e = hi.start[j]; e < hi.start[j + 1]; ++e) {
        const std::uint32_t f = hi.row[e];
        for (std::uint64_t g = lo.start[f]; g < lo.start[f + 1]; ++g)
          acc[lo.row[g]] += static_cast<std::int64_t>(hi.value[e]) * lo.value[g];
      }
      for (const auto& [r, v] : acc)
        if (v != 0) return false;
    }
  }
  return true;
}

ChainComplexRep ChainComplexRep::of(const NerveComplex& k) {
  ChainComplexRep c;
  const int top = k.dimension();
  c.cells.resize(static_cast<std::size_t>(std::max(top, 0)) + 1);
  c.boundary.resize(c.cells.size());
  for (int d = 0; d <= top; ++d) c.cells[d] = k.count(d);
  c.boundary[0].cols = c.cells[0];
  c.boundary[0].start.assign(c.cells[0] + 1, 0);
  std::vector<std::uint32_t> face;
  for (int d = 1; d <= top; ++d) {
    auto& b = c.boundary[d];
    b.rows = c.cells[d - 1];
    b.cols = c.cells[d];
    b.start.reserve(b.cols + 1);
    b.row.reserve(b.cols * static_cast<std::size_t>(d + 1));
    b.value.reserve(b.cols * static_cast<std::size_t>(d + 1));
    for (std::size_t i = 0; i < b.cols; ++i) {
      const auto s = k.simplex(d, i);
      for (int drop = 0; drop <= d; ++drop) {
        face.clear();
        for (int v = 0; v <= d; ++v)
          if (v != drop) face.push_back(s[v]);
        const std::int64_t f = k.find(face);
        if (f < 0) throw DomainError("ChainComplexRep: complex is not closed under faces");
        b.row.push_back(static_cast<std::uint32_t>(f));
        b.value.push_back(drop % 2 ? -1 : 1);
      }
      b.start.push_back(b.row.size());
    }
  }
  return c;
}

EulerCharacteristic euler_characteristic(const NerveComplex& k) {
  EulerCharacteristic e;
  for (int d = 0; d <= k.dimension(); ++d) e.value += (d % 2 ? -1 : 1) * static_cast<std::int64_t>(k.count(d));
  e.reliable = !k.cap_reached;
  return e;
}

namespace {

/// Reduction phase: removes coreduction pairs (a cell with one remaining face)
/// and reduction pairs (a cell with one remaining coface) with unit incidence.
/// The restricted boundary of the survivors has the same homology.
class Reducer {
 public:
  explicit Reducer(const ChainComplexRep& c) : c_(c) {
    const int top = c.top();
    alive_.resize(top + 1);
    faces_left_.resize(top + 1);
    cofaces_left_.resize(top + 1);
    co_start_.resize(top + 1);
    co_.resize(top + 1);
    for (int k = 0; k <= top; ++k) {
      alive_[k].assign(c.cells[k], 1);
      faces_left_[k].assign(c.cells[k], 0);
      cofaces_left_[k].assign(c.cells[k], 0);
    }
    for (int k = 1; k <= top; ++k) {
      const auto& b = c.boundary[k];
      for (std::size_t j = 0; j < b.cols; ++j) {
        faces_left_[k][j] = static_cast<std::uint32_t>(b.start[j + 1] - b.start[j]);
        for (std::uint64_t e = b.start[j]; e < b.start[j + 1]; ++e) ++cofaces_left_[k - 1][b.row[e]];
      }
      // Coface lists of the (k-1)-cells.
      auto& st = co_start_[k - 1];
      st.assign(c.cells[k - 1] + 1, 0);
      for (std::size_t r = 0; r < c.cells[k - 1]; ++r) st[r + 1] = st[r] + cofaces_left_[k - 1][r];
      auto& co = co_[k - 1];
      co.resize(st.back());
      std::vector<std::uint64_t> fill(st.begin(), st.end() - 1);
      for (std::size_t j = 0; j < b.cols; ++j)
        for (std::uint64_t e = b.start[j]; e < b.start[j + 1]; ++e) co[fill[b.row[e]]++] = static_cast<std::uint32_t>(j);
    }
    co_start_[top].assign(c.cells[top] + 1, 0);
  }

  void remove_vertex(std::uint32_t v) {
    remove(0, v);
    drain();
  }

  void run() {
    for (int k = 0; k <= c_.top(); ++k)
      for (std::uint32_t i = 0; i < c_.cells[k]; ++i) push(k, i);
    drain();
  }

  ChainComplexRep survivors(std::vector<std::size_t>& counts) const {
    ChainComplexRep r;
    const int top = c_.top();
    r.cells.assign(top + 1, 0);
    r.boundary.resize(top + 1);
    std::vector<std::vector<std::uint32_t>> pos(top + 1);
    for (int k = 0; k <= top; ++k) {
      pos[k].assign(c_.cells[k], 0);
      for (std::uint32_t i = 0; i < c_.cells[k]; ++i)
        if (alive_[k][i]) pos[k][i] = static_cast<std::uint32_t>(r.cells[k]++);
    }
    r.boundary[0].cols = r.cells[0];
    r.boundary[0].start.assign(r.cells[0] + 1, 0);
    for (int k = 1; k <= top; ++k) {
      const auto& b = c_.boundary[k];
      auto& o = r.boundary[k];
      o.rows = r.cells[k - 1];
      o.cols = r.cells[k];
      for (std::uint32_t j = 0; j < b.cols; ++j) {
        if (!alive_[k][j]) continue;
        for (std::uint64_t e = b.start[j]; e < b.start[j + 1]; ++e)
          if (alive_[k - 1][b.row[e]]) {
            o.row.push_back(pos[k - 1][b.row[e]]);
            o.value.push_back(b.value[e]);
          }
        o.start.push_back(o.row.size());
      }
    }
    counts = r.cells;
    return r;
  }

 private:
  void push(int k, std::uint32_t i) {
    if (alive_[k][i] && (faces_left_[k][i] == 1 || cofaces_left_[k][i] == 1)) queue_.emplace_back(k, i);
  }

  void remove(int k, std::uint32_t i) {
    alive_[k][i] = 0;
    if (k >= 1) {
      const auto& b = c_.boundary[k];
      for (std::uint64_t e = b.start[i]; e < b.start[i + 1]; ++e) {
        const std::uint32_t f = b.row[e];
        if (!alive_[k - 1][f]) continue;
        --cofaces_left_[k - 1][f];
        push(k - 1, f);
      }
    }
    if (k < c_.top()) {
      const auto& st = co_start_[k];
      for (std::uint64_t e = st[i]; e < st[i + 1]; ++e) {
        const std::uint32_t g = co_[k][e];
        if (!alive_[k + 1][g]) continue;
        --faces_left_[k + 1][g];
        push(k + 1, g);
      }
    }
  }

  std::int32_t incidence(int k, std::uint32_t cell, std::uint32_t face) const {
    const auto& b = c_.boundary[k];
    std::int32_t v = 0;
    for (std::uint64_t e = b.start[cell]; e < b.start[cell + 1]; ++e)
      if (b.row[e] == face) v += b.value[e];
    return v;
  }

  void drain() {
    while (!queue_.empty()) {
      const auto [k, i] = queue_.front();
      queue_.pop_front();
      if (!alive_[k][i]) continue;
      if (k >= 1 && faces_left_[k][i] == 1) {
        // Coreduction: i has a single remaining face.
        const auto& b = c_.boundary[k];
        std::uint32_t f = 0;
        for (std::uint64_t e = b.start[i]; e < b.start[i + 1]; ++e)
          if (alive_[k - 1][b.row[e]]) f = b.row[e];
        const std::int32_t v = incidence(k, i, f);
        if (v == 1 || v == -1) {
          remove(k, i);
          remove(k - 1, f);
          continue;
        }
      }
      if (k < c_.top() && cofaces_left_[k][i] == 1) {
        // Reduction: i is a free face of its single remaining coface.
        std::uint32_t g = 0;
        for (std::uint64_t e = co_start_[k][i]; e < co_start_[k][i + 1]; ++e)
          if (alive_[k + 1][co_[k][e]]) g = co_[k][e];
        const std::int32_t v = incidence(k + 1, g, i);
        if (v == 1 || v == -1) {
          remove(k + 1, g);
          remove(k, i);
        }
      }
    }
  }

  const ChainComplexRep& c_;
  std::vector<std::vector<char>> alive_;
  std::vector<std::vector<std::uint32_t>> faces_left_;
  std::vector<std::vector<std::uint32_t>> cofaces_left_;
  std::vector<std::vector<std::uint64_t>> co_start_;
  std::vector<std::vector<std::uint32_t>> co_;
  std::deque<std::pair<int, std::uint32_t>> queue_;
};

std::vector<std::uint32_t> component_representatives(const ChainComplexRep& c) {
  const std::size_t n = c.cells.empty() ? 0 : c.cells[0];
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto root = [&](std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  if (c.top() >= 1) {
    const auto& b = c.boundary[1];
    for (std::size_t j = 0; j < b.cols; ++j) {
      if (b.start[j + 1] - b.start[j] != 2) throw DomainError("homology_ranks: 1-cells must have two vertices");
      const auto a = root(b.row[b.start[j]]), d = root(b.row[b.start[j] + 1]);
      parent[std::max(a, d)] = std::min(a, d);
    }
  }
  std::vector<std::uint32_t> reps;
  for (std::uint32_t v = 0; v < n; ++v)
    if (root(v) == v) reps.push_back(v);
  return reps;
}

}  // namespace

HomologyResult homology_ranks(const ChainComplexRep& c, bool vertex_components) {
  HomologyResult out;
  const int top = c.top();
  if (top < 0) return out;
  Reducer reducer(c);
  std::size_t components = 0;
  if (vertex_components) {
    const auto reps = component_representatives(c);
    components = reps.size();
    for (const auto v : reps) reducer.remove_vertex(v);
  }
  reducer.run();
  const ChainComplexRep small = reducer.survivors(out.reduced_cells);
  // H_k = Z^(n_k - rank d_k - rank d_{k+1}) + torsion of d_{k+1}.
  std::vector<EliminationResult> e(top + 2);
  for (int k = 1; k <= top; ++k) e[k] = eliminate(small.boundary[k]);
  out.betti.assign(top + 1, 0);
  out.torsion.assign(top + 1, {});
  for (int k = 0; k <= top; ++k) {
    const auto n = static_cast<std::int64_t>(small.cells[k]);
    out.betti[k] = n - static_cast<std::int64_t>(e[k].rank) - static_cast<std::int64_t>(e[k + 1].rank);
    for (const auto& v : e[k + 1].invariant_factors) out.torsion[k].push_back(v.str());
    out.arbitrary_precision = out.arbitrary_precision || e[k].arbitrary_precision;
  }
  if (vertex_components) out.betti[0] += static_cast<std::int64_t>(components);
  return out;
}

HomologyResult homology_ranks(const NerveComplex& k) {
  return homology_ranks(ChainComplexRep::of(k), true);
}

}  // namespace thicknerve
