#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "wtl/errors.hpp"
#include "wtl/ktasep.hpp"
#include "wtl/parallel.hpp"
#include "wtl/sparse_matrix.hpp"

// Two-row diagrams recording one step sigma_S followed by one step sigma_T of the ring TASEP,
// their reductions, and the involution alpha that pairs (S, T) with (S', T') of swapped sizes.
//
// Column j (0-based) holds the bell between positions j-1 and j (cyclically), i.e. sigma_{j+1}.
// A colored site is black when its bell swapped the two letters and white when it rang on an
// already sorted pair. Bells are replayed in the same gap order as sigma_S itself.
namespace wtl::diagrams {

enum class Cell : std::uint8_t { Empty, Black, White };

struct Diagram {
  std::vector<Cell> top, bottom;

  int size() const { return static_cast<int>(top.size()); }
  friend bool operator==(const Diagram&, const Diagram&) = default;
  friend auto operator<=>(const Diagram&, const Diagram&) = default;
};

inline char cell_char(Cell c) { return c == Cell::Black ? 'B' : (c == Cell::White ? 'W' : '.'); }

inline Cell parse_cell(char ch) {
  switch (ch) {
    case 'B': return Cell::Black;
    case 'W': return Cell::White;
    case '.': return Cell::Empty;
    default: throw ParseError(std::string("diagram cells are B, W or '.', got '") + ch + "'");
  }
}

inline Diagram make_diagram(const std::string& top, const std::string& bottom) {
  if (top.size() != bottom.size()) throw ParseError("diagram rows differ in length");
  if (top.empty()) throw ParseError("empty diagram");
  Diagram d;
  for (char ch : top) d.top.push_back(parse_cell(ch));
  for (char ch : bottom) d.bottom.push_back(parse_cell(ch));
  return d;
}

// Two lines over {B, W, .}.
inline Diagram parse_diagram(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.size() != 2) throw ParseError("a diagram file has exactly two non-empty lines");
  return make_diagram(rows[0], rows[1]);
}

inline std::string row_string(const std::vector<Cell>& row) {
  std::string s;
  for (Cell c : row) s += cell_char(c);
  return s;
}

inline std::string format_diagram(const Diagram& d) { return row_string(d.top) + "\n" + row_string(d.bottom) + "\n"; }

// Diagram of the triple (u, S, T); letters of u must be distinct.
inline Diagram build_diagram(const ktasep::RingWord& u, ktasep::UpdateSet s, ktasep::UpdateSet t) {
  const int n = static_cast<int>(u.size());
  {
    auto sorted = u;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw DomainError("diagrams need distinct letters");
  }
  Diagram d{std::vector<Cell>(n, Cell::Empty), std::vector<Cell>(n, Cell::Empty)};
  auto run = [n](ktasep::RingWord w, ktasep::UpdateSet set, std::vector<Cell>& row) {
    if (set == 0) return w;
    for (int i : ktasep::update_order(n, set)) {
      const int cur = i - 1, prev = (i - 2 + n) % n;
      row[cur] = w[cur] < w[prev] ? Cell::Black : Cell::White;
      w = ktasep::ring_sigma(std::move(w), i);
    }
    return w;
  };
  const auto w = run(u, s, d.top);
  run(w, t, d.bottom);
  return d;
}

inline ktasep::UpdateSet colored_set(const std::vector<Cell>& row) {
  ktasep::UpdateSet s = 0;
  for (std::size_t j = 0; j < row.size(); ++j)
    if (row[j] != Cell::Empty) s |= 1u << j;
  return s;
}

// Particles are named by their starting column. p1 is the start, p2 the column after the top
// row, p3 after the bottom row. less holds the pairs (a, b) forced to satisfy u_a < u_b.
struct Replay {
  bool ok = true;
  std::string error;
  std::vector<int> p2, p3;
  std::vector<std::pair<int, int>> less;
};

namespace detail {

inline bool replay_row(const std::vector<Cell>& row, std::vector<int>& at, std::vector<std::pair<int, int>>& less) {
  const int m = static_cast<int>(row.size());
  int gap = -1;
  bool any = false;
  for (int j = 0; j < m; ++j) {
    if (row[j] == Cell::Empty && gap < 0) gap = j;
    if (row[j] != Cell::Empty) any = true;
  }
  if (!any) return true;
  if (gap < 0 || m < 2) return false;
  for (int step = 1; step <= m; ++step) {
    const int j = (gap + step) % m;
    if (row[j] == Cell::Empty) continue;
    const int prev = (j - 1 + m) % m;
    if (row[j] == Cell::Black) {
      less.emplace_back(at[j], at[prev]);
      std::swap(at[j], at[prev]);
    } else {
      less.emplace_back(at[prev], at[j]);
    }
  }
  return true;
}

}  // namespace detail

inline Replay replay(const Diagram& d) {
  const int m = d.size();
  Replay r;
  std::vector<int> at(m);
  for (int p = 0; p < m; ++p) at[p] = p;
  auto positions = [&] {
    std::vector<int> pos(m);
    for (int j = 0; j < m; ++j) pos[at[j]] = j;
    return pos;
  };
  if (!detail::replay_row(d.top, at, r.less)) {
    r.ok = false;
    r.error = "top row has no empty site";
    return r;
  }
  r.p2 = positions();
  if (!detail::replay_row(d.bottom, at, r.less)) {
    r.ok = false;
    r.error = "bottom row has no empty site";
    return r;
  }
  r.p3 = positions();
  return r;
}

// Transitive closure of the forced order; closure[a][b] means u_a < u_b for all u in C(D).
using Relation = std::vector<std::vector<bool>>;

inline Relation order_closure(const Diagram& d, const Replay& r) {
  const int m = d.size();
  Relation rel(m, std::vector<bool>(m, false));
  for (auto [a, b] : r.less) rel[a][b] = true;
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      if (rel[i][k])
        for (int j = 0; j < m; ++j)
          if (rel[k][j]) rel[i][j] = true;
  return rel;
}

inline Relation order_constraints(const Diagram& d) { return order_closure(d, replay(d)); }

// A diagram arises from some triple iff both rows replay and the forced order is acyclic.
inline bool is_valid(const Diagram& d) {
  const auto r = replay(d);
  if (!r.ok) return false;
  const auto rel = order_closure(d, r);
  for (int i = 0; i < d.size(); ++i)
    if (rel[i][i]) return false;
  return true;
}

// u in C(D): replaying D's sets on u reproduces D.
inline bool member_of_C(const Diagram& d, const ktasep::RingWord& u) {
  if (static_cast<int>(u.size()) != d.size()) return false;
  return build_diagram(u, colored_set(d.top), colored_set(d.bottom)) == d;
}

struct PassCounts {
  std::vector<int> black, white;  // per particle
  friend bool operator==(const PassCounts&, const PassCounts&) = default;
};

// A particle visits the top site at its start column and the bottom site at p2.
inline PassCounts pass_counts(const Diagram& d, const Replay& r) {
  const int m = d.size();
  PassCounts pc{std::vector<int>(m, 0), std::vector<int>(m, 0)};
  for (int p = 0; p < m; ++p) {
    for (Cell c : {d.top[p], d.bottom[r.p2[p]]}) {
      if (c == Cell::Black) ++pc.black[p];
      if (c == Cell::White) ++pc.white[p];
    }
  }
  return pc;
}

inline int colored(const std::vector<Cell>& row) {
  return static_cast<int>(std::count_if(row.begin(), row.end(), [](Cell c) { return c != Cell::Empty; }));
}

// Everything compatibility looks at, so populations can be grouped by key.
struct Signature {
  Relation closure;
  PassCounts counts;
  int top_colored = 0, bottom_colored = 0;
};

inline Signature signature(const Diagram& d) {
  const auto r = replay(d);
  if (!r.ok) throw DomainError("not a diagram: " + r.error);
  return {order_closure(d, r), pass_counts(d, r), colored(d.top), colored(d.bottom)};
}

inline bool compatible(const Signature& a, const Signature& b) {
  return a.closure == b.closure && a.top_colored == b.bottom_colored && a.bottom_colored == b.top_colored &&
         a.counts == b.counts;
}

inline bool compatible(const Diagram& a, const Diagram& b) {
  if (a.size() != b.size()) return false;
  return compatible(signature(a), signature(b));
}

// ---- reductions ----

enum class Kind { I, IIa, IIb, III };

inline std::string kind_name(Kind k) {
  switch (k) {
    case Kind::I: return "I";
    case Kind::IIa: return "IIa";
    case Kind::IIb: return "IIb";
    default: return "III";
  }
}

struct Column {
  Cell top, bottom;
};

inline Column column(const Diagram& d, int c) { return {d.top[c], d.bottom[c]}; }

// Pattern on columns (c, c+1) written [top; bottom]:
//   I   [A; B] [B; B']  where the first bottom and second top are black
//   IIa [B; W] [B; A]
//   IIb [A; B] [W; B]
//   III [A; W] [B; B']  where the second top is black
inline bool applicable(const Diagram& d, Kind k, int c) {
  const int m = d.size();
  if (m < 2 || c < 0 || c >= m) return false;
  const Column x = column(d, c), y = column(d, (c + 1) % m);
  switch (k) {
    case Kind::I: return x.bottom == Cell::Black && y.top == Cell::Black;
    case Kind::IIa: return x.top == Cell::Black && x.bottom == Cell::White && y.top == Cell::Black;
    case Kind::IIb: return x.bottom == Cell::Black && y.top == Cell::White && y.bottom == Cell::Black;
    case Kind::III: return x.bottom == Cell::White && y.top == Cell::Black;
  }
  return false;
}

inline Column merged_column(Kind k, const Column& x, const Column& y) {
  switch (k) {
    case Kind::I:
    case Kind::III: return {x.top, y.bottom};
    case Kind::IIa: return {Cell::Black, y.bottom};
    default: return {x.top, Cell::Black};
  }
}

// Replaces columns c, c+1 by one column. For c = m-1 (the pair wraps) the merged column goes
// last and old column 0 disappears.
inline Diagram reduce(const Diagram& d, Kind k, int c) {
  if (!applicable(d, k, c)) throw DomainError(kind_name(k) + " pattern absent at column " + std::to_string(c));
  const int m = d.size();
  const Column mc = merged_column(k, column(d, c), column(d, (c + 1) % m));
  Diagram out;
  auto push = [&](const Column& col) {
    out.top.push_back(col.top);
    out.bottom.push_back(col.bottom);
  };
  if (c < m - 1) {
    for (int j = 0; j < m; ++j) {
      if (j == c) push(mc);
      else if (j != c + 1) push(column(d, j));
    }
  } else {
    for (int j = 1; j < m - 1; ++j) push(column(d, j));
    push(mc);
  }
  return out;
}

// Inverse of reduce(., k, c) on a diagram of the original length m = r.size() + 1.
inline Diagram inverse_reduce(const Diagram& r, Kind k, int c) {
  const int m = r.size() + 1;
  if (c < 0 || c >= m || m < 2) throw DomainError("inverse reduction column out of range");
  const int at = c < m - 1 ? c : m - 2;
  const Column mc = column(r, at);
  Column x{}, y{};
  switch (k) {
    case Kind::I:
      x = {mc.top, Cell::Black};
      y = {Cell::Black, mc.bottom};
      break;
    case Kind::IIa:
      if (mc.top != Cell::Black) throw DomainError("IIa expansion needs a black top site");
      x = {Cell::Black, Cell::White};
      y = {Cell::Black, mc.bottom};
      break;
    case Kind::IIb:
      if (mc.bottom != Cell::Black) throw DomainError("IIb expansion needs a black bottom site");
      x = {mc.top, Cell::Black};
      y = {Cell::White, Cell::Black};
      break;
    case Kind::III:
      x = {mc.top, Cell::White};
      y = {Cell::Black, mc.bottom};
      break;
  }
  Diagram out;
  auto push = [&](const Column& col) {
    out.top.push_back(col.top);
    out.bottom.push_back(col.bottom);
  };
  if (c < m - 1) {
    for (int j = 0; j < r.size(); ++j) {
      if (j == at) {
        push(x);
        push(y);
      } else {
        push(column(r, j));
      }
    }
  } else {
    push(y);
    for (int j = 0; j < m - 2; ++j) push(column(r, j));
    push(x);
  }
  return out;
}

struct ReductionStep {
  Kind kind;
  int column;
};

// Leftmost applicable step of the lowest available level (I, then II, then III).
inline std::optional<ReductionStep> next_reduction(const Diagram& d) {
  const int m = d.size();
  if (m < 2) return std::nullopt;
  for (int c = 0; c < m; ++c)
    if (applicable(d, Kind::I, c)) return ReductionStep{Kind::I, c};
  for (int c = 0; c < m; ++c) {
    if (applicable(d, Kind::IIa, c)) return ReductionStep{Kind::IIa, c};
    if (applicable(d, Kind::IIb, c)) return ReductionStep{Kind::IIb, c};
  }
  for (int c = 0; c < m; ++c)
    if (applicable(d, Kind::III, c)) return ReductionStep{Kind::III, c};
  return std::nullopt;
}

struct Reduced {
  Diagram core;
  std::vector<ReductionStep> steps;
};

inline Reduced reduce_fully(Diagram d) {
  Reduced out;
  while (auto step = next_reduction(d)) {
    d = reduce(d, step->kind, step->column);
    out.steps.push_back(*step);
  }
  out.core = std::move(d);
  return out;
}

// ---- labels and alpha ----

// 'T' two white sites, 'U' one colored site above, 'L' one colored site below, '-' none.
inline std::string label_word(const Diagram& d, std::string* error = nullptr) {
  const auto r = replay(d);
  if (!r.ok) throw DomainError("not a diagram: " + r.error);
  std::string labels;
  for (int p = 0; p < d.size(); ++p) {
    const Cell up = d.top[p], down = d.bottom[r.p2[p]];
    if (up != Cell::Empty && down != Cell::Empty) {
      if (up != Cell::White || down != Cell::White) {
        if (error) *error = "particle " + std::to_string(p) + " passes a black site and another colored site";
        labels += '?';
      } else {
        labels += 'T';
      }
    } else if (up != Cell::Empty) {
      labels += 'U';
    } else if (down != Cell::Empty) {
      labels += 'L';
    } else {
      labels += '-';
    }
  }
  return labels;
}

// Delimiters are T letters, unlabeled particles, and both letters of every cyclic LU
// occurrence. Each maximal run strictly between delimiters reads U^r L^s and becomes U^s L^r.
// A word without delimiters is all U or all L and is mirrored as a whole.
inline std::string rewrite_labels(const std::string& w) {
  const int m = static_cast<int>(w.size());
  std::vector<bool> delim(m, false);
  for (int i = 0; i < m; ++i) {
    if (w[i] == 'T' || w[i] == '-' || w[i] == '?') delim[i] = true;
    if (m > 1 && w[i] == 'L' && w[(i + 1) % m] == 'U') delim[i] = delim[(i + 1) % m] = true;
  }
  std::string out = w;
  const int first = static_cast<int>(std::find(delim.begin(), delim.end(), true) - delim.begin());
  if (first == m) {
    for (auto& ch : out) ch = ch == 'U' ? 'L' : 'U';
    return out;
  }
  std::vector<int> seg;
  auto flush = [&] {
    int r = 0;
    for (int idx : seg) r += w[idx] == 'U';
    const int s = static_cast<int>(seg.size()) - r;
    for (std::size_t k = 0; k < seg.size(); ++k) out[seg[k]] = static_cast<int>(k) < s ? 'U' : 'L';
    seg.clear();
  };
  for (int step = 1; step <= m; ++step) {
    const int i = (first + step) % m;
    if (delim[i])
      flush();
    else
      seg.push_back(i);
  }
  return out;
}

struct AlphaResult {
  bool ok = true;
  std::string error;
  Diagram image;
  Reduced reduced;
  Diagram core_image;
  std::string labels_before, labels_after;
};

namespace detail {

// Rebuilds a core from per-particle labels and colors: U and T particles color the top at their
// start column, L and T particles color the bottom at their new p2. Empty when the top row
// cannot be replayed.
inline std::optional<Diagram> rebuild(const std::string& labels, const std::vector<Cell>& color) {
  const int m = static_cast<int>(labels.size());
  Diagram out{std::vector<Cell>(m, Cell::Empty), std::vector<Cell>(m, Cell::Empty)};
  for (int p = 0; p < m; ++p)
    if (labels[p] == 'U' || labels[p] == 'T') out.top[p] = color[p];
  std::vector<int> at(m);
  for (int p = 0; p < m; ++p) at[p] = p;
  std::vector<std::pair<int, int>> ignored;
  if (!replay_row(out.top, at, ignored)) return std::nullopt;
  for (int j = 0; j < m; ++j) {
    const int p = at[j];
    if (labels[p] == 'L' || labels[p] == 'T') out.bottom[j] = color[p];
  }
  return out;
}

// The color each particle keeps through relabeling (white for T and unlabeled particles).
inline std::vector<Cell> particle_colors(const Diagram& d, const std::string& labels) {
  const auto r = replay(d);
  std::vector<Cell> color(d.size(), Cell::White);
  for (int p = 0; p < d.size(); ++p) {
    if (labels[p] == 'U') color[p] = d.top[p];
    if (labels[p] == 'L') color[p] = d.bottom[r.p2[p]];
  }
  return color;
}

inline bool is_core(const Diagram& d) { return is_valid(d) && !next_reduction(d); }

// The block rewrite applied literally; empty if the result is not a diagram.
inline std::optional<Diagram> rule_image(const Diagram& d) {
  const std::string before = label_word(d);
  return rebuild(rewrite_labels(before), particle_colors(d, before));
}

// D is settled by the block rule when its image is a compatible core that the rule sends back.
inline bool rule_pairs(const Diagram& d) {
  const auto e = rule_image(d);
  if (!e || !is_core(*e) || !compatible(d, *e)) return false;
  const auto back = rule_image(*e);
  return back && *back == d;
}

inline int colored_count(const std::vector<Cell>& row) {
  return static_cast<int>(std::count_if(row.begin(), row.end(), [](Cell c) { return c != Cell::Empty; }));
}

constexpr int kMaxRelabelBits = 20;

// Cores the block rule does not settle are paired inside their relabeling class (same colors,
// T and unlabeled particles fixed, any U/L choice) by a deterministic maximum matching, so every
// member of the class computes the same pairing. Cores with equal top and bottom counts that
// stay unmatched are fixed points.
inline Diagram fallback_partner(const Diagram& d) {
  const std::string labels = label_word(d);
  const auto color = particle_colors(d, labels);
  std::vector<int> free;
  for (int p = 0; p < d.size(); ++p)
    if (labels[p] == 'U' || labels[p] == 'L') free.push_back(p);
  if (static_cast<int>(free.size()) > kMaxRelabelBits) throw SizeError("too many U/L particles for the relabeling search");
  std::vector<Diagram> cls;
  for (unsigned mask = 0; mask < (1u << free.size()); ++mask) {
    std::string w = labels;
    for (std::size_t k = 0; k < free.size(); ++k) w[free[k]] = (mask >> k) & 1u ? 'L' : 'U';
    const auto e = rebuild(w, color);
    if (!e || !is_core(*e) || label_word(*e) != w || rule_pairs(*e)) continue;
    cls.push_back(*e);
  }
  std::sort(cls.begin(), cls.end());
  const auto self = std::find(cls.begin(), cls.end(), d);
  if (self == cls.end()) throw InvariantViolation("core is missing from its own relabeling class");
  // left side: more colored sites on top; right side: more below
  std::vector<int> left, right;
  for (int i = 0; i < static_cast<int>(cls.size()); ++i) {
    const int a = colored_count(cls[i].top), b = colored_count(cls[i].bottom);
    if (a > b) left.push_back(i);
    else if (a < b) right.push_back(i);
  }
  std::vector<int> match(cls.size(), -1);
  std::function<bool(int, std::vector<bool>&)> augment = [&](int l, std::vector<bool>& seen) {
    for (int r : right) {
      if (seen[r] || !compatible(cls[l], cls[r])) continue;
      seen[r] = true;
      if (match[r] < 0 || augment(match[r], seen)) {
        match[r] = l;
        match[l] = r;
        return true;
      }
    }
    return false;
  };
  for (int l : left) {
    std::vector<bool> seen(cls.size(), false);
    augment(l, seen);
  }
  const int i = static_cast<int>(self - cls.begin());
  if (match[i] >= 0) return cls[match[i]];
  if (colored_count(d.top) == colored_count(d.bottom)) return d;
  throw InvariantViolation("no compatible partner for core\n" + format_diagram(d));
}

}  // namespace detail

// alpha on a III-reduced diagram: rewrite the label blocks and rebuild, keeping each particle's
// color. By default the rewrite is used only where it gives a compatible pair; other cores are
// matched inside their relabeling class (detail::fallback_partner). With literal = true the
// block rewrite is applied as stated, which is not always compatible.
inline Diagram alpha_core(const Diagram& d, std::string* labels_before = nullptr, std::string* labels_after = nullptr,
                          bool literal = false) {
  std::string err;
  const std::string before = label_word(d, &err);
  if (!err.empty()) throw InvariantViolation("diagram is not III-reduced in the expected way: " + err);
  Diagram out;
  if (literal) {
    const auto e = detail::rule_image(d);
    if (!e) throw InvariantViolation("block rewrite does not rebuild to a diagram");
    out = *e;
  } else {
    out = detail::rule_pairs(d) ? *detail::rule_image(d) : detail::fallback_partner(d);
  }
  if (labels_before) *labels_before = before;
  if (labels_after) *labels_after = label_word(out);
  return out;
}

// True when the default alpha_core uses the block rewrite on this core.
inline bool settled_by_block_rule(const Diagram& core) { return detail::rule_pairs(core); }

// alpha: reduce, act on the core, expand again. II steps expand by whichever site of the
// merged column is black, since alpha may move that site between rows.
inline AlphaResult involution_alpha(const Diagram& d, bool literal = false) {
  AlphaResult res;
  try {
    if (!is_valid(d)) throw DomainError("input is not a diagram");
    res.reduced = reduce_fully(d);
    res.core_image = alpha_core(res.reduced.core, &res.labels_before, &res.labels_after, literal);
    if (!is_valid(res.core_image)) throw InvariantViolation("rebuilt core is not a diagram");
    Diagram cur = res.core_image;
    for (auto it = res.reduced.steps.rbegin(); it != res.reduced.steps.rend(); ++it) {
      Kind k = it->kind;
      if (k == Kind::IIa || k == Kind::IIb) {
        const int m = cur.size() + 1;
        const Column mc = column(cur, it->column < m - 1 ? it->column : m - 2);
        if (mc.top == Cell::Black && mc.bottom != Cell::Black) k = Kind::IIa;
        else if (mc.bottom == Cell::Black && mc.top != Cell::Black) k = Kind::IIb;
        else throw InvariantViolation("II expansion is ambiguous at column " + std::to_string(it->column));
      }
      cur = inverse_reduce(cur, k, it->column);
    }
    res.image = std::move(cur);
    if (!is_valid(res.image)) throw InvariantViolation("alpha image is not a diagram");
  } catch (const Error& e) {
    res.ok = false;
    res.error = std::string(e.what()) + "\n" + format_diagram(d);
  }
  return res;
}

// Every diagram from distinct-letter triples of length n with 0 < |S|, |T| < n, together with
// one triple producing it.
struct Triple {
  ktasep::RingWord u;
  ktasep::UpdateSet s, t;
};

inline std::map<Diagram, Triple> diagram_population(int n) {
  if (n < 2 || n > 6) throw SizeError("diagram population supported for 2 <= n <= 6");
  ktasep::RingWord letters;
  for (int k = 1; k <= n; ++k) letters.push_back(k);
  std::map<Diagram, Triple> out;
  const ktasep::UpdateSet full = (1u << n) - 1;
  for (const auto& u : ktasep::arrangements(letters))
    for (ktasep::UpdateSet s = 1; s < full; ++s)
      for (ktasep::UpdateSet t = 1; t < full; ++t) out.emplace(build_diagram(u, s, t), Triple{u, s, t});
  return out;
}

// ---- exhaustive checks ----

struct SweepReport {
  int n = 0;
  bool literal = false;
  std::size_t diagrams = 0;
  std::size_t reductions = 0, reduction_failures = 0;
  std::size_t lemma_pairs = 0, lemma_failures = 0;
  std::size_t alpha_errors = 0, non_involutions = 0, incompatible = 0, outside_population = 0;
  std::size_t fallback_cores = 0;
  std::vector<std::string> witnesses;  // first few offending diagrams

  bool reductions_ok() const { return reduction_failures == 0; }
  bool lemma_ok() const { return lemma_failures == 0; }
  bool alpha_ok() const { return alpha_errors == 0 && non_involutions == 0 && incompatible == 0 && outside_population == 0; }
  bool pass() const { return reductions_ok() && lemma_ok() && alpha_ok(); }
};

namespace detail {

inline bool is_I_reduced(const Diagram& d) {
  for (int c = 0; c < d.size(); ++c)
    if (applicable(d, Kind::I, c)) return false;
  return true;
}

inline bool is_II_reduced(const Diagram& d) {
  if (!is_I_reduced(d)) return false;
  for (int c = 0; c < d.size(); ++c)
    if (applicable(d, Kind::IIa, c) || applicable(d, Kind::IIb, c)) return false;
  return true;
}

// Compatibility lemmas: whenever the same reduction (IIa and IIb count as one family) at the
// same column applies to D and D' and the reduced diagrams are compatible, D and D' are.
inline void check_lemmas(const std::vector<Diagram>& pop, SweepReport& rep) {
  using Key = std::tuple<Relation, std::vector<int>, std::vector<int>, int, int>;
  auto key_of = [](const Signature& s, bool swapped) {
    return swapped ? Key{s.closure, s.counts.black, s.counts.white, s.bottom_colored, s.top_colored}
                   : Key{s.closure, s.counts.black, s.counts.white, s.top_colored, s.bottom_colored};
  };
  const int n = pop.empty() ? 0 : pop.front().size();
  for (int family = 0; family < 3; ++family) {
    for (int c = 0; c < n; ++c) {
      std::map<Key, std::vector<std::size_t>> by_key;
      std::vector<std::pair<std::size_t, Key>> members;
      for (std::size_t i = 0; i < pop.size(); ++i) {
        const Diagram& d = pop[i];
        std::optional<Diagram> r;
        if (family == 0 && applicable(d, Kind::I, c)) r = reduce(d, Kind::I, c);
        if (family == 1 && is_I_reduced(d)) {
          if (applicable(d, Kind::IIa, c)) r = reduce(d, Kind::IIa, c);
          else if (applicable(d, Kind::IIb, c)) r = reduce(d, Kind::IIb, c);
        }
        if (family == 2 && is_II_reduced(d) && applicable(d, Kind::III, c)) r = reduce(d, Kind::III, c);
        if (!r) continue;
        const auto sig = signature(*r);
        by_key[key_of(sig, false)].push_back(i);
        members.emplace_back(i, key_of(sig, true));
      }
      for (const auto& [i, partner_key] : members) {
        auto it = by_key.find(partner_key);
        if (it == by_key.end()) continue;
        for (std::size_t j : it->second) {
          ++rep.lemma_pairs;
          if (!compatible(pop[i], pop[j])) {
            ++rep.lemma_failures;
            if (rep.witnesses.size() < 5) rep.witnesses.push_back("lemma\n" + format_diagram(pop[i]) + format_diagram(pop[j]));
          }
        }
      }
    }
  }
}

}  // namespace detail

// Everything the diagram calculus promises, over the full population of length n.
inline SweepReport sweep_population(int n, bool literal = false) {
  const auto population = diagram_population(n);
  std::vector<Diagram> pop;
  for (const auto& [d, t] : population) pop.push_back(d);
  SweepReport rep;
  rep.n = n;
  rep.literal = literal;
  rep.diagrams = pop.size();
  std::vector<SweepReport> parts(pop.size());
  parallel_for(pop.size(), [&](std::size_t i) {
    auto& r = parts[i];
    const Diagram& d = pop[i];
    for (Kind k : {Kind::I, Kind::IIa, Kind::IIb, Kind::III})
      for (int c = 0; c < d.size(); ++c)
        if (applicable(d, k, c)) {
          ++r.reductions;
          if (inverse_reduce(reduce(d, k, c), k, c) != d) {
            ++r.reduction_failures;
            r.witnesses.push_back("reduction " + kind_name(k) + " at " + std::to_string(c) + "\n" + format_diagram(d));
          }
        }
    const auto a = involution_alpha(d, literal);
    if (!a.ok) {
      ++r.alpha_errors;
      r.witnesses.push_back("alpha error: " + a.error);
      return;
    }
    if (!literal && !settled_by_block_rule(a.reduced.core)) ++r.fallback_cores;
    const auto b = involution_alpha(a.image, literal);
    if (!b.ok || b.image != d) {
      ++r.non_involutions;
      r.witnesses.push_back("not an involution\n" + format_diagram(d) + "->\n" + format_diagram(a.image));
    }
    if (!compatible(d, a.image)) {
      ++r.incompatible;
      r.witnesses.push_back("incompatible pair " + a.labels_before + " -> " + a.labels_after + "\n" +
                            format_diagram(d) + "->\n" + format_diagram(a.image));
    }
    if (!population.contains(a.image)) ++r.outside_population;
  });
  for (auto& r : parts) {
    rep.reductions += r.reductions;
    rep.reduction_failures += r.reduction_failures;
    rep.alpha_errors += r.alpha_errors;
    rep.non_involutions += r.non_involutions;
    rep.incompatible += r.incompatible;
    rep.outside_population += r.outside_population;
    rep.fallback_cores += r.fallback_cores;
    for (auto& w : r.witnesses)
      if (rep.witnesses.size() < 5) rep.witnesses.push_back(std::move(w));
  }
  detail::check_lemmas(pop, rep);
  return rep;
}

struct PairingReport {
  bool pass = true;
  std::size_t triples = 0;
  std::optional<std::string> witness;
};

// The involution on triples: (u, S, T) goes to (u, top of alpha(D), bottom of alpha(D)). For
// every 0 < k, l < n the paired triples must land on the same word with the same weight and
// swapped set sizes, and the summed weights must rebuild A_k A_l entry by entry.
inline PairingReport verify_pairing(int n, const ktasep::LetterRates& x) {
  ktasep::RingWord letters;
  for (int i = 1; i <= n; ++i) letters.push_back(i);
  const ktasep::RingStates st(letters);
  const ktasep::UpdateSet full = (1u << n) - 1;
  PairingReport rep;
  std::map<Diagram, Diagram> alpha_cache;
  std::vector<SparseRationalMatrix> a(n);
  for (int k = 1; k < n; ++k) a[k] = ktasep::build_Ak(st, k, x);
  for (int k = 1; k < n && rep.pass; ++k)
    for (int l = 1; l < n && rep.pass; ++l) {
      // (A_k A_l)(v, u): first sigma_S with |S| = l, then sigma_T with |T| = k
      SparseRationalMatrix sum(st.size(), st.size());
      for (std::size_t ui = 0; ui < st.size() && rep.pass; ++ui) {
        const auto& u = st[ui];
        for (ktasep::UpdateSet s = 1; s < full && rep.pass; ++s) {
          if (std::popcount(s) != l) continue;
          const auto w = ktasep::ring_sigma_set(u, s);
          const Rational ws = ktasep::rate_of_update(u, s, x);
          for (ktasep::UpdateSet t = 1; t < full; ++t) {
            if (std::popcount(t) != k) continue;
            ++rep.triples;
            const auto v = ktasep::ring_sigma_set(w, t);
            const Rational weight = ws * ktasep::rate_of_update(w, t, x);
            const Diagram d = build_diagram(u, s, t);
            auto it = alpha_cache.find(d);
            if (it == alpha_cache.end()) {
              const auto res = involution_alpha(d);
              if (!res.ok) {
                rep.pass = false;
                rep.witness = res.error;
                break;
              }
              it = alpha_cache.emplace(d, res.image).first;
            }
            const auto s2 = colored_set(it->second.top), t2 = colored_set(it->second.bottom);
            std::string why;
            if (std::popcount(s2) != k || std::popcount(t2) != l) why = "set sizes not swapped";
            else if (build_diagram(u, s2, t2) != it->second) why = "u does not realize the image diagram";
            else {
              const auto w2 = ktasep::ring_sigma_set(u, s2);
              if (ktasep::ring_sigma_set(w2, t2) != v) why = "paired triple ends elsewhere";
              else if (ktasep::rate_of_update(u, s2, x) * ktasep::rate_of_update(w2, t2, x) != weight) why = "weights differ";
            }
            if (!why.empty()) {
              rep.pass = false;
              rep.witness = why + " for u=" + ktasep::format_ring_word(u) + "\n" + format_diagram(d);
              break;
            }
            sum.add(st.index_of(v), ui, weight);
          }
        }
      }
      if (rep.pass && first_difference(sum, a[k] * a[l])) {
        rep.pass = false;
        rep.witness = "weighted triple count differs from A_k A_l for k=" + std::to_string(k) + " l=" + std::to_string(l);
      }
    }
  return rep;
}

}  // namespace wtl::diagrams
