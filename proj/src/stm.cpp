#include "porlab/stm.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

namespace porlab {

namespace {

bool valid_symbol(char c) { return std::isalnum((unsigned char)c) || c == kBlank; }

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("machine: " + msg); }

void check_line(int states, int tapes, int state, const std::string& reads,
                const std::string& writes, const std::string& moves, int next) {
  if (state < 0 || state >= states || next < 0 || next >= states) bad("state out of range");
  if (int(reads.size()) != tapes || int(writes.size()) != tapes) bad("symbol count != tapes");
  if (int(moves.size()) != tapes) bad("move count != tapes");
  for (char c : reads)
    if (!valid_symbol(c)) bad("bad symbol");
  for (char c : writes)
    if (!valid_symbol(c)) bad("bad symbol");
  for (char c : moves)
    if (c != 'L' && c != 'R' && c != 'S') bad("bad move");
}

void check_header(int states, int initial, int tapes) {
  if (states < 1) bad("no states");
  if (initial < 0 || initial >= states) bad("initial state out of range");
  if (tapes < 1) bad("no tapes");
}

}  // namespace

StmSpec stm_make(int states, int initial, int tapes, std::vector<StmTrans> table) {
  check_header(states, initial, tapes);
  for (const auto& t : table) {
    if (t.tag != OdTag::Bit0 && t.tag != OdTag::Bit1 && t.tag != OdTag::Skip) bad("bad tag");
    check_line(states, tapes, t.state, t.reads, t.writes, t.moves, t.next);
  }
  std::sort(table.begin(), table.end());
  for (size_t i = 1; i < table.size(); ++i)
    if (table[i].state == table[i - 1].state && table[i].reads == table[i - 1].reads) {
      if (table[i].tag == table[i - 1].tag) bad("duplicate transition key");
      if (table[i].tag == OdTag::Skip || table[i - 1].tag == OdTag::Skip)
        bad("a key cannot mix consuming and non-consuming transitions");
    }
  return StmSpec{states, initial, tapes, std::move(table)};
}

bool stm_standard(const StmSpec& m) {
  for (const auto& t : m.table)
    if (t.tag == OdTag::Skip) return false;
  return true;
}

namespace {

void tape_trim(Tape& t) {
  while (!t.right.empty() && t.right.back() == kBlank) t.right.pop_back();
  size_t lead = 0;
  while (lead < t.left.size() && t.left[lead] == kBlank) ++lead;
  if (lead) t.left.erase(0, lead);
}

std::vector<Tape> tapes_of(int count, const std::vector<BitString>& contents) {
  std::vector<Tape> out(static_cast<size_t>(count));
  for (size_t i = 0; i < contents.size() && i < out.size(); ++i) out[i].right = contents[i];
  for (auto& t : out) tape_trim(t);
  return out;
}

std::string heads(const std::vector<Tape>& tapes) {
  std::string out;
  for (const auto& t : tapes) out += t.right.empty() ? kBlank : t.right[0];
  return out;
}

template <typename Trans>
void apply_trans(int tapes, std::vector<Tape>& tp, const Trans& t, int& state) {
  for (int i = 0; i < tapes; ++i) {
    Tape& u = tp[size_t(i)];
    char head = u.right.empty() ? kBlank : u.right[0];
    if (head == t.writes[size_t(i)] && t.moves[size_t(i)] == 'S') continue;
    if (u.right.empty())
      u.right.push_back(t.writes[size_t(i)]);
    else
      u.right[0] = t.writes[size_t(i)];
    switch (t.moves[size_t(i)]) {
      case 'R':
        u.left.push_back(u.right[0]);
        u.right.erase(0, 1);
        break;
      case 'L':
        if (u.left.empty()) {
          u.right.insert(u.right.begin(), kBlank);
        } else {
          u.right.insert(u.right.begin(), u.left.back());
          u.left.pop_back();
        }
        break;
      default: break;
    }
    tape_trim(u);
  }
  state = t.next;
}

const StmTrans* stm_find(const StmSpec& m, int state, const std::string& reads, OdTag tag) {
  auto key = std::tie(state, reads, tag);
  auto it = std::lower_bound(
      m.table.begin(), m.table.end(), key,
      [](const StmTrans& t, const decltype(key)& k) { return std::tie(t.state, t.reads, t.tag) < k; });
  if (it != m.table.end() && it->state == state && it->reads == reads && it->tag == tag)
    return &*it;
  return nullptr;
}

int stream_peek(const BitStream& s) {
  if (s.cursor < s.prefix.size()) return s.prefix[s.cursor] - '0';
  if (s.symbolic) throw NeedStreamBit{};
  throw StreamUnderrun{};
}

}  // namespace

StmConfig stm_init(const StmSpec& m, const BitString& input, BitStream stream) {
  return StmConfig{m.initial, tapes_of(m.tapes, {input}), std::move(stream)};
}

StmConfig stm_init_tapes(const StmSpec& m, const std::vector<BitString>& contents,
                         BitStream stream) {
  if (int(contents.size()) > m.tapes) bad("more contents than tapes");
  return StmConfig{m.initial, tapes_of(m.tapes, contents), std::move(stream)};
}

BitString output_extract(const Tape& t) {
  size_t cut = t.left.find_last_of(kBlank);
  return cut == std::string::npos ? t.left : t.left.substr(cut + 1);
}

BitString output_extract(const StmConfig& c) { return output_extract(c.tapes.at(0)); }

StepKind stm_step(const StmSpec& m, StmConfig& c) {
  std::string rd = heads(c.tapes);
  if (const StmTrans* t = stm_find(m, c.state, rd, OdTag::Skip)) {
    apply_trans(m.tapes, c.tapes, *t, c.state);
    return StepKind::Moved;
  }
  const StmTrans* t0 = stm_find(m, c.state, rd, OdTag::Bit0);
  const StmTrans* t1 = stm_find(m, c.state, rd, OdTag::Bit1);
  if (!t0 && !t1) return StepKind::Final;
  const StmTrans* t = stream_peek(c.stream) ? t1 : t0;
  if (!t) return StepKind::Blocked;
  c.stream.take();
  apply_trans(m.tapes, c.tapes, *t, c.state);
  return StepKind::Moved;
}

BitString run(const StmSpec& m, StmConfig& c, long long fuel) {
  // fuel bounds completed moves; detecting a final or blocked stop is free
  for (;;) {
    if (stm_step(m, c) != StepKind::Moved) return output_extract(c);
    if (--fuel < 0) throw FuelExhausted();
  }
}

BitString run(const StmSpec& m, const BitString& input, BitStream stream, long long fuel) {
  StmConfig c = stm_init(m, input, std::move(stream));
  return run(m, c, fuel);
}

namespace {

// weighted configuration frontier, one entry per distinct machine state; the
// stream is integrated out since its bits are i.i.d. fair coins
template <typename Config>
void merge_frontier(std::vector<std::pair<Config, Dyadic>>& level, int cap) {
  if (level.size() > 1) {
    std::unordered_map<std::string, size_t> index;
    std::vector<std::pair<Config, Dyadic>> merged;
    merged.reserve(level.size());
    for (auto& [cfg, w] : level) {
      auto [it, fresh] = index.emplace(config_key(cfg), merged.size());
      if (fresh)
        merged.emplace_back(std::move(cfg), w);
      else
        merged[it->second].second = merged[it->second].second + w;
    }
    level = std::move(merged);
  }
  if (int(level.size()) > cap) throw std::runtime_error("run_dist frontier cap exceeded");
}

}  // namespace

Distribution run_dist(const StmSpec& m, const StmConfig& start, long long fuel, int cap) {
  Distribution out;
  std::vector<std::pair<StmConfig, Dyadic>> level;
  {
    StmConfig s0 = start;
    s0.stream = BitStream{};
    level.emplace_back(std::move(s0), Dyadic(1));
  }
  // fuel bounds completed moves per path, halting is free, matching run()
  for (long long moves = 0; !level.empty();) {
    std::vector<std::pair<StmConfig, Dyadic>> next;
    for (auto& [cfg, w] : level) {
      std::string rd = heads(cfg.tapes);
      if (const StmTrans* t = stm_find(m, cfg.state, rd, OdTag::Skip)) {
        apply_trans(m.tapes, cfg.tapes, *t, cfg.state);
        next.emplace_back(std::move(cfg), w);
        continue;
      }
      const StmTrans* t0 = stm_find(m, cfg.state, rd, OdTag::Bit0);
      const StmTrans* t1 = stm_find(m, cfg.state, rd, OdTag::Bit1);
      if (!t0 && !t1) {
        out.add(output_extract(cfg), w);
        continue;
      }
      if (t0 && t1) {
        StmConfig other = cfg;
        apply_trans(m.tapes, cfg.tapes, *t0, cfg.state);
        apply_trans(m.tapes, other.tapes, *t1, other.state);
        next.emplace_back(std::move(cfg), halve(w));
        next.emplace_back(std::move(other), halve(w));
        continue;
      }
      // one consuming transition: the other bit blocks the machine unmoved
      out.add(output_extract(cfg), halve(w));
      apply_trans(m.tapes, cfg.tapes, t0 ? *t0 : *t1, cfg.state);
      next.emplace_back(std::move(cfg), halve(w));
    }
    if (++moves > fuel) {
      for (const auto& [cfg, w] : next) out.add_diverge(w);
      return out;
    }
    merge_frontier(next, cap);
    level = std::move(next);
  }
  return out;
}

Distribution run_dist(const StmSpec& m, const BitString& input, long long fuel, int cap) {
  return run_dist(m, stm_init(m, input), fuel, cap);
}

StmSpec h_encode(const StmSpec& m) {
  std::vector<StmTrans> table;
  for (const auto& t : m.table) {
    if (t.tag != OdTag::Skip) {
      table.push_back(t);
      continue;
    }
    StmTrans a = t, b = t;
    a.tag = OdTag::Bit0;
    b.tag = OdTag::Bit1;
    table.push_back(a);
    table.push_back(b);
  }
  return stm_make(m.states, m.initial, m.tapes, std::move(table));
}

PtmSpec ptm_make(int states, int initial, int tapes, std::vector<PtmTrans> delta0,
                 std::vector<PtmTrans> delta1) {
  check_header(states, initial, tapes);
  for (auto* d : {&delta0, &delta1}) {
    for (const auto& t : *d) check_line(states, tapes, t.state, t.reads, t.writes, t.moves, t.next);
    std::sort(d->begin(), d->end());
    for (size_t i = 1; i < d->size(); ++i)
      if ((*d)[i].state == (*d)[i - 1].state && (*d)[i].reads == (*d)[i - 1].reads)
        bad("duplicate transition key");
  }
  return PtmSpec{states, initial, tapes, std::move(delta0), std::move(delta1)};
}

PtmSpec stm_to_ptm(const StmSpec& m) {
  if (!stm_standard(m)) bad("table has non-consuming transitions");
  std::vector<PtmTrans> d0, d1;
  for (const auto& t : m.table)
    (t.tag == OdTag::Bit0 ? d0 : d1).push_back(PtmTrans{t.state, t.reads, t.writes, t.moves, t.next});
  return ptm_make(m.states, m.initial, m.tapes, std::move(d0), std::move(d1));
}

StmSpec ptm_to_stm(const PtmSpec& p) {
  std::vector<StmTrans> table;
  for (const auto& t : p.delta0)
    table.push_back(StmTrans{t.state, t.reads, OdTag::Bit0, t.writes, t.moves, t.next});
  for (const auto& t : p.delta1)
    table.push_back(StmTrans{t.state, t.reads, OdTag::Bit1, t.writes, t.moves, t.next});
  return stm_make(p.states, p.initial, p.tapes, std::move(table));
}

PtmConfig ptm_init(const PtmSpec& m, const BitString& input) {
  return PtmConfig{m.initial, tapes_of(m.tapes, {input})};
}

PtmConfig ptm_init_tapes(const PtmSpec& m, const std::vector<BitString>& contents) {
  if (int(contents.size()) > m.tapes) bad("more contents than tapes");
  return PtmConfig{m.initial, tapes_of(m.tapes, contents)};
}

namespace {

const PtmTrans* ptm_find(const std::vector<PtmTrans>& d, int state, const std::string& reads) {
  auto key = std::tie(state, reads);
  auto it = std::lower_bound(
      d.begin(), d.end(), key,
      [](const PtmTrans& t, const decltype(key)& k) { return std::tie(t.state, t.reads) < k; });
  if (it != d.end() && it->state == state && it->reads == reads) return &*it;
  return nullptr;
}

}  // namespace

bool ptm_final(const PtmSpec& m, const PtmConfig& c) {
  std::string rd = heads(c.tapes);
  return !ptm_find(m.delta0, c.state, rd) && !ptm_find(m.delta1, c.state, rd);
}

bool ptm_step(const PtmSpec& m, PtmConfig& c, int bit) {
  const PtmTrans* t = ptm_find(bit ? m.delta1 : m.delta0, c.state, heads(c.tapes));
  if (!t) return false;
  apply_trans(m.tapes, c.tapes, *t, c.state);
  return true;
}

BitString run(const PtmSpec& m, PtmConfig c, BitStream stream, long long fuel) {
  while (!ptm_final(m, c)) {
    if (--fuel < 0) throw FuelExhausted();
    ptm_step(m, c, stream.take());
  }
  return output_extract(c.tapes.at(0));
}

Distribution run_dist(const PtmSpec& m, const PtmConfig& start, long long fuel, int cap) {
  Distribution out;
  std::vector<std::pair<PtmConfig, Dyadic>> level;
  level.emplace_back(start, Dyadic(1));
  for (long long draws = 0; !level.empty();) {
    std::vector<std::pair<PtmConfig, Dyadic>> next;
    for (auto& [cfg, w] : level) {
      std::string rd = heads(cfg.tapes);
      const PtmTrans* t0 = ptm_find(m.delta0, cfg.state, rd);
      const PtmTrans* t1 = ptm_find(m.delta1, cfg.state, rd);
      if (!t0 && !t1) {
        out.add(output_extract(cfg.tapes.at(0)), w);
        continue;
      }
      // each level draws one bit; the drawn bit's transition applies if
      // defined, otherwise the machine stays in place
      PtmConfig other = cfg;
      if (t0) apply_trans(m.tapes, cfg.tapes, *t0, cfg.state);
      if (t1) apply_trans(m.tapes, other.tapes, *t1, other.state);
      next.emplace_back(std::move(cfg), halve(w));
      next.emplace_back(std::move(other), halve(w));
    }
    if (++draws > fuel) {
      for (const auto& [cfg, w] : next) out.add_diverge(w);
      return out;
    }
    merge_frontier(next, cap);
    level = std::move(next);
  }
  return out;
}

Distribution run_dist(const PtmSpec& m, const BitString& input, long long fuel, int cap) {
  return run_dist(m, ptm_init(m, input), fuel, cap);
}

std::string config_key(int state, const std::vector<Tape>& tapes) {
  std::string key = std::to_string(state);
  for (const auto& t : tapes) {
    key += ' ';
    key += t.left;
    key += '|';
    key += t.right;
  }
  return key;
}

std::map<std::string, Dyadic> reach_measures(const StmSpec& m, const StmConfig& start, int n) {
  std::map<std::string, std::pair<StmConfig, Dyadic>> level;
  StmConfig s0 = start;
  s0.stream = BitStream{};
  level.emplace(config_key(s0), std::make_pair(s0, Dyadic(1)));
  for (int step = 0; step < n; ++step) {
    std::map<std::string, std::pair<StmConfig, Dyadic>> next;
    auto emit = [&](StmConfig c, const Dyadic& w) {
      std::string key = config_key(c);
      auto it = next.find(key);
      if (it == next.end())
        next.emplace(std::move(key), std::make_pair(std::move(c), w));
      else
        it->second.second = it->second.second + w;
    };
    for (const auto& [key, cw] : level) {
      const auto& [cfg, w] = cw;
      std::string rd = heads(cfg.tapes);
      if (const StmTrans* t = stm_find(m, cfg.state, rd, OdTag::Skip)) {
        StmConfig c = cfg;
        apply_trans(m.tapes, c.tapes, *t, c.state);
        emit(std::move(c), w);
        continue;
      }
      for (OdTag tag : {OdTag::Bit0, OdTag::Bit1})
        if (const StmTrans* t = stm_find(m, cfg.state, rd, tag)) {
          StmConfig c = cfg;
          apply_trans(m.tapes, c.tapes, *t, c.state);
          emit(std::move(c), halve(w));
        }
    }
    level = std::move(next);
  }
  std::map<std::string, Dyadic> out;
  for (const auto& [key, cw] : level) out.emplace(key, cw.second);
  return out;
}

// ---- text format ----

namespace {

[[noreturn]] void parse_fail(size_t line, const std::string& msg) {
  throw std::runtime_error("machine parse error at line " + std::to_string(line) + ": " + msg);
}

std::vector<std::pair<size_t, std::string>> nonblank_lines(const std::string& src) {
  std::vector<std::pair<size_t, std::string>> out;
  std::istringstream in(src);
  std::string line;
  size_t num = 0;
  while (std::getline(in, line)) {
    ++num;
    bool blank = true;
    for (char c : line)
      if (!std::isspace((unsigned char)c)) blank = false;
    if (!blank) out.emplace_back(num, line);
  }
  return out;
}

struct RawLine {
  int state;
  std::string reads;
  char tag;
  std::string writes;
  std::string moves;
  int next;
};

RawLine parse_trans_line(size_t num, const std::string& line) {
  std::istringstream in(line);
  RawLine r;
  std::string tag;
  if (!(in >> r.state >> r.reads >> tag >> r.writes >> r.moves >> r.next))
    parse_fail(num, "expected 'state reads tag writes moves next'");
  std::string extra;
  if (in >> extra) parse_fail(num, "trailing fields");
  if (tag.size() != 1 || (tag[0] != '0' && tag[0] != '1' && tag[0] != '~'))
    parse_fail(num, "tag must be 0, 1, or ~");
  r.tag = tag[0];
  return r;
}

struct Header {
  std::string kind;
  int states, initial, tapes;
};

Header parse_header(const std::vector<std::pair<size_t, std::string>>& lines) {
  if (lines.empty()) parse_fail(0, "empty input");
  std::istringstream in(lines[0].second);
  Header h;
  if (!(in >> h.kind >> h.states >> h.initial >> h.tapes))
    parse_fail(lines[0].first, "expected 'kind states initial tapes'");
  std::string extra;
  if (in >> extra) parse_fail(lines[0].first, "trailing fields");
  return h;
}

}  // namespace

StmSpec stm_parse(const std::string& src) {
  auto lines = nonblank_lines(src);
  Header h = parse_header(lines);
  if (h.kind != "stm") parse_fail(lines[0].first, "expected header 'stm'");
  std::vector<StmTrans> table;
  for (size_t i = 1; i < lines.size(); ++i) {
    RawLine r = parse_trans_line(lines[i].first, lines[i].second);
    table.push_back(StmTrans{r.state, r.reads, OdTag(r.tag), r.writes, r.moves, r.next});
  }
  try {
    return stm_make(h.states, h.initial, h.tapes, std::move(table));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("machine parse error: ") + e.what());
  }
}

std::string stm_show(const StmSpec& m) {
  std::string out = "stm " + std::to_string(m.states) + " " + std::to_string(m.initial) + " " +
                    std::to_string(m.tapes) + "\n";
  for (const auto& t : m.table)
    out += std::to_string(t.state) + " " + t.reads + " " + char(t.tag) + " " + t.writes + " " +
           t.moves + " " + std::to_string(t.next) + "\n";
  return out;
}

PtmSpec ptm_parse(const std::string& src) {
  auto lines = nonblank_lines(src);
  Header h = parse_header(lines);
  if (h.kind != "ptm") parse_fail(lines[0].first, "expected header 'ptm'");
  std::vector<PtmTrans> d0, d1;
  for (size_t i = 1; i < lines.size(); ++i) {
    RawLine r = parse_trans_line(lines[i].first, lines[i].second);
    if (r.tag == '~') parse_fail(lines[i].first, "tag must be 0 or 1");
    (r.tag == '0' ? d0 : d1).push_back(PtmTrans{r.state, r.reads, r.writes, r.moves, r.next});
  }
  try {
    return ptm_make(h.states, h.initial, h.tapes, std::move(d0), std::move(d1));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("machine parse error: ") + e.what());
  }
}

std::string ptm_show(const PtmSpec& m) {
  std::string out = "ptm " + std::to_string(m.states) + " " + std::to_string(m.initial) + " " +
                    std::to_string(m.tapes) + "\n";
  for (int b : {0, 1})
    for (const auto& t : (b ? m.delta1 : m.delta0))
      out += std::to_string(t.state) + " " + t.reads + " " + char('0' + b) + " " + t.writes + " " +
             t.moves + " " + std::to_string(t.next) + "\n";
  return out;
}

}  // namespace porlab
