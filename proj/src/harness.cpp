#include "porlab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace porlab {

namespace {

Store store_of(const std::vector<BitString>& inputs) {
  Store s;
  for (size_t i = 0; i < inputs.size(); ++i) s.set("X" + std::to_string(i + 1), inputs[i]);
  return s;
}

std::string show_input(const std::vector<BitString>& input) {
  std::string out = "(";
  for (size_t i = 0; i < input.size(); ++i) {
    if (i) out += ",";
    out += show_bits(input[i]);
  }
  return out + ")";
}

// first (value, weight, weight) disagreement, scanning words then the cut-off
// mass; nullopt when equal
std::optional<StageDivergence> first_diff(const Distribution& a, const Distribution& b) {
  std::set<BitString> keys;
  for (const auto& [v, w] : a.weights) keys.insert(v);
  for (const auto& [v, w] : b.weights) keys.insert(v);
  auto weight = [](const Distribution& d, const BitString& v) {
    auto it = d.weights.find(v);
    return it == d.weights.end() ? Dyadic() : it->second;
  };
  for (const auto& v : keys) {
    Dyadic wa = weight(a, v), wb = weight(b, v);
    if (wa != wb) {
      StageDivergence out;
      out.value = v;
      out.weight_a = wa;
      out.weight_b = wb;
      return out;
    }
  }
  if (a.diverge != b.diverge) {
    StageDivergence out;
    out.on_diverge = true;
    out.weight_a = a.diverge;
    out.weight_b = b.diverge;
    return out;
  }
  return std::nullopt;
}

double to_double(const Dyadic& a) { return std::ldexp(a.num.get_d(), -long(a.log2den)); }

}  // namespace

std::vector<Distribution> stage_distributions(const PipelineBundle& b,
                                              const std::vector<BitString>& input,
                                              long long fuel) {
  std::vector<Distribution> out;
  out.push_back(eval_dist(*b.source, input, fuel));
  out.push_back(run_ra_dist(*b.stage_ra, store_of(input), fuel));
  out.push_back(run_la_dist(*b.stage_la, store_of(input), fuel));
  out.push_back(run_dist(b.stage_od.spec, od_init(b.stage_od, input), fuel));
  out.push_back(run_dist(b.stage_stm, od_init(b.stage_stm, b.stage_od.tapes, input), fuel));
  out.push_back(run_dist(b.stage_ptm, od_init_ptm(b.stage_ptm, b.stage_od.tapes, input), fuel));
  return out;
}

EquivalenceReport check_bundle_equivalence(const std::string& id, const PipelineBundle& b,
                                           const std::vector<std::vector<BitString>>& inputs,
                                           long long fuel, bool keep_distributions) {
  EquivalenceReport r;
  r.id = id;
  r.stages.assign(std::begin(kStageNames), std::end(kStageNames));
  for (const auto& input : inputs) {
    std::vector<Distribution> d = stage_distributions(b, input, fuel);
    ++r.inputs_checked;
    for (const Distribution& di : d)
      if (!di.diverge.is_zero()) r.zero_divergence = false;
    if (!r.divergence)
      for (size_t i = 1; i < d.size(); ++i)
        if (auto diff = first_diff(d[0], d[i])) {
          diff->stage_a = r.stages[0];
          diff->stage_b = r.stages[i];
          diff->input = input;
          r.divergence = std::move(diff);
          r.pass = false;
          break;
        }
    if (keep_distributions) r.rows.push_back({input, std::move(d)});
  }
  return r;
}

EquivalenceReport check_stage_equivalence(const std::string& id, PorPtr f,
                                          const std::vector<std::vector<BitString>>& inputs,
                                          long long fuel, bool keep_distributions) {
  return check_bundle_equivalence(id, build_pipeline(std::move(f)), inputs, fuel,
                                  keep_distributions);
}

std::string equivalence_table(const EquivalenceReport& r) {
  std::ostringstream os;
  os << "entry " << r.id << ": " << (r.pass ? "pass" : "FAIL") << " (" << r.inputs_checked
     << " inputs, " << (r.zero_divergence ? "zero" : "nonzero") << " divergence mass)\n";
  if (r.divergence) {
    const StageDivergence& d = *r.divergence;
    os << "  first divergence: input " << show_input(d.input) << ", " << d.stage_a << " vs "
       << d.stage_b << ", " << (d.on_diverge ? std::string("cut-off mass") : show_bits(d.value))
       << ": " << to_string(d.weight_a) << " vs " << to_string(d.weight_b) << "\n";
  }
  return os.str();
}

std::string equivalence_json(const EquivalenceReport& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["pass"] = r.pass;
  j["zero_divergence"] = r.zero_divergence;
  j["inputs_checked"] = r.inputs_checked;
  j["stages"] = r.stages;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json dists = nlohmann::json::array();
    for (const auto& d : row.dists) dists.push_back(nlohmann::json::parse(dist_json(d)));
    std::vector<std::string> input;
    for (const auto& x : row.input) input.push_back(show_bits(x));
    j["rows"].push_back({{"input", input}, {"dists", dists}});
  }
  if (r.divergence) {
    const StageDivergence& d = *r.divergence;
    std::vector<std::string> input;
    for (const auto& x : d.input) input.push_back(show_bits(x));
    j["divergence"] = {{"stage_a", d.stage_a},
                       {"stage_b", d.stage_b},
                       {"input", input},
                       {"on_diverge", d.on_diverge},
                       {"value", show_bits(d.value)},
                       {"weight_a", to_string(d.weight_a)},
                       {"weight_b", to_string(d.weight_b)}};
  } else {
    j["divergence"] = nullptr;
  }
  return j.dump(2);
}

CheckReport check_extractor_law(int k) {
  if (k < 0 || k > 10) throw std::invalid_argument("check_extractor_law: k out of range");
  BitString ones(size_t(k), '1');
  std::set<BitString> seen;
  bool lengths_ok = true;
  for (uint64_t m = 0; m < (uint64_t(1) << k); ++m) {
    std::map<BitString, int> tab;
    for (int i = 0; i < k; ++i) tab[dyad(uint64_t(i))] = int((m >> i) & 1);
    BitString out = extractor_e(ones, Oracle(tab));
    if (out.size() != size_t(k)) lengths_ok = false;
    seen.insert(out);
  }
  CheckReport r;
  r.name = "extractor bijection k=" + std::to_string(k);
  r.pass = lengths_ok && seen.size() == (uint64_t(1) << k);
  std::ostringstream os;
  os << (uint64_t(1) << k) << " assignments -> " << seen.size() << " distinct outputs"
     << (lengths_ok ? "" : ", length violated");
  r.detail = os.str();
  return r;
}

StatReport statistical_compare(const Distribution& exact, const Sampler& sample, size_t n,
                               uint64_t seed, double threshold) {
  if (n == 0) throw std::invalid_argument("statistical_compare: n must be positive");
  std::mt19937_64 rng(seed);
  std::map<BitString, size_t> counts;
  for (size_t i = 0; i < n; ++i) ++counts[sample(rng)];
  std::set<BitString> keys;
  for (const auto& [v, w] : exact.weights) keys.insert(v);
  for (const auto& [v, c] : counts) keys.insert(v);
  double tv = to_double(exact.diverge);  // no sample can land on a cut-off run
  for (const auto& v : keys) {
    double p = 0.0;
    if (auto it = exact.weights.find(v); it != exact.weights.end()) p = to_double(it->second);
    double q = counts.count(v) ? double(counts[v]) / double(n) : 0.0;
    tv += std::fabs(p - q);
  }
  StatReport r;
  r.samples = n;
  r.seed = seed;
  r.tv = tv / 2.0;
  r.threshold = threshold;
  r.pass = r.tv <= threshold;
  return r;
}

std::vector<CorpusEntry> harness_corpus() {
  auto lib = por_stdlib();
  std::vector<CorpusEntry> out;
  out.push_back({"e", por_e()});
  out.push_back({"proj21", por_proj(2, 1)});
  out.push_back({"succ1", por_succ(1)});
  out.push_back({"cond", por_cond()});
  out.push_back({"query", por_query()});
  out.push_back({"eq", lib.at("eq")});
  out.push_back({"sub", lib.at("sub")});
  out.push_back({"tail", lib.at("tail")});
  out.push_back({"conc", lib.at("conc")});
  out.push_back({"coinxor", lib.at("coinxor")});
  out.push_back({"band_qq", por_comp(lib.at("band"), {por_query(), por_query()})});
  out.push_back({"query_query", por_comp(por_query(), {por_query()})});
  out.push_back({"cond_query",
                 por_comp(por_cond(), {por_query(), por_e(), por_comp(por_query(), {por_succ(0)}),
                                       por_comp(por_query(), {por_succ(1)})})});
  return out;
}

std::vector<CorpusEntry> load_corpus(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".por") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<CorpusEntry> out;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    out.push_back({path.stem().string(), por_parse(buf.str())});
  }
  return out;
}

std::vector<std::vector<BitString>> input_tuples(int arity, int max_len) {
  std::vector<BitString> pool = all_strings_upto(max_len);
  std::vector<std::vector<BitString>> out{{}};
  for (int a = 0; a < arity; ++a) {
    std::vector<std::vector<BitString>> next;
    for (const auto& t : out)
      for (const auto& x : pool) {
        auto t2 = t;
        t2.push_back(x);
        next.push_back(std::move(t2));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace porlab
