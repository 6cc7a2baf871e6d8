// zdsec: seeded experiment runner for the zero-delay coding and secrecy
// library.  Every run is deterministic given its flags; CSV outputs get a
// .meta.json sidecar echoing the configuration so results can be reproduced
// byte for byte.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "zdsec/adversary.hpp"
#include "zdsec/bits.hpp"
#include "zdsec/causal_rd.hpp"
#include "zdsec/codes.hpp"
#include "zdsec/errors.hpp"
#include "zdsec/keystream.hpp"
#include "zdsec/model_io.hpp"
#include "zdsec/secure_causal.hpp"
#include "zdsec/source_model.hpp"
#include "zdsec/zd_block.hpp"
#include "zdsec/zd_stream.hpp"

namespace {

using nlohmann::json;
using namespace zdsec;

constexpr const char* kVersion = "1.0.0";

// Shortest round-trip decimal form: stable across runs, locale-free.
std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join_ints(const std::vector<int>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(sep);
    out += std::to_string(v[i]);
  }
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Options {
  std::string command;
  std::string pmf_path;
  std::string joint_path;
  std::string dist_path;
  std::string config_path;
  std::string emit;  // empty: per-command default
  std::string audit_scheme = "stream";
  std::string code_kind = "huffman";
  std::string grid;
  std::vector<std::size_t> n_list = {10, 100, 1000};
  std::uint64_t seed = 1;
  std::uint64_t limit_states = 1ull << 22;
  std::size_t n = 10000;
  std::size_t m = 8;
  std::size_t trials = 1;
  std::size_t cap = 2000;
  double target_D = 0.0;
  double target_h = 0.0;
  double sw_margin = 0.25;
  double q_R = 0.0, q_Rk = 0.0, q_D = 0.0, q_h = 0.0;
};

json echo_options(const Options& o) {
  json cfg;
  cfg["command"] = o.command;
  cfg["seed"] = o.seed;
  cfg["limit_states"] = o.limit_states;
  if (!o.pmf_path.empty()) cfg["pmf"] = o.pmf_path;
  if (!o.joint_path.empty()) cfg["joint"] = o.joint_path;
  if (!o.dist_path.empty()) cfg["dist"] = o.dist_path;
  if (!o.config_path.empty()) cfg["config"] = o.config_path;
  if (o.command == "block" || o.command == "stream") cfg["n"] = o.n;
  if (o.command == "audit") {
    cfg["scheme"] = o.audit_scheme;
    cfg["code"] = o.code_kind;
    cfg["n_list"] = o.n_list;
  }
  if (o.command == "region" && !o.grid.empty()) cfg["grid"] = o.grid;
  if (o.command == "causal-sim") {
    cfg["n"] = o.n;
    cfg["m"] = o.m;
    cfg["trials"] = o.trials;
    cfg["cap"] = o.cap;
    cfg["sw_margin"] = o.sw_margin;
    cfg["target_D"] = o.target_D;
    cfg["target_h"] = o.target_h;
  }
  if (o.command == "check") {
    cfg["R"] = o.q_R;
    cfg["Rk"] = o.q_Rk;
    cfg["D"] = o.q_D;
    cfg["h"] = o.q_h;
  }
  return cfg;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << content;
  if (!out) throw ConfigError("failed writing output file: " + path);
}

void write_sidecar(const std::string& csv_path, const Options& o) {
  json meta;
  meta["tool"] = "zdsec";
  meta["version"] = kVersion;
  meta["command"] = o.command;
  meta["seed"] = o.seed;
  meta["config"] = echo_options(o);
  write_text_file(csv_path + ".meta.json", meta.dump(2) + "\n");
}

std::string emit_path(const Options& o, const char* fallback) {
  return o.emit.empty() ? std::string(fallback) : o.emit;
}

void require_path(const std::string& path, const char* what) {
  if (path.empty())
    throw ConfigError(std::string(what) + " is required for this command");
}

// ---------------------------------------------------------------------------
// block: padded-block scheme.  CSV emits the achievable (R, Rk) points per
// complete length profile; JSON emits a full per-stage trace of one run.
// ---------------------------------------------------------------------------

std::string region_csv(const SourceModel& model) {
  RegionResult res = region_points(model);
  std::string csv = "profile,R,R_k,on_envelope\n";
  for (const RegionPoint& p : res.points) {
    csv += join_ints(p.profile.lengths, ';') + "," + fmt(p.R) + "," + fmt(p.Rk) + "," +
           (p.on_envelope ? "1" : "0") + "\n";
  }
  return csv;
}

int cmd_block(const Options& o) {
  require_path(o.pmf_path, "--pmf");
  SourceModel model = load_source_model(o.pmf_path);
  std::string out = emit_path(o, "region.csv");
  if (ends_with(out, ".json")) {
    InstantaneousCode code = build_huffman(model);
    std::vector<int> xs = sample(model, o.n, o.seed);
    KeyStream key(o.seed);
    PrivateRandomness priv(o.seed ^ 0xBADB102Cull);
    json stages = json::array();
    std::vector<Bits> blocks;
    for (int x : xs) {
      Bits b = encode_block(code, x, key, priv);
      stages.push_back({{"x", x}, {"block", b.to_string()}});
      blocks.push_back(std::move(b));
    }
    KeyStream rx(o.seed);
    bool ok = true;
    for (std::size_t t = 0; t < blocks.size(); ++t)
      ok = ok && decode_block(code, blocks[t], rx) == xs[t];
    json trace;
    trace["scheme"] = "block";
    trace["seed"] = o.seed;
    trace["n"] = o.n;
    trace["code"] = code.serialize();
    trace["coding_rate"] = static_cast<double>(code.max_length());
    trace["key_rate"] = key_rate(key, o.n);
    trace["per_stage_key_bits"] = key.per_stage_consumption();
    trace["roundtrip_ok"] = ok;
    trace["stages"] = std::move(stages);
    write_text_file(out, trace.dump(2) + "\n");
  } else {
    write_text_file(out, region_csv(model));
    write_sidecar(out, o);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// stream: concatenated encrypted codewords.  JSON emits a run summary;
// .bin emits exactly what a wiretapper sees (packed bits, no framing).
// ---------------------------------------------------------------------------

int cmd_stream(const Options& o) {
  require_path(o.pmf_path, "--pmf");
  SourceModel model = load_source_model(o.pmf_path);
  InstantaneousCode code = build_huffman(model);
  std::vector<int> xs = sample(model, o.n, o.seed);
  KeyStream key(o.seed);
  BitStream bs = encode_stream(code, xs, key);
  std::string out = emit_path(o, "trace.json");
  if (ends_with(out, ".bin")) {
    std::vector<std::uint8_t> bytes = bs.bits.packed_bytes();
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + out);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    return 0;
  }
  KeyStream rx(o.seed);
  std::vector<int> back = decode_stream(code, bs.bits, rx, o.n);
  json trace;
  trace["scheme"] = "stream";
  trace["seed"] = o.seed;
  trace["n"] = o.n;
  trace["code"] = code.serialize();
  trace["total_bits"] = bs.bits.size();
  trace["coding_rate"] =
      static_cast<double>(bs.bits.size()) / static_cast<double>(o.n);
  trace["key_rate"] = key_rate(key, o.n);
  trace["roundtrip_ok"] = back == xs;
  if (o.n <= 4096) trace["stage_offsets"] = bs.stage_offsets;
  write_text_file(out, trace.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// audit: what the no-parsing wiretapper learns from total length alone.
// ---------------------------------------------------------------------------

InstantaneousCode fixed_length_code(std::size_t k) {
  std::size_t w = 1;
  while ((1ull << w) < k) ++w;
  std::vector<Bits> words;
  for (std::size_t i = 0; i < k; ++i)
    words.push_back(Bits::from_uint(i, w));
  return InstantaneousCode(std::move(words));
}

int cmd_audit(const Options& o) {
  require_path(o.pmf_path, "--pmf");
  if (o.audit_scheme != "block" && o.audit_scheme != "stream")
    throw ConfigError("--scheme must be block or stream");
  if (o.code_kind != "huffman" && o.code_kind != "fixed")
    throw ConfigError("--code must be huffman or fixed");
  SourceModel model = load_source_model(o.pmf_path);
  InstantaneousCode code = o.code_kind == "fixed"
                               ? fixed_length_code(model.alphabet_size())
                               : build_huffman(model);
  double exp_len = expected_length(code, model);
  std::string csv = "n,expected_tv,max_tv,key_rate,coding_rate\n";
  if (o.audit_scheme == "block") {
    // Padded blocks are uniform bits independent of the source, so the
    // length side channel carries nothing at any horizon.
    double cr = static_cast<double>(code.max_length());
    for (std::size_t n : o.n_list)
      csv += std::to_string(n) + ",0,0," + fmt(exp_len) + "," + fmt(cr) + "\n";
  } else {
    std::vector<ConvergencePoint> curve;
    try {
      curve = convergence_curve(code, model, o.n_list, o.limit_states);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--n-list: ") + e.what());
    }
    for (const ConvergencePoint& pt : curve)
      csv += std::to_string(pt.n) + "," + fmt(pt.expected_tv) + "," +
             fmt(pt.max_tv) + "," + fmt(exp_len) + "," + fmt(exp_len) + "\n";
  }
  std::string out = emit_path(o, "audit.csv");
  write_text_file(out, csv);
  write_sidecar(out, o);
  return 0;
}

// ---------------------------------------------------------------------------
// region: dual mode.  With --pmf alone, the padded-block (R, Rk) points.
// With --dist and --grid, the causal rate-distortion curve (optionally with
// decoder side information when --joint is given).
// ---------------------------------------------------------------------------

std::vector<double> parse_grid(const std::string& grid) {
  double lo, hi;
  std::size_t steps;
  char c1, c2;
  std::istringstream in(grid);
  if (!(in >> lo >> c1 >> hi >> c2 >> steps) || c1 != ':' || c2 != ':' ||
      !in.eof() || steps == 0 || hi < lo)
    throw ConfigError("--grid must be lo:hi:steps with hi >= lo, steps >= 1");
  std::vector<double> out;
  if (steps == 1) return {lo};
  for (std::size_t i = 0; i < steps; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                           static_cast<double>(steps - 1));
  return out;
}

template <typename Curve, typename WitnessFmt>
std::string curve_csv(const Curve& curve, const std::vector<double>& grid,
                      WitnessFmt&& witness_fmt) {
  std::string csv = "D,r_c,r_c_envelope,witness_f,witness_g\n";
  for (double D : grid) {
    auto idx = curve.step_index(D);
    auto step = curve.step_value(D);
    auto env = curve.envelope_value(D);
    csv += fmt(D) + ",";
    csv += (step ? fmt(*step) : "inf") + ",";
    csv += (env ? fmt(*env) : "inf") + ",";
    csv += idx ? witness_fmt(curve.witnesses[*idx]) : std::string(",");
    csv += "\n";
  }
  return csv;
}

int cmd_region(const Options& o) {
  if (o.grid.empty() && o.dist_path.empty()) {
    require_path(o.pmf_path, "--pmf");
    SourceModel model = load_source_model(o.pmf_path);
    std::string out = emit_path(o, "region.csv");
    write_text_file(out, region_csv(model));
    write_sidecar(out, o);
    return 0;
  }
  require_path(o.dist_path, "--dist");
  if (o.grid.empty()) throw ConfigError("--grid is required with --dist");
  DistortionMatrix dist = load_distortion(o.dist_path);
  std::vector<double> grid = parse_grid(o.grid);
  std::string csv;
  if (!o.joint_path.empty()) {
    JointSourceModel jm = load_joint_model(o.joint_path);
    RcSiCurve curve = rc_si_curve(jm, dist, o.limit_states);
    csv = curve_csv(curve, grid, [](const SIQuantizerPair& qp) {
      std::string f = join_ints(qp.f, '|');
      std::string g;
      for (std::size_t s = 0; s < qp.g.size(); ++s) {
        if (s) g.push_back(';');
        g += join_ints(qp.g[s], '|');
      }
      return f + "," + g;
    });
  } else {
    require_path(o.pmf_path, "--pmf or --joint");
    SourceModel model = load_source_model(o.pmf_path);
    RcCurve curve = rc_curve(model, dist, o.limit_states);
    csv = curve_csv(curve, grid,
                    [](const Quantizer& q) { return join_ints(q.map, '|') + ","; });
  }
  std::string out = emit_path(o, "curve.csv");
  write_text_file(out, csv);
  write_sidecar(out, o);
  return 0;
}

// ---------------------------------------------------------------------------
// causal-sim: separation scheme trials.  --pmf runs the no-SI scheme, --joint
// the side-information scheme with Slepian-Wolf binning.
// ---------------------------------------------------------------------------

template <typename Fn>
void run_trials(std::size_t trials, Fn&& per_trial) {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t workers = std::min(trials, hw);
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) per_trial(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < trials;) per_trial(t);
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
}

std::string metrics_csv(const std::vector<RunMetrics>& rows) {
  std::string csv = "trial,R_emp,Rk_emp,D_emp,h_bound,sw_error\n";
  for (std::size_t t = 0; t < rows.size(); ++t)
    csv += std::to_string(t) + "," + fmt(rows[t].R_emp) + "," +
           fmt(rows[t].Rk_emp) + "," + fmt(rows[t].D_emp) + "," +
           fmt(rows[t].h_bound) + "," + fmt(rows[t].sw_error) + "\n";
  return csv;
}

int cmd_causal(const Options& o) {
  require_path(o.dist_path, "--dist");
  if (o.pmf_path.empty() == o.joint_path.empty())
    throw ConfigError("causal-sim needs exactly one of --pmf or --joint");
  if (o.n == 0 || o.m == 0 || o.trials == 0)
    throw ConfigError("--n, --m and --trials must be positive");
  DistortionMatrix dist = load_distortion(o.dist_path);
  std::vector<RunMetrics> rows(o.trials);

  if (!o.pmf_path.empty()) {
    SourceModel model = load_source_model(o.pmf_path);
    double hx = entropy(model);
    RcCurve curve = rc_curve(model, dist, o.limit_states);
    if (o.target_h > hx + 1e-12) {
      std::cerr << "infeasible target: h = " << fmt(o.target_h)
                << " exceeds the source entropy bound H(X) = " << fmt(hx)
                << "\n";
      return 2;
    }
    if (o.target_D < curve.d_min() - 1e-12) {
      std::cerr << "infeasible target: D = " << fmt(o.target_D)
                << " is below the minimum achievable distortion D_min = "
                << fmt(curve.d_min()) << "\n";
      return 2;
    }
    SeparationScheme scheme = design_separation_scheme(
        model, dist, o.target_D, o.target_h, o.m, o.limit_states);
    run_trials(o.trials, [&](std::size_t t) {
      std::uint64_t s = o.seed + 1 + t;
      std::vector<int> xs = sample(model, o.n, s);
      KeyStream key(s ^ 0x7E57ED5EED5EEDull);
      SeparationRun run = encode_separation(scheme, model, dist, xs, key,
                                            o.limit_states);
      rows[t] = run.metrics;
    });
  } else {
    JointSourceModel jm = load_joint_model(o.joint_path);
    double hxw = jm.entropy_x_given_w();
    RcSiCurve curve = rc_si_curve(jm, dist, o.limit_states);
    if (o.target_h > hxw + 1e-12) {
      std::cerr << "infeasible target: h = " << fmt(o.target_h)
                << " exceeds the conditional entropy bound H(X|W) = "
                << fmt(hxw) << "\n";
      return 2;
    }
    if (o.target_D < curve.d_min() - 1e-12) {
      std::cerr << "infeasible target: D = " << fmt(o.target_D)
                << " is below the minimum achievable distortion D_min = "
                << fmt(curve.d_min()) << "\n";
      return 2;
    }
    SiSeparationScheme scheme = design_separation_scheme_si(
        jm, dist, o.target_D, o.target_h, o.sw_margin, o.seed, o.limit_states);
    run_trials(o.trials, [&](std::size_t t) {
      std::uint64_t s = o.seed + 1 + t;
      std::vector<int> xs = sample(jm.x_model(), o.n, s);
      std::vector<int> ys =
          sample_channel(jm.py_given_x(), xs, s ^ 0xD1B54A32D192ED03ull);
      KeyStream key(s ^ 0x7E57ED5EED5EEDull);
      SiSeparationRun run =
          encode_decode_separation_si(scheme, jm, dist, xs, ys, key, o.cap);
      rows[t] = run.metrics;
    });
  }
  std::string out = emit_path(o, "metrics.csv");
  write_text_file(out, metrics_csv(rows));
  write_sidecar(out, o);
  return 0;
}

// ---------------------------------------------------------------------------
// check: membership of an (R, Rk, D, h) quadruple in the achievable region.
// ---------------------------------------------------------------------------

int cmd_check(const Options& o) {
  require_path(o.dist_path, "--dist");
  if (o.pmf_path.empty() == o.joint_path.empty())
    throw ConfigError("check needs exactly one of --pmf or --joint");
  DistortionMatrix dist = load_distortion(o.dist_path);
  Quadruple q{o.q_R, o.q_Rk, o.q_D, o.q_h};
  RegionReport rep;
  if (!o.pmf_path.empty()) {
    SourceModel model = load_source_model(o.pmf_path);
    rep = region_check_no_si(model, dist, q, o.limit_states);
  } else {
    JointSourceModel jm = load_joint_model(o.joint_path);
    rep = region_check_si(jm, dist, q, o.limit_states);
  }
  std::ostringstream out;
  out << "feasible_D: " << (rep.feasible_D ? "yes" : "no") << "\n";
  out << "member: " << (rep.member ? "yes" : "no") << "\n";
  out << "envelope_rate: "
      << (rep.feasible_D ? fmt(rep.envelope_rate) : "infeasible") << "\n";
  out << "entropy_bound: " << fmt(rep.entropy_bound) << "\n";
  out << "required_Rk: " << fmt(rep.required_Rk) << "\n";
  out << "slack_R: " << fmt(rep.slack_R) << "\n";
  out << "slack_h: " << fmt(rep.slack_h) << "\n";
  out << "slack_Rk: " << fmt(rep.slack_Rk) << "\n";
  out << "no_encryption: " << (rep.no_encryption ? "yes" : "no") << "\n";
  std::cout << out.str();
  if (!o.emit.empty()) {
    json rj;
    rj["feasible_D"] = rep.feasible_D;
    rj["member"] = rep.member;
    if (rep.feasible_D) rj["envelope_rate"] = rep.envelope_rate;
    rj["entropy_bound"] = rep.entropy_bound;
    rj["required_Rk"] = rep.required_Rk;
    rj["slack_R"] = rep.slack_R;
    rj["slack_h"] = rep.slack_h;
    rj["slack_Rk"] = rep.slack_Rk;
    rj["no_encryption"] = rep.no_encryption;
    rj["query"] = {{"R", q.R}, {"Rk", q.Rk}, {"D", q.D}, {"h", q.h}};
    write_text_file(o.emit, rj.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// run: one experiment described by a JSON config, dispatched to the same
// handlers as the dedicated subcommands.
// ---------------------------------------------------------------------------

int dispatch(const Options& o);

int cmd_run(const Options& base) {
  std::ifstream in(base.config_path);
  if (!in) throw ConfigError("cannot open config: " + base.config_path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse: ") + e.what());
  }
  Options o = base;
  try {
    std::string scheme = cfg.at("scheme").get<std::string>();
    if (scheme == "block") o.command = "block";
    else if (scheme == "stream") o.command = "stream";
    else if (scheme == "audit") o.command = "audit";
    else if (scheme == "region") o.command = "region";
    else if (scheme == "causal" || scheme == "causal_si") o.command = "causal-sim";
    else throw ConfigError("unknown scheme: " + scheme);
    if (scheme == "causal" && !cfg.contains("pmf"))
      throw ConfigError("scheme causal requires a pmf path");
    if (scheme == "causal_si" && !cfg.contains("joint"))
      throw ConfigError("scheme causal_si requires a joint path");
    o.pmf_path = cfg.value("pmf", o.pmf_path);
    o.joint_path = cfg.value("joint", o.joint_path);
    o.dist_path = cfg.value("dist", o.dist_path);
    o.emit = cfg.value("emit", o.emit);
    o.grid = cfg.value("grid", o.grid);
    o.audit_scheme = cfg.value("audit_scheme", o.audit_scheme);
    o.code_kind = cfg.value("code", o.code_kind);
    o.seed = cfg.value("seed", o.seed);
    o.limit_states = cfg.value("limit_states", o.limit_states);
    o.n = cfg.value("n", o.n);
    o.m = cfg.value("m", o.m);
    o.trials = cfg.value("trials", o.trials);
    o.cap = cfg.value("cap", o.cap);
    o.target_D = cfg.value("target_D", o.target_D);
    o.target_h = cfg.value("target_h", o.target_h);
    o.sw_margin = cfg.value("sw_margin", o.sw_margin);
    if (cfg.contains("n_list"))
      o.n_list = cfg.at("n_list").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return dispatch(o);
}

int dispatch(const Options& o) {
  if (o.command == "block") return cmd_block(o);
  if (o.command == "stream") return cmd_stream(o);
  if (o.command == "audit") return cmd_audit(o);
  if (o.command == "region") return cmd_region(o);
  if (o.command == "causal-sim") return cmd_causal(o);
  if (o.command == "check") return cmd_check(o);
  if (o.command == "run") return cmd_run(o);
  throw ConfigError("unknown command: " + o.command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zero-delay source coding with information-theoretic secrecy"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "base PRNG seed");
  app.add_option("--emit", o.emit, "output file path");
  app.add_option("--limit-states", o.limit_states,
                 "cap on exact-enumeration state space");

  CLI::App* block = app.add_subcommand(
      "block", "padded-block scheme: region points or a run trace");
  block->add_option("--pmf", o.pmf_path, "source pmf JSON")->required();
  block->add_option("--n", o.n, "symbols to encode for trace output");

  CLI::App* stream = app.add_subcommand(
      "stream", "concatenated-codeword scheme: trace or wiretap view");
  stream->add_option("--pmf", o.pmf_path, "source pmf JSON")->required();
  stream->add_option("--n", o.n, "symbols to encode");

  CLI::App* audit = app.add_subcommand(
      "audit", "length-only wiretapper posterior drift");
  audit->add_option("--pmf", o.pmf_path, "source pmf JSON")->required();
  audit->add_option("--scheme", o.audit_scheme, "block or stream");
  audit->add_option("--code", o.code_kind, "huffman or fixed");
  audit->add_option("--n-list", o.n_list,
                    "horizons, strictly increasing")
      ->delimiter(',');

  CLI::App* region = app.add_subcommand(
      "region", "achievable rate region or rate-distortion curve");
  region->add_option("--pmf", o.pmf_path, "source pmf JSON");
  region->add_option("--joint", o.joint_path, "joint source JSON");
  region->add_option("--dist", o.dist_path, "distortion matrix JSON");
  region->add_option("--grid", o.grid, "distortion grid lo:hi:steps");

  CLI::App* causal = app.add_subcommand(
      "causal-sim", "separation scheme trials at a (D, h) target");
  causal->add_option("--pmf", o.pmf_path, "source pmf JSON (no SI)");
  causal->add_option("--joint", o.joint_path, "joint source JSON (with SI)");
  causal->add_option("--dist", o.dist_path, "distortion matrix JSON");
  causal->add_option("--target-D", o.target_D, "distortion target")->required();
  causal->add_option("--target-h", o.target_h, "equivocation target")
      ->required();
  causal->add_option("--n", o.n, "symbols per trial");
  causal->add_option("--m", o.m, "entropy-coder tuple length");
  causal->add_option("--trials", o.trials, "independent trials");
  causal->add_option("--sw-margin", o.sw_margin, "bin rate above envelope");
  causal->add_option("--cap", o.cap, "bin decoder candidate budget");

  CLI::App* check = app.add_subcommand(
      "check", "membership of an (R, Rk, D, h) quadruple");
  // --h is the equivocation coordinate, so help keeps only its long form here.
  check->set_help_flag("--help", "print help and exit");
  check->add_option("--pmf", o.pmf_path, "source pmf JSON (no SI)");
  check->add_option("--joint", o.joint_path, "joint source JSON (with SI)");
  check->add_option("--dist", o.dist_path, "distortion matrix JSON");
  check->add_option("--R", o.q_R, "coding rate")->required();
  check->add_option("--Rk", o.q_Rk, "key rate")->required();
  check->add_option("--D", o.q_D, "distortion")->required();
  check->add_option("--h", o.q_h, "equivocation floor")->required();

  CLI::App* run = app.add_subcommand("run", "run one JSON experiment config");
  run->add_option("--config", o.config_path, "experiment JSON")->required();

  for (CLI::App* sub : {block, stream, audit, region, causal, check, run})
    sub->fallthrough();

  int rc = 0;
  try {
    app.parse(argc, argv);
    o.command = app.get_subcommands().front()->get_name();
    rc = dispatch(o);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InfeasibleTarget& e) {
    std::cerr << "infeasible target: " << e.what() << "\n";
    return 2;
  } catch (const StateSpaceTooLarge& e) {
    std::cerr << "state-space limit: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
