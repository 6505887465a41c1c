#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "omqrw/decider.hpp"
#include "omqrw/harness.hpp"
#include "omqrw/mmsnp.hpp"
#include "omqrw/query.hpp"
#include "omqrw/rewriter.hpp"

using json = nlohmann::ordered_json;
using namespace omqrw;

namespace {

constexpr const char* kSchema = "omqrw-report/1";

enum Exit { Ok = 0, Negative = 1, Undetermined = 2, Usage = 3, Limit = 4 };

struct Common {
  std::string in;
  std::string out;
  bool json = false;
  std::uint64_t seed = 1;
  int max_ind = -1;
  int max_extra = -1;
  double deadline = 0;
  std::string target = "alci";
  int jobs = 1;
};

std::string read_file(const std::string& path) {
  if (path.empty()) throw Error(ErrorKind::Io, "missing --in");
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class Output {
 public:
  explicit Output(const Common& c) : c_(c) {}

  void text(const std::string& s) { text_ << s; }
  json& doc() { return doc_; }

  void flush(const std::string& command) {
    std::string payload;
    if (c_.json) {
      json j;
      j["schema"] = kSchema;
      j["command"] = command;
      for (auto& [k, v] : doc_.items()) j[k] = v;
      payload = j.dump(2) + "\n";
    } else {
      payload = text_.str();
    }
    if (c_.out.empty()) {
      std::cout << payload;
    } else {
      std::ofstream f(c_.out);
      if (!f) throw Error(ErrorKind::Io, "cannot write " + c_.out);
      f << payload;
    }
  }

 private:
  const Common& c_;
  std::ostringstream text_;
  json doc_ = json::object();
};

int exit_for(Answer a) { return a == Answer::Yes ? Ok : a == Answer::No ? Negative : Undetermined; }

int exit_for(Verdict v) {
  return v == Verdict::Rewritable ? Ok : v == Verdict::NotRewritable ? Negative : Undetermined;
}

json bounds(int max_ind, int max_extra) { return {{"max_ind", max_ind}, {"max_extra", max_extra}}; }

int pick(int given, int fallback) { return given >= 0 ? given : fallback; }

// ------------------------------------------------------------------ analyze

int cmd_analyze(const Common& c) {
  OMQ q = parse_omq(read_file(c.in));
  Output o(c);
  o.doc()["dialect"] = q.dialect.tag();
  auto violations = validate_dialect(q);
  o.doc()["dialect_violations"] = violations;
  for (const auto& v : violations) o.text("dialect violation: " + v + "\n");
  if (q.is_iq()) {
    o.text("instance query " + render(q.iq()) + "\n");
    o.doc()["query"] = render(q.iq());
    o.flush("analyze");
    return Ok;
  }
  json ds = json::array();
  for (const auto& p : q.ucq().disjuncts) {
    CQ k = core(p);
    json d;
    d["disjunct"] = render(p);
    d["core"] = render(k);
    d["x_acyclic"] = is_x_acyclic(k);
    d["connected"] = is_connected(k);
    d["x_accessible"] = is_x_accessible(k);
    if (auto cy = x_cycle(k)) d["cycle"] = cy->text();
    if (!q.tbox.functional.empty()) {
      auto f = check_f_acyclic(k, q.tbox);
      d["f_acyclic"] = f.ok;
      if (!f.ok && f.witness) d["f_witness"] = f.witness->text();
    }
    o.text(render(p) + "\n  core " + render(k) + "\n  x-acyclic " + (d["x_acyclic"].get<bool>() ? "yes" : "no") +
           ", connected " + (d["connected"].get<bool>() ? "yes" : "no") + ", x-accessible " +
           (d["x_accessible"].get<bool>() ? "yes" : "no") + "\n");
    if (d.contains("cycle")) o.text("  cycle " + d["cycle"].get<std::string>() + "\n");
    if (d.contains("f_acyclic"))
      o.text(std::string("  f-acyclic ") + (d["f_acyclic"].get<bool>() ? "yes" : "no") + "\n");
    ds.push_back(d);
  }
  o.doc()["disjuncts"] = ds;
  o.flush("analyze");
  return Ok;
}

// ------------------------------------------------------------------ rewrite

RewriteResult rewrite_for(const OMQ& q, const Dialect& target) {
  if (!q.tbox.functional.empty()) return rewrite_functional(q, target.u);
  if (target.i) return target.u ? rewrite_alci_u(q) : rewrite_alci(q);
  if (target.h) return rewrite_alch_extend_tbox(q);
  return target.u ? rewrite_alc_u(q) : rewrite_alc(q);
}

json rewriting_json(const RewriteResult& r) {
  json j;
  j["document"] = render(r.omq);
  j["fresh"] = r.fresh;
  j["provenance"] = r.provenance;
  return j;
}

int cmd_rewrite(const Common& c) {
  OMQ q = parse_omq(read_file(c.in));
  Dialect target = Dialect::parse(c.target);
  RewriteResult r = rewrite_for(q, target);
  Output o(c);
  o.text(render(r.omq));
  o.doc()["target"] = target.tag();
  o.doc()["rewriting"] = rewriting_json(r);
  o.flush("rewrite");
  return Ok;
}

// ------------------------------------------------------------------- decide

int cmd_decide(const Common& c) {
  OMQ q = parse_omq(read_file(c.in));
  Dialect target = Dialect::parse(c.target);
  int mi = pick(c.max_ind, 5), me = pick(c.max_extra, 3);
  Decision d = decide(q, target, mi, me);
  Output o(c);
  o.text(std::string("verdict ") + verdict_name(d.verdict) + " (target " + d.target + ")\n");
  if (!d.note.empty()) o.text("note " + d.note + "\n");
  json& j = o.doc();
  j["verdict"] = verdict_name(d.verdict);
  j["target"] = d.target;
  j["note"] = d.note;
  j["bounds"] = bounds(d.max_ind, d.max_extra);
  j["bounds"]["exact"] = d.max_ind == 0;
  if (d.witness) {
    j["witness"] = render(*d.witness);
    o.text("witness " + render(*d.witness) + "\n");
  }
  if (d.offending) {
    j["certificate"]["offending"] = render(*d.offending);
    o.text("offending disjunct " + render(*d.offending) + "\n");
  }
  if (d.cycle) {
    j["certificate"]["cycle"] = d.cycle->text();
    o.text("cycle " + d.cycle->text() + "\n");
  }
  if (d.counterexample) {
    j["certificate"]["abox"] = render(*d.counterexample);
    j["certificate"]["individual"] = d.individual;
    o.text("counterexample at " + d.individual + ":\n" + render(*d.counterexample));
  }
  if (d.rewriting) {
    j["rewriting"] = rewriting_json(*d.rewriting);
    o.text("rewriting:\n" + render(d.rewriting->omq));
  }
  if (d.check) j["check"] = d.check->summary();
  o.flush("decide");
  return exit_for(d.verdict);
}

// --------------------------------------------------------------------- eval

int cmd_eval(const Common& c, const std::string& abox_path, const std::string& individual) {
  OMQ q = parse_omq(read_file(c.in));
  ABox a = parse_abox(read_file(abox_path));
  int me = pick(c.max_extra, 2);
  Output o(c);
  o.doc()["bounds"] = bounds(static_cast<int>(a.individuals().size()), me);
  if (!consistent(a, q.tbox)) {
    o.text("inconsistent\n");
    o.doc()["consistent"] = false;
    o.flush("eval");
    return Negative;
  }
  o.doc()["consistent"] = true;
  std::vector<std::string> inds = individual.empty() ? a.individuals() : std::vector<std::string>{individual};
  json ans = json::object();
  bool unknown = false;
  for (const auto& i : inds) {
    Verdict3 v = certain_answer(q, a, i, me);
    ans[i] = answer_name(v.answer);
    unknown = unknown || v.answer == Answer::Unknown;
    o.text(i + " " + answer_name(v.answer) + "\n");
  }
  o.doc()["answers"] = ans;
  o.flush("eval");
  return unknown ? Undetermined : Ok;
}

// ------------------------------------------------------------------- verify

// A document field holds either the OMQ text or a path relative to the
// pair file.
OMQ load_omq_field(const json& j, const char* key, const std::filesystem::path& base, const ParseOptions& po) {
  if (!j.contains(key) || !j[key].is_string()) throw Error(ErrorKind::Parse, std::string("pair file needs \"") + key + "\"");
  std::string v = j[key].get<std::string>();
  if (v.find('[') == std::string::npos) {
    std::filesystem::path p = base / v;
    return parse_omq(read_file(p.string()), po);
  }
  return parse_omq(v, po);
}

int cmd_verify(const Common& c, const std::string& rewriting_path, const std::string& mode) {
  OMQ q, qp;
  if (!rewriting_path.empty()) {
    q = parse_omq(read_file(c.in));
    qp = parse_omq(read_file(rewriting_path), {true});
  } else {
    json pair;
    try {
      pair = json::parse(read_file(c.in));
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Parse, e.what());
    }
    auto base = std::filesystem::path(c.in).parent_path();
    q = load_omq_field(pair, "q", base, {});
    qp = load_omq_field(pair, "rewriting", base, {true});
  }
  VerifyOptions vo;
  vo.max_ind = pick(c.max_ind, 3);
  vo.max_extra = pick(c.max_extra, 2);
  vo.deadline = c.deadline;
  if (mode == "exhaustive") vo.mode = VerifyMode::Exhaustive;
  else if (mode == "monotone") vo.mode = VerifyMode::Monotone;
  else if (mode != "auto") throw Error(ErrorKind::Parse, "unknown mode " + mode);
  VerificationReport r = verify_rewriting(q, qp, vo);
  Output o(c);
  o.text(r.summary() + "\n");
  json ds = json::array();
  for (const auto& d : r.discrepancies) {
    ds.push_back({{"abox", render(d.abox)}, {"individual", d.individual}, {"q", answer_name(d.q)},
                  {"rewriting", answer_name(d.q_prime)}});
    o.text("discrepancy at " + d.individual + " (q " + answer_name(d.q) + ", rewriting " +
           answer_name(d.q_prime) + "):\n" + render(d.abox));
  }
  int code = !r.pass() ? Negative : !r.complete() ? Undetermined : Ok;
  json& j = o.doc();
  j["verdict"] = code == Ok ? "pass" : code == Negative ? "fail" : "incomplete";
  j["checked"] = r.checked;
  j["unknown"] = r.unknown;
  j["discrepancies"] = ds;
  j["mode"] = r.mode;
  j["timed_out"] = r.timed_out;
  j["elapsed"] = r.elapsed;
  j["bounds"] = bounds(r.max_ind, r.max_extra);
  o.flush("verify");
  return code;
}

// -------------------------------------------------------------------- mmsnp

std::set<std::string> split_names(const std::string& s) {
  std::set<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.insert(item);
  }
  return out;
}

int cmd_mmsnp_eval(const Common& c, const std::string& instance) {
  auto s = mmsnp::parse_sentence(read_file(c.in));
  auto i = mmsnp::parse_instance(read_file(instance));
  bool v = mmsnp::eval(s, i);
  Output o(c);
  o.text(v ? "true\n" : "false\n");
  o.doc()["value"] = v;
  o.flush("mmsnp-eval");
  return v ? Ok : Negative;
}

int cmd_mmsnp_transform(const Common& c, const std::string& name, const std::string& n1, const std::string& n2) {
  auto s = mmsnp::parse_sentence(read_file(c.in));
  auto t = name == "mmsnp-acyc" ? mmsnp::build_phi_acyc(s) : mmsnp::build_phi_colored(s, split_names(n1), split_names(n2));
  Output o(c);
  o.text(mmsnp::render(t));
  o.doc()["sentence"] = mmsnp::render(t);
  o.doc()["rules"] = t.rules.size();
  o.flush(name);
  return Ok;
}

int cmd_mmsnp_check(const Common& c, int max_dom, int samples, bool du_only) {
  auto s = mmsnp::parse_sentence(read_file(c.in));
  mmsnp::SearchOptions so;
  so.max_dom = max_dom;
  so.seed = c.seed;
  so.samples = samples;
  auto r = du_only ? mmsnp::check_du_preservation(s, so) : mmsnp::check_csp_definable(s, so);
  Output o(c);
  o.text(std::string(answer_name(r.verdict.answer)) + ": " + r.verdict.note + "\n");
  json& j = o.doc();
  j["verdict"] = answer_name(r.verdict.answer);
  j["note"] = r.verdict.note;
  j["instances_checked"] = r.instances_checked;
  j["bounds"] = {{"max_dom", max_dom}, {"samples", samples}, {"seed", c.seed}};
  if (r.certificate) {
    j["certificate"] = {{"instance", mmsnp::render(r.certificate->instance)}, {"reason", r.certificate->reason}};
    o.text(mmsnp::render(r.certificate->instance));
  }
  o.flush("mmsnp-check");
  return exit_for(r.verdict.answer);
}

// -------------------------------------------------------------- parse-check

int cmd_parse_check(const Common& c, std::string kind, bool reserved) {
  std::string text = read_file(c.in);
  ParseOptions po{reserved};
  if (kind.empty()) {
    auto ext = std::filesystem::path(c.in).extension().string();
    kind = ext.empty() ? "omq" : ext.substr(1);
  }
  std::string rendered;
  if (kind == "omq") rendered = render(parse_omq(text, po));
  else if (kind == "tbox") rendered = render(parse_tbox(text, po));
  else if (kind == "abox") rendered = render(parse_abox(text, po));
  else if (kind == "ucq" || kind == "cq") rendered = render(parse_ucq(text, po));
  else if (kind == "concept") rendered = render(parse_concept(text, po)) + "\n";
  else if (kind == "mmsnp") rendered = mmsnp::render(mmsnp::parse_sentence(text));
  else if (kind == "inst" || kind == "instance") rendered = mmsnp::render(mmsnp::parse_instance(text));
  else throw Error(ErrorKind::Parse, "unknown kind " + kind);
  Output o(c);
  o.text(rendered);
  o.doc()["kind"] = kind;
  o.doc()["rendered"] = rendered;
  o.flush("parse-check");
  return Ok;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--in", c.in, "Input file");
  app->add_option("--out", c.out, "Write output to a file");
  app->add_flag("--json", c.json, "Machine-readable output");
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--max-ind", c.max_ind, "Individual bound");
  app->add_option("--max-extra", c.max_extra, "Extra domain elements for countermodels");
  app->add_option("--deadline", c.deadline, "Time limit in seconds (0 = none)");
  app->add_option("--target", c.target, "Target dialect, e.g. alc, alci, alc+u, alcif");
  app->add_option("--jobs", c.jobs, "Worker count (accepted; work runs on one thread)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ontology-mediated query rewriting toolkit"};
  app.require_subcommand(1);
  Common c;

  auto* analyze = app.add_subcommand("analyze", "Structural report for an OMQ");
  auto* rewrite = app.add_subcommand("rewrite", "Construct an IQ rewriting");
  auto* decide_cmd = app.add_subcommand("decide", "Decide IQ-rewritability");
  auto* eval_cmd = app.add_subcommand("eval", "Certain answers over an ABox");
  auto* verify = app.add_subcommand("verify", "Check a rewriting on small ABoxes");
  auto* m_eval = app.add_subcommand("mmsnp-eval", "Evaluate an MMSNP sentence");
  auto* m_acyc = app.add_subcommand("mmsnp-acyc", "Acyclic-body sentence");
  auto* m_col = app.add_subcommand("mmsnp-colored", "Colour-split sentence");
  auto* m_check = app.add_subcommand("mmsnp-check", "Bounded CSP-definability check");
  auto* parse = app.add_subcommand("parse-check", "Parse and render a document");
  for (auto* s : {analyze, rewrite, decide_cmd, eval_cmd, verify, m_eval, m_acyc, m_col, m_check, parse}) add_common(s, c);

  std::string abox, individual, rewriting, mode = "auto", instance, n1, n2, kind;
  int max_dom = 5, samples = 60;
  bool du_only = false, reserved = false;
  eval_cmd->add_option("--abox", abox, "ABox file")->required();
  eval_cmd->add_option("--individual", individual, "Only this individual");
  verify->add_option("--rewriting", rewriting, "Rewriting document (otherwise --in is a JSON pair file)");
  verify->add_option("--mode", mode, "auto, exhaustive or monotone");
  m_eval->add_option("--instance", instance, "Instance file")->required();
  m_col->add_option("--n1", n1, "Comma-separated nullary predicates");
  m_col->add_option("--n2", n2, "Comma-separated nullary predicates");
  m_check->add_option("--max-dom", max_dom, "Domain bound");
  m_check->add_option("--samples", samples, "Random instances per domain size");
  m_check->add_flag("--du-only", du_only, "Only check preservation under disjoint union");
  parse->add_flag("--allow-reserved", reserved, "Accept generated '@' names");
  parse->add_option("--kind", kind, "omq, tbox, abox, ucq, concept, mmsnp or instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? Ok : Usage;
  }

  try {
    if (*analyze) return cmd_analyze(c);
    if (*rewrite) return cmd_rewrite(c);
    if (*decide_cmd) return cmd_decide(c);
    if (*eval_cmd) return cmd_eval(c, abox, individual);
    if (*verify) return cmd_verify(c, rewriting, mode);
    if (*m_eval) return cmd_mmsnp_eval(c, instance);
    if (*m_acyc) return cmd_mmsnp_transform(c, "mmsnp-acyc", "", "");
    if (*m_col) return cmd_mmsnp_transform(c, "mmsnp-colored", n1, n2);
    if (*m_check) return cmd_mmsnp_check(c, max_dom, samples, du_only);
    if (*parse) return cmd_parse_check(c, kind, reserved);
  } catch (const Error& e) {
    int code = e.kind() == ErrorKind::ResourceLimit ? Limit : Usage;
    if (c.json) {
      json j{{"schema", kSchema}, {"error", e.what()}, {"exit", code}};
      std::cout << j.dump(2) << "\n";
    }
    std::cerr << "error: " << e.what() << "\n";
    return code;
  }
  return Usage;
}
