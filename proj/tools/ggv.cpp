// ggv — command-line front end: check, elaborate, run, rel.

#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ggv/driver.hpp"
#include "ggv/json_ast.hpp"
#include "ggv/relations.hpp"
#include "ggv/runtime.hpp"

namespace {

using namespace ggv;

const LabelInfo* label_info(const std::vector<LabelInfo>& table, const BlameLabel& p) {
  for (const auto& li : table)
    if (li.id == p.id) return &li;
  return nullptr;
}

std::string blame_report(const BlameInfo& b, const std::vector<LabelInfo>& table) {
  std::string out = "blame " + show(b.p);
  if (!b.is_gc) out += " " + show(b.q);
  out += " {";
  bool first = true;
  for (const auto& n : b.linears) {
    if (!first) out += ",";
    first = false;
    out += n;
  }
  out += "} at step " + std::to_string(b.at_step);
  const LabelInfo* pi = label_info(table, b.p);
  if (b.is_gc) {
    if (pi) out += ", cast from " + pi->span.str();
  } else {
    const LabelInfo* qi = label_info(table, b.q);
    if (pi && qi) out += ", casts from " + pi->span.str() + " and " + qi->span.str();
  }
  return out;
}

int cmd_check(const std::string& path) {
  LoadedProgram prog = load_typed_program(path);
  std::cout << ": " << show(prog.type) << "\n";
  std::cout << "linear: {}\n";
  return 0;
}

int cmd_elaborate(const std::string& path, bool untyped, bool labels_flag, bool json_flag) {
  LabelAllocator labels;
  ITermPtr term;
  if (untyped) {
    term = load_untyped_program(path, labels);
  } else {
    LoadedProgram prog = load_typed_program(path);
    term = elaborate_program(prog, labels);
  }
  if (json_flag) {
    std::cout << term_to_json(term).dump(2) << "\n";
  } else {
    std::cout << show(term) << "\n";
  }
  if (labels_flag) {
    std::cout << "labels:\n";
    for (const auto& li : labels.table())
      std::cout << "  " << show(BlameLabel{li.id, false}) << "  " << li.span.str() << "  "
                << show(li.from) << " => " << show(li.to) << "\n";
  }
  return 0;
}

int cmd_run(const std::string& path, bool untyped, std::optional<uint64_t> seed,
            int64_t max_steps, bool trace, bool tc_each, bool to_quiescence) {
  LabelAllocator labels;
  ITermPtr term;
  if (untyped) {
    term = load_untyped_program(path, labels);
  } else {
    LoadedProgram prog = load_typed_program(path);
    term = elaborate_program(prog, labels);
  }

  RunOptions opts;
  if (seed) {
    opts.sched.policy = SchedulerPolicy::seeded_random;
    opts.sched.seed = *seed;
  }
  opts.max_steps = max_steps;
  opts.typecheck_each_step = tc_each;
  opts.run_to_quiescence = to_quiescence;
  if (trace)
    opts.on_step = [](int64_t k, const std::string& rule, const Configuration& cfg) {
      std::cout << "#" << k << "  " << rule << "  " << show(cfg) << "\n";
    };

  Outcome out = run(term, opts);
  switch (out.kind) {
    case Outcome::Kind::quiescent:
      std::cerr << "quiescent after " << out.steps << " steps\n";
      if (out.main_value) std::cout << "result: " << show(out.main_value) << "\n";
      return 0;
    case Outcome::Kind::blamed:
      for (const auto& b : out.blames) std::cout << blame_report(b, labels.table()) << "\n";
      return 10;
    case Outcome::Kind::stuck:
      std::cout << (out.stuck_reason == Outcome::StuckReason::deadlock
                        ? "stuck: deadlock after "
                        : "stuck: open name after ")
                << out.steps << " steps\n";
      return 11;
    case Outcome::Kind::step_limit:
      std::cout << "step limit reached (" << out.steps << ")\n";
      return 12;
  }
  return 3;
}

int cmd_rel(const std::string& rel, const std::string& t1, const std::string& t2) {
  TypePtr a = parse_type(t1);
  TypePtr b = parse_type(t2);
  if (rel == "sub") std::cout << (sub(a, b) ? "true" : "false") << "\n";
  else if (rel == "csub") std::cout << (consistent_sub(a, b) ? "true" : "false") << "\n";
  else if (rel == "pos") std::cout << (pos_sub(a, b) ? "true" : "false") << "\n";
  else if (rel == "neg") std::cout << (neg_sub(a, b) ? "true" : "false") << "\n";
  else if (rel == "prec") std::cout << (precision(a, b) ? "true" : "false") << "\n";
  else if (rel == "join" || rel == "meet") {
    auto r = rel == "join" ? join(a, b) : meet(a, b);
    std::cout << (r ? show(*r) : "undefined") << "\n";
  } else {
    std::cerr << "unknown relation " << rel << "\n";
    return 1;
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradual GV: typechecker, cast-inserting elaborator, and simulator"};
  app.require_subcommand(1);

  std::string path, rel_name, type1, type2;
  bool untyped = false, labels_flag = false, json_flag = false;
  bool trace = false, tc_each = false, to_quiescence = false;
  int64_t max_steps = 100000;
  std::optional<uint64_t> seed;
  uint64_t seed_value = 0;

  auto* check = app.add_subcommand("check", "typecheck a .ggv program");
  check->add_option("file", path)->required();

  auto* elab = app.add_subcommand("elaborate", "print the cast-inserted internal term");
  elab->add_option("file", path)->required();
  elab->add_flag("--untyped", untyped, "treat the input as a unityped .ugv program");
  elab->add_flag("--labels", labels_flag, "append the blame-label table");
  elab->add_flag("--json", json_flag, "emit the internal AST as JSON");

  auto* runc = app.add_subcommand("run", "elaborate and execute a program");
  runc->add_option("file", path)->required();
  runc->add_flag("--untyped", untyped, "treat the input as a unityped .ugv program");
  auto* seed_opt = runc->add_option("--seed", seed_value, "random scheduler seed");
  runc->add_option("--max-steps", max_steps, "step budget (default 100000)");
  runc->add_flag("--trace", trace, "print one line per reduction step");
  runc->add_flag("--typecheck-each-step", tc_each, "re-typecheck the configuration per step");
  runc->add_flag("--run-to-quiescence", to_quiescence, "do not halt at the first blame");

  auto* rel = app.add_subcommand("rel", "query a type relation");
  rel->add_option("relation", rel_name, "sub|csub|pos|neg|prec|join|meet")->required();
  rel->add_option("type1", type1)->required();
  rel->add_option("type2", type2)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmd_check(path);
    if (*elab) return cmd_elaborate(path, untyped, labels_flag, json_flag);
    if (*runc) {
      if (seed_opt->count() > 0) seed = seed_value;
      return cmd_run(path, untyped, seed, max_steps, trace, tc_each, to_quiescence);
    }
    if (*rel) return cmd_rel(rel_name, type1, type2);
  } catch (const ggv::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ggv::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ggv::TypeError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ggv::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
