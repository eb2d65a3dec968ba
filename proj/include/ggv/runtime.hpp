#pragma once

// Small-step execution of GGV_i configurations: deterministic expression
// reduction, scheduled rendezvous, cast collapse/collide, linearity cells,
// garbage-collection blame, and run-time error detection.

#include <functional>
#include <optional>
#include <random>

#include "ggv/internal.hpp"

namespace ggv {

enum class SchedulerPolicy { round_robin, seeded_random };

struct Scheduler {
  SchedulerPolicy policy = SchedulerPolicy::round_robin;
  uint64_t seed = 0;
};

struct BlameInfo {
  bool is_gc = false;
  BlameLabel p{0, false}, q{0, false}; // q meaningless for gc blame
  std::set<std::string> linears;
  int64_t at_step = 0;
};

struct Outcome {
  enum class Kind { quiescent, blamed, stuck, step_limit };
  enum class StuckReason { deadlock, open_name };

  Kind kind = Kind::quiescent;
  StuckReason stuck_reason = StuckReason::deadlock;
  Configuration final_config;
  std::vector<BlameInfo> blames;
  int64_t steps = 0;
  ITermPtr main_value; // value of the root process when it finished
};

struct RunOptions {
  Scheduler sched;
  int64_t max_steps = 100000;
  bool typecheck_each_step = false;
  bool run_to_quiescence = false;
  // called after every applied step with (step number, rule name, config)
  std::function<void(int64_t, const std::string&, const Configuration&)> on_step;
};

// One expression-level step under the unique evaluation context.
struct ExprStep {
  enum class Kind { stepped, value, blocked };
  Kind kind;
  ITermPtr term;       // stepped: the reduced term
  std::string rule;    // stepped
  std::string blocked; // blocked: description of the waiting primitive
};

ExprStep step_expr(const ITermPtr& e);

// Enabled process-level redexes, in deterministic scan order.
struct RedexDesc {
  std::string rule;
  std::vector<size_t> processes;
};

std::vector<RedexDesc> enumerate_redexes(const Configuration& cfg);

// Cells whose reference is unreachable from every process.
std::vector<std::string> gc_scan(const Configuration& cfg);

struct ErrorShape {
  int case_no; // 1..4 per the run-time error taxonomy
  std::string detail;
};

std::optional<ErrorShape> detect_error(const Configuration& cfg);

// Applies one scheduled redex; returns its rule name, or nullopt when no
// redex is enabled. `cursor` is the round-robin position, `rng` drives the
// seeded_random policy.
std::optional<std::string> step_config(Configuration& cfg, SchedulerPolicy policy,
                                       size_t& cursor, std::mt19937_64& rng,
                                       std::vector<BlameInfo>* new_blames = nullptr,
                                       int64_t step_no = 0);

Outcome run(const ITermPtr& term, const RunOptions& opts = {});

} // namespace ggv
