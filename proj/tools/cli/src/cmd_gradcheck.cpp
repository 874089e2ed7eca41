#include <chrono>
#include <iomanip>

#include "rsca/gradcheck.hpp"
#include "rsca_cli/commands.hpp"

namespace rsca::cli {

int cmd_gradcheck(const GradcheckCmdOptions& opt, Streams io) {
  std::vector<GradOp> ops;
  for (const auto& name : opt.ops) {
    if (name == "all") {
      ops.assign(kAllGradOps.begin(), kAllGradOps.end());
      break;
    }
    ops.push_back(parse_grad_op(name));
  }
  if (ops.empty()) ops.assign(kAllGradOps.begin(), kAllGradOps.end());
  if (opt.trials <= 0) {
    io.err << "gradcheck: warning: 0 trials requested; nothing is checked (vacuous pass)\n";
  }

  GradCheckOptions gopt;
  gopt.seed = opt.seed;
  gopt.trials = std::max(opt.trials, 0);
  gopt.inject_bug = opt.inject_bug;
  if (opt.inject_bug) io.out << "gradcheck: analytic gradients deliberately perturbed by 1%\n";

  bool all_pass = true;
  for (GradOp op : ops) {
    const auto t0 = std::chrono::steady_clock::now();
    const GradCheckReport rep = run_gradcheck(op, gopt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all_pass = all_pass && rep.passed;
    io.out << std::left << std::setw(15) << to_string(op) << std::right << " trials " << std::setw(3) << rep.trials
           << "  max rel err " << std::scientific << std::setprecision(3) << rep.worst_error << std::fixed
           << std::setprecision(2) << "  " << secs << " s  " << (rep.passed ? "PASS" : "FAIL") << std::defaultfloat
           << "\n";
  }
  io.out << "gradcheck: " << (all_pass ? "all passed" : "FAILED") << " (tolerance " << gopt.tolerance << ")\n";
  return all_pass ? 0 : 1;
}

}  // namespace rsca::cli
