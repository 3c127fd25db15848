// motscore command-line front end: score scenarios against all measures,
// force the exact NLL oracle, sweep the NLL<->GOSPA equivalence, and generate
// random scenario fixtures.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "motscore/baselines.hpp"
#include "motscore/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInfeasible = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw motscore::ValidationError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw motscore::ValidationError("cannot open output file: " + out_path);
  out << text;
}

void warn_duplicates(const motscore::Scenario& scenario) {
  if (scenario.ground_truth().has_duplicates()) {
    std::cerr << "warning: ground truth contains duplicate elements; RFS set semantics"
                 " assume distinct objects\n";
  }
}

int run_score(const std::string& scenario_path, std::size_t q, bool exact,
              const std::string& format, const std::string& out_path, bool force_exact) {
  const motscore::Scenario scenario = motscore::parse_scenario(read_file(scenario_path));
  warn_duplicates(scenario);
  motscore::NllConfig config;
  config.q = q;
  config.prefer_exact = exact;
  config.force_exact = force_exact;
  const motscore::ScoreReport report = motscore::score_scenario(scenario, config);
  const auto fmt = format == "machine" ? motscore::ReportFormat::Machine
                                       : motscore::ReportFormat::Human;
  write_output(out_path, motscore::emit_report(report, fmt));
  return kExitOk;
}

int run_theorem1(double rho, double volume, int dim, std::uint64_t seed, int trials,
                 const std::string& demo_path) {
  if (!demo_path.empty()) {
    const auto demo = motscore::parse_theorem1_demo(read_file(demo_path));
    const auto check = motscore::verify_theorem1(demo.construction, demo.ground_truth);
    std::cout << "demo: lhs=" << check.lhs << " rhs=" << check.rhs
              << " |lhs-rhs|=" << std::abs(check.lhs - check.rhs)
              << " gospa=" << check.gospa_part << "\n";
    return kExitOk;
  }

  if (!(rho > 0.0 && rho < 1.0)) {
    throw motscore::ValidationError("--rho must lie strictly inside (0, 1)");
  }
  if (!(volume > 0.0)) throw motscore::ValidationError("--volume must be positive");
  if (dim < 1) throw motscore::ValidationError("--dim must be at least 1");
  if (trials < 1) throw motscore::ValidationError("--trials must be at least 1");

  const double side = std::pow(volume, 1.0 / dim);
  std::mt19937_64 engine(seed);
  auto uniform = [&engine](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine() >> 11) * 0x1.0p-53);
  };

  double max_diff = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t nx = engine() % 6;
    const std::size_t ny = engine() % 6;
    std::vector<motscore::StateVector> centers(nx), gt(ny);
    for (auto& x : centers) {
      x.resize(dim);
      for (int a = 0; a < dim; ++a) x(a) = uniform(0.0, side);
    }
    for (auto& y : gt) {
      y.resize(dim);
      for (int a = 0; a < dim; ++a) y(a) = uniform(0.0, side);
    }
    motscore::Box region(motscore::StateVector::Zero(dim),
                         motscore::StateVector::Constant(dim, side));
    const auto construction =
        motscore::Theorem1Construction::from_rho(rho, std::move(region), std::move(centers));
    const auto check =
        motscore::verify_theorem1(construction, motscore::GroundTruthSet(std::move(gt)));
    max_diff = std::max(max_diff, std::abs(check.lhs - check.rhs));
  }
  std::cout << "trials=" << trials << " rho=" << rho << " volume=" << volume << " dim=" << dim
            << " max|lhs-rhs|=" << max_diff << "\n";
  return kExitOk;
}

int run_gen(std::uint64_t seed, const motscore::ScenarioLimits& limits,
            const std::string& out_path) {
  const motscore::Scenario scenario = motscore::generate_random_scenario(seed, limits);
  write_output(out_path, motscore::serialize_scenario(scenario));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NLL-based scoring of multi-object tracking posteriors"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::size_t q = 10;
  bool exact = false;
  std::string format = "human";
  std::string out_path;

  auto* score = app.add_subcommand("score", "score a scenario with NLL, GOSPA and CLEAR MOT");
  score->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  score->add_option("--q", q, "assignments per hypothesis for the Murty approximation");
  score->add_flag("--exact", exact, "prefer the exact NLL when within the oracle scale");
  score->add_option("--format", format, "human | machine")
      ->check(CLI::IsMember({"human", "machine"}));
  score->add_option("--out", out_path, "write the report here instead of stdout");

  auto* oracle = app.add_subcommand("oracle", "exact NLL only; errors beyond the oracle scale");
  oracle->add_option("--scenario", scenario_path, "scenario JSON file")->required();

  double rho = 0.9;
  double volume = 100.0;
  int dim = 2;
  std::uint64_t seed = 1;
  int trials = 1000;
  std::string demo_path;
  auto* theorem1 = app.add_subcommand("theorem1", "verify the NLL<->GOSPA equivalence");
  theorem1->add_option("--rho", rho, "shared existence probability");
  theorem1->add_option("--volume", volume, "field-of-view volume");
  theorem1->add_option("--dim", dim, "state dimension");
  theorem1->add_option("--seed", seed, "sweep seed");
  theorem1->add_option("--trials", trials, "number of random constructions");
  theorem1->add_option("--demo", demo_path, "run a single check from a demo JSON file");

  motscore::ScenarioLimits limits;
  auto* gen = app.add_subcommand("gen", "generate a random scenario fixture");
  gen->add_option("--seed", seed, "generator seed")->required();
  gen->add_option("--max-objects", limits.max_objects, "maximum ground-truth objects");
  gen->add_option("--max-bernoullis", limits.max_bernoullis, "maximum Bernoulli components");
  gen->add_option("--max-hypotheses", limits.max_hypotheses, "maximum MB hypotheses");
  gen->add_option("--dim", limits.dimension, "state dimension");
  gen->add_option("--out", out_path, "output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (score->parsed()) return run_score(scenario_path, q, exact, format, out_path, false);
    if (oracle->parsed()) return run_score(scenario_path, q, false, "human", "", true);
    if (theorem1->parsed()) return run_theorem1(rho, volume, dim, seed, trials, demo_path);
    if (gen->parsed()) return run_gen(seed, limits, out_path);
  } catch (const motscore::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const motscore::SizeLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const motscore::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
