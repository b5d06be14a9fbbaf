// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "kripkediag/agents.hpp"
#include "kripkediag/formula_parser.hpp"
#include "kripkediag/model_io.hpp"
#include "kripkediag/scenarios.hpp"
#include "kripkediag/sim_io.hpp"
#include "support/oracle.hpp"

using namespace kdiag;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(const char* id, const char* title, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0 && secs >= limit_seconds && out.ok) {
    out.ok = false;
    char buf[96];
    std::snprintf(buf, sizeof buf, "took %.3fs, limit %.1fs", secs, limit_seconds);
    out.detail = buf;
  }
  if (!out.ok) ++failures;
  std::printf("[%s] %s %s (%.3fs)%s%s\n", out.ok ? "PASS" : "FAIL", id, title, secs, out.detail.empty() ? "" : ": ",
              out.detail.c_str());
  std::fflush(stdout);
}

modal::AxiomSet shipped_axioms() {
  return lang::load_axiom_file(std::string(KDIAG_DATA_DIR) + "/axioms/accelerator.ax").to_axiom_set();
}

agents::SystemConfig rule_config() {
  agents::SystemConfig cfg;
  cfg.axioms = shipped_axioms();
  cfg.topology = agents::load_topology_file(std::string(KDIAG_DATA_DIR) + "/topology/accelerator_sector.json");
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main() {
  criterion("AC1", "cascading cooling: cooling root, diagnosis atoms, w0 pruned", 1.0, [] {
    Outcome o;
    auto d = agents::run_episode(sim::builtin_scenario("cascading_cooling"), rule_config());
    o.require(d.root_cause == vocab::cooling_fault_reported,
              "root cause " + (d.root_cause ? d.root_cause->name() : std::string("none")));
    const auto& v = d.final_model.valuation(d.final_model.current());
    o.require(v.contains(vocab::cooling_insufficient), "cooling_insufficient missing");
    o.require(v.contains(vocab::rf_overheats), "RF_overheats missing");
    o.require(!d.final_model.has_world("w0"), "w0 still present");
    return o;
  });

  criterion("AC2", "direct klystron: klystron root, single-world model", 1.0, [] {
    Outcome o;
    auto d = agents::run_episode(sim::builtin_scenario("direct_klystron"), rule_config());
    o.require(d.root_cause == vocab::klystron_fault_reported, "wrong root cause");
    o.require(d.final_model.worlds().size() == 1, std::to_string(d.final_model.worlds().size()) + " worlds");
    return o;
  });

  criterion("AC3", "confounded klystron: no vacuum reports, same diagnosis as direct", 1.0, [] {
    Outcome o;
    auto direct = agents::run_episode(sim::builtin_scenario("direct_klystron"), rule_config());
    auto conf = agents::run_episode(sim::builtin_scenario("confounded_klystron"), rule_config());
    for (const auto& e : conf.trace)
      o.require(!(e.kind == "report_received" && e.payload["agent"] == agents::kVacuumAgent),
                "vacuum report at tick " + std::to_string(e.tick));
    o.require(conf.root_cause == direct.root_cause, "root cause differs");
    o.require(conf.final_model.valuation(conf.final_model.current()) ==
                  direct.final_model.valuation(direct.final_model.current()),
              "final valuation differs");
    return o;
  });

  criterion("AC4", "reversed-causality candidate rejected naming causal_direction", 0, [] {
    Outcome o;
    using namespace vocab;
    const auto prior = agents::initial_belief();
    modal::HypotheticalUpdate rf_world;
    rf_world.add = {rf_power_fault_reported, rf_fault_is_root_cause};
    rf_world.new_edges = {{"w0", std::string(modal::kNewWorld)},
                          {std::string(modal::kNewWorld), std::string(modal::kNewWorld)}};
    rf_world.new_current = std::string(modal::kNewWorld);
    auto candidate = modal::with_hypothesis(prior, rf_world);
    const auto anchor = candidate.current();
    modal::HypotheticalUpdate consequence;
    consequence.add = {klystron_fault_reported};
    consequence.new_edges = {{anchor, std::string(modal::kNewWorld)}};
    candidate = modal::with_hypothesis(candidate, consequence);

    for (int run = 0; run < 2; ++run) {
      auto r = modal::commit(prior, candidate, shipped_axioms());
      o.require(!r.accepted(), "candidate accepted");
      o.require(r.validation.violates("causal_direction"), "causal_direction not named");
      o.require(r.belief == prior, "committed belief changed");
    }

    // The same guardrail through the reasoner with an adversarial theory.
    struct Reversed : hypo::RuleBasedGenerator {
      hypo::CausalTheory theorize(std::span<const agents::FaultReport>, const agents::TopologyGraph*) override {
        return {rf_power_fault_reported, {klystron_fault_reported}};
      }
    } reversed;
    auto cfg = rule_config();
    cfg.generator = &reversed;
    auto d = agents::run_episode(sim::builtin_scenario("direct_klystron"), cfg);
    bool named = false;
    for (const auto& e : d.trace)
      if (e.kind == "reject" && e.payload.value("stage", "") == "axioms")
        for (const auto& v : e.payload["violations"]) named |= v["axiom"] == "causal_direction";
    o.require(named, "reasoner trace lacks causal_direction rejection");
    o.require(d.final_model == agents::initial_belief(), "reasoner model changed");
    return o;
  });

  criterion("AC5", "forced vacuum report still yields klystron; vacuum-rooted RF theory rejected", 0, [] {
    Outcome o;
    using namespace vocab;
    auto spec = sim::builtin_scenario("confounded_klystron");
    agents::FaultReport forced(agents::kVacuumAgent,
                               hypo::AnomalyContext::make(sim::sector::kVacuumPressure, 4, 5.8, 5.0),
                               hypo::Classification{hypo::Subsystem::Vacuum});
    auto cfg = rule_config();
    cfg.injected_reports[4] = {forced};
    auto d = agents::run_episode(spec, cfg);
    o.require(d.root_cause == klystron_fault_reported, "forced vacuum changed the root cause");
    o.require(d.theory && !d.theory->chain().contains(vacuum_fault_reported), "vacuum in the causal chain");

    struct BlameVacuum : hypo::RuleBasedGenerator {
      hypo::CausalTheory theorize(std::span<const agents::FaultReport>, const agents::TopologyGraph*) override {
        return {vacuum_fault_reported, {rf_power_fault_reported}};
      }
    } adversary;
    cfg.generator = &adversary;
    auto bad = agents::run_episode(spec, cfg);
    bool vacuum_prune = false;
    for (const auto& e : bad.trace)
      if (e.kind == "axiom_check")
        for (const auto& v : e.payload["violations"]) vacuum_prune |= v["axiom"] == "vacuum_prune";
    o.require(vacuum_prune, "vacuum_prune did not fire");
    o.require(!bad.committed(), "vacuum-rooted theory committed");
    return o;
  });

  criterion("AC6", "eval_at matches brute-force oracle; duality holds (>=1000 cases)", 5.0, [] {
    Outcome o;
    std::mt19937_64 rng(0xAC6);
    int cases = 0;
    for (int i = 0; i < 1500; ++i) {
      auto frame = oracle::random_frame(rng);
      auto term = oracle::random_term(rng, 4);
      auto model = oracle::to_kernel(frame);
      auto f = oracle::to_kernel(*term);
      auto expected = oracle::label(frame, *term);
      int w = std::uniform_int_distribution<int>(0, frame.n - 1)(rng);
      const auto world = oracle::world_name(w);
      ++cases;
      o.require(modal::eval_at(model, world, f) == expected[w], "oracle mismatch on " + lang::render(f));
      o.require(modal::eval_at(model, world, modal::Formula::box(f)) ==
                    modal::eval_at(model, world,
                                   modal::Formula::negation(modal::Formula::diamond(modal::Formula::negation(f)))),
                "box duality fails on " + lang::render(f));
      o.require(modal::eval_at(model, world, modal::Formula::diamond(f)) ==
                    modal::eval_at(model, world,
                                   modal::Formula::negation(modal::Formula::box(modal::Formula::negation(f)))),
                "diamond duality fails on " + lang::render(f));
    }
    o.require(cases >= 1000, "too few cases");
    return o;
  });

  criterion("AC7", "parse(render(f)) == f on >=1000 ASTs; shipped axioms reparse", 2.0, [] {
    Outcome o;
    std::mt19937_64 rng(0xAC7);
    for (int i = 0; i < 1500; ++i) {
      auto f = oracle::random_formula(rng, 6);
      o.require(lang::parse(lang::render(f)) == f, "round trip fails on " + lang::render(f));
    }
    auto file = lang::load_axiom_file(std::string(KDIAG_DATA_DIR) + "/axioms/accelerator.ax");
    o.require(file.entries.size() == 3, "fixture does not hold three axioms");
    const char* labels[] = {"causal_direction", "fault_exclusion", "vacuum_prune"};
    for (std::size_t i = 0; i < file.entries.size() && i < 3; ++i) {
      const auto& e = file.entries[i];
      o.require(e.label == labels[i], "unexpected label " + e.label);
      auto again = lang::parse(lang::render(e.formula));
      o.require(again == e.formula, "axiom " + e.label + " does not reparse");
      o.require(lang::render(again) == lang::render(e.formula), "axiom " + e.label + " renders unstably");
    }
    return o;
  });

  criterion("AC8", "equal seeds give byte-identical timeseries.csv, diagnosis.json, final_model.json", 0, [] {
    Outcome o;
    for (auto id : sim::kBuiltinScenarioIds) {
      for (std::uint64_t seed : {sim::kDefaultSeed, std::uint64_t{7}}) {
        auto spec = sim::builtin_scenario(id);
        spec.seed = seed;
        auto a = agents::run_episode_full(spec, rule_config());
        auto b = agents::run_episode_full(spec, rule_config());
        const std::string tag = std::string(id) + "/" + std::to_string(seed);
        o.require(sim::to_csv(a.records) == sim::to_csv(b.records), tag + " timeseries differs");
        o.require(agents::dump_diagnosis(a.diagnosis) == agents::dump_diagnosis(b.diagnosis),
                  tag + " diagnosis differs");
        o.require(modal::dump_model(a.diagnosis.final_model) == modal::dump_model(b.diagnosis.final_model),
                  tag + " final model differs");
      }
    }
#ifdef KDIAG_BIN
    const auto root = fs::temp_directory_path() / "kdiag_acceptance";
    fs::remove_all(root);
    for (auto id : sim::kBuiltinScenarioIds) {
      for (const char* run : {"a", "b"}) {
        const auto dir = root / std::string(id) / run;
        std::string cmd = std::string(KDIAG_BIN) + " run --scenario " + std::string(id) + " --out " +
                          dir.string() + " > /dev/null 2>&1";
        int status = std::system(cmd.c_str());
        o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "kdiag run failed for " + std::string(id));
      }
      for (auto f : {"timeseries.csv", "diagnosis.json", "final_model.json"}) {
        auto a = slurp(root / std::string(id) / "a" / f);
        o.require(!a.empty() && a == slurp(root / std::string(id) / "b" / f),
                  std::string(id) + " " + f + " differs between CLI runs");
      }
    }
    fs::remove_all(root);
#endif
    return o;
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
