#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "obmc/checker.hpp"
#include "obmc/committee.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

obmc::ProblemInstance load_model(const std::string& path) {
  return obmc::parse_instance(slurp(path));
}

// The --formula argument is either a formula or the name of a file holding
// one.
std::string formula_text(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::string text = slurp(arg);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return text;
  }
  return arg;
}

obmc::Budget make_budget(double timeout_seconds, std::size_t max_nodes) {
  obmc::Budget b;
  b.timeout = std::chrono::milliseconds(static_cast<long long>(std::llround(timeout_seconds * 1000.0)));
  b.max_nodes = max_nodes;
  return b;
}

int exit_code(obmc::Verdict v) {
  switch (v) {
    case obmc::Verdict::True:
      return 0;
    case obmc::Verdict::False:
      return 1;
    default:
      return 2;
  }
}

struct CheckArgs {
  std::string model;
  std::string formula;
  std::string engine = "auto";
  std::string stats = "text";
  double timeout = 600.0;
  std::size_t max_nodes = 50'000'000;
};

obmc::Engine parse_engine(const std::string& name) {
  if (name == "bdd") return obmc::Engine::Bdd;
  if (name == "enumerate") return obmc::Engine::Enumerate;
  if (name == "auto") return obmc::Engine::Auto;
  throw std::invalid_argument("unknown engine: " + name);
}

int run_check(const CheckArgs& args) {
  obmc::ProblemInstance inst = load_model(args.model);
  if (!args.formula.empty()) obmc::set_query_text(inst, formula_text(args.formula));
  if (inst.query == obmc::kNoFormula)
    throw std::invalid_argument("no query: the model has none and --formula was not given");

  obmc::Budget budget = make_budget(args.timeout, args.max_nodes);
  obmc::CheckResult res = obmc::check_instance(inst, inst.query, parse_engine(args.engine), budget);

  std::size_t r = obmc::ratoms(inst.arena, inst.vocab, inst.query);
  std::size_t exponent = obmc::state_count_exponent(inst.arena, inst.vocab, inst.query, inst.atoms);

  std::cout << obmc::to_string(res.verdict) << "\n";
  if (args.stats == "json") {
    nlohmann::ordered_json j;
    j["verdict"] = obmc::to_string(res.verdict);
    j["engine"] = res.engine;
    j["wall_ms"] = res.wall_ms;
    j["peak_nodes"] = res.peak_nodes;
    j["atom_count"] = inst.atoms.size();
    j["ratoms"] = r;
    j["state_exponent"] = exponent;
    if (!res.note.empty()) j["note"] = res.note;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "engine: " << res.engine << "\n"
              << "wall_ms: " << res.wall_ms << "\n"
              << "peak_nodes: " << res.peak_nodes << "\n"
              << "atom_count: " << inst.atoms.size() << "\n"
              << "ratoms: " << r << "\n"
              << "state_exponent: " << exponent << "\n";
    if (!res.note.empty()) std::cout << "note: " << res.note << "\n";
  }
  return exit_code(res.verdict);
}

struct BenchArgs {
  std::string variant;
  std::string query;
  std::size_t min = 3;
  std::size_t max = 10;
  double timeout = 600.0;
  std::size_t max_nodes = 50'000'000;
  std::string csv;
};

obmc::CommitteeVariant parse_variant(const std::string& name) {
  if (name == "first") return obmc::CommitteeVariant::First;
  if (name == "second") return obmc::CommitteeVariant::Second;
  throw std::invalid_argument("unknown variant: " + name);
}

int run_bench(const BenchArgs& args) {
  obmc::CommitteeVariant variant = parse_variant(args.variant);
  if (args.min < 3 || args.max < args.min)
    throw std::invalid_argument("need 3 <= min <= max");

  std::ofstream file;
  if (!args.csv.empty()) {
    file.open(args.csv);
    if (!file) throw std::runtime_error("cannot open file: " + args.csv);
  }
  std::ostream& out = args.csv.empty() ? std::cout : file;

  out << "n,atom_count,ratoms,state_exponent,verdict,wall_ms,peak_nodes\n";
  obmc::Budget budget = make_budget(args.timeout, args.max_nodes);
  for (std::size_t n = args.min; n <= args.max; ++n) {
    obmc::ProblemInstance inst = obmc::committee::make_instance(n, variant, args.query);
    std::size_t r = obmc::ratoms(inst.arena, inst.vocab, inst.query);
    std::size_t exponent =
        obmc::state_count_exponent(inst.arena, inst.vocab, inst.query, inst.atoms);
    obmc::CheckResult res = obmc::check_symbolic(inst, inst.query, budget);
    out << n << "," << inst.atoms.size() << "," << r << "," << exponent << ","
        << obmc::to_string(res.verdict) << "," << std::llround(res.wall_ms) << ","
        << res.peak_nodes << "\n";
    out.flush();
  }
  return 0;
}

struct TranslateArgs {
  std::string model;
  std::string formula;
  std::string format = "qdimacs";
  std::string out;
};

int run_translate(const TranslateArgs& args) {
  if (args.format != "qdimacs")
    throw std::invalid_argument("unknown format: " + args.format);
  obmc::ProblemInstance inst = load_model(args.model);
  if (!args.formula.empty()) obmc::set_query_text(inst, formula_text(args.formula));
  if (inst.query == obmc::kNoFormula)
    throw std::invalid_argument("no query: the model has none and --formula was not given");

  obmc::FormulaId f = obmc::reduce_dynamics(inst.arena, inst.query);
  obmc::QbfArena Q;
  obmc::QbfId root =
      obmc::proposition1_sentence(Q, inst.arena, inst.vocab, inst.atoms, inst.initial, f);
  std::string text = obmc::export_qdimacs(Q, inst.arena, root);

  if (args.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(args.out);
    if (!file) throw std::runtime_error("cannot open file: " + args.out);
    file << text;
  }
  return 0;
}

struct GenArgs {
  std::size_t n = 3;
  std::string variant = "first";
  std::string query;
  std::string out;
};

int run_gen(const GenArgs& args) {
  obmc::ProblemInstance inst =
      obmc::committee::make_instance(args.n, parse_variant(args.variant), args.query);
  std::string text = obmc::print_instance(inst);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(args.out);
    if (!file) throw std::runtime_error("cannot open file: " + args.out);
    file << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model checker for multi-agent belief bases"};
  app.require_subcommand(1);

  CheckArgs check;
  CLI::App* c = app.add_subcommand("check", "Check a formula against a model");
  c->add_option("--model", check.model, "Model file")->required();
  c->add_option("--formula", check.formula, "Query formula (text or file), overrides the model's");
  c->add_option("--engine", check.engine, "bdd, enumerate, or auto")
      ->check(CLI::IsMember({"bdd", "enumerate", "auto"}));
  c->add_option("--timeout", check.timeout, "Time budget in seconds");
  c->add_option("--max-nodes", check.max_nodes, "Decision diagram node budget");
  c->add_option("--stats", check.stats, "Statistics format")
      ->check(CLI::IsMember({"text", "json"}));

  BenchArgs bench;
  CLI::App* b = app.add_subcommand("bench-committee", "Benchmark the committee family");
  b->add_option("--variant", bench.variant, "first or second")->required();
  b->add_option("--query", bench.query, "Query name (default: phi0 or example2 by variant)");
  b->add_option("--min", bench.min, "Smallest committee size");
  b->add_option("--max", bench.max, "Largest committee size");
  b->add_option("--timeout", bench.timeout, "Per-instance time budget in seconds");
  b->add_option("--max-nodes", bench.max_nodes, "Decision diagram node budget");
  b->add_option("--csv", bench.csv, "Write the CSV here instead of stdout");

  TranslateArgs translate;
  CLI::App* t = app.add_subcommand("translate", "Export the QBF sentence for a model and query");
  t->add_option("--model", translate.model, "Model file")->required();
  t->add_option("--formula", translate.formula, "Query formula (text or file), overrides the model's");
  t->add_option("--format", translate.format, "Output format")->check(CLI::IsMember({"qdimacs"}));
  t->add_option("--out", translate.out, "Output file (default stdout)");

  GenArgs gen;
  CLI::App* g = app.add_subcommand("gen-committee", "Emit a committee model file");
  g->add_option("--n", gen.n, "Committee size (>= 3)");
  g->add_option("--variant", gen.variant, "first or second")
      ->check(CLI::IsMember({"first", "second"}));
  g->add_option("--query", gen.query, "Query name");
  g->add_option("--out", gen.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
    if (c->parsed()) return run_check(check);
    if (b->parsed()) return run_bench(bench);
    if (t->parsed()) return run_translate(translate);
    if (g->parsed()) return run_gen(gen);
    return 3;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
