// profilest: command-line front end for pattern / profile estimation.
//
// Exit codes: 0 success, 1 verification mismatch, 2 usage or input error,
// 3 result printed but not converged.

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "profilest/bounds.hpp"
#include "profilest/error.hpp"
#include "profilest/estimators.hpp"
#include "profilest/patterns.hpp"
#include "profilest/pml_em.hpp"
#include "profilest/pml_exact.hpp"
#include "profilest/probability.hpp"
#include "profilest/serialize.hpp"

namespace {

using namespace profilest;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnconverged = 3;

struct InputOptions {
  std::string path;     // empty or "-" = stdin
  std::string literal;  // takes precedence over path
  std::string format = "tokens";
};

struct Loaded {
  std::optional<TokenSequence> seq;
  Pattern pattern;
  Profile profile;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("input", in.path, "Input file (default: standard input)");
  cmd->add_option("--literal", in.literal, "Use this text instead of reading a file");
  cmd->add_option("--format", in.format, "Input format")
      ->check(CLI::IsMember({"tokens", "lines", "chars", "pattern", "profile"}));
}

std::string read_text(const InputOptions& in) {
  if (!in.literal.empty()) return in.literal;
  if (in.path.empty() || in.path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream f(in.path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot open " + in.path);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

Loaded load(const InputOptions& in) {
  const std::string text = read_text(in);
  Loaded out;
  if (in.format == "pattern") {
    out.pattern = Pattern::parse(text);
    if (out.pattern.empty()) throw Error(ErrorKind::InvalidInput, "empty pattern");
    out.profile = profile_of(out.pattern);
  } else if (in.format == "profile") {
    out.profile = Profile::parse(text);
    if (out.profile.empty()) throw Error(ErrorKind::InvalidInput, "empty profile");
    out.pattern = canonical_pattern(out.profile);
  } else {
    std::string_view body = text;
    if (in.format == "chars") {
      while (!body.empty() && (body.back() == '\n' || body.back() == '\r')) body.remove_suffix(1);
    }
    TokenSequence seq = in.format == "lines"   ? TokenSequence::from_lines(body)
                        : in.format == "chars" ? TokenSequence::from_chars(body)
                                               : TokenSequence::from_whitespace(body);
    out.pattern = pattern_of(seq);
    out.profile = profile_of(out.pattern);
    out.seq = std::move(seq);
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw Error(ErrorKind::InvalidInput, "not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

struct SearchOptions {
  int kmin = 1;
  int kmax = 0;
  int starts = 32;
  std::uint64_t seed = 0;
  int max_iterations = 5000;
};

void add_search_options(CLI::App* cmd, SearchOptions& s) {
  cmd->add_option("--kmax", s.kmax, "Largest support size to search (required with singletons)");
  cmd->add_option("--kmin", s.kmin, "Smallest support size to search with --kmax");
  cmd->add_option("--starts", s.starts, "Random starts per support size")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", s.seed, "Random seed");
}

SearchConfig search_config(const SearchOptions& s) {
  SearchConfig cfg;
  if (s.kmax > 0) cfg.k_range_override = std::pair{s.kmin, s.kmax};
  cfg.starts = s.starts;
  cfg.seed = s.seed;
  cfg.max_iterations = s.max_iterations;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pattern and profile maximum-likelihood estimation"};
  app.require_subcommand(1);

  InputOptions in;
  bool json_out = false;

  auto* pattern_cmd = app.add_subcommand("pattern", "Print the pattern and profile of the input");
  add_input_options(pattern_cmd, in);

  auto* prob_cmd = app.add_subcommand("prob", "Probability a distribution assigns to the input's pattern");
  add_input_options(prob_cmd, in);
  std::string dist_text;
  bool continuous = false;
  prob_cmd->add_option("--dist", dist_text, "Comma-separated atom probabilities");
  prob_cmd->add_flag("--continuous", continuous,
                     "Treat 1 - sum(atoms) as continuous mass instead of renormalizing");
  prob_cmd->add_flag("--json", json_out, "JSON output");

  auto* pml_cmd = app.add_subcommand("pml", "Pattern maximum-likelihood distribution");
  add_input_options(pml_cmd, in);
  SearchOptions sopt;
  add_search_options(pml_cmd, sopt);
  bool use_exact = false, use_em = false;
  auto* exact_flag = pml_cmd->add_flag("--exact", use_exact, "Closed form or numeric search (default)");
  pml_cmd->add_flag("--em", use_em, "Expectation-maximization approximation")->excludes(exact_flag);
  EmConfig em;
  pml_cmd->add_option("--k", em.k, "Support size for --em");
  pml_cmd->add_option("--iterations", em.iterations, "EM iterations")->check(CLI::PositiveNumber);
  pml_cmd->add_option("--chains", em.chains, "Markov chains per E-step")->check(CLI::PositiveNumber);
  pml_cmd->add_option("--steps", em.mcmc_steps_per_estep, "Chain steps per E-step")->check(CLI::PositiveNumber);
  bool progress = false;
  pml_cmd->add_flag("--progress", progress, "EM progress lines on standard error");
  pml_cmd->add_flag("--json", json_out, "JSON output (default)");

  auto* bounds_cmd = app.add_subcommand("bounds", "Support, continuous-mass and distinct-value bounds");
  add_input_options(bounds_cmd, in);
  bounds_cmd->add_flag("--json", json_out, "JSON output (default)");

  auto* table_cmd = app.add_subcommand("table1", "Recompute the closed-form table for profiles of length <= 4");
  bool tsv_out = true;
  table_cmd->add_flag("--tsv", tsv_out, "TSV output (default)");
  std::uint64_t table_seed = 0;
  table_cmd->add_option("--seed", table_seed, "Random seed for the numeric rows");

  auto* predict_cmd = app.add_subcommand("predict", "Expected number of new symbols in future draws");
  add_input_options(predict_cmd, in);
  std::int64_t future = 0;
  std::string estimator = "pml";
  predict_cmd->add_option("--future", future, "Number of future draws")->required()->check(CLI::NonNegativeNumber);
  predict_cmd->add_option("--estimator", estimator, "ml or pml")->check(CLI::IsMember({"ml", "pml"}));
  add_search_options(predict_cmd, sopt);

  auto* converge_cmd = app.add_subcommand("converge", "Distance between the PML and ML distributions as n grows");
  std::string alpha_text, n_text;
  converge_cmd->add_option("--alpha", alpha_text, "Comma-separated generating probabilities")->required();
  converge_cmd->add_option("--n", n_text, "Comma-separated sample sizes")->required();
  converge_cmd->add_flag("--tsv", tsv_out, "TSV output (default)");
  add_search_options(converge_cmd, sopt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*pattern_cmd) {
      const Loaded data = load(in);
      std::cout << data.pattern.to_string() << '\n' << data.profile.to_string() << '\n';
      return kExitOk;
    }

    if (*prob_cmd) {
      const Loaded data = load(in);
      std::vector<double> atoms = parse_list(dist_text);
      double sum = 0.0;
      for (double a : atoms) sum += a;
      if (sum > 1.0 + Distribution::kMassTolerance) {
        throw Error(ErrorKind::InvalidDistribution, "atoms sum to more than one");
      }
      Distribution d;
      if (continuous) {
        d = Distribution(atoms);
      } else {
        if (atoms.empty() || std::abs(sum - 1.0) > 1e-3) {
          throw Error(ErrorKind::InvalidDistribution,
                      "atoms must sum to one (within 1e-3); pass --continuous for a continuous part");
        }
        for (double& a : atoms) a /= sum;
        d = Distribution(atoms);
      }
      const auto p = pattern_prob(d, data.profile);
      double log2p = p.log_value / std::log(2.0);
      if (std::abs(log2p) < 1e-12) log2p = 0.0;  // rounding noise around probability one
      if (json_out) {
        nlohmann::ordered_json j;
        j["probability"] = json_number(p.value);
        j["log2_probability"] = json_number(log2p);
        j["method"] = to_string(p.method);
        std::cout << j.dump() << '\n';
      } else {
        std::cout << "probability\t" << format_decimal(p.value) << '\n'
                  << "log2_probability\t" << format_decimal(log2p) << '\n';
      }
      return kExitOk;
    }

    if (*pml_cmd) {
      const Loaded data = load(in);
      PmlResult result;
      if (use_em) {
        const BoundsReport report = bounds_report(data.profile);
        if (pml_cmd->count("--k") == 0) {
          em.k = report.support_upper ? static_cast<int>(*report.support_upper)
                                      : (sopt.kmax > 0 ? sopt.kmax : 2 * data.profile.m());
        }
        em.q_enabled = !report.discrete_forced;
        em.seed = sopt.seed;
        if (progress) em.progress = &std::cerr;
        result = em_pml(data.pattern, em);
      } else {
        result = pml_search(data.profile, search_config(sopt));
      }
      std::cout << to_json(result).dump() << '\n';
      return result.converged ? kExitOk : kExitUnconverged;
    }

    if (*bounds_cmd) {
      const Loaded data = load(in);
      if (is_trivial(data.profile)) throw Error(ErrorKind::InvalidInput, "bounds need a nontrivial profile");
      std::cout << to_json(bounds_report(data.profile)).dump() << '\n';
      return kExitOk;
    }

    if (*table_cmd) {
      const auto rows = reproduce_table1(table_seed);
      bool all = true;
      std::cout << "profile\tcanonical\texpected\tcomputed\tprobability\tmatch\n";
      for (const auto& r : rows) {
        std::string computed = "(";
        const auto atoms = r.computed.distribution.atoms();
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          if (i) computed += ", ";
          computed += format_decimal(atoms[i]);
        }
        computed += ")";
        if (r.computed.distribution.continuous_mass() > 0 && !atoms.empty()) {
          computed += " + q=" + format_decimal(r.computed.distribution.continuous_mass());
        }
        std::string canonical;
        for (int v : r.canonical.indices()) canonical += std::to_string(v);
        std::cout << r.profile.to_string() << '\t' << canonical << '\t' << r.expected << '\t'
                  << computed << '\t' << format_decimal(r.computed.probability) << '\t'
                  << (r.match ? "match" : "MISMATCH") << '\n';
        all = all && r.match;
      }
      return all ? kExitOk : kExitMismatch;
    }

    if (*predict_cmd) {
      const Loaded data = load(in);
      Distribution d;
      if (estimator == "ml") {
        d = data.seq ? ml_distribution(*data.seq)
                     : Distribution([&] {
                         std::vector<double> a;
                         for (int mu : data.profile.multiplicities()) a.push_back(double(mu) / data.profile.n());
                         return a;
                       }());
      } else {
        d = pml_search(data.profile, search_config(sopt)).distribution;
      }
      std::cout << format_decimal(expected_new_symbols(d, data.profile.m(), future)) << '\n';
      return kExitOk;
    }

    if (*converge_cmd) {
      const AlphaVector alpha(parse_list(alpha_text));
      std::vector<int> ns;
      for (double v : parse_list(n_text)) {
        if (v < 1 || v != static_cast<int>(v)) throw Error(ErrorKind::InvalidInput, "n values must be positive integers");
        ns.push_back(static_cast<int>(v));
      }
      std::cout << to_tsv(convergence_experiment(alpha, ns, search_config(sopt)));
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "profilest: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
