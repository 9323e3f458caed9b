#pragma once

// Command-line front end: argument parsing and dispatch to the engines.
//
// Exit status: 0 success, 1 engine/resource error, 2 usage error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cardguess/deck.hpp"
#include "cardguess/exact_engine.hpp"
#include "cardguess/harness.hpp"
#include "cardguess/parallel.hpp"
#include "cardguess/report_io.hpp"
#include "cardguess/tie_stats.hpp"

namespace cardguess::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitEngine = 1;
inline constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { json, csv };

struct CliConfig {
  std::string subcommand;
  std::optional<Deck> deck;
  std::int64_t reps = 10000;
  std::uint64_t seed = 0;
  int workers = 1;
  Format format = Format::json;
  std::string out;  // empty: stdout

  // decompose
  std::optional<std::vector<CardType>> arrangement;  // as typed, 0-based
  bool from_bottom = false;
  // poisson
  int j = 1;
  std::optional<int> t;
  // clt
  int m = 2;
  std::vector<int> n_list;
  // condclt
  std::vector<std::vector<int>> w_tilde_list;
  // exact
  long long exact_budget = ExactOptions{}.max_profile_size;
};

namespace detail {

inline std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  for (auto part : cardguess::detail::split(text, ',')) {
    try {
      out.push_back(static_cast<int>(cardguess::detail::parse_integer(part, what)));
    } catch (const InvalidDeck& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

struct Parser {
  CLI::App app{"Greedy card-guessing score: exact laws, tie statistics and Monte Carlo experiments", "cardguess"};
  CliConfig config;
  std::string deck_spec, balanced_spec, arrangement_spec, format = "json", n_list = "50,500,5000";
  std::vector<std::string> w_tilde_specs;
  std::optional<int> workers;
  std::optional<int> t;

  Parser() {
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    const auto deck_options = [&](CLI::App* sub) {
      auto* d = sub->add_option("--deck", deck_spec, "Multiplicities, e.g. 3,3,2");
      auto* b = sub->add_option("--balanced", balanced_spec, "Balanced deck, e.g. n=100,m=3");
      d->excludes(b);
      b->excludes(d);
    };
    const auto run_options = [&](CLI::App* sub) {
      sub->add_option("--reps", config.reps, "Number of replicates")->check(CLI::PositiveNumber);
      sub->add_option("--seed", config.seed, "64-bit seed");
      sub->add_option("--workers", workers, "Worker threads (default: $CARDGUESS_WORKERS or hardware)")
          ->check(CLI::PositiveNumber);
    };
    const auto output_options = [&](CLI::App* sub) {
      sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
      sub->add_option("--out", config.out, "Write the report to this file instead of stdout");
    };

    auto* exact = app.add_subcommand("exact", "Exact score law of a small deck");
    deck_options(exact);
    exact->add_option("--budget", config.exact_budget, "Largest n*max_mult accepted");
    output_options(exact);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo score distribution");
    deck_options(simulate);
    run_options(simulate);
    output_options(simulate);

    auto* decompose = app.add_subcommand("decompose", "Tie statistics and runs of one arrangement");
    deck_options(decompose);
    decompose->add_option("--arrangement", arrangement_spec, "Card types, 1-based, top-down unless --from-bottom");
    decompose->add_flag("--from-bottom", config.from_bottom, "Arrangement is listed from the bottom card up");
    decompose->add_option("--seed", config.seed, "Seed for a random arrangement when none is given");
    output_options(decompose);

    auto* poisson = app.add_subcommand("poisson", "Poisson approximation of W_{j,t}");
    deck_options(poisson);
    run_options(poisson);
    poisson->add_option("--j", config.j, "Tie order j")->check(CLI::PositiveNumber);
    poisson->add_option("--t", t, "Suffix length (default floor(sqrt(n)))")->check(CLI::NonNegativeNumber);
    output_options(poisson);

    auto* clt = app.add_subcommand("clt", "Mean, variance and normal gap across balanced deck sizes");
    clt->add_option("--m", config.m, "Multiplicity of every type")->check(CLI::PositiveNumber);
    clt->add_option("--n-list", n_list, "Comma-separated numbers of types");
    run_options(clt);
    output_options(clt);

    auto* varcheck = app.add_subcommand("varcheck", "Law of total variance given the tie counts");
    deck_options(varcheck);
    run_options(varcheck);
    output_options(varcheck);

    auto* condclt = app.add_subcommand("condclt", "Exact normal gap of the conditional score");
    condclt->add_option("--w-tilde", w_tilde_specs, "Tie counts, e.g. 4 or 10000,10000 (repeatable)")->required();
    condclt->add_option("--seed", config.seed, "Accepted for uniformity; unused");
    output_options(condclt);
  }

  CliConfig finish() {
    for (const auto* sub : app.get_subcommands()) config.subcommand = sub->get_name();
    config.format = format == "csv" ? Format::csv : Format::json;
    config.workers = workers ? *workers : default_workers();
    config.t = t;
    try {
      if (!deck_spec.empty()) config.deck = parse_deck_spec(deck_spec);
      if (!balanced_spec.empty()) {
        if (balanced_spec.find('=') == std::string::npos) throw InvalidDeck("--balanced expects n=<types>,m=<copies>");
        config.deck = parse_deck_spec(balanced_spec);
      }
    } catch (const InvalidDeck& e) {
      throw UsageError(e.what());
    }
    const bool needs_deck = config.subcommand != "clt" && config.subcommand != "condclt";
    if (needs_deck && !config.deck) throw UsageError(config.subcommand + ": one of --deck or --balanced is required");
    if (!arrangement_spec.empty()) {
      std::vector<CardType> cards;
      for (int label : parse_int_list(arrangement_spec, "card type")) {
        if (label < 1) throw UsageError("card types are 1-based; got " + std::to_string(label));
        cards.push_back(static_cast<CardType>(label - 1));
      }
      config.arrangement = std::move(cards);
    }
    if (config.subcommand == "clt") {
      config.n_list = parse_int_list(n_list, "n");
      for (int n : config.n_list) {
        if (n < 2) throw UsageError("--n-list entries must be >= 2");
      }
    }
    for (const auto& spec : w_tilde_specs) {
      auto w = parse_int_list(spec, "tie count");
      for (int x : w) {
        if (x < 1) throw UsageError("tie counts must be >= 1");
      }
      config.w_tilde_list.push_back(std::move(w));
    }
    return config;
  }
};

}  // namespace detail

/// Parses argv (without the program name). Throws UsageError, or
/// CLI::Success-derived exceptions for --help.
inline CliConfig parse_args(const std::vector<std::string>& args) {
  detail::Parser parser;
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    parser.app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::CallForAllHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  return parser.finish();
}

inline std::string usage() {
  detail::Parser parser;
  return parser.app.help();
}

/// Runs the engine selected by `config` and writes the report to `out`.
inline void write_report(const CliConfig& config, std::ostream& out) {
  const bool csv = config.format == Format::csv;
  const auto emit = [&](const Json& j) { out << j.dump(2) << '\n'; };
  const Deck* deck = config.deck ? &*config.deck : nullptr;

  if (config.subcommand == "exact") {
    const auto pmf = exact_pmf(*deck, ExactOptions{config.exact_budget});
    if (csv) {
      write_csv(out, pmf);
    } else {
      emit(to_json(*deck, pmf));
    }
  } else if (config.subcommand == "simulate") {
    const auto report = run_mc(*deck, config.reps, config.seed, config.workers);
    if (csv) {
      write_csv(out, report);
    } else {
      emit(to_json(report));
    }
  } else if (config.subcommand == "decompose") {
    Arrangement arrangement;
    if (config.arrangement) {
      arrangement = config.from_bottom ? Arrangement::from_bottom_up(*config.arrangement) : Arrangement{*config.arrangement};
      try {
        validate(*deck, arrangement);
      } catch (const InvalidDeck& e) {
        throw UsageError(e.what());
      }
    } else {
      RngStream rng = RngStream(config.seed).substream(0);
      arrangement = uniform_arrangement(*deck, rng);
    }
    const auto tc = tie_counts(*deck, arrangement);
    RngStream unused(0);
    const auto trace = play(*deck, arrangement, TieRule::lowest_index, unused);
    if (csv) {
      write_csv(out, tc);
    } else {
      emit(decomposition_json(*deck, arrangement, tc, runs(trace)));
    }
  } else if (config.subcommand == "poisson") {
    if (config.j >= deck->max_mult()) throw UsageError("--j must be below the maximal multiplicity");
    const int t = config.t ? *config.t : static_cast<int>(std::floor(std::sqrt(static_cast<double>(deck->num_types()))));
    if (t > deck->total()) throw UsageError("--t exceeds the deck size");
    const auto report = poisson_experiment(*deck, config.j, t, config.reps, config.seed, config.workers);
    if (csv) {
      write_csv(out, report);
    } else {
      emit(to_json(report));
    }
  } else if (config.subcommand == "clt") {
    const auto result = clt_experiment(config.m, config.n_list, config.reps, config.seed, config.workers);
    if (csv) {
      write_csv(out, result);
    } else {
      emit(to_json(result));
    }
  } else if (config.subcommand == "varcheck") {
    const auto vd = variance_decomposition(*deck, config.reps, config.seed, config.workers);
    if (csv) {
      write_csv(out, vd, deck->num_types());
    } else {
      emit(to_json(vd));
    }
  } else if (config.subcommand == "condclt") {
    const auto gaps = conditional_clt_check(config.w_tilde_list);
    if (csv) {
      write_csv(out, gaps);
    } else {
      emit(to_json(gaps));
    }
  } else {
    throw UsageError("unknown subcommand '" + config.subcommand + "'");
  }
}

/// Validated config -> exit status. Diagnostics go to `err`.
inline int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.out.empty()) {
      write_report(config, out);
    } else {
      std::ostringstream buffer;
      write_report(config, buffer);
      std::ofstream file(config.out, std::ios::binary);
      if (!file) throw std::runtime_error("cannot open output file '" + config.out + "'");
      file << buffer.str();
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << "cardguess " << config.subcommand << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "cardguess " << config.subcommand << ": " << e.what() << '\n';
    return kExitEngine;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig config;
  try {
    config = parse_args(args);
  } catch (const CLI::Success&) {
    out << usage();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "cardguess: " << e.what() << "\n\n" << usage();
    return kExitUsage;
  }
  return dispatch(config, out, err);
}

}  // namespace cardguess::cli
