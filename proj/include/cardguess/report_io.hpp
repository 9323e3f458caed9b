#pragma once

// JSON and CSV serialization of reports. JSON keys are stable; objects keep
// insertion order so pmfs and histograms list scores in increasing order.

#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cardguess/exact_engine.hpp"
#include "cardguess/harness.hpp"
#include "cardguess/tie_stats.hpp"

namespace cardguess {

using Json = nlohmann::ordered_json;

namespace detail {

template <typename Map>
Json keyed_object(const Map& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = v;
  return out;
}

inline Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace detail

inline Json to_json(const Deck& deck, const ScorePmf& pmf) {
  Json out;
  out["deck"] = to_spec(deck);
  Json probs = Json::object();
  for (int k = pmf.lo; k <= pmf.hi(); ++k) probs[std::to_string(k)] = pmf[k];
  out["pmf"] = std::move(probs);
  out["mean"] = pmf.mean();
  out["var"] = pmf.variance();
  return out;
}

/// Decomposition of one arrangement: thresholds T_1..T_m, W~ and runs.
inline Json decomposition_json(const Deck& deck, const Arrangement& arrangement, const TieCounts& tc,
                               const RunSet& run_set) {
  Json out;
  out["deck"] = to_spec(deck);
  Json cards = Json::array();
  for (CardType c : arrangement.cards) cards.push_back(c + 1);
  out["arrangement"] = std::move(cards);
  out["t"] = std::vector<int>(tc.thresholds.begin() + 1, tc.thresholds.end());
  out["w_tilde"] = tc.w_tilde;
  Json runs_json = Json::array();
  for (auto it = run_set.rbegin(); it != run_set.rend(); ++it) runs_json.push_back({it->first, it->second});
  out["runs"] = std::move(runs_json);
  return out;
}

inline Json to_json(const ExperimentReport& r) {
  Json out;
  out["deck"] = r.deck;
  out["reps"] = r.reps;
  out["seed"] = r.seed;
  out["mean"] = r.mean;
  out["var"] = r.var;
  out["predicted"] = r.predicted;
  out["ks_gap"] = detail::optional_number(r.ks_gap);
  out["histogram"] = detail::keyed_object(r.histogram);
  Json extras;
  extras["standard_error"] = r.standard_error();
  if (r.ties) {
    extras["mean_w_tilde"] = r.ties->mean_w_tilde;
    extras["mean_mu_prime"] = r.ties->mean_mu_prime;
    extras["var_mu_prime"] = r.ties->var_mu_prime;
    extras["mean_sigma2_prime"] = r.ties->mean_sigma2_prime;
  }
  out["extras"] = std::move(extras);
  return out;
}

inline Json to_json(const CltResult& c) {
  Json out;
  out["m"] = c.m;
  Json reports = Json::array();
  for (const auto& r : c.reports) reports.push_back(to_json(r));
  out["reports"] = std::move(reports);
  Json inc = Json::array();
  for (const auto& i : c.increments) {
    inc.push_back({{"n_from", i.n_from}, {"n_to", i.n_to}, {"observed", i.observed}, {"predicted", i.predicted},
                   {"pooled_se", i.pooled_se}});
  }
  out["increments"] = std::move(inc);
  return out;
}

inline Json to_json(const PoissonReport& p) {
  Json out;
  out["deck"] = p.deck;
  out["reps"] = p.reps;
  out["seed"] = p.seed;
  out["j"] = p.j;
  out["t"] = p.t;
  out["lambda"] = p.lambda;
  out["tv"] = p.tv;
  out["tv_ci"] = {p.tv_ci.lo, p.tv_ci.hi};
  out["t_over_n"] = p.t_over_n;
  out["histogram"] = detail::keyed_object(p.histogram);
  return out;
}

inline Json to_json(const VarianceDecomposition& v) {
  Json out;
  out["deck"] = v.deck;
  out["reps"] = v.reps;
  out["seed"] = v.seed;
  out["mean"] = v.mean_score;
  out["var"] = v.var_score;
  out["var_mu_prime"] = v.var_mu_prime;
  out["mean_sigma2_prime"] = v.mean_sigma2_prime;
  out["residual"] = v.residual;
  out["residual_ci"] = {v.residual_ci.lo, v.residual_ci.hi};
  return out;
}

inline Json to_json(const std::vector<ConditionalGap>& gaps) {
  Json out = Json::array();
  for (const auto& g : gaps) {
    out.push_back({{"w_tilde", g.w_tilde},
                   {"mu_prime", g.mu_prime},
                   {"sigma2_prime", g.sigma2_prime},
                   {"gap", detail::optional_number(g.gap)},
                   {"degenerate", g.degenerate()}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV. Harness reports use the columns n,statistic,value.

namespace detail {
inline std::string number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

inline void experiment_rows(std::ostream& os, const ExperimentReport& r) {
  const auto row = [&](const char* stat, double v) { os << r.num_types << ',' << stat << ',' << number(v) << '\n'; };
  row("mean", r.mean);
  row("var", r.var);
  row("predicted", r.predicted);
  row("standard_error", r.standard_error());
  if (r.ks_gap) row("ks_gap", *r.ks_gap);
  if (r.ties) {
    row("var_mu_prime", r.ties->var_mu_prime);
    row("mean_sigma2_prime", r.ties->mean_sigma2_prime);
  }
}
}  // namespace detail

inline void write_csv(std::ostream& os, const ExperimentReport& r) {
  os << "n,statistic,value\n";
  detail::experiment_rows(os, r);
}

inline void write_csv(std::ostream& os, const CltResult& c) {
  os << "n,statistic,value\n";
  for (const auto& r : c.reports) detail::experiment_rows(os, r);
  for (const auto& i : c.increments) {
    os << i.n_to << ",increment," << detail::number(i.observed) << '\n';
    os << i.n_to << ",increment_predicted," << detail::number(i.predicted) << '\n';
    os << i.n_to << ",increment_pooled_se," << detail::number(i.pooled_se) << '\n';
  }
}

inline void write_csv(std::ostream& os, const PoissonReport& p) {
  os << "n,statistic,value\n";
  const auto row = [&](const char* stat, double v) { os << p.num_types << ',' << stat << ',' << detail::number(v) << '\n'; };
  row("lambda", p.lambda);
  row("tv", p.tv);
  row("tv_ci_lo", p.tv_ci.lo);
  row("tv_ci_hi", p.tv_ci.hi);
  row("t_over_n", p.t_over_n);
}

inline void write_csv(std::ostream& os, const VarianceDecomposition& v, int num_types) {
  os << "n,statistic,value\n";
  const auto row = [&](const char* stat, double x) { os << num_types << ',' << stat << ',' << detail::number(x) << '\n'; };
  row("mean", v.mean_score);
  row("var", v.var_score);
  row("var_mu_prime", v.var_mu_prime);
  row("mean_sigma2_prime", v.mean_sigma2_prime);
  row("residual", v.residual);
  row("residual_ci_lo", v.residual_ci.lo);
  row("residual_ci_hi", v.residual_ci.hi);
}

inline void write_csv(std::ostream& os, const ScorePmf& pmf) {
  os << "score,probability\n";
  for (int k = pmf.lo; k <= pmf.hi(); ++k) os << k << ',' << detail::number(pmf[k]) << '\n';
}

inline void write_csv(std::ostream& os, const TieCounts& tc) {
  os << "j,t,w_tilde\n";
  for (std::size_t j = 0; j < tc.w_tilde.size(); ++j) os << j + 1 << ',' << tc.thresholds[j + 1] << ',' << tc.w_tilde[j] << '\n';
}

inline void write_csv(std::ostream& os, const std::vector<ConditionalGap>& gaps) {
  os << "w_tilde,mu_prime,sigma2_prime,gap\n";
  for (const auto& g : gaps) {
    std::string w;
    for (int x : g.w_tilde) w += (w.empty() ? "" : ";") + std::to_string(x);
    os << w << ',' << detail::number(g.mu_prime) << ',' << detail::number(g.sigma2_prime) << ','
       << (g.gap ? detail::number(*g.gap) : std::string()) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Schema checks for re-parsed reports

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(const Json& j, const char* key, bool (Json::*is)() const noexcept) {
  if (!j.contains(key)) throw SchemaError(std::string("missing key '") + key + "'");
  if (!(j.at(key).*is)()) throw SchemaError(std::string("key '") + key + "' has the wrong type");
}

inline void require_histogram(const Json& j, const char* key, std::int64_t total) {
  require(j, key, &Json::is_object);
  std::int64_t sum = 0;
  for (const auto& [k, v] : j.at(key).items()) {
    std::size_t used = 0;
    (void)std::stoi(k, &used);
    if (used != k.size() || !v.is_number_integer()) throw SchemaError(std::string("bad histogram entry in '") + key + "'");
    sum += v.get<std::int64_t>();
  }
  if (sum != total) throw SchemaError(std::string("histogram '") + key + "' does not sum to reps");
}
}  // namespace detail

/// kind: exact, simulate, decompose, poisson, clt, varcheck, condclt
inline void validate_report(const Json& j, const std::string& kind) {
  using detail::require;
  if (kind == "exact") {
    require(j, "deck", &Json::is_string);
    require(j, "pmf", &Json::is_object);
    require(j, "mean", &Json::is_number);
    require(j, "var", &Json::is_number);
    double total = 0;
    for (const auto& [k, v] : j.at("pmf").items()) total += v.get<double>();
    if (std::abs(total - 1.0) > 1e-9) throw SchemaError("pmf does not sum to 1");
  } else if (kind == "simulate") {
    require(j, "deck", &Json::is_string);
    require(j, "reps", &Json::is_number_integer);
    require(j, "seed", &Json::is_number_unsigned);
    require(j, "mean", &Json::is_number);
    require(j, "var", &Json::is_number);
    require(j, "predicted", &Json::is_number);
    if (!j.contains("ks_gap") || !(j["ks_gap"].is_number() || j["ks_gap"].is_null())) throw SchemaError("bad ks_gap");
    require(j, "extras", &Json::is_object);
    detail::require_histogram(j, "histogram", j["reps"].get<std::int64_t>());
  } else if (kind == "decompose") {
    require(j, "t", &Json::is_array);
    require(j, "w_tilde", &Json::is_array);
    require(j, "runs", &Json::is_array);
    require(j, "arrangement", &Json::is_array);
    if (j["t"].size() != j["w_tilde"].size()) throw SchemaError("t and w_tilde lengths differ");
  } else if (kind == "poisson") {
    for (const char* k : {"j", "t", "reps"}) require(j, k, &Json::is_number_integer);
    for (const char* k : {"lambda", "tv", "t_over_n"}) require(j, k, &Json::is_number);
    require(j, "tv_ci", &Json::is_array);
    detail::require_histogram(j, "histogram", j["reps"].get<std::int64_t>());
  } else if (kind == "clt") {
    require(j, "reports", &Json::is_array);
    require(j, "increments", &Json::is_array);
    for (const auto& r : j["reports"]) validate_report(r, "simulate");
  } else if (kind == "varcheck") {
    for (const char* k : {"mean", "var", "var_mu_prime", "mean_sigma2_prime", "residual"}) require(j, k, &Json::is_number);
    require(j, "residual_ci", &Json::is_array);
  } else if (kind == "condclt") {
    if (!j.is_array()) throw SchemaError("condclt report must be an array");
    for (const auto& g : j) {
      require(g, "w_tilde", &Json::is_array);
      require(g, "mu_prime", &Json::is_number);
      require(g, "degenerate", &Json::is_boolean);
    }
  } else {
    throw SchemaError("unknown report kind '" + kind + "'");
  }
}

}  // namespace cardguess
