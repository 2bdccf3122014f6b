// verilocal: command-line front end for verifiability analysis.
//
// Exit codes: 0 ok, 2 parse error, 3 validation error, 4 internal solver
// error, 5 corner materialization cap exceeded, 6 enumeration budget exceeded.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "verilocal/verilocal.hpp"

namespace {

using namespace verilocal;
using io::Json;

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return 2;
    case ErrorCode::InternalUnbounded:
    case ErrorCode::CycleDetected:
    case ErrorCode::NotOptimal: return 4;
    case ErrorCode::CapExceeded: return 5;
    case ErrorCode::BudgetExceeded: return 6;
    default: return 3;
  }
}

struct InputOptions {
  std::string graph;
  std::string support;
  std::string epsilon;
};

struct LoadedInput {
  ProblemInstance instance;
  Json digests = Json::object();
};

Json digest_entry(const std::string& path, const std::string& bytes) {
  return Json{{"path", path}, {"fnv1a64", io::fnv1a64(bytes)}};
}

MeasurementGraph load_graph(const std::string& path, Json& digests, io::GraphDocument* doc_out = nullptr) {
  const auto bytes = io::read_file(path);
  auto doc = io::graph_from_json(io::parse_json_text(bytes, path));
  digests["graph"] = digest_entry(path, bytes);
  validate_graph(doc.graph);
  auto g = doc.graph;
  if (doc_out) *doc_out = std::move(doc);
  return g;
}

/// Graph plus outliers: an explicit epsilon file, a support file, or whatever the graph file carries.
LoadedInput load_input(const InputOptions& opts) {
  LoadedInput in;
  io::GraphDocument doc;
  const auto g = load_graph(opts.graph, in.digests, &doc);
  std::optional<std::vector<std::vector<Rational>>> epsilon;
  std::optional<SignedOutlierSupport> support;
  if (!opts.epsilon.empty()) {
    const auto bytes = io::read_file(opts.epsilon);
    auto eps_doc = io::graph_from_json(io::parse_json_text(bytes, opts.epsilon));
    if (!eps_doc.epsilon) throw Error(ErrorCode::Parse, opts.epsilon + " has no \"epsilon\" array");
    epsilon = std::move(eps_doc.epsilon);
    in.digests["epsilon"] = digest_entry(opts.epsilon, bytes);
  } else if (!opts.support.empty()) {
    const auto bytes = io::read_file(opts.support);
    auto sup_doc = io::graph_from_json(io::parse_json_text(bytes, opts.support));
    if (!sup_doc.support) throw Error(ErrorCode::Parse, opts.support + " has no \"support\" array");
    support = std::move(sup_doc.support);
    in.digests["support"] = digest_entry(opts.support, bytes);
  } else if (doc.epsilon) {
    epsilon = std::move(doc.epsilon);
  } else if (doc.support) {
    support = std::move(doc.support);
  }
  if (epsilon) {
    const int d = epsilon->empty() ? 1 : static_cast<int>(epsilon->front().size());
    in.instance = ProblemInstance{g, d, std::move(*epsilon)};
    validate_instance(in.instance);
  } else {
    in.instance = realize_support(g, support.value_or(SignedOutlierSupport{}));
  }
  return in;
}

Json envelope(const std::string& command, const std::vector<std::string>& args, const Json& digests) {
  return Json{{"command", command}, {"args", args}, {"inputs", digests}};
}

void emit(const Json& report) { std::cout << report.dump(2) << '\n'; }

Rational parse_probability(const std::string& text) {
  try {
    return parse_decimal(text);
  } catch (const Error&) {
    throw Error(ErrorCode::Parse, "bad probability '" + text + "'");
  }
}

Interval parse_interval(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::Parse, "interval must be lo:hi");
  return Interval{parse_decimal(text.substr(0, colon)), parse_decimal(text.substr(colon + 1))};
}

std::vector<Rational> parse_grid(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) throw Error(ErrorCode::Parse, "grid must be pmin:pmax:steps");
  const Rational lo = parse_decimal(text.substr(0, a));
  const Rational hi = parse_decimal(text.substr(a + 1, b - a - 1));
  long steps = 0;
  try {
    steps = std::stol(text.substr(b + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, "grid steps must be an integer");
  }
  if (steps < 1 || hi < lo || lo < 0 || hi > 1) {
    throw Error(ErrorCode::Parse, "grid needs 0 <= pmin <= pmax <= 1 and steps >= 1");
  }
  std::vector<Rational> out;
  for (long k = 0; k <= steps; ++k) out.push_back(lo + (hi - lo) * make_rational(k, steps));
  return out;
}

Json cost_vector(const std::vector<Rational>& v) { return io::rationals_to_json(v); }

// check ----------------------------------------------------------------------

struct CheckOptions {
  InputOptions input;
  bool oracle = false;
  bool corners = false;
  bool trace = false;
  bool timing = false;
};

int run_check(const CheckOptions& o, const std::vector<std::string>& args) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto in = load_input(o.input);
  Json report = envelope("check", args, in.digests);
  const auto dims = split_dimensions(in.instance);

  Rational total = 0;
  std::vector<Rational> edge_costs(in.instance.graph.num_edges(), Rational(0));
  std::vector<CornerSet> corner_sets;
  bool all_unique = true;
  bool all_verifiable = true;
  Json oracle = Json::array();
  for (const auto& one : dims) {
    SolveOptions so;
    if (o.trace) so.trace = &std::cerr;
    const auto result = solve(one, so);
    total += result.solution.cost;
    const auto corner = corner_from(one, result.solution.x);
    for (std::size_t e = 0; e < edge_costs.size(); ++e) {
      const auto [i, j] = one.graph.edges[e];
      edge_costs[e] += abs(corner[j - 1] - corner[i - 1] - one.epsilon[e][0]);
    }
    const bool verifiable = result.solution.cost == origin_objective(one);
    all_verifiable = all_verifiable && verifiable;
    if (o.corners) {
      corner_sets.push_back(enumerate_corners(one, result.tableau));
      all_unique = all_unique && corner_sets.back().classification == Classification::UniquelyVerifiable;
    } else {
      all_unique = all_unique && verifiable && unique_at_origin(one, result.tableau);
    }
    if (o.oracle) {
      const auto ref = oracle::oracle_solve(one);
      const int ref_ver = ref.cost == origin_objective(one) ? 1 : 0;
      oracle.push_back(Json{{"optimal_cost", to_string(ref.cost)},
                            {"ver", ref_ver},
                            {"agrees", ref.cost == result.solution.cost && ref_ver == (verifiable ? 1 : 0)}});
    }
  }
  const auto cls = all_unique       ? Classification::UniquelyVerifiable
                   : all_verifiable ? Classification::Verifiable
                                    : Classification::NonVerifiable;
  report["dimension"] = in.instance.dim;
  report["classification"] = to_string(cls);
  report["optimal_cost"] = to_string(total);
  report["origin_cost"] = to_string(origin_objective(in.instance));
  report["edge_costs"] = cost_vector(edge_costs);
  if (o.corners) {
    Json per_dim = Json::array();
    for (const auto& cs : corner_sets) {
      Json corners = Json::array();
      for (const auto& c : cs.corners) corners.push_back(io::corner_to_json(c));
      per_dim.push_back(std::move(corners));
    }
    report["corner_count"] = combine_dimensions(corner_sets).count().get_str();
    report["corners"] = in.instance.dim == 1 ? per_dim.front() : per_dim;
  }
  if (o.oracle) report["oracle"] = in.instance.dim == 1 ? oracle.front() : oracle;
  if (o.timing) {
    report["timing_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  emit(report);
  return 0;
}

// corners --------------------------------------------------------------------

struct CornersOptions {
  InputOptions input;
  int dims = 0;
  std::size_t cap = 1'000'000;
  bool combined = false;
  bool timing = false;
};

int run_corners(const CornersOptions& o, const std::vector<std::string>& args) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto in = load_input(o.input);
  if (o.dims != 0 && o.dims != in.instance.dim) {
    throw Error(ErrorCode::DimensionMismatch, "--dims " + std::to_string(o.dims) + " but input has " +
                                                  std::to_string(in.instance.dim) + " columns");
  }
  std::vector<CornerSet> sets;
  for (const auto& one : split_dimensions(in.instance)) sets.push_back(analyze(one));
  const auto components = maximal_verifiable_components(sets, in.instance.graph);
  Json report = envelope("corners", args, in.digests);
  if (in.instance.dim == 1) {
    const auto body = io::corner_report_json(sets.front(), components);
    for (const auto& [key, value] : body.items()) report[key] = value;
  } else {
    const auto combined = combine_dimensions(sets);
    Rational total = 0;
    Json per_dim = Json::array();
    for (const auto& cs : sets) {
      total += cs.optimal_cost;
      Json one = io::corner_report_json(cs, maximal_verifiable_components(std::span(&cs, 1), cs.graph));
      one.erase("components");
      per_dim.push_back(std::move(one));
    }
    report["dimension"] = in.instance.dim;
    report["classification"] = to_string(combined.classification());
    report["optimal_cost"] = to_string(total);
    report["combined_corner_count"] = combined.count().get_str();
    report["per_dimension"] = std::move(per_dim);
    report["components"] = io::components_to_json(components);
    if (o.combined) {
      Json list = Json::array();
      combined.for_each(
          [&](const Embedding& e) {
            Json pos = Json::array();
            for (const auto& p : e.positions) pos.push_back(io::rationals_to_json(p));
            list.push_back(std::move(pos));
          },
          o.cap);
      report["combined_corners"] = std::move(list);
    }
  }
  if (o.timing) {
    report["timing_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  emit(report);
  return 0;
}

// pver -----------------------------------------------------------------------

struct PverOptions {
  std::string graph;
  std::string p_plus;
  std::string p_minus;
  bool exact = false;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::string grid;
  std::uint64_t budget = ExactOptions{}.budget;
  unsigned threads = 0;
  std::string census_csv;
  std::string poly_json;
  std::string curve_csv;
  bool timing = false;
};

int run_pver(const PverOptions& o, const std::vector<std::string>& args) {
  const auto t0 = std::chrono::steady_clock::now();
  Json digests = Json::object();
  const auto g = load_graph(o.graph, digests);
  const std::size_t m = g.num_edges();
  if (o.p_plus.empty() != o.p_minus.empty()) {
    throw Error(ErrorCode::Parse, "--p-plus and --p-minus go together");
  }
  if (o.p_plus.empty() && o.grid.empty()) throw Error(ErrorCode::Parse, "give --p-plus/--p-minus or --grid");
  if (o.exact && o.samples) throw Error(ErrorCode::Parse, "--exact and --samples are exclusive");
  std::optional<OutlierModel> model;
  if (!o.p_plus.empty()) {
    model = OutlierModel::homogeneous(m, parse_probability(o.p_plus), parse_probability(o.p_minus));
    validate_model(*model, m);
  }
  const auto grid = o.grid.empty() ? std::vector<Rational>{} : parse_grid(o.grid);

  Json report = envelope("pver", args, digests);
  std::vector<io::CurvePoint> curve;
  if (o.samples == 0) {
    ExactOptions eo;
    eo.budget = o.budget;
    eo.threads = o.threads;
    SupportCensus census;
    report["mode"] = "exact";
    if (model) {
      const auto r = exact_p_ver(g, *model, eo);
      census = r.census;
      report["p_ver"] = Json{{"p_plus", to_string(model->p_plus.empty() ? Rational(0) : model->p_plus[0])},
                             {"p_minus", to_string(model->p_minus.empty() ? Rational(0) : model->p_minus[0])},
                             {"value", to_string(r.p_ver)},
                             {"decimal", io::decimal(r.p_ver.get_d())}};
    } else {
      census = support_census(g, eo);
    }
    const auto poly = polynomial_from(census);
    report["census"] = io::census_json(census);
    report["polynomial"] = io::polynomial_json(poly);
    if (!grid.empty()) {
      Json pts = Json::array();
      for (const auto& p : grid) {
        const auto value = poly.evaluate(p);
        curve.push_back({p, value.get_d()});
        pts.push_back(Json{{"p", to_string(p)}, {"p_ver", to_string(value)}, {"decimal", io::decimal(value.get_d())}});
      }
      report["curve"] = std::move(pts);
    }
    if (!o.census_csv.empty()) io::write_file(o.census_csv, io::census_csv(census));
    if (!o.poly_json.empty()) io::write_file(o.poly_json, io::polynomial_json(poly).dump() + "\n");
  } else {
    report["mode"] = "monte_carlo";
    report["seed"] = o.seed;
    report["samples"] = o.samples;
    auto mc_json = [](const MonteCarloResult& r) {
      return Json{{"estimate", io::decimal(r.estimate)}, {"half_width", io::decimal(r.half_width)}};
    };
    if (model) {
      const auto r = monte_carlo_p_ver(g, *model, o.samples, o.seed, o.threads);
      Json j = mc_json(r);
      j["p_plus"] = to_string(model->p_plus.empty() ? Rational(0) : model->p_plus[0]);
      j["p_minus"] = to_string(model->p_minus.empty() ? Rational(0) : model->p_minus[0]);
      report["p_ver"] = std::move(j);
    }
    if (!grid.empty()) {
      Json pts = Json::array();
      for (const auto& p : grid) {
        MonteCarloResult r;
        if (sgn(p) == 0) {
          r = MonteCarloResult{1.0, 0.0, o.samples, o.samples};  // no outliers can occur
        } else {
          const auto sym = OutlierModel::symmetric(m, p);
          validate_model(sym, m);
          r = monte_carlo_p_ver(g, sym, o.samples, o.seed, o.threads);
        }
        curve.push_back({p, r.estimate});
        Json j = mc_json(r);
        j["p"] = to_string(p);
        pts.push_back(std::move(j));
      }
      report["curve"] = std::move(pts);
    }
  }
  if (!o.curve_csv.empty()) io::write_file(o.curve_csv, io::curve_csv(curve));
  if (o.timing) {
    report["timing_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  emit(report);
  return 0;
}

// sample ---------------------------------------------------------------------

struct SampleOptions {
  std::string graph;
  std::string p_plus;
  std::string p_minus;
  int dims = 1;
  std::uint64_t seed = 0;
  std::string neg_range = "-10:-1";
  std::string pos_range = "1:10";
  std::string out;
};

int run_sample(const SampleOptions& o) {
  Json digests = Json::object();
  const auto g = load_graph(o.graph, digests);
  auto model = OutlierModel::homogeneous(g.num_edges(), parse_probability(o.p_plus), parse_probability(o.p_minus));
  model.magnitude_range_neg = parse_interval(o.neg_range);
  model.magnitude_range_pos = parse_interval(o.pos_range);
  const auto inst = sample_outliers(g, model, o.dims, o.seed);
  const auto text = io::instance_to_json(inst).dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << text;
  } else {
    io::write_file(o.out, text);
  }
  return 0;
}

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--graph", in.graph, "graph JSON file")->required();
  auto* sup = cmd->add_option("--support", in.support, "signed outlier support JSON file");
  auto* eps = cmd->add_option("--epsilon", in.epsilon, "JSON file with a per-edge \"epsilon\" array");
  sup->excludes(eps);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verifiability of l1 translation localization on measurement graphs"};
  app.require_subcommand(1);
  std::vector<std::string> args(argv + 1, argv + argc);

  CheckOptions check;
  auto* check_cmd = app.add_subcommand("check", "classify one signed outlier support");
  add_input_options(check_cmd, check.input);
  check_cmd->add_flag("--oracle", check.oracle, "cross-check against brute-force spanning-tree screening");
  check_cmd->add_flag("--corners", check.corners, "enumerate all corners of the optimal set");
  check_cmd->add_flag("--trace", check.trace, "print one line per dual simplex pivot to stderr");
  check_cmd->add_flag("--timing", check.timing, "add wall-clock timing to the report");

  CornersOptions corners;
  auto* corners_cmd = app.add_subcommand("corners", "corner set and maximal verifiable components");
  add_input_options(corners_cmd, corners.input);
  corners_cmd->add_option("--dims", corners.dims, "expected number of epsilon columns");
  corners_cmd->add_option("--cap", corners.cap, "limit on materialized combined corners");
  corners_cmd->add_flag("--combined", corners.combined, "list the d-dimensional combined corners");
  corners_cmd->add_flag("--timing", corners.timing, "add wall-clock timing to the report");

  PverOptions pver;
  auto* pver_cmd = app.add_subcommand("pver", "verifiability probability of a graph");
  pver_cmd->add_option("--graph", pver.graph, "graph JSON file")->required();
  pver_cmd->add_option("--p-plus", pver.p_plus, "probability of a positive outlier per edge");
  pver_cmd->add_option("--p-minus", pver.p_minus, "probability of a negative outlier per edge");
  pver_cmd->add_flag("--exact", pver.exact, "enumerate every signed support (default)");
  pver_cmd->add_option("--samples", pver.samples, "Monte Carlo sample count");
  pver_cmd->add_option("--seed", pver.seed, "Monte Carlo seed");
  pver_cmd->add_option("--grid", pver.grid, "pmin:pmax:steps curve under p+ = p- = p/2");
  pver_cmd->add_option("--budget", pver.budget, "largest number of supports to enumerate");
  pver_cmd->add_option("--threads", pver.threads, "worker threads (default: VERILOCAL_THREADS or all cores)");
  pver_cmd->add_option("--census-csv", pver.census_csv, "write the census CSV here");
  pver_cmd->add_option("--poly-json", pver.poly_json, "write the polynomial JSON here");
  pver_cmd->add_option("--curve-csv", pver.curve_csv, "write the p,p_ver curve CSV here");
  pver_cmd->add_flag("--timing", pver.timing, "add wall-clock timing to the report");

  SampleOptions sample;
  auto* sample_cmd = app.add_subcommand("sample", "draw a random outlier instance for a graph");
  sample_cmd->add_option("--graph", sample.graph, "graph JSON file")->required();
  sample_cmd->add_option("--p-plus", sample.p_plus, "probability of a positive outlier")->required();
  sample_cmd->add_option("--p-minus", sample.p_minus, "probability of a negative outlier")->required();
  sample_cmd->add_option("--dims", sample.dims, "dimension of the instance");
  sample_cmd->add_option("--seed", sample.seed, "random seed");
  sample_cmd->add_option("--neg-range", sample.neg_range, "negative magnitude interval lo:hi");
  sample_cmd->add_option("--pos-range", sample.pos_range, "positive magnitude interval lo:hi");
  sample_cmd->add_option("--out", sample.out, "write the instance here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*check_cmd) return run_check(check, args);
    if (*corners_cmd) return run_corners(corners, args);
    if (*pver_cmd) return run_pver(pver, args);
    if (*sample_cmd) return run_sample(sample);
  } catch (const Error& e) {
    std::cerr << "verilocal: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "verilocal: internal error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
