#include "mmv/cli.hpp"

#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmv/densities.hpp"
#include "mmv/estimation.hpp"
#include "mmv/io.hpp"
#include "mmv/samplers.hpp"
#include "mmv/transforms.hpp"
#include "mmv/verify.hpp"

namespace mmv {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw UsageError(what + ": '" + text + "' is not a number");
  return v;
}

int to_int(const std::string& text, const std::string& what) {
  const double v = to_double(text, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw UsageError(what + ": '" + text + "' is not an integer");
  }
  return static_cast<int>(v);
}

// "m,n0,n1,..."
ExtendedShape parse_shape(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() < 2) throw UsageError("--shape needs m followed by n0, n1, ...");
  const int m = to_int(parts[0], "--shape");
  std::vector<int> n;
  for (std::size_t i = 1; i < parts.size(); ++i) n.push_back(to_int(parts[i], "--shape"));
  try {
    return ExtendedShape::from_degrees(m, n);
  } catch (const DomainError& e) {
    throw UsageError(std::string("--shape: ") + e.what());
  }
}

// "a0=..,a=..:..[,m=..]"
ExtendedShape parse_params(const std::string& text, std::optional<int> m_hint) {
  std::optional<int> m = m_hint;
  std::optional<double> a0;
  std::vector<double> a;
  for (const auto& item : split(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--params: '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "m") {
      m = to_int(value, "--params m");
    } else if (key == "a0") {
      a0 = to_double(value, "--params a0");
    } else if (key == "a") {
      for (const auto& v : split(value, ':')) a.push_back(to_double(v, "--params a"));
    } else {
      throw UsageError("--params: unknown key '" + key + "'");
    }
  }
  if (!a0) throw UsageError("--params needs a0");
  if (!m) throw UsageError("--params needs m (m=..) when the input does not fix it");
  try {
    return ExtendedShape::from_params(*m, *a0, a);
  } catch (const DomainError& e) {
    throw UsageError(std::string("--params: ") + e.what());
  }
}

Family parse_family(const std::string& name) {
  auto f = family_from_name(name);
  if (!f) throw UsageError("unknown family '" + name + "'");
  return *f;
}

std::optional<KernelParams> parse_kernel_flag(const std::string& text) {
  if (text.empty()) return std::nullopt;
  try {
    return parse_kernel(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--kernel: ") + e.what());
  }
}

FamilyModel build_model(Family family, const ExtendedShape& shape,
                        const std::optional<KernelParams>& kernel, int split_at) {
  try {
    return FamilyModel::make(family, shape, kernel, split_at);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  } catch (const ShapeError& e) {
    throw UsageError(e.what());
  }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_file(path, text);
  }
}

std::string format17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string input, model = "dependent", out;
  std::optional<double> seed_a0, seed_a;
  int restarts = 5;
  int max_iters = 2000;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  FitConfig cfg;
  if (a.model == "dependent") {
    cfg.model = Beta2Model::dependent;
  } else if (a.model == "independent") {
    cfg.model = Beta2Model::independent;
  } else {
    throw UsageError("--model must be dependent or independent");
  }
  if (a.seed_a0.has_value() != a.seed_a.has_value()) {
    throw UsageError("--seed-a0 and --seed-a must be given together");
  }
  if (a.seed_a0) cfg.seed = std::make_pair(*a.seed_a0, *a.seed_a);
  cfg.restarts = a.restarts;
  cfg.max_iters = a.max_iters;
  if (cfg.restarts < 1 || cfg.max_iters < 1) throw UsageError("--restarts and --max-iters must be positive");

  const auto collection = io::parse_collection(io::read_file(a.input));
  if (collection.kind != io::CollectionKind::spd) {
    throw io::DataError("fit needs an spd collection (run `gram` on block data first)");
  }
  if (collection.items.empty()) throw io::DataError("fit: the collection has no items");
  if (cfg.seed) {
    const double bound = 0.5 * (collection.m - 1);
    if (!(cfg.seed->first > bound) || !(cfg.seed->second > bound)) {
      throw UsageError("seed parameters must exceed (m-1)/2");
    }
  }
  const FitResult r = fit_beta2(collection.items, cfg);
  json j;
  j["model"] = to_string(cfg.model);
  j["a0"] = r.a0_hat;
  j["a"] = r.a_hat;
  j["loglik"] = r.loglik;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["seed_used"] = {r.seed_used.first, r.seed_used.second};
  j["seed_fallback"] = r.seed_fallback;
  j["m"] = collection.m;
  j["k"] = collection.items.size();
  emit(a.out, j.dump() + "\n", out);
  if (r.seed_fallback) err << "warning: univariate seed fell back to a fixed value (degenerate data)\n";
  if (!r.converged) {
    err << "fit did not converge: " << r.diagnostics << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

struct SampleArgs {
  std::string family, shape, kernel = "gaussian", out;
  long long n = 1;
  unsigned long long seed = 0;
  int split = 0;
};

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  const Family family = parse_family(a.family);
  const ExtendedShape shape = parse_shape(a.shape);
  const auto kernel_params = parse_kernel_flag(a.kernel);
  if (a.n < 0) throw UsageError("--n must be nonnegative");
  KernelSpec kernel;
  try {
    kernel = make_kernel(kernel_params.value_or(KernelParams::gaussian()),
                         family_kernel_dim(family, shape));
    (void)family_layout(family, shape, a.split);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  } catch (const ShapeError& e) {
    throw UsageError(e.what());
  }
  std::vector<Draw> draws;
  try {
    draws = sample_family(family, shape, kernel, a.split, static_cast<std::size_t>(a.n), a.seed);
  } catch (const DomainError& e) {
    if (!shape.integer_view()) throw;
    throw UsageError(e.what());
  }
  std::string text;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    text += io::dump_draw(a.family, i, draws[i]);
    text += '\n';
  }
  emit(a.out, text, out);
  return kExitOk;
}

struct PdfArgs {
  std::string family, shape, params, kernel, input;
  int split = 0;
};

int cmd_pdf(const PdfArgs& a, std::ostream& out, std::ostream& err) {
  const Family family = parse_family(a.family);
  if (a.shape.empty() == a.params.empty()) throw UsageError("give exactly one of --shape and --params");
  const auto kernel_params = parse_kernel_flag(a.kernel);
  if (kernel_params && !family_needs_kernel(family)) {
    err << "warning: family " << a.family << " does not depend on the kernel; --kernel ignored\n";
  }
  const auto observations = io::parse_observations(io::read_file(a.input));
  std::optional<int> m_hint;
  if (!observations.empty()) m_hint = static_cast<int>(observations[0][0].cols());
  const ExtendedShape shape = a.shape.empty() ? parse_params(a.params, m_hint) : parse_shape(a.shape);
  const FamilyModel model = build_model(family, shape, kernel_params, a.split);

  std::ostringstream text;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    double v;
    try {
      v = logpdf(model, observations[i]);
    } catch (const ShapeError& e) {
      throw io::DataError("item " + std::to_string(i) + ": " + e.what());
    } catch (const DomainError& e) {
      err << "warning: item " << i << ": " << e.what() << "\n";
      v = -std::numeric_limits<double>::infinity();
    }
    if (v == -std::numeric_limits<double>::infinity()) {
      err << "warning: item " << i << " lies outside the support; log-density is -inf\n";
    }
    text << format17(v) << "\n";
  }
  out << text.str();
  return kExitOk;
}

struct GramArgs {
  std::string input, out;
  std::optional<int> anchor;
};

int cmd_gram(const GramArgs& a, std::ostream& out) {
  const auto blocks = io::parse_collection(io::read_file(a.input));
  if (blocks.kind != io::CollectionKind::block) throw io::DataError("gram needs a block collection");
  io::MatrixCollection result;
  result.m = blocks.m;
  result.kind = io::CollectionKind::spd;
  if (!a.anchor) {
    for (std::size_t i = 0; i < blocks.items.size(); ++i) {
      Matrix g = gram(blocks.items[i]);
      if (!is_spd(g)) {
        throw NearSingularError("item " + std::to_string(i) + ": Gram matrix is rank deficient", 0.0);
      }
      result.items.push_back(std::move(g));
    }
  } else {
    const int idx = *a.anchor;
    if (idx < 0 || idx >= static_cast<int>(blocks.items.size())) {
      throw UsageError("--anchor-index is out of range");
    }
    if (blocks.items.size() < 2) throw io::DataError("gram: an anchor needs at least one other block");
    std::vector<MatrixBlock> ordered;
    ordered.push_back(blocks.items[static_cast<std::size_t>(idx)]);
    for (std::size_t i = 0; i < blocks.items.size(); ++i) {
      if (static_cast<int>(i) != idx) ordered.push_back(blocks.items[i]);
    }
    auto dec = decompose_blocks(ordered, CompanionFamily::beta2);
    for (std::size_t i = 0; i < dec.companions.size(); ++i) {
      if (!is_spd(dec.companions[i])) {
        throw NearSingularError("companion " + std::to_string(i) + " is rank deficient", 0.0);
      }
    }
    result.items = std::move(dec.companions);
  }
  emit(a.out, io::dump_collection(result), out);
  return kExitOk;
}

struct TransformArgs {
  std::string name, input, out;
};

int cmd_transform(const TransformArgs& a, std::ostream& out) {
  static const std::vector<std::string> names = {"t_to_r", "r_to_t", "beta1_to_beta2",
                                                 "beta2_to_beta1", "invert_spd"};
  if (std::find(names.begin(), names.end(), a.name) == names.end()) {
    throw UsageError("unknown transform '" + a.name + "'");
  }
  const bool block_map = a.name == "t_to_r" || a.name == "r_to_t";
  const auto input = io::parse_collection(io::read_file(a.input));
  if (block_map != (input.kind == io::CollectionKind::block)) {
    throw io::DataError(a.name + " needs a " + std::string(block_map ? "block" : "spd") + " collection");
  }
  json doc;
  doc["m"] = input.m;
  doc["kind"] = block_map ? "block" : "spd";
  doc["transform"] = a.name;
  doc["items"] = json::array();
  for (const auto& x : input.items) {
    Matrix y;
    double log_jac = 0.0;
    if (a.name == "t_to_r") {
      auto r = t_to_r(x);
      y = r.block;
      log_jac = r.log_jac;
    } else if (a.name == "r_to_t") {
      auto r = r_to_t(x);
      y = r.block;
      log_jac = r.log_jac;
    } else if (a.name == "beta1_to_beta2") {
      y = beta1_to_beta2(x);
      log_jac = beta1_to_beta2_log_jac(x);
    } else if (a.name == "beta2_to_beta1") {
      y = beta2_to_beta1(x);
      log_jac = -beta1_to_beta2_log_jac(y);
    } else {
      auto r = invert_spd(x);
      y = r.matrix;
      log_jac = r.log_jac;
    }
    json rows = json::array();
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < y.cols(); ++j) row.push_back(y(i, j));
      rows.push_back(std::move(row));
    }
    doc["items"].push_back({{"rows", y.rows()}, {"data", rows}, {"log_jac", log_jac}});
  }
  emit(a.out, doc.dump() + "\n", out);
  return kExitOk;
}

struct VerifyArgs {
  std::vector<std::string> checks;
  bool all = false;
  bool list = false;
  std::string out;
};

json report_json(const CheckReport& r) {
  json j;
  j["name"] = r.name;
  j["statistic"] = r.statistic;
  j["target"] = r.target;
  j["tolerance"] = r.tolerance;
  j["passed"] = r.passed;
  j["detail"] = r.detail;
  return j;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::string> missing;
  if (!registry_complete(&missing)) {
    for (const auto& m : missing) err << "check registry is missing: " << m << "\n";
    return kExitNumeric;
  }
  if (a.list) {
    for (const auto& c : check_registry()) out << c.name << "\n";
    return kExitOk;
  }
  std::vector<const RegisteredCheck*> selected;
  if (a.all) {
    for (const auto& c : check_registry()) selected.push_back(&c);
  } else {
    if (a.checks.empty()) throw UsageError("verify needs --all, --list or --check NAME");
    for (const auto& name : a.checks) {
      const auto* c = find_check(name);
      if (!c) throw UsageError("unknown check '" + name + "' (see verify --list)");
      selected.push_back(c);
    }
  }
  std::string text;
  bool all_passed = true;
  for (const auto* c : selected) {
    const CheckReport r = c->run();
    all_passed = all_passed && r.passed;
    const std::string line = report_json(r).dump() + "\n";
    if (a.out.empty()) {
      out << line << std::flush;
    } else {
      text += line;
    }
  }
  if (!a.out.empty()) io::write_file(a.out, text);
  return all_passed ? kExitOk : kExitNumeric;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multimatricvariate distributions: densities, sampling, fitting and checks", "mmv"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit of the matrix beta II models");
  fit_cmd->add_option("input", fit.input, "spd collection (JSON)")->required();
  fit_cmd->add_option("--model", fit.model, "dependent or independent");
  fit_cmd->add_option("--seed-a0", fit.seed_a0, "explicit starting a0");
  fit_cmd->add_option("--seed-a", fit.seed_a, "explicit starting a");
  fit_cmd->add_option("--restarts", fit.restarts, "number of simplex starts");
  fit_cmd->add_option("--max-iters", fit.max_iters, "simplex iterations per start");
  fit_cmd->add_option("--out", fit.out, "output path (default stdout)");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Draw from a family, one JSON line per draw");
  sample_cmd->add_option("--family", sample.family)->required();
  sample_cmd->add_option("--shape", sample.shape, "m,n0,n1,...")->required();
  sample_cmd->add_option("--kernel", sample.kernel, "gaussian | pearson7:nu=.. | kotz:T=..,r=..,s=..");
  sample_cmd->add_option("--n", sample.n, "number of draws");
  sample_cmd->add_option("--seed", sample.seed);
  sample_cmd->add_option("--split", sample.split, "leading non-inverted matrices (inverted families)");
  sample_cmd->add_option("--out", sample.out);

  PdfArgs pdf;
  auto* pdf_cmd = app.add_subcommand("pdf", "Log-density of each observation in a file");
  pdf_cmd->add_option("input", pdf.input, "collection or draw lines")->required();
  pdf_cmd->add_option("--family", pdf.family)->required();
  pdf_cmd->add_option("--shape", pdf.shape, "m,n0,n1,...");
  pdf_cmd->add_option("--params", pdf.params, "a0=..,a=..:..[,m=..]");
  pdf_cmd->add_option("--kernel", pdf.kernel);
  pdf_cmd->add_option("--split", pdf.split);

  GramArgs gram_args;
  auto* gram_cmd = app.add_subcommand("gram", "Reduce a block collection to Gram matrices");
  gram_cmd->add_option("input", gram_args.input, "block collection (JSON)")->required();
  gram_cmd->add_option("--anchor-index", gram_args.anchor,
                       "block used as X0; the others become F_i = T_i'T_i");
  gram_cmd->add_option("--out", gram_args.out);

  TransformArgs transform;
  auto* transform_cmd = app.add_subcommand("transform", "Apply a change of variables to each item");
  transform_cmd->add_option("--name", transform.name,
                            "t_to_r | r_to_t | beta1_to_beta2 | beta2_to_beta1 | invert_spd")
      ->required();
  transform_cmd->add_option("input", transform.input)->required();
  transform_cmd->add_option("--out", transform.out);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run named checks; one JSON report per line");
  verify_cmd->add_option("--check", verify.checks, "check name (repeatable)");
  verify_cmd->add_flag("--all", verify.all, "run every registered check");
  verify_cmd->add_flag("--list", verify.list, "list check names");
  verify_cmd->add_option("--out", verify.out);

  std::vector<std::string> argv_store = {"mmv"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, out, err);
    if (*sample_cmd) return cmd_sample(sample, out);
    if (*pdf_cmd) return cmd_pdf(pdf, out, err);
    if (*gram_cmd) return cmd_gram(gram_args, out);
    if (*transform_cmd) return cmd_transform(transform, out);
    if (*verify_cmd) return cmd_verify(verify, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const io::DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace mmv
