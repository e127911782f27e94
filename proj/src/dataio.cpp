#include "fuvalkit/dataio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string_view>

namespace fuvalkit {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view token, double& out) {
  // from_chars rejects a leading '+', which LIBSVM labels commonly carry.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && std::isfinite(out);
}

bool parse_index(std::string_view token, std::size_t& out) {
  const auto* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Problem parse_libsvm(std::istream& in, const LibsvmOptions& options) {
  std::vector<SparseExample> rows;
  std::vector<std::size_t> row_lines;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;

    SparseExample ex;
    bool first = true;
    std::size_t prev = 0;
    while (!body.empty()) {
      const auto space = body.find_first_of(" \t");
      const std::string_view token = body.substr(0, space);
      body = space == std::string_view::npos ? std::string_view{} : trim(body.substr(space));
      if (first) {
        if (!parse_double(token, ex.label))
          throw ParseError(line_no, "bad label '" + std::string(token) + "'");
        first = false;
        continue;
      }
      const auto colon = token.find(':');
      if (colon == std::string_view::npos)
        throw ParseError(line_no, "expected idx:val, got '" + std::string(token) + "'");
      std::size_t idx = 0;
      double val = 0.0;
      if (!parse_index(token.substr(0, colon), idx) || idx == 0)
        throw ParseError(line_no, "bad feature index in '" + std::string(token) + "'");
      if (!parse_double(token.substr(colon + 1), val))
        throw ParseError(line_no, "bad feature value in '" + std::string(token) + "'");
      if (idx <= prev) throw ParseError(line_no, "feature indices must be strictly increasing");
      prev = idx;
      max_index = std::max(max_index, idx);
      ex.features.emplace_back(idx, val);
    }
    rows.push_back(std::move(ex));
    row_lines.push_back(line_no);
  }
  if (rows.empty()) throw ParseError(line_no, "no examples found");

  std::size_t dim = std::max<std::size_t>(max_index, 1);
  if (options.dim_override) {
    if (*options.dim_override < max_index)
      throw ParseError(line_no, "dimension override " + std::to_string(*options.dim_override) +
                                    " is smaller than max index " + std::to_string(max_index));
    dim = *options.dim_override;
  }

  if (options.loss == LossKind::Logistic) {
    std::set<double> distinct;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      distinct.insert(rows[r].label);
      if (distinct.size() > 2) throw ParseError(row_lines[r], "more than two distinct labels");
    }
    std::map<double, double> mapping;
    if (distinct.size() == 2) {
      mapping[*distinct.begin()] = -1.0;
      mapping[*distinct.rbegin()] = 1.0;
    } else {
      const double only = *distinct.begin();
      mapping[only] = only > 0.0 ? 1.0 : -1.0;
    }
    for (auto& ex : rows) ex.label = mapping.at(ex.label);
  }
  for (auto& ex : rows) ex.dim = dim;
  return Problem::from_examples(rows, options.loss);
}

Problem load_libsvm(const std::string& path, const LibsvmOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  return parse_libsvm(in, options);
}

void write_libsvm(const Problem& problem, std::ostream& out) {
  for (std::size_t i = 0; i < problem.n(); ++i) {
    const RowView r = problem.row(i);
    out << format_double(r.label);
    for (std::size_t k = 0; k < r.indices.size(); ++k)
      out << ' ' << (r.indices[k] + 1) << ':' << format_double(r.values[k]);
    out << '\n';
  }
}

void save_libsvm(const Problem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_libsvm(problem, out);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

SyntheticProblem gen_synthetic(const SyntheticSpec& spec) {
  if (spec.n == 0 || spec.d == 0) throw ContractError("synthetic spec needs n >= 1 and d >= 1");
  if (!(spec.noise_std >= 0.0)) throw ContractError("noise_std must be nonnegative");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const bool logistic = spec.mode == SyntheticMode::Logistic;
  // Logistic margins are kept O(1) so the classes overlap and the minimizer is finite.
  const double w_scale = logistic ? 1.0 / std::sqrt(static_cast<double>(spec.d)) : 1.0;
  Vector planted(spec.d);
  for (double& v : planted) v = w_scale * normal(rng);

  std::vector<SparseExample> rows(spec.n);
  for (auto& ex : rows) {
    ex.dim = spec.d;
    ex.features.reserve(spec.d);
    for (std::size_t k = 0; k < spec.d; ++k) ex.features.emplace_back(k + 1, normal(rng));
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& ex : rows) {
    double margin = 0.0;
    for (const auto& [idx, val] : ex.features) margin += val * planted[idx - 1];
    switch (spec.mode) {
      case SyntheticMode::Interpolating:
        ex.label = margin;
        break;
      case SyntheticMode::NoisyLeastSquares:
        ex.label = margin + spec.noise_std * normal(rng);
        break;
      case SyntheticMode::Logistic:
        ex.label = unit(rng) < sigmoid(margin) ? 1.0 : -1.0;
        break;
    }
  }

  SyntheticProblem out;
  out.problem = Problem::from_examples(rows, logistic ? LossKind::Logistic : LossKind::LeastSquares);
  if (spec.mode == SyntheticMode::Interpolating) out.known_wstar = planted;
  return out;
}

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  SyntheticSpec spec;
  if (kind == "interp") {
    spec.mode = SyntheticMode::Interpolating;
  } else if (kind == "noisy") {
    spec.mode = SyntheticMode::NoisyLeastSquares;
    spec.noise_std = 0.1;
  } else if (kind == "logistic") {
    spec.mode = SyntheticMode::Logistic;
  } else {
    throw ConfigError("unknown synthetic kind '" + kind + "' (expected interp, noisy or logistic)");
  }
  if (colon == std::string::npos) return spec;

  std::stringstream fields(text.substr(colon + 1));
  std::string field;
  while (std::getline(fields, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ConfigError("synthetic field '" + field + "' lacks '='");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    try {
      if (key == "n") {
        spec.n = std::stoul(value);
      } else if (key == "d") {
        spec.d = std::stoul(value);
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "noise") {
        spec.noise_std = std::stod(value);
      } else {
        throw ConfigError("unknown synthetic field '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw ConfigError("bad value '" + value + "' for synthetic field '" + key + "'");
    }
  }
  if (spec.n == 0 || spec.d == 0) throw ConfigError("synthetic spec needs n >= 1 and d >= 1");
  return spec;
}

}  // namespace fuvalkit
