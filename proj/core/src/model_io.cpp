#include "lakelet/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "lakelet/error.hpp"
#include "lakelet/text.hpp"

namespace lakelet {
namespace {

double number(std::string_view s) {
  const auto v = text::parse_double(s);
  if (!v) fail(ErrorCode::kParseError, "bad number '" + std::string(s) + "' in model file");
  return *v;
}

std::string value_of(const std::string& field, std::string_view key) {
  const std::string prefix = std::string(key) + "=";
  if (field.rfind(prefix, 0) != 0) fail(ErrorCode::kParseError, "expected " + prefix + " in model file");
  return field.substr(prefix.size());
}

}  // namespace

void write_model(std::ostream& out, const ModelBundle& b) {
  const auto& c = b.clusters;
  out << "model\tk=" << c.k << "\tdims=" << c.dims << "\tseed=" << c.seed << "\titerations=" << c.iterations_run
      << "\tinertia=" << text::format_double(c.inertia) << '\n';
  if (!b.feature_names.empty()) out << "features\t" << text::join(b.feature_names, "\t") << '\n';
  for (std::size_t i = 0; i < c.centroids.size(); ++i) {
    out << "centroid\t" << i;
    for (double v : c.centroids[i]) out << '\t' << text::format_double(v);
    out << '\n';
  }
  for (const auto& m : b.outcomes) {
    out << "outcome\t" << m.cluster_index << "\tcertified=" << (m.certified ? 1 : 0)
        << "\taccuracy=" << text::format_double(m.holdout_accuracy) << "\tbias=" << text::format_double(m.bias);
    for (double w : m.weights) out << '\t' << text::format_double(w);
    out << '\n';
  }
}

ModelBundle read_model(std::istream& in) {
  ModelBundle b;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = text::split(line, '\t');
    if (f[0] == "model") {
      if (f.size() < 6) fail(ErrorCode::kParseError, "short model header");
      b.clusters.k = static_cast<std::size_t>(number(value_of(f[1], "k")));
      b.clusters.dims = static_cast<std::size_t>(number(value_of(f[2], "dims")));
      b.clusters.seed = std::stoull(value_of(f[3], "seed"));
      b.clusters.iterations_run = static_cast<std::size_t>(number(value_of(f[4], "iterations")));
      b.clusters.inertia = number(value_of(f[5], "inertia"));
      header = true;
    } else if (f[0] == "features") {
      b.feature_names.assign(f.begin() + 1, f.end());
    } else if (f[0] == "centroid") {
      if (f.size() != b.clusters.dims + 2) fail(ErrorCode::kParseError, "centroid width differs from dims");
      std::vector<double> c;
      for (std::size_t j = 2; j < f.size(); ++j) c.push_back(number(f[j]));
      b.clusters.centroids.push_back(std::move(c));
    } else if (f[0] == "outcome") {
      if (f.size() != b.clusters.dims + 5) fail(ErrorCode::kParseError, "outcome width differs from dims");
      OutcomeModel m;
      m.cluster_index = static_cast<std::size_t>(number(f[1]));
      m.certified = value_of(f[2], "certified") == "1";
      m.holdout_accuracy = number(value_of(f[3], "accuracy"));
      m.bias = number(value_of(f[4], "bias"));
      for (std::size_t j = 5; j < f.size(); ++j) m.weights.push_back(number(f[j]));
      b.outcomes.push_back(std::move(m));
    } else {
      fail(ErrorCode::kParseError, "unknown model line '" + f[0] + "'");
    }
  }
  if (!header || b.clusters.centroids.size() != b.clusters.k) fail(ErrorCode::kParseError, "incomplete model file");
  return b;
}

void save_model(const std::string& path, const ModelBundle& bundle) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot write " + path);
  write_model(out, bundle);
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoFailure, "cannot read " + path);
  return read_model(in);
}

}  // namespace lakelet
