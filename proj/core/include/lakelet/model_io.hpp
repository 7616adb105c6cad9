#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lakelet/kmeans.hpp"
#include "lakelet/recommend.hpp"

namespace lakelet {

// Line-delimited text model file:
//   model<TAB>k=<k><TAB>dims=<d><TAB>seed=<s><TAB>iterations=<n><TAB>inertia=<x>
//   features<TAB><name>...            (optional)
//   centroid<TAB><index><TAB><v>...   one per cluster
//   outcome<TAB><cluster><TAB>certified=<0|1><TAB>accuracy=<a><TAB>bias=<b><TAB><w>...
// Numbers use the shortest round-trip decimal form.
struct ModelBundle {
  ClusterModel clusters;
  std::vector<OutcomeModel> outcomes;
  std::vector<std::string> feature_names;
};

void write_model(std::ostream& out, const ModelBundle& bundle);
ModelBundle read_model(std::istream& in);

void save_model(const std::string& path, const ModelBundle& bundle);
ModelBundle load_model(const std::string& path);

}  // namespace lakelet
