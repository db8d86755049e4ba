#pragma once

#include <string>
#include <vector>

namespace dse::test {

inline std::vector<std::string> corpus_names() {
  return {"tri.mc", "loopsum.mc", "switchy.mc", "maze.mc", "wide.mc", "deep.mc"};
}

inline std::string corpus_path(const std::string& name) {
  return std::string(DSE_CORPUS_DIR) + "/" + name;
}

inline std::string fixture_path(const std::string& name) {
  return std::string(DSE_FIXTURE_DIR) + "/" + name;
}

}  // namespace dse::test
