#include <stdexcept>

#include "dse/features/features.hpp"

namespace dse::features {

int feature_count(Mode m) { return m == Mode::Concolic ? kBranchFeatures : kStateFeatures; }

const std::vector<CatalogEntry>& branch_catalog() {
  static const std::vector<CatalogEntry> c = {
      {1, "branch in the main function", true},
      {2, "true branch of a loop", true},
      {3, "false branch of a loop", true},
      {4, "branch inside a loop body", true},
      {5, "true branch of a case statement", true},
      {6, "false branch of a case statement", true},
      {7, "condition has a constant operand", true},
      {8, "condition has an array dereference", true},
      {9, "condition is an equality test", true},
      {10, "condition joins two or more comparisons", true},
      {11, "branch belongs to a case statement", true},
      {12, "enclosing function has at least 10 branch sites", true},
      {13, "branch in the first 10% of the path", false},
      {14, "branch in the last 10% of the path", false},
      {15, "branch appearing most frequently in the explored paths", false},
      {16, "branch appearing least frequently in the explored paths", false},
      {17, "branch right after the just-negated branch", false},
      {18, "branch in the function of the just-negated branch", false},
      {19, "new context of length 1", false},
      {20, "new context of length 2", false},
      {21, "new context of length 3", false},
      {22, "new context of length 4", false},
      {23, "new context of length 5", false},
      {24, "branch negated more than 10 times", false},
      {25, "branch negated more than 20 times", false},
      {26, "branch negated more than 30 times", false},
      {27, "opposite branch is uncovered", false},
      {28, "last negation of the branch failed", false},
      {29, "negation of the branch failed more than 5 times", false},
      {30, "opposite branch within distance 10 of an uncovered branch", false},
      {31, "opposite branch within distance 20 of an uncovered branch", false},
      {32, "opposite branch taken in the last 10 executions", false},
      {33, "opposite branch taken in the last 20 executions", false},
      {34, "opposite branch taken in the last 30 executions", false},
      {35, "branch in the function with the most uncovered branches", false},
      {36, "branch in the most recently reached function", false},
      {37, "branch in the second half of the path", false},
      {38, "branch never negated before", false},
      {39, "enclosing function contains a loop", false},
      {40, "condition depends on two or more input symbols", false},
  };
  return c;
}

const std::vector<CatalogEntry>& state_catalog() {
  static const std::vector<CatalogEntry> c = {
      {1, "branch in the main function", true},
      {2, "true branch of a loop", true},
      {3, "false branch of a loop", true},
      {4, "branch inside a loop body", true},
      {5, "true branch of a case statement", true},
      {6, "false branch of a case statement", true},
      {7, "branch appearing most frequently", false},
      {8, "branch appearing least frequently", false},
      {9, "branch located right after the just-selected branch", false},
      {10, "branch selected more than 10 times", false},
      {11, "branch selected more than 20 times", false},
      {12, "branch selected more than 30 times", false},
      {13, "branch located in the function of just-selected branch", false},
      {14, "branch is uncovered", false},
      {15, "branch selected in the last 10 executions", false},
      {16, "branch selected in the last 20 executions", false},
      {17, "branch selected in the last 30 executions", false},
      {18, "branch in the function that has the largest number of uncovered branches", false},
      {19, "branch inside the most recently reached function", false},
      {20, "10% states having the deepest depth", false},
      {21, "10% states having the shallowest depth", false},
      {22, "10% states with the smallest number of instructions", false},
      {23, "10% states with the smallest number of covered instructions in currently executing function", false},
      {24, "10% states with the lowest query solving cost", false},
      {25, "10% states that are closest to the uncovered instructions", false},
      {26, "10% states with the smallest number of executed instructions since the last new instruction was covered", false},
  };
  return c;
}

const std::vector<CatalogEntry>& catalog(Mode m) {
  return m == Mode::Concolic ? branch_catalog() : state_catalog();
}

}  // namespace dse::features
