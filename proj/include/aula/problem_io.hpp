/*
 Copyright 2026 Aula contributors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include "aula/problem.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>

namespace aula {

/// Problem file could not be read or does not follow the schema.
/// line/column are 1-based and zero when the error is not positional.
class ProblemParseError : public std::runtime_error {
 public:
  ProblemParseError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct LoadedProblem {
  ConstrainedProblem problem;
  std::optional<VectorXd> x0;
  std::string name;
};

/// Factory for programmatically registered ("custom") problems. The params
/// object is the "params" member of the problem file, possibly empty.
using ProblemFactory = std::function<LoadedProblem(const nlohmann::json& params)>;

class ProblemRegistry {
 public:
  void add(const std::string& name, ProblemFactory factory);
  bool contains(const std::string& name) const;
  LoadedProblem make(const std::string& name, const nlohmann::json& params) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, ProblemFactory> factories_;
};

// File layout:
//
//   {
//     "kind": "lp" | "qp" | "custom",
//     "objective":    { "c": [..], "Q": [[..], ..], "constant": 0 },
//     "inequalities": { "A": [[..], ..], "b": [..] },   // A x + b <= 0
//     "equalities":   { "A": [[..], ..], "b": [..] },   // A x + b == 0
//     "x0": [..],
//     "name": "...", "params": { .. }                  // custom only
//   }
//
// "Q" is rejected for kind "lp". Everything but "kind" and "objective.c" is
// optional for lp/qp; custom problems only need "name".
LoadedProblem parse_problem(const std::string& text, const ProblemRegistry& registry = {});
LoadedProblem load_problem_file(const std::string& path, const ProblemRegistry& registry = {});

nlohmann::json program_to_json(const QuadraticProgram& program,
                               const std::optional<VectorXd>& x0 = std::nullopt);

}  // namespace aula
