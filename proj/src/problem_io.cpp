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

#include "aula/problem_io.hpp"

#include <fstream>
#include <sstream>

namespace aula {

using nlohmann::json;

namespace {

std::string positional_message(const std::string& what, int line, int column) {
  if (line <= 0) return what;
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
}

// nlohmann reports a byte offset; translate it to line/column.
std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

VectorXd read_vector(const json& node, const std::string& where) {
  if (!node.is_array()) throw ProblemParseError(where + " must be an array of numbers");
  VectorXd v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) {
      throw ProblemParseError(where + "[" + std::to_string(i) + "] is not a number");
    }
    v[static_cast<Eigen::Index>(i)] = node[i].get<double>();
  }
  return v;
}

MatrixXd read_matrix(const json& node, const std::string& where, int cols) {
  if (!node.is_array()) throw ProblemParseError(where + " must be an array of rows");
  MatrixXd mat(static_cast<Eigen::Index>(node.size()), cols);
  for (std::size_t r = 0; r < node.size(); ++r) {
    const VectorXd row = read_vector(node[r], where + "[" + std::to_string(r) + "]");
    if (row.size() != cols) {
      throw ProblemParseError(where + "[" + std::to_string(r) + "] has " +
                              std::to_string(row.size()) + " entries, expected " +
                              std::to_string(cols));
    }
    mat.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return mat;
}

void read_constraint_block(const json& doc, const char* key, int n, MatrixXd& A, VectorXd& b) {
  A.resize(0, n);
  b.resize(0);
  if (!doc.contains(key)) return;
  const json& block = doc.at(key);
  if (!block.is_object()) throw ProblemParseError(std::string(key) + " must be an object");
  if (block.contains("A")) A = read_matrix(block.at("A"), std::string(key) + ".A", n);
  if (block.contains("b")) {
    b = read_vector(block.at("b"), std::string(key) + ".b");
  } else {
    b = VectorXd::Zero(A.rows());
  }
  if (b.size() != A.rows()) {
    throw ProblemParseError(std::string(key) + ".b has " + std::to_string(b.size()) +
                            " entries for " + std::to_string(A.rows()) + " rows");
  }
}

json vector_json(const VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json matrix_json(const MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) arr.push_back(vector_json(m.row(r).transpose()));
  return arr;
}

}  // namespace

ProblemParseError::ProblemParseError(const std::string& what, int line, int column)
    : std::runtime_error(positional_message(what, line, column)), line_(line), column_(column) {}

void ProblemRegistry::add(const std::string& name, ProblemFactory factory) {
  factories_[name] = std::move(factory);
}

bool ProblemRegistry::contains(const std::string& name) const {
  return factories_.count(name) > 0;
}

LoadedProblem ProblemRegistry::make(const std::string& name, const json& params) const {
  auto it = factories_.find(name);
  if (it == factories_.end()) {
    throw ProblemParseError("unknown custom problem '" + name + "'");
  }
  LoadedProblem loaded = it->second(params);
  loaded.name = name;
  return loaded;
}

std::vector<std::string> ProblemRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

LoadedProblem parse_problem(const std::string& text, const ProblemRegistry& registry) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    const auto [line, column] = line_column(text, err.byte);
    throw ProblemParseError(err.what(), line, column);
  }

  try {
    if (!doc.is_object()) throw ProblemParseError("problem file must hold a JSON object");
    if (!doc.contains("kind") || !doc.at("kind").is_string()) {
      throw ProblemParseError("missing string field 'kind'");
    }
    const std::string kind = doc.at("kind").get<std::string>();

    std::optional<VectorXd> x0;
    if (doc.contains("x0")) x0 = read_vector(doc.at("x0"), "x0");

    if (kind == "custom") {
      if (!doc.contains("name") || !doc.at("name").is_string()) {
        throw ProblemParseError("custom problems need a string field 'name'");
      }
      const json params = doc.contains("params") ? doc.at("params") : json::object();
      LoadedProblem loaded = registry.make(doc.at("name").get<std::string>(), params);
      if (x0) {
        if (x0->size() != loaded.problem.dim_x()) {
          throw ProblemParseError("x0 has " + std::to_string(x0->size()) +
                                  " entries, problem has " +
                                  std::to_string(loaded.problem.dim_x()) + " variables");
        }
        loaded.x0 = x0;
      }
      return loaded;
    }
    if (kind != "lp" && kind != "qp") {
      throw ProblemParseError("kind must be one of lp, qp, custom (got '" + kind + "')");
    }

    if (!doc.contains("objective") || !doc.at("objective").is_object() ||
        !doc.at("objective").contains("c")) {
      throw ProblemParseError("missing objective.c");
    }
    const json& objective = doc.at("objective");
    QuadraticProgram qp;
    qp.c = read_vector(objective.at("c"), "objective.c");
    const int n = static_cast<int>(qp.c.size());
    if (n == 0) throw ProblemParseError("objective.c is empty");
    if (objective.contains("constant")) {
      if (!objective.at("constant").is_number()) {
        throw ProblemParseError("objective.constant is not a number");
      }
      qp.c0 = objective.at("constant").get<double>();
    }
    if (objective.contains("Q")) {
      if (kind == "lp") throw ProblemParseError("objective.Q is not allowed for kind lp");
      qp.Q = read_matrix(objective.at("Q"), "objective.Q", n);
      if (qp.Q.rows() != n) throw ProblemParseError("objective.Q must be square");
      if (!qp.Q.isApprox(qp.Q.transpose(), 1e-12) && !qp.Q.isZero(0.0)) {
        throw ProblemParseError("objective.Q must be symmetric");
      }
    } else {
      qp.Q = MatrixXd::Zero(n, n);
    }
    read_constraint_block(doc, "inequalities", n, qp.A_ineq, qp.b_ineq);
    read_constraint_block(doc, "equalities", n, qp.A_eq, qp.b_eq);
    if (x0 && x0->size() != n) {
      throw ProblemParseError("x0 has " + std::to_string(x0->size()) + " entries, expected " +
                              std::to_string(n));
    }
    return LoadedProblem{ConstrainedProblem::from_program(std::move(qp)), x0, kind};
  } catch (const json::exception& err) {
    throw ProblemParseError(err.what());
  }
}

LoadedProblem load_problem_file(const std::string& path, const ProblemRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw ProblemParseError("cannot open problem file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem(buffer.str(), registry);
}

json program_to_json(const QuadraticProgram& program, const std::optional<VectorXd>& x0) {
  json doc;
  doc["kind"] = program.is_linear() ? "lp" : "qp";
  doc["objective"]["c"] = vector_json(program.c);
  if (program.c0 != 0.0) doc["objective"]["constant"] = program.c0;
  if (!program.is_linear()) doc["objective"]["Q"] = matrix_json(program.Q);
  if (program.A_ineq.rows() > 0) {
    doc["inequalities"]["A"] = matrix_json(program.A_ineq);
    doc["inequalities"]["b"] = vector_json(program.b_ineq);
  }
  if (program.A_eq.rows() > 0) {
    doc["equalities"]["A"] = matrix_json(program.A_eq);
    doc["equalities"]["b"] = vector_json(program.b_eq);
  }
  if (x0) doc["x0"] = vector_json(*x0);
  return doc;
}

}  // namespace aula
