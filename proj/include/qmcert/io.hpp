#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string>

#include "qmcert/certification.hpp"
#include "qmcert/games.hpp"

namespace qmcert::io {

using json = nlohmann::ordered_json;

inline json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row_re = json::array(), row_im = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row_re.push_back(m(i, j).real());
      row_im.push_back(m(i, j).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

inline Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.contains("re") || !j.contains("im"))
    throw std::invalid_argument(std::string(what) + ": matrix needs \"re\" and \"im\" arrays");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (!re.is_array() || re.empty() || re.size() != im.size())
    throw std::invalid_argument(std::string(what) + ": malformed matrix arrays");
  const size_t rows = re.size(), cols = re[0].size();
  Matrix m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (re[i].size() != cols || im[i].size() != cols)
      throw std::invalid_argument(std::string(what) + ": ragged matrix rows");
    for (size_t j2 = 0; j2 < cols; ++j2)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j2)) =
          Complex(re[i][j2].get<double>(), im[i][j2].get<double>());
  }
  return m;
}

inline json channel_to_json(const QuantumChannel& n) {
  json kraus = json::array();
  for (const auto& k : n.kraus) kraus.push_back(matrix_to_json(k));
  return json{{"dA", n.dA}, {"dB", n.dB}, {"kraus", std::move(kraus)}};
}

inline QuantumChannel channel_from_json(const json& j) {
  if (!j.contains("dA") || !j.contains("dB"))
    throw std::invalid_argument("channel: missing dA/dB");
  int dA = j.at("dA").get<int>();
  int dB = j.at("dB").get<int>();
  if (dA < 1 || dB < 1 || dA > tol::dimension_cap || dB > tol::dimension_cap)
    throw std::invalid_argument("channel: dimensions out of range (cap " +
                                std::to_string(tol::dimension_cap) + ")");
  if (j.contains("kraus")) {
    std::vector<Matrix> kraus;
    for (const auto& k : j.at("kraus")) kraus.push_back(matrix_from_json(k, "channel kraus"));
    return QuantumChannel(dA, dB, std::move(kraus));
  }
  if (j.contains("choi")) {
    Matrix m = matrix_from_json(j.at("choi"), "channel choi");
    return choi_to_kraus(ChoiOperator(std::move(m), BipartiteDims(dA, dB)));
  }
  throw std::invalid_argument("channel: needs either \"kraus\" or \"choi\"");
}

inline json state_to_json(const DensityMatrix& s) { return matrix_to_json(s.rho); }

inline DensityMatrix state_from_json(const json& j) {
  return DensityMatrix(matrix_from_json(j, "state"));
}

inline json decomposition_to_json(const SparseDecomposition& dec) {
  json sx = json::array(), sy = json::array(), omega = json::array();
  for (const auto& s : dec.states_x) sx.push_back(state_to_json(s));
  for (const auto& s : dec.states_y) sy.push_back(state_to_json(s));
  for (const auto& [xy, value] : dec.omega)
    omega.push_back(json{{"x", xy.first}, {"y", xy.second}, {"value", value}});
  return json{{"states_x", std::move(sx)}, {"states_y", std::move(sy)}, {"omega", std::move(omega)}};
}

inline SparseDecomposition decomposition_from_json(const json& j) {
  SparseDecomposition dec;
  for (const auto& s : j.at("states_x")) dec.states_x.push_back(state_from_json(s));
  for (const auto& s : j.at("states_y")) dec.states_y.push_back(state_from_json(s));
  for (const auto& entry : j.at("omega"))
    dec.omega[{entry.at("x").get<int>(), entry.at("y").get<int>()}] =
        entry.at("value").get<double>();
  return dec;
}

inline json game_to_json(const Game& g) {
  json sx = json::array(), sy = json::array(), payoff = json::array();
  for (const auto& s : g.scenario.inputs_x) sx.push_back(state_to_json(s));
  for (const auto& s : g.scenario.inputs_y) sy.push_back(state_to_json(s));
  for (int k = 0; k < static_cast<int>(g.payoff.wp.size()); ++k) {
    const auto& w = g.payoff.wp[k];
    for (Eigen::Index x = 0; x < w.rows(); ++x)
      for (Eigen::Index y = 0; y < w.cols(); ++y)
        if (w(x, y) != 0.0)
          payoff.push_back(json{{"b", g.payoff.first_label + k},
                                {"x", static_cast<int>(x)},
                                {"y", static_cast<int>(y)},
                                {"value", w(x, y)}});
  }
  return json{{"inputs_x", std::move(sx)},
              {"inputs_y", std::move(sy)},
              {"outcome_count", g.scenario.outcome_count},
              {"payoff", std::move(payoff)},
              {"eb_threshold", g.eb_threshold}};
}

inline Game game_from_json(const json& j) {
  std::vector<DensityMatrix> xs, ys;
  for (const auto& s : j.at("inputs_x")) xs.push_back(state_from_json(s));
  for (const auto& s : j.at("inputs_y")) ys.push_back(state_from_json(s));
  int outcomes = j.at("outcome_count").get<int>();
  int first_label = 1;
  for (const auto& entry : j.at("payoff"))
    first_label = std::min(first_label, entry.at("b").get<int>());
  Payoff payoff;
  payoff.first_label = first_label;
  for (int k = 0; k < outcomes; ++k)
    payoff.wp.emplace_back(Eigen::MatrixXd::Zero(xs.size(), ys.size()));
  for (const auto& entry : j.at("payoff")) {
    int b = entry.at("b").get<int>() - first_label;
    if (b < 0 || b >= outcomes) throw std::invalid_argument("game: payoff outcome out of range");
    payoff.wp[b](entry.at("x").get<int>(), entry.at("y").get<int>()) =
        entry.at("value").get<double>();
  }
  double threshold = j.value("eb_threshold", 0.0);
  return Game{Scenario(std::move(xs), std::move(ys), outcomes), std::move(payoff), threshold};
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// CSV with header b,x,y,p; rows ordered by (b, x, y).
inline void correlation_to_csv(const Correlation& corr, std::ostream& out) {
  out << "b,x,y,p\n";
  for (int k = 0; k < corr.outcomes(); ++k) {
    const auto& grid = corr.p[k];
    for (Eigen::Index x = 0; x < grid.rows(); ++x)
      for (Eigen::Index y = 0; y < grid.cols(); ++y)
        out << (corr.first_label + k) << ',' << x << ',' << y << ','
            << format_double(grid(x, y)) << '\n';
  }
}

inline Correlation correlation_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("b,x,y,p", 0) != 0)
    throw std::invalid_argument("correlation CSV: missing b,x,y,p header");
  struct Row {
    int b, x, y;
    double p;
  };
  std::vector<Row> rows;
  int min_b = std::numeric_limits<int>::max(), max_b = std::numeric_limits<int>::min();
  int max_x = -1, max_y = -1;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    Row row;
    char trailing;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lf%c", &row.b, &row.x, &row.y, &row.p, &trailing) != 4)
      throw std::invalid_argument("correlation CSV: malformed row at line " +
                                  std::to_string(line_number));
    if (row.x < 0 || row.y < 0)
      throw std::invalid_argument("correlation CSV: negative index at line " +
                                  std::to_string(line_number));
    min_b = std::min(min_b, row.b);
    max_b = std::max(max_b, row.b);
    max_x = std::max(max_x, row.x);
    max_y = std::max(max_y, row.y);
    rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("correlation CSV: no data rows");
  Correlation corr;
  corr.first_label = min_b;
  for (int k = 0; k <= max_b - min_b; ++k)
    corr.p.emplace_back(Eigen::MatrixXd::Zero(max_x + 1, max_y + 1));
  for (const auto& row : rows) corr.p[row.b - min_b](row.x, row.y) = row.p;
  return corr;
}

inline json read_json_file(const std::string& path) {
  if (path == "-") return json::parse(std::cin);
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return json::parse(in);
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << content;
}

}  // namespace qmcert::io
