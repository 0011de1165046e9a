#include "mindist/instance_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mindist/errors.hpp"

namespace mindist {

namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

double number_field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw InputError(std::string("missing field '") + key + "'");
  if (!it->is_number()) throw InputError(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

Vector vector_field(const json& doc, const char* key, int n) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw InputError(std::string("missing field '") + key + "'");
  if (!it->is_array() || static_cast<int>(it->size()) != n) {
    throw InputError(std::string("field '") + key + "' must be an array of " + std::to_string(n) +
                     " numbers");
  }
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    const json& e = (*it)[static_cast<std::size_t>(i)];
    if (!e.is_number()) {
      throw InputError(std::string("field '") + key + "[" + std::to_string(i) +
                       "]' must be a number");
    }
    v(i) = e.get<double>();
  }
  return v;
}

}  // namespace

ProblemInstance parse_instance(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::ostringstream os;
    os << "malformed instance JSON at line " << line << ", column " << col;
    throw InputError(os.str());
  }
  if (!doc.is_object()) throw InputError("instance document must be a JSON object");

  static const std::set<std::string> known{"n", "A", "r", "alpha", "eta", "f", "c"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw InputError("unknown field '" + key + "'");
  }

  const auto nit = doc.find("n");
  if (nit == doc.end()) throw InputError("missing field 'n'");
  if (!nit->is_number_integer() || nit->get<long long>() < 2) {
    throw InputError("field 'n' must be an integer >= 2");
  }
  const int n = nit->get<int>();

  const auto ait = doc.find("A");
  if (ait == doc.end()) throw InputError("missing field 'A'");
  if (!ait->is_array() || static_cast<int>(ait->size()) != n) {
    throw InputError("field 'A' must be an array of " + std::to_string(n) + " rows");
  }
  Matrix A(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = (*ait)[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw InputError("field 'A[" + std::to_string(i) + "]' must be an array of " +
                       std::to_string(n) + " numbers");
    }
    for (int j = 0; j < n; ++j) {
      const json& e = row[static_cast<std::size_t>(j)];
      if (!e.is_number()) {
        throw InputError("field 'A[" + std::to_string(i) + "][" + std::to_string(j) +
                         "]' must be a number");
      }
      A(i, j) = e.get<double>();
    }
  }

  return ProblemInstance(std::move(A), number_field(doc, "r"), number_field(doc, "alpha"),
                         number_field(doc, "eta"), vector_field(doc, "f", n),
                         vector_field(doc, "c", n));
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open instance file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

nlohmann::json instance_to_json(const ProblemInstance& inst) {
  const int n = inst.dim();
  json A = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < n; ++j) row.push_back(inst.A()(i, j));
    A.push_back(std::move(row));
  }
  auto vec = [](const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
  };
  return json{{"n", n},         {"A", std::move(A)},   {"r", inst.r()},
              {"alpha", inst.alpha()}, {"eta", inst.eta()}, {"f", vec(inst.f())},
              {"c", vec(inst.c())}};
}

}  // namespace mindist
