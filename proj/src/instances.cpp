#include "poa/instances.hpp"

#include <fstream>
#include <sstream>

#include "poa/asymptotics.hpp"
#include "poa/errors.hpp"

namespace poa {

namespace {

double parse_number(const std::string& text, const std::string& name) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ParseError("instance '" + name + "': bad number '" + text + "'");
  }
  return v;
}

}  // namespace

std::vector<double> Instance::hints(double M_lo, double M_hi) const {
  if (net.edge_count() == 2 && net.cost(1).as<family::StepGeometric>()) {
    return step_breakpoints(period_base, M_lo, M_hi);
  }
  std::vector<double> out;
  for (const CostFunction& c : net.costs()) {
    for (double b : c.breakpoints(M_lo, M_hi)) out.push_back(b);
  }
  return out;
}

Instance named_instance(const std::string& name) {
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : name.substr(colon + 1);
  try {
    if (name == "pigou") {
      return {name,
              Network::parallel(
                  {CostFunction::identity(), CostFunction::constant(1.0)}),
              0.0};
    }
    if (head == "step" && !tail.empty()) {
      const double a = parse_number(tail, name);
      return {name,
              Network::parallel(
                  {CostFunction::identity(), CostFunction::step_geometric(a)}),
              a};
    }
    if (head == "pwl" && !tail.empty()) {
      const double a = parse_number(tail, name);
      return {name,
              Network::parallel({CostFunction::monomial(1.0, 2.0),
                                 CostFunction::pwl_square(a)}),
              a};
    }
    if (head == "exp") {
      AlphaSequence alpha;
      if (tail == "factorial") {
        alpha = AlphaSequence::factorial();
      } else if (tail.rfind("super_geometric:", 0) == 0) {
        alpha = AlphaSequence::super_geometric(
            parse_number(tail.substr(16), name));
      } else {
        throw ParseError("instance '" + name +
                         "': expected exp:factorial or exp:super_geometric:B");
      }
      return {name,
              Network::parallel({CostFunction::exp_over_x(),
                                 CostFunction::step_exp(std::move(alpha))}),
              0.0};
    }
  } catch (const DomainError& e) {
    throw ParseError("instance '" + name + "': " + e.what());
  }
  throw ParseError("unknown instance '" + name +
                   "' (pigou, step:A, pwl:A, exp:factorial)");
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Translate the byte offset into line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(path + ":" + std::to_string(line) + ":" +
                     std::to_string(col) + ": malformed JSON");
  }
  return Network::from_json(j);
}

}  // namespace poa
