#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

#include "ctmdp/formats.hpp"

namespace ctmdp {
namespace {

bool reserved(const std::string& s) {
  static const std::set<std::string> words = {
      "ctmdp", "const", "int",  "double", "bool",  "module", "endmodule", "label", "init",
      "true",  "false", "min",  "max",    "floor", "ceil",   "pow",       "mod"};
  return words.count(s) != 0;
}

std::string identifier(const std::string& raw) {
  std::string out;
  for (char c : raw) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) out = "a_" + out;
  if (reserved(out)) out += '_';
  return out;
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  // keep integral rates as integer literals, others must carry a decimal point
  if (s.find_first_of(".eEn") == std::string::npos) return s;
  if (s.find('.') == std::string::npos && s.find_first_of("eE") != std::string::npos) {
    const auto e = s.find_first_of("eE");
    s.insert(e, ".0");
  }
  return s;
}

}  // namespace

std::string write_model(const Ctmdp& m, const std::string& module_name) {
  std::vector<std::string> names;
  std::set<std::string> taken = {"s"};
  for (const auto& a : m.action_names) {
    std::string id = identifier(a);
    std::string candidate = id;
    for (int k = 2; taken.count(candidate) != 0; ++k) candidate = id + "_" + std::to_string(k);
    taken.insert(candidate);
    names.push_back(candidate);
  }

  std::ostringstream out;
  out << "ctmdp\n\n";
  std::string mod = identifier(module_name);
  if (mod == "s") mod = "m";
  out << "module " << mod << "\n";
  const std::size_t n = m.num_states();
  out << "  s : [0.." << (n == 0 ? 0 : n - 1) << "] init " << m.initial << ";\n";
  if (!m.state_names.empty()) {
    for (std::size_t s = 0; s < n; ++s) {
      if (!m.state_names[s].empty()) out << "  # s=" << s << ": " << m.state_names[s] << "\n";
    }
  }
  for (ActionId a = 0; a < m.action_names.size(); ++a) {
    for (StateId s = 0; s < n; ++s) {
      const auto idx = m.choice_index(s, a);
      if (!idx) continue;
      out << "  [" << names[a] << "] s=" << s << " -> ";
      bool first = true;
      for (const auto& t : m.choices[s][*idx].transitions) {
        if (t.weight <= 0.0) continue;
        if (!first) out << " + ";
        out << exact(t.weight) << " : (s'=" << t.target << ")";
        first = false;
      }
      out << ";\n";
    }
  }
  out << "endmodule\n";
  if (!m.propositions.empty()) out << "\n";
  for (std::size_t i = 0; i < m.propositions.size(); ++i) {
    std::string label = m.propositions[i];
    for (char& c : label) {
      if (c == '"' || c == '\n') c = '_';
    }
    out << "label \"" << label << "\" = ";
    bool any = false;
    for (StateId s = 0; s < n; ++s) {
      if (((m.labels[s] >> i) & 1U) == 0) continue;
      out << (any ? " | " : "") << "s=" << s;
      any = true;
    }
    if (!any) out << "false";
    out << ";\n";
  }
  return out.str();
}

}  // namespace ctmdp
