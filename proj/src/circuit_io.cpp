#include "qceq/circuit_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace qceq {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(int line, const std::string &msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

double parse_angle_token(std::string &tok, int line) {
  auto open = tok.find('(');
  if (open == std::string::npos || tok.back() != ')')
    parse_fail(line, "expected '(angle)' in '" + tok + "'");
  std::string num = tok.substr(open + 1, tok.size() - open - 2);
  tok = tok.substr(0, open);
  try {
    std::size_t used = 0;
    double v = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument(num);
    return v;
  } catch (const std::exception &) {
    parse_fail(line, "bad angle '" + num + "'");
  }
}

int parse_wire(std::istringstream &ls, int line) {
  long long w;
  if (!(ls >> w) || w < 0) parse_fail(line, "expected a wire index");
  return static_cast<int>(w);
}

void expect_end(std::istringstream &ls, int line) {
  std::string extra;
  if (ls >> extra && extra[0] != '#')
    parse_fail(line, "unexpected trailing token '" + extra + "'");
}

std::vector<Control> parse_ctrl_spec(const std::string &spec, int line) {
  // spec looks like CTRL[+0,-2]
  auto open = spec.find('[');
  if (open == std::string::npos || spec.back() != ']')
    parse_fail(line, "malformed control list '" + spec + "'");
  std::vector<Control> out;
  std::string body = spec.substr(open + 1, spec.size() - open - 2);
  std::istringstream bs(body);
  std::string item;
  while (std::getline(bs, item, ',')) {
    if (item.empty()) parse_fail(line, "empty control entry");
    bool positive = true;
    std::size_t at = 0;
    if (item[0] == '+' || item[0] == '-') {
      positive = item[0] == '+';
      at = 1;
    }
    try {
      out.push_back({std::stoi(item.substr(at)), positive});
    } catch (const std::exception &) {
      parse_fail(line, "bad control '" + item + "'");
    }
  }
  if (out.empty()) parse_fail(line, "empty control list");
  return out;
}

} // namespace

Circuit parse_circuit_text(std::istream &in) {
  Circuit c;
  bool have_qubits = false;
  bool gates_started = false;
  std::string line;
  int line_no = 0;
  int next_wire = 0;
  std::vector<int> live;
  auto is_live = [&](int w) {
    return std::find(live.begin(), live.end(), w) != live.end();
  };
  auto need_live = [&](int w, int ln) {
    if (!is_live(w))
      parse_fail(ln, "wire " + std::to_string(w) + " is not live here");
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "qubits") {
      if (gates_started) parse_fail(line_no, "qubits header after gates");
      long long n;
      if (!(ls >> n) || n < 0) parse_fail(line_no, "qubits needs a count");
      c.n_in = static_cast<int>(n);
      have_qubits = true;
      next_wire = c.n_in;
      live.clear();
      for (int i = 0; i < c.n_in; ++i) live.push_back(i);
      continue;
    }
    if (head == "theory") {
      if (gates_started) parse_fail(line_no, "theory header after gates");
      std::string name;
      ls >> name;
      auto t = theory_from_name(name);
      if (!t) parse_fail(line_no, "unknown theory '" + name + "'");
      c.theory = *t;
      continue;
    }
    if (!have_qubits) parse_fail(line_no, "missing 'qubits <n>' header");
    gates_started = true;

    std::vector<Control> controls;
    if (head.rfind("CTRL", 0) == 0) {
      controls = parse_ctrl_spec(head, line_no);
      if (!(ls >> head)) parse_fail(line_no, "CTRL needs a gate");
    }
    Gate g;
    if (head == "INIT") {
      g = Gate::init();
    } else if (head == "FREE") {
      g = Gate::free_wire(parse_wire(ls, line_no));
    } else if (head == "DISCARD") {
      g = Gate::discard(parse_wire(ls, line_no));
    } else if (head == "H") {
      g = Gate::h(parse_wire(ls, line_no));
    } else if (head == "X") {
      g = Gate::x(parse_wire(ls, line_no));
    } else if (head == "Z") {
      g = Gate::z(parse_wire(ls, line_no));
    } else if (head == "CX") {
      int a = parse_wire(ls, line_no), b = parse_wire(ls, line_no);
      g = Gate::cnot(a, b);
    } else if (head == "CCX") {
      int a = parse_wire(ls, line_no), b = parse_wire(ls, line_no),
          t = parse_wire(ls, line_no);
      g = Gate::toffoli(a, b, t);
    } else if (head == "SWAP") {
      int a = parse_wire(ls, line_no), b = parse_wire(ls, line_no);
      g = Gate::swap(a, b);
    } else if (head == "CSWAP") {
      int cw = parse_wire(ls, line_no), a = parse_wire(ls, line_no),
          b = parse_wire(ls, line_no);
      g = Gate::fredkin(cw, a, b);
    } else if (head.rfind("PHASE", 0) == 0) {
      double ang = parse_angle_token(head, line_no);
      g = Gate::global_phase(ang);
    } else if (head.rfind("RX", 0) == 0) {
      double ang = parse_angle_token(head, line_no);
      g = Gate::rx(ang, parse_wire(ls, line_no));
    } else if (head.rfind("P", 0) == 0 && head.size() > 1 && head[1] == '(') {
      double ang = parse_angle_token(head, line_no);
      g = Gate::p(ang, parse_wire(ls, line_no));
    } else {
      parse_fail(line_no, "unknown gate '" + head + "'");
    }
    expect_end(ls, line_no);
    if (!controls.empty()) {
      if (!kind_controllable(g.kind))
        parse_fail(line_no, std::string("controls not allowed on ") +
                                gate_kind_name(g.kind));
      g = g.with_controls(controls);
    }
    // Incremental wire bookkeeping with line-number reporting.
    std::vector<int> ws = g.wires();
    std::sort(ws.begin(), ws.end());
    if (std::adjacent_find(ws.begin(), ws.end()) != ws.end())
      parse_fail(line_no, "duplicate wire in gate");
    for (int w : ws) need_live(w, line_no);
    if (g.kind == GateKind::Init) {
      live.push_back(next_wire++);
    } else if (g.kind == GateKind::Free || g.kind == GateKind::Discard) {
      live.erase(std::find(live.begin(), live.end(), g.targets[0]));
    }
    if (!kind_allowed_message(c.theory, g).empty())
      parse_fail(line_no, kind_allowed_message(c.theory, g));
    c.gates.push_back(std::move(g));
  }
  if (!have_qubits) throw Error(ErrorCode::ParseError, "missing qubits header");
  return c;
}

Circuit parse_circuit_text(const std::string &text) {
  std::istringstream in(text);
  return parse_circuit_text(in);
}

std::string circuit_to_text(const Circuit &c) {
  std::ostringstream out;
  out.precision(17);
  out << "qubits " << c.n_in << "\n";
  out << "theory " << theory_name(c.theory) << "\n";
  for (const Gate &g : c.gates) {
    bool plain_pos = std::all_of(g.controls.begin(), g.controls.end(),
                                 [](const Control &ct) { return ct.positive; });
    if (g.is_cnot()) {
      out << "CX " << g.controls[0].wire << ' ' << g.targets[0] << "\n";
      continue;
    }
    if (g.is_toffoli()) {
      out << "CCX " << g.controls[0].wire << ' ' << g.controls[1].wire << ' '
          << g.targets[0] << "\n";
      continue;
    }
    if (g.kind == GateKind::Swap && g.controls.size() == 1 && plain_pos) {
      out << "CSWAP " << g.controls[0].wire << ' ' << g.targets[0] << ' '
          << g.targets[1] << "\n";
      continue;
    }
    out << to_string(g) << "\n";
  }
  return out.str();
}

std::string circuit_to_json(const Circuit &c, int indent) {
  json j;
  j["qubits"] = c.n_in;
  j["theory"] = theory_name(c.theory);
  j["gates"] = json::array();
  for (const Gate &g : c.gates) {
    json jg;
    jg["kind"] = gate_kind_name(g.kind);
    if (kind_has_angle(g.kind)) jg["angle"] = g.angle;
    if (!g.targets.empty()) jg["targets"] = g.targets;
    if (!g.controls.empty()) {
      json jc = json::array();
      for (const Control &ct : g.controls)
        jc.push_back({{"wire", ct.wire}, {"positive", ct.positive}});
      jg["controls"] = jc;
    }
    j["gates"].push_back(jg);
  }
  return j.dump(indent);
}

Circuit circuit_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  Circuit c;
  try {
    c.n_in = j.at("qubits").get<int>();
    if (j.contains("theory")) {
      auto t = theory_from_name(j["theory"].get<std::string>());
      if (!t) throw Error(ErrorCode::ParseError, "unknown theory");
      c.theory = *t;
    }
    for (const json &jg : j.at("gates")) {
      Gate g;
      std::string kind = jg.at("kind").get<std::string>();
      bool found = false;
      for (GateKind k :
           {GateKind::GlobalPhase, GateKind::H, GateKind::P, GateKind::X,
            GateKind::Z, GateKind::Rx, GateKind::Swap, GateKind::Init,
            GateKind::Free, GateKind::Discard}) {
        if (kind == gate_kind_name(k)) {
          g.kind = k;
          found = true;
          break;
        }
      }
      if (!found)
        throw Error(ErrorCode::ParseError, "unknown gate kind '" + kind + "'");
      if (jg.contains("angle")) g.angle = jg["angle"].get<double>();
      if (jg.contains("targets")) g.targets = jg["targets"].get<std::vector<int>>();
      if (jg.contains("controls"))
        for (const json &jc : jg["controls"])
          g.controls.push_back(
              {jc.at("wire").get<int>(), jc.at("positive").get<bool>()});
      c.gates.push_back(std::move(g));
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  validate_or_throw(c);
  return c;
}

Circuit load_circuit(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return circuit_from_json(text);
  return parse_circuit_text(text);
}

void save_circuit(const Circuit &c, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IO, "cannot open " + path);
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
    out << circuit_to_json(c);
  else
    out << circuit_to_text(c);
}

} // namespace qceq
