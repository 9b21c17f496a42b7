// Copyright 2026 The hpbvi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Reader and writer for the dpomdp benchmark format.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "hpbvi/benchgen.hpp"

namespace hpbvi {

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, message)
                                  : message),
      line_(line) {}

namespace {

struct Token {
  std::string text;
  int line;
};

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ':') {
      out.push_back({":", line});
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && text[j] != ':' && text[j] != '#' &&
             !std::isspace(static_cast<unsigned char>(text[j])))
        ++j;
      out.push_back({std::string(text.substr(i, j - i)), line});
      i = j;
    }
  }
  return out;
}

bool IsInteger(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

double ToNumber(const Token& t) {
  char* end = nullptr;
  const double v = std::strtod(t.text.c_str(), &end);
  if (end == t.text.c_str() || *end != '\0')
    throw ParseError(t.line, fmt::format("expected a number, got '{}'", t.text));
  return v;
}

const std::vector<std::string> kHeaderKeys = {
    "agents", "discount", "values", "states", "start", "actions", "observations"};

bool IsHeaderKey(const std::string& s) {
  return std::find(kHeaderKeys.begin(), kHeaderKeys.end(), s) != kHeaderKeys.end();
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, int horizon)
      : tokens_(std::move(tokens)), horizon_(horizon) {}

  DecPomdpModel Run();

 private:
  // Index of the next section start (header key or entry) at or after i.
  std::size_t SectionEnd(std::size_t i) const {
    while (i < tokens_.size()) {
      if (i + 1 < tokens_.size() && tokens_[i + 1].text == ":" &&
          (IsHeaderKey(tokens_[i].text) || tokens_[i].text == "T" ||
           tokens_[i].text == "O" || tokens_[i].text == "R"))
        return i;
      ++i;
    }
    return i;
  }

  void Header(const std::string& key, std::size_t begin, std::size_t end, int line);
  void Entry(char kind, std::size_t begin, std::size_t end, int line);
  std::vector<std::string> LabelSet(std::size_t begin, std::size_t end, int line,
                                    const std::string& prefix);

  // Resolves a label or index within a set; "*" yields every index.
  std::vector<int> Match(const Token& t, const std::vector<std::string>& set) const;
  std::vector<int> MatchJoint(const std::vector<Token>& spec,
                              const std::vector<std::vector<std::string>>& sets,
                              const JointSpace& space) const;
  std::vector<int> MatchStates(const std::vector<Token>& spec) const;

  void RequireHeader(int line) const {
    if (states_.empty() || actions_.size() != static_cast<std::size_t>(agents_) ||
        observations_.size() != static_cast<std::size_t>(agents_) || agents_ == 0)
      throw ParseError(line, "entry before agents/states/actions/observations");
  }

  std::vector<Token> tokens_;
  int horizon_;
  int agents_ = 0;
  std::vector<std::string> agent_names_;
  double discount_ = 1.0;
  bool cost_ = false;
  std::vector<std::string> states_;
  std::vector<std::vector<std::string>> actions_;
  std::vector<std::vector<std::string>> observations_;
  std::vector<Token> start_tokens_;
  int start_line_ = 0;
  JointSpace ua_, uz_;

  std::unordered_map<std::uint64_t, double> t_;  // (x,u,y)
  std::unordered_map<std::uint64_t, double> o_;  // (u,y,z)
  struct RewardCell {
    double base = 0.0;
    std::map<std::pair<int, int>, double> by_outcome;  // (y,z)
  };
  std::unordered_map<std::uint64_t, RewardCell> r_;  // (x,u)
  bool spaces_ready_ = false;

  void EnsureSpaces() {
    if (spaces_ready_) return;
    std::vector<int> a, z;
    for (const auto& s : actions_) a.push_back(static_cast<int>(s.size()));
    for (const auto& s : observations_) z.push_back(static_cast<int>(s.size()));
    ua_ = JointSpace(a);
    uz_ = JointSpace(z);
    spaces_ready_ = true;
  }
  std::uint64_t TKey(int x, int u, int y) const {
    return (static_cast<std::uint64_t>(x) * ua_.size() + u) * states_.size() + y;
  }
  std::uint64_t OKey(int u, int y, int z) const {
    return (static_cast<std::uint64_t>(u) * states_.size() + y) * uz_.size() + z;
  }
  std::uint64_t RKey(int x, int u) const {
    return static_cast<std::uint64_t>(x) * ua_.size() + u;
  }
};

std::vector<std::string> Parser::LabelSet(std::size_t begin, std::size_t end,
                                          int line, const std::string& prefix) {
  if (begin == end) throw ParseError(line, "empty label set");
  if (end - begin == 1 && IsInteger(tokens_[begin].text)) {
    const int count = std::stoi(tokens_[begin].text);
    if (count <= 0) throw ParseError(line, "label count must be positive");
    std::vector<std::string> out;
    for (int k = 0; k < count; ++k) out.push_back(fmt::format("{}{}", prefix, k));
    return out;
  }
  std::vector<std::string> out;
  for (std::size_t k = begin; k < end; ++k) {
    if (IsInteger(tokens_[k].text))
      throw ParseError(tokens_[k].line, "numeric label in a named list");
    out.push_back(tokens_[k].text);
  }
  return out;
}

void Parser::Header(const std::string& key, std::size_t begin, std::size_t end,
                    int line) {
  if (key == "agents") {
    if (end - begin == 1 && IsInteger(tokens_[begin].text)) {
      agents_ = std::stoi(tokens_[begin].text);
    } else {
      for (std::size_t k = begin; k < end; ++k) agent_names_.push_back(tokens_[k].text);
      agents_ = static_cast<int>(agent_names_.size());
    }
    if (agents_ <= 0) throw ParseError(line, "agents must be positive");
  } else if (key == "discount") {
    if (end - begin != 1) throw ParseError(line, "discount takes one number");
    discount_ = ToNumber(tokens_[begin]);
  } else if (key == "values") {
    if (end - begin != 1) throw ParseError(line, "values takes one keyword");
    const std::string& v = tokens_[begin].text;
    if (v == "cost") {
      cost_ = true;
    } else if (v != "reward") {
      throw ParseError(line, fmt::format("unknown values keyword '{}'", v));
    }
  } else if (key == "states") {
    states_ = LabelSet(begin, end, line, "s");
  } else if (key == "start") {
    start_tokens_.assign(tokens_.begin() + begin, tokens_.begin() + end);
    start_line_ = line;
  } else if (key == "actions" || key == "observations") {
    if (agents_ == 0) throw ParseError(line, key + " before agents");
    // One line per agent.
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t k = begin; k < end; ++k) {
      if (groups.empty() || tokens_[k].line != tokens_[k - 1].line || k == begin)
        groups.push_back({k, k + 1});
      else
        groups.back().second = k + 1;
    }
    if (static_cast<int>(groups.size()) != agents_)
      throw ParseError(line, fmt::format("{} lists {} agents, expected {}", key,
                                         groups.size(), agents_));
    auto& target = key == "actions" ? actions_ : observations_;
    target.clear();
    for (const auto& [b, e] : groups)
      target.push_back(LabelSet(b, e, tokens_[b].line, key == "actions" ? "a" : "o"));
  }
}

std::vector<int> Parser::Match(const Token& t,
                               const std::vector<std::string>& set) const {
  std::vector<int> out;
  if (t.text == "*") {
    for (int k = 0; k < static_cast<int>(set.size()); ++k) out.push_back(k);
    return out;
  }
  auto it = std::find(set.begin(), set.end(), t.text);
  if (it != set.end()) return {static_cast<int>(it - set.begin())};
  if (IsInteger(t.text)) {
    const int k = std::stoi(t.text);
    if (k < static_cast<int>(set.size())) return {k};
  }
  throw ParseError(t.line, fmt::format("unknown label '{}'", t.text));
}

std::vector<int> Parser::MatchJoint(const std::vector<Token>& spec,
                                    const std::vector<std::vector<std::string>>& sets,
                                    const JointSpace& space) const {
  if (spec.empty()) throw ParseError(0, "missing joint label");
  std::vector<int> out;
  if (spec.size() == 1 && sets.size() > 1) {
    if (spec[0].text == "*") {
      for (int k = 0; k < space.size(); ++k) out.push_back(k);
      return out;
    }
    if (IsInteger(spec[0].text) && std::stoi(spec[0].text) < space.size())
      return {std::stoi(spec[0].text)};
    throw ParseError(spec[0].line,
                     fmt::format("bad joint label '{}'", spec[0].text));
  }
  if (spec.size() != sets.size())
    throw ParseError(spec[0].line, fmt::format("joint label has {} parts, expected {}",
                                               spec.size(), sets.size()));
  std::vector<std::vector<int>> parts;
  for (std::size_t i = 0; i < spec.size(); ++i) parts.push_back(Match(spec[i], sets[i]));
  std::vector<std::size_t> idx(parts.size(), 0);
  while (true) {
    int code = 0;
    for (std::size_t i = 0; i < parts.size(); ++i)
      code += parts[i][idx[i]] * space.stride(static_cast<int>(i));
    out.push_back(code);
    std::size_t i = 0;
    while (i < parts.size() && ++idx[i] == parts[i].size()) {
      idx[i] = 0;
      ++i;
    }
    if (i == parts.size()) break;
  }
  return out;
}

std::vector<int> Parser::MatchStates(const std::vector<Token>& spec) const {
  if (spec.size() != 1)
    throw ParseError(spec.empty() ? 0 : spec[0].line, "expected one state label");
  return Match(spec[0], states_);
}

// Fields are separated by ':'. Trailing data (a value, a row or a matrix)
// follows the last label field.
void Parser::Entry(char kind, std::size_t begin, std::size_t end, int line) {
  RequireHeader(line);
  EnsureSpaces();
  std::vector<std::vector<Token>> fields(1);
  std::vector<int> field_line = {line};
  for (std::size_t k = begin; k < end; ++k) {
    if (tokens_[k].text == ":") {
      fields.emplace_back();
      field_line.push_back(tokens_[k].line);
    } else {
      fields.back().push_back(tokens_[k]);
    }
  }
  const std::size_t depth_max = kind == 'R' ? 4 : 3;
  std::vector<std::vector<Token>> specs;
  std::vector<Token> data;
  const auto& last = fields.back();
  if (!last.empty() && last.front().line != field_line.back()) {
    // data-only field after a trailing colon
    specs.assign(fields.begin(), fields.end() - 1);
    data = last;
  } else if (fields.size() == depth_max + 1) {
    specs.assign(fields.begin(), fields.end() - 1);
    data = last;
  } else if (fields.size() == depth_max) {
    specs.assign(fields.begin(), fields.end());
    if (specs.back().size() < 2) throw ParseError(line, "missing value");
    data = {specs.back().back()};
    specs.back().pop_back();
  } else if (fields.size() < depth_max) {
    specs.assign(fields.begin(), fields.end());
    auto& tail = specs.back();
    const int first_line = tail.empty() ? field_line.back() : tail.front().line;
    auto split = std::find_if(tail.begin(), tail.end(),
                              [&](const Token& t) { return t.line != first_line; });
    data.assign(split, tail.end());
    tail.erase(split, tail.end());
    if (!tail.empty() && (tail.back().text == "uniform" || tail.back().text == "identity")) {
      data.insert(data.begin(), tail.back());
      tail.pop_back();
      if (tail.empty()) specs.pop_back();
    }
  } else {
    throw ParseError(line, "too many fields");
  }
  if (specs.empty() || specs.size() > depth_max)
    throw ParseError(line, "malformed entry");
  for (const auto& s : specs)
    if (s.empty()) throw ParseError(line, "empty field");
  if (data.empty()) throw ParseError(line, "missing data");

  const int nx = static_cast<int>(states_.size());
  const int nz = uz_.size();
  const std::vector<int> us = MatchJoint(specs[0], actions_, ua_);
  const std::size_t depth = specs.size();

  auto numbers = [&](std::size_t expected) {
    if (data.size() != expected)
      throw ParseError(data.front().line,
                       fmt::format("expected {} numbers, got {}", expected, data.size()));
    std::vector<double> v;
    for (const Token& t : data) v.push_back(ToNumber(t));
    return v;
  };
  const bool uniform = data.size() == 1 && data[0].text == "uniform";
  const bool identity = data.size() == 1 && data[0].text == "identity";

  if (kind == 'T') {
    if (depth == 3) {
      const auto xs = MatchStates(specs[1]);
      const auto ys = MatchStates(specs[2]);
      const double p = numbers(1)[0];
      for (int u : us)
        for (int x : xs)
          for (int y : ys) t_[TKey(x, u, y)] = p;
    } else if (depth == 2) {
      const auto xs = MatchStates(specs[1]);
      std::vector<double> row = uniform ? std::vector<double>(nx, 1.0 / nx) : numbers(nx);
      for (int u : us)
        for (int x : xs)
          for (int y = 0; y < nx; ++y) t_[TKey(x, u, y)] = row[y];
    } else {
      std::vector<double> m;
      if (uniform) {
        m.assign(static_cast<std::size_t>(nx) * nx, 1.0 / nx);
      } else if (identity) {
        m.assign(static_cast<std::size_t>(nx) * nx, 0.0);
        for (int x = 0; x < nx; ++x) m[static_cast<std::size_t>(x) * nx + x] = 1.0;
      } else {
        m = numbers(static_cast<std::size_t>(nx) * nx);
      }
      for (int u : us)
        for (int x = 0; x < nx; ++x)
          for (int y = 0; y < nx; ++y)
            t_[TKey(x, u, y)] = m[static_cast<std::size_t>(x) * nx + y];
    }
  } else if (kind == 'O') {
    if (depth == 3) {
      const auto ys = MatchStates(specs[1]);
      const auto zs = MatchJoint(specs[2], observations_, uz_);
      const double p = numbers(1)[0];
      for (int u : us)
        for (int y : ys)
          for (int z : zs) o_[OKey(u, y, z)] = p;
    } else if (depth == 2) {
      const auto ys = MatchStates(specs[1]);
      std::vector<double> row = uniform ? std::vector<double>(nz, 1.0 / nz) : numbers(nz);
      for (int u : us)
        for (int y : ys)
          for (int z = 0; z < nz; ++z) o_[OKey(u, y, z)] = row[z];
    } else {
      std::vector<double> m = uniform
                                  ? std::vector<double>(static_cast<std::size_t>(nx) * nz, 1.0 / nz)
                                  : numbers(static_cast<std::size_t>(nx) * nz);
      for (int u : us)
        for (int y = 0; y < nx; ++y)
          for (int z = 0; z < nz; ++z)
            o_[OKey(u, y, z)] = m[static_cast<std::size_t>(y) * nz + z];
    }
  } else {
    if (depth < 2) throw ParseError(line, "reward entry needs a start state");
    const auto xs = MatchStates(specs[1]);
    auto set = [&](int u, int x, int y, int z, double v) {
      RewardCell& cell = r_[RKey(x, u)];
      cell.by_outcome[{y, z}] = v;
    };
    if (depth == 4) {
      const double v = numbers(1)[0];
      const bool any_y = specs[2].size() == 1 && specs[2][0].text == "*";
      const bool any_z = specs[3].size() == 1 && specs[3][0].text == "*";
      if (any_y && any_z) {
        for (int u : us)
          for (int x : xs) {
            RewardCell& cell = r_[RKey(x, u)];
            cell.base = v;
            cell.by_outcome.clear();
          }
        return;
      }
      const auto ys = MatchStates(specs[2]);
      const auto zs = MatchJoint(specs[3], observations_, uz_);
      for (int u : us)
        for (int x : xs)
          for (int y : ys)
            for (int z : zs) set(u, x, y, z, v);
    } else if (depth == 3) {
      const auto ys = MatchStates(specs[2]);
      const auto row = numbers(nz);
      for (int u : us)
        for (int x : xs)
          for (int y : ys)
            for (int z = 0; z < nz; ++z) set(u, x, y, z, row[z]);
    } else {
      const auto m = numbers(static_cast<std::size_t>(nx) * nz);
      for (int u : us)
        for (int x : xs)
          for (int y = 0; y < nx; ++y)
            for (int z = 0; z < nz; ++z)
              set(u, x, y, z, m[static_cast<std::size_t>(y) * nz + z]);
    }
  }
}

DecPomdpModel Parser::Run() {
  std::size_t i = 0;
  while (i < tokens_.size()) {
    if (!(i + 1 < tokens_.size() && tokens_[i + 1].text == ":"))
      throw ParseError(tokens_[i].line,
                       fmt::format("unexpected token '{}'", tokens_[i].text));
    const std::string key = tokens_[i].text;
    const int line = tokens_[i].line;
    const std::size_t end = SectionEnd(i + 2);
    if (IsHeaderKey(key)) {
      Header(key, i + 2, end, line);
    } else if (key == "T" || key == "O" || key == "R") {
      Entry(key[0], i + 2, end, line);
    } else {
      throw ParseError(line, fmt::format("unknown section '{}'", key));
    }
    i = end;
  }
  if (agents_ == 0 || states_.empty() || actions_.empty() || observations_.empty())
    throw ParseError(0, "missing agents, states, actions or observations");
  EnsureSpaces();

  const int nx = static_cast<int>(states_.size());
  std::vector<double> start(nx, 0.0);
  if (start_tokens_.empty() ||
      (start_tokens_.size() == 1 && start_tokens_[0].text == "uniform")) {
    std::fill(start.begin(), start.end(), 1.0 / nx);
  } else if (start_tokens_.size() == 1 && !IsInteger(start_tokens_[0].text) &&
             std::find(states_.begin(), states_.end(), start_tokens_[0].text) !=
                 states_.end()) {
    start[Match(start_tokens_[0], states_)[0]] = 1.0;
  } else {
    if (static_cast<int>(start_tokens_.size()) != nx)
      throw ParseError(start_line_, fmt::format("start lists {} numbers, expected {}",
                                                start_tokens_.size(), nx));
    for (int x = 0; x < nx; ++x) start[x] = ToNumber(start_tokens_[x]);
  }

  std::vector<TabularDynamics::TEntry> t;
  std::vector<TabularDynamics::OEntry> o;
  std::vector<TabularDynamics::REntry> r;
  for (const auto& [key, p] : t_) {
    if (p == 0.0) continue;
    const int y = static_cast<int>(key % nx);
    const std::uint64_t xu = key / nx;
    t.push_back({static_cast<int>(xu / ua_.size()), static_cast<int>(xu % ua_.size()), y, p});
  }
  for (const auto& [key, p] : o_) {
    if (p == 0.0) continue;
    const int z = static_cast<int>(key % uz_.size());
    const std::uint64_t uy = key / uz_.size();
    o.push_back({static_cast<int>(uy / nx), static_cast<int>(uy % nx), z, p});
  }
  auto tabular_t = std::make_shared<TabularDynamics>(nx, ua_.size(), uz_.size(), t, o,
                                                     std::vector<TabularDynamics::REntry>{});
  std::vector<std::pair<StateId, double>> next;
  std::vector<std::pair<JointObs, double>> obs;
  for (const auto& [key, cell] : r_) {
    const int x = static_cast<int>(key / ua_.size());
    const int u = static_cast<int>(key % ua_.size());
    double value = cell.base;
    if (!cell.by_outcome.empty()) {
      // expected reward over (y,z)
      value = 0.0;
      next.clear();
      tabular_t->Transition(x, u, next);
      for (const auto& [y, py] : next) {
        obs.clear();
        tabular_t->Observation(u, y, obs);
        for (const auto& [z, pz] : obs) {
          auto it = cell.by_outcome.find({y, z});
          value += py * pz * (it == cell.by_outcome.end() ? cell.base : it->second);
        }
      }
    }
    if (cost_) value = -value;
    if (value != 0.0) r.push_back({x, u, value});
  }
  std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) {
    return std::tie(a.x, a.u, a.y) < std::tie(b.x, b.u, b.y);
  });
  std::sort(o.begin(), o.end(), [](const auto& a, const auto& b) {
    return std::tie(a.u, a.y, a.z) < std::tie(b.u, b.y, b.z);
  });
  auto dynamics = std::make_shared<TabularDynamics>(nx, ua_.size(), uz_.size(),
                                                    std::move(t), std::move(o), std::move(r));
  ModelLabels labels{agent_names_, states_, actions_, observations_};
  DecPomdpModel model(std::move(labels), std::move(dynamics), std::move(start),
                      discount_, horizon_);
  auto violations = validate(model);
  if (!violations.empty())
    throw ParseError(0, fmt::format("{}: {}", violations[0].where, violations[0].what));
  return model;
}

std::string Num(double v) { return fmt::format("{:.17g}", v); }

std::string JointName(const std::vector<std::vector<std::string>>& sets,
                      const JointSpace& space, int code) {
  std::string out;
  for (int i = 0; i < space.players(); ++i) {
    if (i > 0) out += ' ';
    out += sets[i][space.component(code, i)];
  }
  return out;
}

}  // namespace

DecPomdpModel parse_model(std::string_view text, int horizon) {
  Parser parser(Tokenize(text), horizon);
  return parser.Run();
}

DecPomdpModel parse_model_file(const std::string& path, int horizon) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, fmt::format("cannot read '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str(), horizon);
}

void serialize_model(const DecPomdpModel& model, std::ostream& out) {
  const auto& labels = model.labels();
  out << "agents:";
  for (const auto& name : labels.players) out << ' ' << name;
  out << "\ndiscount: " << Num(model.discount()) << "\nvalues: reward\nstates:";
  for (const auto& s : labels.states) out << ' ' << s;
  out << "\nstart:\n";
  for (int x = 0; x < model.num_states(); ++x)
    out << (x > 0 ? " " : "") << Num(model.initial_belief()[x]);
  out << "\nactions:\n";
  for (const auto& set : labels.actions) {
    for (std::size_t k = 0; k < set.size(); ++k) out << (k > 0 ? " " : "") << set[k];
    out << '\n';
  }
  out << "observations:\n";
  for (const auto& set : labels.observations) {
    for (std::size_t k = 0; k < set.size(); ++k) out << (k > 0 ? " " : "") << set[k];
    out << '\n';
  }
  const auto& ua = model.actions();
  const auto& uz = model.observations();
  std::vector<std::pair<StateId, double>> next;
  std::vector<std::pair<JointObs, double>> obs;
  for (JointAction u = 0; u < ua.size(); ++u) {
    const std::string un = JointName(labels.actions, ua, u);
    for (StateId x = 0; x < model.num_states(); ++x) {
      next.clear();
      model.dynamics().Transition(x, u, next);
      for (const auto& [y, p] : next)
        out << "T: " << un << " : " << labels.states[x] << " : " << labels.states[y]
            << " : " << Num(p) << '\n';
    }
  }
  for (JointAction u = 0; u < ua.size(); ++u) {
    const std::string un = JointName(labels.actions, ua, u);
    for (StateId y = 0; y < model.num_states(); ++y) {
      obs.clear();
      model.dynamics().Observation(u, y, obs);
      for (const auto& [z, p] : obs)
        out << "O: " << un << " : " << labels.states[y] << " : "
            << JointName(labels.observations, uz, z) << " : " << Num(p) << '\n';
    }
  }
  for (JointAction u = 0; u < ua.size(); ++u) {
    const std::string un = JointName(labels.actions, ua, u);
    for (StateId x = 0; x < model.num_states(); ++x) {
      const double r = model.reward(x, u);
      if (r != 0.0)
        out << "R: " << un << " : " << labels.states[x] << " : * : * : " << Num(r) << '\n';
    }
  }
}

std::string serialize_model(const DecPomdpModel& model) {
  std::ostringstream out;
  serialize_model(model, out);
  return out.str();
}

}  // namespace hpbvi
