#include "acci/scm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include "acci/error.hpp"
#include "acci/rng.hpp"
#include "json.hpp"

namespace acci {

using nlohmann::json;

namespace {

constexpr double kRowTolerance = 1e-12;
constexpr std::size_t kMaxJointStates = std::size_t{1} << 24;

Distribution make_distribution(const DiscreteSCM& scm, std::size_t var, std::vector<double> mass) {
  Distribution d;
  d.variable = scm.variable(var).name;
  d.labels = scm.variable(var).domain;
  d.probs = std::move(mass);
  return d;
}

// Visits every joint state of the model in mixed radix order.
template <typename Fn>
void for_each_state(const DiscreteSCM& scm, Fn&& fn) {
  std::size_t total = 1;
  for (std::size_t v = 0; v < scm.size(); ++v) {
    total *= scm.domain_size(v);
    if (total > kMaxJointStates) throw ContractError("SCM joint state space too large for exact enumeration");
  }
  std::vector<std::size_t> state(scm.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    fn(state);
    for (std::size_t v = scm.size(); v-- > 0;) {
      if (++state[v] < scm.domain_size(v)) break;
      state[v] = 0;
    }
  }
}

double joint_probability(const DiscreteSCM& scm, const std::vector<std::size_t>& state) {
  double p = 1.0;
  for (std::size_t v = 0; v < scm.size() && p > 0.0; ++v) p *= scm.conditional(v, state[v], state);
  return p;
}

std::vector<std::pair<std::size_t, std::size_t>> resolve(const DiscreteSCM& scm, const Assignment& a) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [name, label] : a) {
    const std::size_t v = scm.index_of(name);
    out.emplace_back(v, scm.value_index(v, label));
  }
  return out;
}

bool matches(const std::vector<std::size_t>& state, const std::vector<std::pair<std::size_t, std::size_t>>& fixed) {
  for (const auto& [v, val] : fixed)
    if (state[v] != val) return false;
  return true;
}

std::size_t deterministic_value(const DiscreteSCM& scm, std::size_t var, const std::vector<std::size_t>& state) {
  for (std::size_t val = 0; val < scm.domain_size(var); ++val)
    if (scm.conditional(var, val, state) == 1.0) return val;
  throw ContractError("variable " + scm.variable(var).name + " is not deterministic");
}

}  // namespace

double Distribution::prob(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return probs[i];
  throw ContractError("label '" + std::string(label) + "' not in domain of " + variable);
}

double Distribution::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

DiscreteSCM::DiscreteSCM(std::vector<ScmVariable> variables) : vars_(std::move(variables)) {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].domain.empty()) throw ValidationError("variable " + vars_[i].name + " has an empty domain");
    if (!by_name_.emplace(vars_[i].name, i).second)
      throw ValidationError("duplicate variable name " + vars_[i].name);
  }
  parents_.resize(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto& v = vars_[i];
    if (v.exogenous && !v.parents.empty())
      throw ValidationError("exogenous variable " + v.name + " must not have parents");
    std::size_t rows = 1;
    for (const auto& p : v.parents) {
      auto it = by_name_.find(p);
      if (it == by_name_.end()) throw ValidationError("variable " + v.name + " has unknown parent " + p);
      parents_[i].push_back(it->second);
      rows *= vars_[it->second].domain.size();
    }
    if (v.cpt.size() != rows)
      throw ValidationError("variable " + v.name + " needs " + std::to_string(rows) + " CPT rows, got " +
                            std::to_string(v.cpt.size()));
    for (const auto& row : v.cpt) {
      if (row.size() != v.domain.size()) throw ValidationError("CPT row width mismatch for " + v.name);
      double s = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw ValidationError("negative or NaN CPT entry for " + v.name);
        s += p;
      }
      if (std::abs(s - 1.0) > kRowTolerance) throw ValidationError("CPT row of " + v.name + " does not sum to 1");
    }
  }

  // Kahn's algorithm; leftover nodes mean a cycle.
  std::vector<std::size_t> indegree(vars_.size(), 0);
  std::vector<std::vector<std::size_t>> children(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i)
    for (std::size_t p : parents_[i]) {
      children[p].push_back(i);
      ++indegree[i];
    }
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (indegree[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.pop_front();
    topo_.push_back(v);
    for (std::size_t c : children[v])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  if (topo_.size() != vars_.size()) throw ValidationError("SCM graph contains a cycle");
}

std::size_t DiscreteSCM::index_of(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ContractError("unknown SCM variable '" + std::string(name) + "'");
  return it->second;
}

std::size_t DiscreteSCM::value_index(std::size_t var, std::string_view label) const {
  const auto& dom = vars_[var].domain;
  for (std::size_t i = 0; i < dom.size(); ++i)
    if (dom[i] == label) return i;
  throw ContractError("value '" + std::string(label) + "' not in domain of " + vars_[var].name);
}

bool DiscreteSCM::is_deterministic(std::size_t var) const {
  for (const auto& row : vars_[var].cpt)
    for (double p : row)
      if (p != 0.0 && p != 1.0) return false;
  return true;
}

std::size_t DiscreteSCM::row_index(std::size_t var, const std::vector<std::size_t>& state) const {
  std::size_t idx = 0;
  for (std::size_t p : parents_[var]) idx = idx * vars_[p].domain.size() + state[p];
  return idx;
}

double DiscreteSCM::conditional(std::size_t var, std::size_t value, const std::vector<std::size_t>& state) const {
  return vars_[var].cpt[row_index(var, state)][value];
}

std::vector<bool> DiscreteSCM::descendants(const std::vector<std::size_t>& vars) const {
  std::vector<bool> out(vars_.size(), false);
  std::vector<bool> frontier(vars_.size(), false);
  for (std::size_t v : vars) frontier[v] = true;
  for (std::size_t v : topo_) {
    for (std::size_t p : parents_[v])
      if (frontier[p] || out[p]) out[v] = true;
  }
  return out;
}

DiscreteSCM DiscreteSCM::from_json_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("SCM file is not valid JSON: ") + e.what());
  }
  if (!doc.contains("variables") || !doc["variables"].is_array())
    throw ParseError(0, "SCM file needs a 'variables' array");
  std::vector<ScmVariable> vars;
  try {
    for (const auto& jv : doc["variables"]) {
      ScmVariable v;
      v.name = jv.at("name").get<std::string>();
      const auto& dom = jv.at("domain");
      if (dom.is_number_integer()) {
        for (int i = 0; i < dom.get<int>(); ++i) v.domain.push_back(std::to_string(i));
      } else {
        for (const auto& d : dom) v.domain.push_back(d.is_string() ? d.get<std::string>() : d.dump());
      }
      if (jv.contains("parents")) v.parents = jv["parents"].get<std::vector<std::string>>();
      v.cpt = jv.at("cpt").get<std::vector<std::vector<double>>>();
      v.exogenous = jv.value("exogenous", false);
      vars.push_back(std::move(v));
    }
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed SCM variable: ") + e.what());
  }
  return DiscreteSCM(std::move(vars));
}

DiscreteSCM DiscreteSCM::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open SCM file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string DiscreteSCM::to_json_text() const {
  json vars = json::array();
  for (const auto& v : vars_)
    vars.push_back({{"name", v.name}, {"domain", v.domain}, {"parents", v.parents}, {"cpt", v.cpt},
                    {"exogenous", v.exogenous}});
  return json{{"variables", vars}}.dump(2);
}

Distribution observational(const DiscreteSCM& scm, std::string_view target, const Assignment& evidence) {
  const std::size_t t = scm.index_of(target);
  const auto fixed = resolve(scm, evidence);
  std::vector<double> mass(scm.domain_size(t), 0.0);
  double z = 0.0;
  for_each_state(scm, [&](const std::vector<std::size_t>& state) {
    if (!matches(state, fixed)) return;
    const double p = joint_probability(scm, state);
    mass[state[t]] += p;
    z += p;
  });
  if (!(z > 0.0)) throw ConditioningError("evidence has probability zero");
  for (double& m : mass) m /= z;
  return make_distribution(scm, t, std::move(mass));
}

DiscreteSCM mutilate(const DiscreteSCM& scm, const Assignment& interventions) {
  std::vector<ScmVariable> vars;
  for (std::size_t i = 0; i < scm.size(); ++i) vars.push_back(scm.variable(i));
  for (const auto& [name, label] : interventions) {
    const std::size_t v = scm.index_of(name);
    const std::size_t val = scm.value_index(v, label);
    auto& var = vars[v];
    var.parents.clear();
    var.cpt.assign(1, std::vector<double>(var.domain.size(), 0.0));
    var.cpt[0][val] = 1.0;
  }
  return DiscreteSCM(std::move(vars));
}

Distribution interventional(const DiscreteSCM& scm, std::string_view target, const Assignment& interventions) {
  return observational(mutilate(scm, interventions), target, {});
}

Distribution interventional_backdoor(const DiscreteSCM& scm, std::string_view target,
                                     const Assignment& interventions,
                                     const std::vector<std::string>& adjustment) {
  const std::size_t t = scm.index_of(target);
  const auto fixed = resolve(scm, interventions);
  std::vector<std::size_t> adj;
  for (const auto& name : adjustment) adj.push_back(scm.index_of(name));

  // Tabulate P(z), P(x, z) and P(y, x, z) in one pass.
  std::size_t z_states = 1;
  for (std::size_t v : adj) z_states *= scm.domain_size(v);
  const std::size_t ny = scm.domain_size(t);
  std::vector<double> pz(z_states, 0.0), pxz(z_states, 0.0), pyxz(z_states * ny, 0.0);
  for_each_state(scm, [&](const std::vector<std::size_t>& state) {
    const double p = joint_probability(scm, state);
    if (p == 0.0) return;
    std::size_t zi = 0;
    for (std::size_t v : adj) zi = zi * scm.domain_size(v) + state[v];
    pz[zi] += p;
    if (!matches(state, fixed)) return;
    pxz[zi] += p;
    pyxz[zi * ny + state[t]] += p;
  });

  std::vector<double> mass(ny, 0.0);
  for (std::size_t zi = 0; zi < z_states; ++zi) {
    if (pz[zi] == 0.0) continue;
    if (!(pxz[zi] > 0.0))
      throw ConditioningError("backdoor adjustment: treatment value has zero probability in some stratum");
    for (std::size_t y = 0; y < ny; ++y) mass[y] += pyxz[zi * ny + y] / pxz[zi] * pz[zi];
  }
  return make_distribution(scm, t, std::move(mass));
}

bool satisfies_backdoor(const DiscreteSCM& scm, const std::vector<std::string>& treatments,
                        std::string_view target, const std::vector<std::string>& adjustment) {
  const std::size_t n = scm.size();
  std::vector<std::size_t> xs;
  std::vector<bool> is_x(n, false), is_z(n, false);
  for (const auto& name : treatments) {
    xs.push_back(scm.index_of(name));
    is_x[xs.back()] = true;
  }
  const std::size_t y = scm.index_of(target);
  if (is_x[y]) throw ContractError("target is one of the treatments");
  for (const auto& name : adjustment) {
    const std::size_t z = scm.index_of(name);
    if (is_x[z] || z == y) return false;
    is_z[z] = true;
  }

  const auto desc = scm.descendants(xs);
  for (std::size_t v = 0; v < n; ++v)
    if (is_z[v] && desc[v]) return false;

  // Parent lists of the graph with edges out of the treatments removed.
  std::vector<std::vector<std::size_t>> parents(n);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t p : scm.parent_indices(v))
      if (!is_x[p]) parents[v].push_back(p);

  // Ancestral set of X, Y and Z in that graph.
  std::vector<bool> anc(n, false);
  std::vector<std::size_t> stack(xs.begin(), xs.end());
  stack.push_back(y);
  for (std::size_t v = 0; v < n; ++v)
    if (is_z[v]) stack.push_back(v);
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (anc[v]) continue;
    anc[v] = true;
    for (std::size_t p : parents[v]) stack.push_back(p);
  }

  // Moralise, drop Z, then test reachability from X to Y.
  std::vector<std::vector<std::size_t>> adj(n);
  auto link = [&](std::size_t a, std::size_t b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (!anc[v]) continue;
    const auto& ps = parents[v];
    for (std::size_t i = 0; i < ps.size(); ++i) {
      link(v, ps[i]);
      for (std::size_t j = i + 1; j < ps.size(); ++j) link(ps[i], ps[j]);
    }
  }
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> queue(xs.begin(), xs.end());
  for (std::size_t x : xs) seen[x] = true;
  while (!queue.empty()) {
    const std::size_t v = queue.back();
    queue.pop_back();
    if (v == y) return false;
    for (std::size_t w : adj[v]) {
      if (seen[w] || is_z[w] || !anc[w]) continue;
      seen[w] = true;
      queue.push_back(w);
    }
  }
  return true;
}

std::vector<std::string> parent_adjustment_set(const DiscreteSCM& scm, const std::vector<std::string>& treatments) {
  std::vector<bool> is_x(scm.size(), false), chosen(scm.size(), false);
  for (const auto& name : treatments) is_x[scm.index_of(name)] = true;
  for (const auto& name : treatments)
    for (std::size_t p : scm.parent_indices(scm.index_of(name)))
      if (!is_x[p]) chosen[p] = true;
  std::vector<std::string> out;
  for (std::size_t v = 0; v < scm.size(); ++v)
    if (chosen[v]) out.push_back(scm.variable(v).name);
  return out;
}

NoisePosterior abduct(const DiscreteSCM& scm, const Assignment& factual) {
  NoisePosterior post;
  for (std::size_t v = 0; v < scm.size(); ++v) {
    if (scm.variable(v).exogenous) post.exogenous.push_back(v);
    else if (!scm.is_deterministic(v))
      throw ContractError("counterfactuals need explicit noise: " + scm.variable(v).name +
                          " is endogenous but not deterministic");
  }
  const auto fixed = resolve(scm, factual);

  std::size_t total = 1;
  for (std::size_t u : post.exogenous) total *= scm.domain_size(u);
  std::vector<std::size_t> cfg(post.exogenous.size(), 0);
  std::vector<std::size_t> state(scm.size(), 0);
  double z = 0.0;
  for (std::size_t n = 0; n < total; ++n) {
    double prior = 1.0;
    for (std::size_t i = 0; i < post.exogenous.size(); ++i) {
      state[post.exogenous[i]] = cfg[i];
      prior *= scm.conditional(post.exogenous[i], cfg[i], state);
    }
    for (std::size_t v : scm.topological_order())
      if (!scm.variable(v).exogenous) state[v] = deterministic_value(scm, v, state);
    if (prior > 0.0 && matches(state, fixed)) {
      post.configs.push_back(cfg);
      post.weights.push_back(prior);
      z += prior;
    }
    for (std::size_t i = cfg.size(); i-- > 0;) {
      if (++cfg[i] < scm.domain_size(post.exogenous[i])) break;
      cfg[i] = 0;
    }
  }
  if (!(z > 0.0)) throw ConditioningError("abduction: factual assignment has probability zero");
  for (double& w : post.weights) w /= z;
  return post;
}

Distribution counterfactual(const DiscreteSCM& scm, std::string_view target, const Assignment& factual,
                            const Assignment& twiddle) {
  const std::size_t t = scm.index_of(target);
  const NoisePosterior post = abduct(scm, factual);
  const auto forced = resolve(scm, twiddle);
  std::vector<std::size_t> force_value(scm.size(), SIZE_MAX);
  for (const auto& [v, val] : forced) force_value[v] = val;

  std::vector<double> mass(scm.domain_size(t), 0.0);
  std::vector<std::size_t> state(scm.size(), 0);
  for (std::size_t k = 0; k < post.configs.size(); ++k) {
    for (std::size_t i = 0; i < post.exogenous.size(); ++i) state[post.exogenous[i]] = post.configs[k][i];
    for (std::size_t v : scm.topological_order()) {
      if (force_value[v] != SIZE_MAX) state[v] = force_value[v];
      else if (!scm.variable(v).exogenous) state[v] = deterministic_value(scm, v, state);
    }
    mass[state[t]] += post.weights[k];
  }
  return make_distribution(scm, t, std::move(mass));
}

DiscreteSCM fork_fixture() {
  std::vector<ScmVariable> vars;
  vars.push_back({"T", {"0", "1"}, {}, {{0.5, 0.5}}, false});
  vars.push_back({"X", {"0", "1"}, {"T"}, {{0.8, 0.2}, {0.2, 0.8}}, false});
  vars.push_back({"Y", {"0", "1"}, {"T"}, {{0.9, 0.1}, {0.1, 0.9}}, false});
  return DiscreteSCM(std::move(vars));
}

DiscreteSCM random_scm(Rng& rng, std::size_t n_vars, std::size_t max_domain, double edge_prob) {
  if (max_domain < 2) throw ContractError("random_scm: max_domain must be >= 2");
  std::vector<ScmVariable> vars(n_vars);
  for (std::size_t i = 0; i < n_vars; ++i) {
    auto& v = vars[i];
    v.name = "V" + std::to_string(i);
    const std::size_t k = 2 + rng.below(max_domain - 1);
    for (std::size_t d = 0; d < k; ++d) v.domain.push_back(std::to_string(d));
    std::size_t rows = 1;
    for (std::size_t j = 0; j < i; ++j)
      if (rng.bernoulli(edge_prob)) {
        v.parents.push_back(vars[j].name);
        rows *= vars[j].domain.size();
      }
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row(k);
      double s = 0.0;
      for (double& p : row) s += (p = 0.05 + rng.uniform());
      for (double& p : row) p /= s;
      // Push the rounding residue into the largest entry so the row sums to 1.
      const double resid = 1.0 - std::accumulate(row.begin(), row.end(), 0.0);
      *std::max_element(row.begin(), row.end()) += resid;
      v.cpt.push_back(std::move(row));
    }
  }
  return DiscreteSCM(std::move(vars));
}

}  // namespace acci
