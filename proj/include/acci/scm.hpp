#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace acci {

class Rng;

// One node of a discrete structural causal model. CPT rows are indexed by the
// parent configuration in mixed radix, first parent most significant; each
// row is a distribution over `domain`.
struct ScmVariable {
  std::string name;
  std::vector<std::string> domain;
  std::vector<std::string> parents;
  std::vector<std::vector<double>> cpt;
  // Exogenous noise variable: must be a root. Counterfactual queries require
  // every other variable to be a deterministic function of its parents.
  bool exogenous = false;
};

// Variable name -> domain label.
using Assignment = std::map<std::string, std::string>;

struct Distribution {
  std::string variable;
  std::vector<std::string> labels;
  std::vector<double> probs;

  double prob(std::string_view label) const;
  double total() const;
};

class DiscreteSCM {
 public:
  DiscreteSCM() = default;
  // Validates acyclicity, CPT shape and row normalisation (1e-12).
  explicit DiscreteSCM(std::vector<ScmVariable> variables);

  static DiscreteSCM load(const std::filesystem::path& path);
  static DiscreteSCM from_json_text(std::string_view text);
  std::string to_json_text() const;

  std::size_t size() const { return vars_.size(); }
  const ScmVariable& variable(std::size_t i) const { return vars_[i]; }
  std::size_t index_of(std::string_view name) const;
  std::size_t value_index(std::size_t var, std::string_view label) const;
  std::size_t domain_size(std::size_t var) const { return vars_[var].domain.size(); }
  const std::vector<std::size_t>& parent_indices(std::size_t var) const { return parents_[var]; }
  const std::vector<std::size_t>& topological_order() const { return topo_; }
  bool is_deterministic(std::size_t var) const;

  // P(var = value | parents as found in `state`), where `state` holds one value
  // index per variable.
  double conditional(std::size_t var, std::size_t value, const std::vector<std::size_t>& state) const;

  // Descendants of the given variables (not including the variables themselves
  // unless reachable through a cycle, which validation rules out).
  std::vector<bool> descendants(const std::vector<std::size_t>& vars) const;

 private:
  std::size_t row_index(std::size_t var, const std::vector<std::size_t>& state) const;

  std::vector<ScmVariable> vars_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::size_t> topo_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
};

// Exact P(target | evidence) by full joint enumeration.
Distribution observational(const DiscreteSCM& scm, std::string_view target, const Assignment& evidence);

// Graph surgery: every do-variable loses its parents and becomes a point mass.
DiscreteSCM mutilate(const DiscreteSCM& scm, const Assignment& interventions);

// Exact P(target | do(interventions)) through the mutilated model.
Distribution interventional(const DiscreteSCM& scm, std::string_view target, const Assignment& interventions);

// Sum over adjustment configurations z of P(target | do-values, z) P(z), all
// terms observational. Throws ConditioningError on a positivity violation.
Distribution interventional_backdoor(const DiscreteSCM& scm, std::string_view target,
                                     const Assignment& interventions,
                                     const std::vector<std::string>& adjustment);

// True iff `adjustment` contains no descendant of the treatments and
// d-separates treatments from target once the treatments' outgoing edges are
// removed.
bool satisfies_backdoor(const DiscreteSCM& scm, const std::vector<std::string>& treatments,
                        std::string_view target, const std::vector<std::string>& adjustment);

// Parents of the treatments that are not themselves treatments. Always a valid
// backdoor set for a target outside that set.
std::vector<std::string> parent_adjustment_set(const DiscreteSCM& scm, const std::vector<std::string>& treatments);

// Posterior over joint exogenous configurations given a factual assignment.
struct NoisePosterior {
  std::vector<std::size_t> exogenous;            // variable indices
  std::vector<std::vector<std::size_t>> configs;  // one value per exogenous variable
  std::vector<double> weights;                    // normalised
};
NoisePosterior abduct(const DiscreteSCM& scm, const Assignment& factual);

// Abduction, action, prediction: distribution of target in the world where
// `twiddle` is forced, given what `factual` reveals about the noise.
Distribution counterfactual(const DiscreteSCM& scm, std::string_view target, const Assignment& factual,
                            const Assignment& twiddle);

// T -> X, T -> Y with P(T=1)=0.5, P(X=1|T)=0.8/0.2, P(Y=1|T)=0.9/0.1.
DiscreteSCM fork_fixture();

// Random DAG over `n_vars` variables with domain sizes in [2, max_domain] and
// strictly positive CPT rows.
DiscreteSCM random_scm(Rng& rng, std::size_t n_vars, std::size_t max_domain, double edge_prob = 0.5);

}  // namespace acci
