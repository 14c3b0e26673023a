#pragma once

#include <random>
#include <string>
#include <vector>

#include "bpmnverify/model.hpp"

// Shared test helpers: fixture corpus loading and random model
// generation for property tests.

namespace testutil {

std::string fixture_path(const std::string& name);
std::string read_file(const std::string& path);
bpmn::WorkflowModel load_fixture(const std::string& name);

// All shipped .wf fixtures that are well-formed (the verdict corpus).
const std::vector<std::string>& corpus_names();
std::vector<bpmn::WorkflowModel> load_corpus();

// Random well-formed model, built by refining a linear chain with
// gateway blocks, inline tasks and loop back-edges. Always passes
// validate_wellformed.
bpmn::WorkflowModel random_wellformed_model(std::mt19937& rng, int refinements = 6);

// Arbitrary random graph over the element vocabulary; usually
// ill-formed. For validator and fuzz tests.
bpmn::WorkflowModel random_junk_model(std::mt19937& rng);

}  // namespace testutil
