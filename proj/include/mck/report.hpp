#pragma once

#include <string>
#include <vector>

namespace mck {

struct CheckResult {
	std::string id;
	bool pass = false;
	std::string witness; // empty when the check passes
};

struct Report {
	std::vector<CheckResult> checks;

	void add(std::string id, bool pass, std::string witness = "")
	{
		checks.push_back({std::move(id), pass, std::move(witness)});
	}
	void merge(const Report& o)
	{
		checks.insert(checks.end(), o.checks.begin(), o.checks.end());
	}
	bool all_pass() const
	{
		for (auto& c : checks)
			if (!c.pass)
				return false;
		return true;
	}
	const CheckResult* first_failure() const
	{
		for (auto& c : checks)
			if (!c.pass)
				return &c;
		return nullptr;
	}
};

} // namespace mck
