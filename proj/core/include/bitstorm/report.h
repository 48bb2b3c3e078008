/* Copyright 2026 The Bitstorm Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BITSTORM_REPORT_H_
#define BITSTORM_REPORT_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "bitstorm/campaign.h"

namespace bitstorm {

std::string_view Version();

// "# bitstorm <version> rng=<algorithm> seed=<seed>", the first line of every
// CSV report.
std::string ReportComment(std::uint64_t seed);

// Writes summary.json, accuracy.csv, cma.csv, records.csv and layers.csv
// into `out_dir`. Output is a pure function of `result`. Throws
// ValidationError for a result containing a cell without trials and
// ResourceError on I/O failure.
void EmitReport(const CampaignResult& result,
                const std::filesystem::path& out_dir);

std::string SummaryJson(const CampaignResult& result);

// Parses summary.json back into a result. Injection records are not part of
// the summary, so cells come back with empty record lists.
CampaignResult ReadSummary(const std::filesystem::path& summary_path);

// Console table: one row per cell plus the CMA convergence verdict.
std::string FormatSummaryTable(const CampaignResult& result);

}  // namespace bitstorm

#endif  // BITSTORM_REPORT_H_
