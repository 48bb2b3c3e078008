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

#include "bitstorm/report.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "binary_io.h"
#include "bitstorm/errors.h"
#include "bitstorm/rng.h"
#include "json.hpp"

namespace bitstorm {
namespace {

using Json = nlohmann::ordered_json;

// Shortest decimal text that parses back to the same double.
std::string Num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string Hex32(std::uint32_t v) {
  char buf[11];
  std::snprintf(buf, sizeof(buf), "0x%08x", v);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, std::uint64_t seed,
          std::string_view header)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw ResourceError("cannot create '" + path.string() + "'");
    out_ << ReportComment(seed) << '\n' << header << '\n';
  }

  std::ostream& row() { return out_; }

  void Close() {
    out_.close();
    if (!out_) throw ResourceError("failed writing '" + path_.string() + "'");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::string LayerName(const CampaignResult& result, const CellResult& cell) {
  if (result.mode != InjectionMode::kLayerWise ||
      cell.target.layer >= result.layers.size()) {
    return "";
  }
  return result.layers[cell.target.layer].name;
}

std::string LayerKindOf(const CampaignResult& result, const CellResult& cell) {
  if (result.mode != InjectionMode::kLayerWise ||
      cell.target.layer >= result.layers.size()) {
    return "op";
  }
  return result.layers[cell.target.layer].kind;
}

}  // namespace

std::string_view Version() { return BITSTORM_VERSION_STRING; }

std::string ReportComment(std::uint64_t seed) {
  return "# bitstorm " + std::string(Version()) + " rng=" +
         std::string(kRngAlgorithm) + " seed=" + std::to_string(seed);
}

std::string SummaryJson(const CampaignResult& result) {
  Json doc;
  doc["tool"] = "bitstorm";
  doc["version"] = std::string(Version());
  doc["rng"] = std::string(kRngAlgorithm);
  doc["seed"] = result.seed;
  doc["mode"] = std::string(InjectionModeName(result.mode));
  doc["metric"] = std::string(MetricName(result.metric));
  doc["fault"] = std::string(FaultKindName(result.fault));
  if (result.bit != kNoBit) doc["bit"] = result.bit;
  doc["trials"] = result.trials;
  doc["samples"] = result.samples;
  doc["reference_accuracy"] = result.reference_accuracy;
  doc["complete"] = result.complete;
  doc["convergence"] = {{"window", result.convergence_window},
                        {"epsilon", result.convergence_epsilon}};
  Json layers = Json::array();
  for (const LayerInfo& layer : result.layers) {
    layers.push_back({{"name", layer.name}, {"kind", layer.kind}});
  }
  doc["layers"] = std::move(layers);
  Json cells = Json::array();
  std::size_t record_count = 0;
  for (const CellResult& cell : result.cells) {
    Json c;
    c["target"] = cell.target.Label(result.mode);
    if (result.mode == InjectionMode::kLayerWise) {
      c["layer"] = cell.target.layer;
    } else {
      Json ops = Json::array();
      for (MicroOpKind k : cell.target.ops) {
        ops.push_back(std::string(MicroOpKindName(k)));
      }
      c["ops"] = std::move(ops);
    }
    c["probability"] = cell.probability;
    c["samples"] = cell.samples;
    c["correct"] = cell.correct;
    c["accuracy"] = cell.accuracy;
    c["mean"] = cell.mean;
    c["std"] = cell.stddev;
    c["min"] = cell.min;
    c["max"] = cell.max;
    c["cma_final"] = cell.cma.empty() ? 0.0 : cell.cma.back();
    c["converged"] = cell.convergence.converged;
    c["convergence_note"] = cell.convergence.note;
    c["injections"] = cell.records.size();
    record_count += cell.records.size();
    cells.push_back(std::move(c));
  }
  doc["cells"] = std::move(cells);
  doc["records"] = {{"file", "records.csv"}, {"count", record_count}};
  return doc.dump(2) + "\n";
}

void EmitReport(const CampaignResult& result,
                const std::filesystem::path& out_dir) {
  for (const CellResult& cell : result.cells) {
    if (cell.correct.empty()) {
      throw ValidationError("cannot report a cell without trials");
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw ResourceError("cannot create '" + out_dir.string() +
                        "': " + ec.message());
  }
  internal::WriteFile(out_dir / "summary.json", SummaryJson(result));

  CsvFile accuracy(out_dir / "accuracy.csv", result.seed,
                   "target,probability,trial,correct,total,accuracy");
  CsvFile cma(out_dir / "cma.csv", result.seed, "target,probability,trial,cma");
  CsvFile records(out_dir / "records.csv", result.seed,
                  "target,probability,trial,sample,site,element,bit,"
                  "original_hex,corrupted_hex");
  CsvFile layers(out_dir / "layers.csv", result.seed,
                 "target,name,kind,probability,mean,std,min,max,converged");
  for (const CellResult& cell : result.cells) {
    const std::string target = cell.target.Label(result.mode);
    const std::string p = Num(cell.probability);
    for (std::size_t t = 0; t < cell.correct.size(); ++t) {
      accuracy.row() << target << ',' << p << ',' << t << ',' << cell.correct[t]
                     << ',' << cell.samples << ',' << Num(cell.accuracy[t])
                     << '\n';
      cma.row() << target << ',' << p << ',' << t << ',' << Num(cell.cma[t])
                << '\n';
    }
    for (const InjectionRecord& r : cell.records) {
      records.row() << target << ',' << p << ',' << r.trial << ',' << r.sample
                    << ',' << r.site << ',' << r.element << ',' << r.bit << ','
                    << Hex32(r.original_bits) << ',' << Hex32(r.corrupted_bits)
                    << '\n';
    }
    layers.row() << target << ',' << LayerName(result, cell) << ','
                 << LayerKindOf(result, cell) << ',' << p << ','
                 << Num(cell.mean) << ',' << Num(cell.stddev) << ','
                 << Num(cell.min) << ',' << Num(cell.max) << ','
                 << (cell.convergence.converged ? "yes" : "no") << '\n';
  }
  accuracy.Close();
  cma.Close();
  records.Close();
  layers.Close();
}

CampaignResult ReadSummary(const std::filesystem::path& summary_path) {
  Json doc;
  try {
    doc = Json::parse(internal::ReadFile(summary_path));
  } catch (const Json::exception& e) {
    throw ValidationError(summary_path.string() + ": " + e.what());
  }
  CampaignResult result;
  try {
    result.mode = ParseInjectionMode(doc.at("mode").get<std::string>());
    result.metric = ParseMetric(doc.at("metric").get<std::string>());
    result.fault = ParseFaultKind(doc.at("fault").get<std::string>());
    result.bit = doc.contains("bit") ? doc.at("bit").get<int>() : kNoBit;
    result.seed = doc.at("seed").get<std::uint64_t>();
    result.trials = doc.at("trials").get<std::size_t>();
    result.samples = doc.at("samples").get<std::uint64_t>();
    result.reference_accuracy = doc.at("reference_accuracy").get<double>();
    result.complete = doc.at("complete").get<bool>();
    result.convergence_window =
        doc.at("convergence").at("window").get<std::size_t>();
    result.convergence_epsilon =
        doc.at("convergence").at("epsilon").get<double>();
    for (const Json& layer : doc.at("layers")) {
      result.layers.push_back({layer.at("name").get<std::string>(),
                               layer.at("kind").get<std::string>()});
    }
    for (const Json& c : doc.at("cells")) {
      CellResult cell;
      if (result.mode == InjectionMode::kLayerWise) {
        cell.target.layer = c.at("layer").get<std::size_t>();
      } else {
        for (const Json& op : c.at("ops")) {
          cell.target.ops.insert(ParseMicroOpKind(op.get<std::string>()));
        }
      }
      cell.probability = c.at("probability").get<double>();
      cell.samples = c.at("samples").get<std::uint64_t>();
      cell.correct = c.at("correct").get<std::vector<std::uint64_t>>();
      FinalizeCell(cell, result.convergence_window, result.convergence_epsilon);
      if (cell.mean != c.at("mean").get<double>()) {
        throw ValidationError("cell statistics disagree with trial counts");
      }
      result.cells.push_back(std::move(cell));
    }
  } catch (const Json::exception& e) {
    throw ValidationError(summary_path.string() + ": " + e.what());
  }
  return result;
}

std::string FormatSummaryTable(const CampaignResult& result) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line),
                "mode=%s metric=%s fault=%s trials=%zu samples=%llu "
                "reference=%.4f\n",
                std::string(InjectionModeName(result.mode)).c_str(),
                std::string(MetricName(result.metric)).c_str(),
                std::string(FaultKindName(result.fault)).c_str(), result.trials,
                static_cast<unsigned long long>(result.samples),
                result.reference_accuracy);
  out << line;
  std::snprintf(line, sizeof(line), "%-10s %-14s %-8s %8s %8s %8s %8s  %s\n",
                "target", "name", "p", "mean", "std", "min", "max", "CMA");
  out << line;
  for (const CellResult& cell : result.cells) {
    std::string name = LayerName(result, cell);
    std::snprintf(line, sizeof(line),
                  "%-10s %-14s %-8.4g %8.4f %8.4f %8.4f %8.4f  %s (%s)\n",
                  cell.target.Label(result.mode).c_str(), name.c_str(),
                  cell.probability, cell.mean, cell.stddev, cell.min, cell.max,
                  cell.convergence.converged ? "converged" : "not converged",
                  cell.convergence.note.c_str());
    out << line;
  }
  if (!result.complete) out << "(partial result)\n";
  return out.str();
}

}  // namespace bitstorm
