// Copyright 2026 The flowseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// flowseg command-line tool. Every subcommand takes an optional
// `--config <file.json>` and per-key flag overrides, merges them into one flat
// JSON object and hands it to the C library.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "flowseg/flowseg.h"

namespace {

using nlohmann::json;

enum ExitCode { kOk = 0, kUsage = 1, kBadInput = 2, kInternal = 3 };

enum class Kind { kString, kInt, kDouble, kBool, kIntList, kDoubleList, kStringList };

struct Key {
  const char* name;
  Kind kind;
  const char* help;
};

// clang-format off
const Key kPaths[] = {
    {"dataset_root", Kind::kString, "dataset root (one folder per sequence)"},
    {"sequences", Kind::kStringList, "comma-separated sequence names (default: all)"},
    {"output_dir", Kind::kString, "output directory"},
    {"workers", Kind::kInt, "parallel sequence workers"},
};
const Key kSelect[] = {
    {"model", Kind::kString, "preset: flowi or flowp"},
    {"nms_iou_threshold", Kind::kDouble, "NMS IoU threshold"},
    {"top_n", Kind::kInt, "objects kept per frame"},
    {"score_mode", Kind::kString, "fiou or mean_fiou_mos"},
    {"score_floor", Kind::kDouble, "drop candidates scoring below this"},
};
const Key kAssoc[] = {
    {"predictions_dir", Kind::kString, "frame-level predictions"},
    {"gaps", Kind::kIntList, "flow gaps, e.g. 1,-1,2,-2"},
    {"deltas", Kind::kIntList, "temporal neighbours, e.g. 1,2,-1,-2"},
    {"assoc_mode", Kind::kString, "temporal, hungarian or propagation"},
    {"flag_override", Kind::kString, "none, all_true or all_false"},
};
const Key kCombine[] = {
    {"predictions_dir", Kind::kString, "front predictions"},
    {"back_dir", Kind::kString, "back predictions"},
};
const Key kEval[] = {
    {"predictions_dir", Kind::kString, "associated predictions"},
    {"protocol", Kind::kString, "frame or sequence"},
    {"sr", Kind::kBool, "also compute bounding-box success rate"},
    {"sr_thresholds", Kind::kDoubleList, "success-rate IoU thresholds"},
};
const Key kSynth[] = {
    {"output_dir", Kind::kString, "output directory"},
    {"workers", Kind::kInt, "parallel sequence workers"},
    {"seed", Kind::kInt, "base seed"},
    {"num_sequences", Kind::kInt, "sequences to generate"},
    {"num_objects", Kind::kInt, "objects per sequence"},
    {"num_frames", Kind::kInt, "frames per sequence"},
    {"height", Kind::kInt, "frame height"},
    {"width", Kind::kInt, "frame width"},
    {"max_speed", Kind::kInt, "max |velocity| per axis"},
    {"background_vx", Kind::kInt, "background motion x"},
    {"background_vy", Kind::kInt, "background motion y"},
    {"gaps", Kind::kIntList, "flow gaps written"},
    {"id_permute_prob", Kind::kDouble, "per-frame ID shuffle probability"},
    {"dropout_prob", Kind::kDouble, "per-object dropout probability"},
    {"jitter_px", Kind::kInt, "max candidate jitter in pixels"},
    {"duplicate_prob", Kind::kDouble, "duplicate candidate probability"},
};
const Key kFlowVis[] = {
    {"input", Kind::kString, ".flo file or directory"},
    {"output", Kind::kString, "PNG file or directory"},
    {"fixed_radius", Kind::kDouble, "normalise by this radius instead of the field maximum"},
};
const Key kLosses[] = {
    {"input", Kind::kString, "loss input JSON"},
    {"output", Kind::kString, "result JSON (default stdout)"},
};
// clang-format on

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json to_json(Kind kind, const std::string& raw) {
  switch (kind) {
    case Kind::kString: return raw;
    case Kind::kInt: return std::stoll(raw);
    case Kind::kDouble: return std::stod(raw);
    case Kind::kBool: return raw == "true" || raw == "1";
    case Kind::kIntList: {
      json a = json::array();
      for (const auto& s : split(raw)) a.push_back(std::stoi(s));
      return a;
    }
    case Kind::kDoubleList: {
      json a = json::array();
      for (const auto& s : split(raw)) a.push_back(std::stod(s));
      return a;
    }
    case Kind::kStringList: {
      json a = json::array();
      for (const auto& s : split(raw)) a.push_back(s);
      return a;
    }
  }
  return nullptr;
}

struct Command {
  CLI::App* app = nullptr;
  flowseg_status (*run)(const char*) = nullptr;
  std::string config_file;
  struct Slot {
    Kind kind;
    std::string raw;
    CLI::Option* option = nullptr;
  };
  std::map<std::string, Slot> values;
  std::map<std::string, bool> flags;
};

void add_keys(Command& cmd, const Key* begin, const Key* end) {
  for (const Key* k = begin; k != end; ++k) {
    std::string flag = std::string("--") + k->name;
    for (auto& ch : flag) {
      if (ch == '_') ch = '-';
    }
    if (cmd.values.count(k->name) || cmd.flags.count(k->name)) continue;
    if (k->kind == Kind::kBool) {
      cmd.flags[k->name] = false;
      cmd.app->add_flag(flag, cmd.flags[k->name], k->help);
    } else {
      auto& slot = cmd.values[k->name];
      slot.kind = k->kind;
      slot.option = cmd.app->add_option(flag, slot.raw, k->help);
    }
  }
}

template <std::size_t N>
void add_keys(Command& cmd, const Key (&keys)[N]) {
  add_keys(cmd, keys, keys + N);
}

int exit_code_for(flowseg_status s) {
  switch (s) {
    case FLOWSEG_OK: return kOk;
    case FLOWSEG_ERR_INTERNAL:
    case FLOWSEG_ERR_NULL_ARGUMENT: return kInternal;
    default: return kBadInput;
  }
}

int execute(const Command& cmd) {
  json config = json::object();
  if (!cmd.config_file.empty()) {
    std::ifstream in(cmd.config_file);
    if (!in) {
      std::cerr << "flowseg: cannot open config file " << cmd.config_file << "\n";
      return kBadInput;
    }
    try {
      config = json::parse(in);
    } catch (const json::exception& e) {
      std::cerr << "flowseg: config file " << cmd.config_file << ": " << e.what() << "\n";
      return kBadInput;
    }
    if (!config.is_object()) {
      std::cerr << "flowseg: config file must hold a JSON object\n";
      return kBadInput;
    }
  }
  for (const auto& [name, slot] : cmd.values) {
    if (slot.option->count() == 0) continue;
    try {
      config[name] = to_json(slot.kind, slot.raw);
    } catch (const std::exception&) {
      std::cerr << "flowseg: bad value for " << slot.option->get_name() << ": " << slot.raw << "\n";
      return kUsage;
    }
  }
  for (const auto& [name, on] : cmd.flags) {
    if (on) config[name] = true;
  }
  const std::string text = config.dump();
  const flowseg_status s = cmd.run(text.c_str());
  if (s != FLOWSEG_OK) {
    std::cerr << "flowseg: " << flowseg_status_string(s) << ": " << flowseg_last_error() << "\n";
  }
  return exit_code_for(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flowseg: flow-guided object segmentation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(flowseg_version()));

  std::vector<Command> commands(7);
  auto make = [&](std::size_t i, const char* name, const char* help, flowseg_status (*run)(const char*)) -> Command& {
    Command& c = commands[i];
    c.app = app.add_subcommand(name, help);
    c.run = run;
    c.app->add_option("--config", c.config_file, "JSON config file");
    return c;
  };

  Command& select = make(0, "select", "pick per-frame objects from candidate masks", flowseg_cmd_select);
  add_keys(select, kPaths);
  add_keys(select, kSelect);

  Command& combine = make(1, "combine", "layer two prediction sets", flowseg_cmd_combine);
  add_keys(combine, kPaths);
  add_keys(combine, kCombine);

  Command& associate = make(2, "associate", "link frame predictions into tracks", flowseg_cmd_associate);
  add_keys(associate, kPaths);
  add_keys(associate, kAssoc);

  Command& eval = make(3, "eval", "score predictions against annotations", flowseg_cmd_eval);
  add_keys(eval, kPaths);
  add_keys(eval, kEval);

  Command& synth = make(4, "synth", "generate a synthetic benchmark", flowseg_cmd_synth);
  add_keys(synth, kSynth);

  Command& flow_vis = make(5, "flow-vis", "render .flo files as color images", flowseg_cmd_flow_vis);
  add_keys(flow_vis, kFlowVis);
  add_keys(flow_vis, kPaths + 3, kPaths + 4);

  Command& losses = make(6, "losses", "evaluate training losses on given items", flowseg_cmd_losses);
  add_keys(losses, kLosses);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  for (const Command& c : commands) {
    if (c.app->parsed()) return execute(c);
  }
  return kUsage;
}
