// Copyright 2026 The Dynogram Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dynogram/bundle.h"

#include <filesystem>

#include "dynogram/binary_io.h"
#include "dynogram/error.h"
#include "json.hpp"

namespace dynogram {

namespace {

using Json = nlohmann::ordered_json;

void write_type(ByteWriter& w, const TensorType& t) {
  w.u8(static_cast<uint8_t>(t.kind));
  w.u8(static_cast<uint8_t>(t.shape.size()));
  for (int64_t d : t.shape) w.u32(static_cast<uint32_t>(d));
}

TensorType read_type(ByteReader& r) {
  TensorType t;
  const uint8_t kind = r.u8();
  if (kind > 1) r.corrupt("unknown element kind " + std::to_string(kind));
  t.kind = static_cast<ElementKind>(kind);
  const uint8_t rank = r.u8();
  for (uint8_t k = 0; k < rank; ++k) t.shape.push_back(r.u32());
  return t;
}

void write_ints(ByteWriter& w, const std::vector<int64_t>& v) {
  w.u8(static_cast<uint8_t>(v.size()));
  for (int64_t x : v) w.i64(x);
}

std::vector<int64_t> read_ints(ByteReader& r) {
  const uint8_t n = r.u8();
  std::vector<int64_t> v;
  for (uint8_t k = 0; k < n; ++k) v.push_back(r.i64());
  return v;
}

std::string graph_file(int id) { return "graphs/g" + std::to_string(id) + ".bin"; }

std::string_view decision_name(DecisionKind k) {
  return k == DecisionKind::kClassifier ? "classifier" : "generator";
}

Json type_json(const TensorType& t) {
  return Json{{"kind", element_kind_name(t.kind)}, {"shape", t.shape}};
}

}  // namespace

std::string serialize_graph(const CompiledSubGraph& c) {
  const ComputeGraph& g = c.graph;
  ByteWriter w;
  w.bytes("DYCG");
  w.u32(kGraphVersion);
  w.u32(static_cast<uint32_t>(c.graph_id));
  w.u32(static_cast<uint32_t>(g.input_ids.size()));
  for (size_t k = 0; k < g.input_ids.size(); ++k) {
    w.str16(g.nodes[g.input_ids[k]].name);
    write_type(w, c.input_types[k]);
  }
  std::vector<const GraphNode*> consts;
  std::vector<const GraphNode*> ops;
  for (const auto& n : g.nodes) {
    if (n.kind == GraphNode::Kind::kConst) consts.push_back(&n);
    if (n.kind == GraphNode::Kind::kOp) ops.push_back(&n);
  }
  w.u32(static_cast<uint32_t>(ops.size()));
  for (const GraphNode* n : ops) {
    w.u16(static_cast<uint16_t>(n->op.kind));
    ByteWriter attrs;
    attrs.i64(n->op.attrs.axis);
    write_ints(attrs, n->op.attrs.begin);
    write_ints(attrs, n->op.attrs.end);
    write_ints(attrs, n->op.attrs.shape);
    w.u32(static_cast<uint32_t>(attrs.data().size()));
    w.bytes(attrs.data());
    w.u16(static_cast<uint16_t>(n->inputs.size()));
    for (int i : n->inputs) w.u32(static_cast<uint32_t>(i));
  }
  w.u32(static_cast<uint32_t>(consts.size()));
  for (const GraphNode* n : consts) {
    if (n->is_weight()) {
      w.u8(1);
      w.str16(n->weight_key);
    } else {
      w.u8(0);
      w.tensor_body(n->literal);
    }
  }
  w.u32(static_cast<uint32_t>(g.output_ids.size()));
  for (size_t k = 0; k < g.output_ids.size(); ++k) {
    const GraphNode& out = g.nodes[g.output_ids[k]];
    w.str16(out.name);
    w.u32(static_cast<uint32_t>(out.inputs[0]));
    write_type(w, c.output_types[k]);
  }
  return w.take();
}

CompiledSubGraph deserialize_graph(std::string_view bytes, const WeightStore& weights) {
  ByteReader r(bytes, "graph");
  r.expect_header("DYCG", kGraphVersion);
  const int graph_id = static_cast<int>(r.u32());
  ComputeGraph g;
  std::vector<TensorType> input_types;
  const uint32_t nin = r.u32();
  if (nin > r.remaining()) r.corrupt("input count exceeds data");
  for (uint32_t k = 0; k < nin; ++k) {
    GraphNode n;
    n.kind = GraphNode::Kind::kInput;
    n.id = static_cast<int>(g.nodes.size());
    n.name = r.str16();
    input_types.push_back(read_type(r));
    g.input_ids.push_back(n.id);
    g.nodes.push_back(std::move(n));
  }
  const uint32_t nops = r.u32();
  if (nops > r.remaining()) r.corrupt("node count exceeds data");
  std::vector<GraphNode> ops;
  for (uint32_t k = 0; k < nops; ++k) {
    GraphNode n;
    n.kind = GraphNode::Kind::kOp;
    const uint16_t code = r.u16();
    if (code == 0 || code >= kNumOpKinds) r.corrupt("bad op code " + std::to_string(code));
    n.op.kind = static_cast<OpKind>(code);
    const uint32_t blob_size = r.u32();
    ByteReader blob(r.bytes(blob_size), "graph attributes");
    n.op.attrs.axis = blob.i64();
    n.op.attrs.begin = read_ints(blob);
    n.op.attrs.end = read_ints(blob);
    n.op.attrs.shape = read_ints(blob);
    if (!blob.at_end()) blob.corrupt("trailing attribute bytes");
    const uint16_t arity = r.u16();
    const int expected = op_arity(n.op.kind);
    if ((expected >= 0 && arity != expected) || (expected < 0 && arity == 0)) {
      r.corrupt("operand count " + std::to_string(arity) + " invalid for " +
                std::string(op_name(n.op.kind)));
    }
    for (uint16_t a = 0; a < arity; ++a) n.inputs.push_back(static_cast<int>(r.u32()));
    ops.push_back(std::move(n));
  }
  const uint32_t nconst = r.u32();
  if (nconst > r.remaining()) r.corrupt("const count exceeds data");
  for (uint32_t k = 0; k < nconst; ++k) {
    GraphNode n;
    n.kind = GraphNode::Kind::kConst;
    n.id = static_cast<int>(g.nodes.size());
    const uint8_t tag = r.u8();
    if (tag == 0) {
      n.literal = r.tensor_body();
    } else if (tag == 1) {
      n.weight_key = r.str16();
      const Tensor* t = weights.find(n.weight_key);
      if (!t) r.corrupt("weight '" + n.weight_key + "' missing from weights.bin");
      n.literal = *t;
    } else {
      r.corrupt("bad const tag " + std::to_string(tag));
    }
    g.nodes.push_back(std::move(n));
  }
  for (auto& n : ops) {
    n.id = static_cast<int>(g.nodes.size());
    for (int i : n.inputs) {
      if (i < 0 || i >= n.id) r.corrupt("operand id " + std::to_string(i) + " out of order");
    }
    g.nodes.push_back(std::move(n));
  }
  const int values = static_cast<int>(g.nodes.size());
  const uint32_t nout = r.u32();
  if (nout > r.remaining()) r.corrupt("output count exceeds data");
  std::vector<TensorType> output_types;
  for (uint32_t k = 0; k < nout; ++k) {
    GraphNode n;
    n.kind = GraphNode::Kind::kOutput;
    n.id = static_cast<int>(g.nodes.size());
    n.name = r.str16();
    const uint32_t src = r.u32();
    if (src >= static_cast<uint32_t>(values)) r.corrupt("output source out of range");
    n.inputs.push_back(static_cast<int>(src));
    output_types.push_back(read_type(r));
    g.output_ids.push_back(n.id);
    g.nodes.push_back(std::move(n));
  }
  if (!r.at_end()) r.corrupt("trailing bytes");
  CompiledSubGraph c;
  try {
    c = plan_schedule(graph_id, g, input_types, nullptr);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidBundle) throw;
    r.corrupt("inconsistent graph: " + e.detail());
  }
  if (c.output_types != output_types) r.corrupt("output table disagrees with graph");
  return c;
}

std::string make_manifest(const BundleInfo& info, const Hcfg* h,
                          const std::map<int, HostResidual>& residuals,
                          const std::map<int, CompiledSubGraph>& graphs, const HostProgram& host) {
  Json m;
  m["format"] = "dynogram-bundle";
  m["version"] = kManifestVersion;
  m["model"] = info.model;
  m["variant"] = info.variant;
  m["decision"] = {{"kind", decision_name(info.decision_kind)}, {"eos", info.eos_token}};
  Json inputs = Json::array();
  for (const auto& p : info.inputs) {
    Json in = type_json(p.type);
    in["name"] = p.name;
    inputs.push_back(in);
  }
  m["inputs"] = inputs;
  m["num_outputs"] = info.num_outputs;
  if (h) {
    m["entry"] = h->entry;
    Json nodes = Json::array();
    for (const auto& n : h->nodes) {
      Json j;
      j["id"] = n.id;
      j["kind"] = n.is_logic() ? "logic" : "tensor";
      if (n.is_logic()) {
        j["cond"] = format_cond(n.cond);
      } else {
        j["statements"] = n.stmts.size();
      }
      j["live_in"] = n.live_in;
      j["live_out"] = n.live_out;
      if (n.is_exit) j["returns"] = n.returns;
      if (!n.is_logic()) {
        j["graph"] = graphs.count(n.id) ? Json(graph_file(n.id)) : Json(nullptr);
      }
      auto res = residuals.find(n.id);
      if (res != residuals.end()) {
        Json rs = Json::array();
        for (const auto& ins : res->second) {
          if (ins.kind == ResidualInstr::Kind::kCopy) {
            rs.push_back({{"op", "copy"}, {"dst", ins.dst}, {"src", ins.src}});
          } else {
            rs.push_back({{"op", "assign_const"},
                          {"dst", ins.dst},
                          {"literal", format_tensor_literal(ins.literal)}});
          }
        }
        j["residual"] = rs;
      }
      nodes.push_back(j);
    }
    m["nodes"] = nodes;
    Json edges = Json::array();
    for (const auto& e : h->edges) {
      edges.push_back({{"src", e.src}, {"dst", e.dst}, {"label", edge_label_name(e.label)}});
    }
    m["edges"] = edges;
  }
  Json gs = Json::array();
  for (const auto& [id, c] : graphs) {
    Json j;
    j["id"] = id;
    j["file"] = graph_file(id);
    Json ins = Json::array();
    for (size_t k = 0; k < c.input_types.size(); ++k) {
      Json t = type_json(c.input_types[k]);
      t["name"] = c.graph.nodes[c.graph.input_ids[k]].name;
      ins.push_back(t);
    }
    j["inputs"] = ins;
    Json outs = Json::array();
    for (size_t k = 0; k < c.output_types.size(); ++k) {
      Json t = type_json(c.output_types[k]);
      t["name"] = c.graph.nodes[c.graph.output_ids[k]].name;
      outs.push_back(t);
    }
    j["outputs"] = outs;
    j["kernels"] = c.schedule.size();
    j["arena_bytes"] = c.arena_bytes;
    gs.push_back(j);
  }
  m["graphs"] = gs;
  m["host"] = {{"instructions", host.code.size()},
               {"calls", host.count(HostInstr::Op::kCall)},
               {"branches", host.count(HostInstr::Op::kBranch)}};
  return m.dump(2) + "\n";
}

std::map<std::string, std::string> bundle_files(const Bundle& b) {
  std::map<std::string, std::string> files;
  files["manifest.json"] = b.manifest;
  files["host.bin"] = serialize_host(b.host);
  files["weights.bin"] = serialize_weights(b.weights);
  for (const auto& [id, c] : b.graphs) files[graph_file(id)] = serialize_graph(c);
  return files;
}

Bundle bundle_from_files(const std::map<std::string, std::string>& files) {
  auto get = [&](const std::string& name) -> const std::string& {
    auto it = files.find(name);
    if (it == files.end()) fail(ErrorCode::kInvalidBundle, "bundle is missing " + name);
    return it->second;
  };
  Bundle b;
  b.manifest = get("manifest.json");
  Json m;
  try {
    m = Json::parse(b.manifest);
    if (m.at("format") != "dynogram-bundle") fail(ErrorCode::kInvalidBundle, "not a bundle");
    if (m.at("version") != kManifestVersion) {
      fail(ErrorCode::kInvalidBundle,
           "manifest version " + m.at("version").dump() + " is not supported");
    }
    b.info.model = m.at("model").get<std::string>();
    b.info.variant = m.at("variant").get<std::string>();
    const std::string kind = m.at("decision").at("kind").get<std::string>();
    if (kind != "classifier" && kind != "generator") {
      fail(ErrorCode::kInvalidBundle, "unknown decision kind " + kind);
    }
    b.info.decision_kind =
        kind == "classifier" ? DecisionKind::kClassifier : DecisionKind::kGenerator;
    b.info.eos_token = m.at("decision").at("eos").get<int64_t>();
    for (const auto& in : m.at("inputs")) {
      Param p;
      p.name = in.at("name").get<std::string>();
      const std::string k = in.at("kind").get<std::string>();
      p.type.kind = k == "int" ? ElementKind::kInt : ElementKind::kReal;
      p.type.shape = in.at("shape").get<Shape>();
      b.info.inputs.push_back(std::move(p));
    }
    b.info.num_outputs = m.at("num_outputs").get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidBundle, std::string("manifest.json: ") + e.what());
  }
  b.weights = deserialize_weights(get("weights.bin"));
  b.host = deserialize_host(get("host.bin"));
  for (const auto& g : m.at("graphs")) {
    int id = 0;
    std::string file;
    try {
      id = g.at("id").get<int>();
      file = g.at("file").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kInvalidBundle, std::string("manifest.json: ") + e.what());
    }
    if (file != graph_file(id)) fail(ErrorCode::kInvalidBundle, "unexpected graph file " + file);
    CompiledSubGraph c = deserialize_graph(get(file), b.weights);
    if (c.graph_id != id) fail(ErrorCode::kInvalidBundle, file + " holds graph " + std::to_string(c.graph_id));
    b.graphs.emplace(id, std::move(c));
  }
  for (const auto& i : b.host.code) {
    if (i.op != HostInstr::Op::kCall) continue;
    auto it = b.graphs.find(i.graph);
    if (it == b.graphs.end()) {
      fail(ErrorCode::kInvalidBundle, "host calls missing graph g" + std::to_string(i.graph));
    }
    if (i.ins != it->second.input_names() || i.outs != it->second.output_names()) {
      fail(ErrorCode::kInvalidBundle,
           "host call to g" + std::to_string(i.graph) + " disagrees with its signature");
    }
  }
  return b;
}

void save_bundle(const Bundle& b, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "graphs", ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
  // Stale graph files from an earlier compile would confuse readers.
  for (const auto& entry : fs::directory_iterator(fs::path(dir) / "graphs")) {
    if (entry.path().extension() == ".bin") fs::remove(entry.path(), ec);
  }
  for (const auto& [name, data] : bundle_files(b)) write_file((fs::path(dir) / name).string(), data);
}

Bundle load_bundle(const std::string& dir) {
  namespace fs = std::filesystem;
  std::map<std::string, std::string> files;
  for (const char* name : {"manifest.json", "host.bin", "weights.bin"}) {
    const fs::path p = fs::path(dir) / name;
    if (!fs::exists(p)) fail(ErrorCode::kInvalidBundle, "bundle is missing " + std::string(name));
    files[name] = read_file(p.string());
  }
  const fs::path graphs = fs::path(dir) / "graphs";
  if (fs::exists(graphs)) {
    for (const auto& entry : fs::directory_iterator(graphs)) {
      files["graphs/" + entry.path().filename().string()] = read_file(entry.path().string());
    }
  }
  return bundle_from_files(files);
}

}  // namespace dynogram
