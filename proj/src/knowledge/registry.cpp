#include "kagents/knowledge/registry.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "kagents/errors.hpp"
#include "kagents/inspection/inspector.hpp"
#include "kagents/knowledge/catalog.hpp"
#include "kagents/lab/hooks.hpp"
#include "kagents/llm/digest.hpp"
#include "kagents/prompts.hpp"

#ifndef KAGENTS_DATA_DIR
#define KAGENTS_DATA_DIR "data"
#endif

namespace kagents::knowledge {

using nlohmann::json;

bool ActivationFingerprint::operator==(const ActivationFingerprint& other) const {
    if (sentences != other.sentences || embeddings.size() != other.embeddings.size()) return false;
    for (std::size_t i = 0; i < embeddings.size(); ++i)
        if (embeddings[i].values != other.embeddings[i].values) return false;
    return true;
}

namespace {

std::vector<std::string> numbered_strings(const json& out, int count) {
    std::vector<std::string> s;
    for (int i = 0; i < count; ++i) {
        const json& v = out.at(std::to_string(i));
        if (!v.is_string() || v.get<std::string>().empty())
            throw StructureError("generated sentence " + std::to_string(i) + " is not a non-empty string");
        s.push_back(v.get<std::string>());
    }
    return s;
}

} // namespace

std::vector<std::string> generate_activation_sentences(llm::Gateway& gateway, const ExperimentDescriptor& d,
                                                       int count) {
    if (count < 1) throw std::invalid_argument("sentence count must be at least 1");
    auto out = gateway.complete_structured(prompts::instruction_generation(d.name, describe(d), count),
                                           prompts::numbered_keys(count));
    return numbered_strings(out, count);
}

std::vector<std::string> generate_title_variants(llm::Gateway& gateway, const procedure::ProcedureDoc& doc,
                                                 int count) {
    if (count < 1) throw std::invalid_argument("sentence count must be at least 1");
    auto out = gateway.complete_structured(prompts::title_variants(doc.title, procedure::render(doc), count),
                                           prompts::numbered_keys(count));
    return numbered_strings(out, count);
}

ActivationFingerprint build_fingerprint(llm::Gateway& gateway, const std::vector<std::string>& sentences) {
    if (sentences.empty()) throw EmptyText("a fingerprint needs at least one sentence");
    ActivationFingerprint f;
    f.sentences = sentences;
    for (const auto& s : sentences) f.embeddings.push_back(gateway.embed(s));
    return f;
}

std::string procedure_agent_id(const std::string& title) { return "procedure:" + title; }

Registry::Registry(llm::Gateway* gateway, RegistryOptions options) : gateway_(gateway), options_(std::move(options)) {
    if (options_.sentence_count < 1) throw ConfigError("sentence_count must be at least 1");
    experiments_.push_back(execute_procedure_descriptor());
}

void Registry::check_hooks(const ExperimentDescriptor& d) const {
    const lab::HookInfo* hook = lab::find_hook(d.run_hook);
    if (!hook) throw UnresolvableHook(d.name + ": run hook '" + d.run_hook + "' does not exist");
    for (const auto& v : d.visual_hooks) {
        bool known = std::find(hook->figures.begin(), hook->figures.end(), v.figure_id) != hook->figures.end();
        if (!known) throw UnresolvableHook(d.name + ": no figure producer '" + v.figure_id + "'");
    }
    for (const auto& t : d.text_hooks)
        if (!inspection::has_text_producer(t)) throw UnresolvableHook(d.name + ": no report producer '" + t + "'");
    for (const auto& p : hook->parameters)
        if (!d.parameter(p)) throw InvalidDoc(d.name + ": run hook reads undeclared parameter '" + p + "'");
}

ActivationFingerprint Registry::fingerprint_for(const std::string& cache_key_text,
                                                const std::function<std::vector<std::string>()>& generate,
                                                std::optional<std::vector<std::string>> sentences) {
    if (!gateway_) {
        ActivationFingerprint f;
        if (sentences) f.sentences = *sentences;
        return f;
    }
    if (sentences) return build_fingerprint(*gateway_, *sentences);
    std::filesystem::path file;
    if (!options_.fingerprint_cache.empty()) {
        std::string key = llm::sha256_hex(llm::to_string(gateway_->backend_kind()) + "\n" +
                                          std::to_string(options_.sentence_count) + "\n" + cache_key_text);
        file = options_.fingerprint_cache / (key + ".json");
        std::ifstream in(file);
        if (in) {
            json j = json::parse(in, nullptr, false);
            if (!j.is_discarded() && j.contains("sentences") && j.contains("embeddings")) {
                ActivationFingerprint f;
                f.sentences = j["sentences"].get<std::vector<std::string>>();
                for (const auto& e : j["embeddings"]) f.embeddings.push_back({e.get<std::vector<double>>()});
                if (f.sentences.size() == f.embeddings.size() && !f.sentences.empty()) return f;
            }
        }
    }
    ActivationFingerprint f = build_fingerprint(*gateway_, generate());
    if (!file.empty()) {
        std::filesystem::create_directories(file.parent_path());
        json e = json::array();
        for (const auto& v : f.embeddings) e.push_back(v.values);
        std::ofstream out(file);
        out << json{{"sentences", f.sentences}, {"embeddings", e}}.dump();
    }
    return f;
}

std::string Registry::register_experiment(const ExperimentDescriptor& d,
                                          std::optional<std::vector<std::string>> sentences) {
    check_doc(d);
    if (find(d.name)) throw DuplicateName("experiment '" + d.name + "' is already registered");
    check_hooks(d);
    experiments_.push_back(d);
    if (d.internal) return d.name;
    if (!sentences && !d.activation_sentences.empty()) sentences = d.activation_sentences;
    Agent a;
    a.id = d.name;
    a.kind = AgentKind::code;
    a.target = d.name;
    int count = options_.sentence_count;
    a.fingerprint = fingerprint_for(
        "experiment\n" + describe(d), [&] { return generate_activation_sentences(*gateway_, d, count); }, sentences);
    agents_.push_back(std::move(a));
    return d.name;
}

std::string Registry::register_procedure(const procedure::ProcedureDoc& doc,
                                         std::optional<std::vector<std::string>> sentences) {
    auto v = procedure::validate(doc);
    if (!v.ok()) throw InvalidDoc("procedure '" + doc.title + "': " + v.errors.front());
    std::string id = procedure_agent_id(doc.title);
    if (find_procedure(doc.title)) throw DuplicateName("procedure '" + doc.title + "' is already registered");
    ProcedureKnowledge k;
    k.doc = doc;
    int count = options_.sentence_count;
    k.fingerprint = fingerprint_for(
        "procedure\n" + procedure::render(doc), [&] { return generate_title_variants(*gateway_, doc, count); },
        sentences);
    procedures_.push_back(k);
    agents_.push_back({id, AgentKind::procedure, doc.title, k.fingerprint});
    return id;
}

const ExperimentDescriptor* Registry::find(const std::string& name) const {
    for (const auto& d : experiments_)
        if (d.name == name) return &d;
    return nullptr;
}

const ExperimentDescriptor& Registry::lookup(const std::string& name) const {
    if (const auto* d = find(name)) return *d;
    throw NotFound("no experiment named '" + name + "'");
}

const ProcedureKnowledge* Registry::find_procedure(const std::string& title) const {
    for (const auto& p : procedures_)
        if (p.doc.title == title) return &p;
    return nullptr;
}

const ProcedureKnowledge& Registry::lookup_procedure(const std::string& title) const {
    if (const auto* p = find_procedure(title)) return *p;
    throw NotFound("no procedure titled '" + title + "'");
}

std::vector<std::string> Registry::list_agents() const {
    std::vector<std::string> ids;
    for (const auto& a : agents_) ids.push_back(a.id);
    return ids;
}

const Agent& Registry::agent(const std::string& id) const {
    for (const auto& a : agents_)
        if (a.id == id) return a;
    throw NotFound("no agent '" + id + "'");
}

std::vector<std::string> Registry::experiment_names() const {
    std::vector<std::string> names;
    for (const auto& d : experiments_) names.push_back(d.name);
    return names;
}

json Registry::fingerprint_sentences() const {
    json j = json::object();
    for (const auto& a : agents_) j[a.id] = a.fingerprint.sentences;
    return j;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot read manifest " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ManifestError(path.string() + " is not a JSON object");
    auto base = path.parent_path();
    Manifest m;
    try {
        if (j.contains("experiments")) {
            const json& e = j["experiments"];
            std::vector<std::string> names;
            if (e.is_string() && e == "default") names = default_experiment_names();
            else if (e.is_string() && e == "benchmark") names = benchmark_experiment_names();
            else if (e.is_array()) names = e.get<std::vector<std::string>>();
            else throw ManifestError("'experiments' must be \"default\", \"benchmark\" or a list of names");
            for (const auto& n : names) m.experiments.push_back(builtin(n));
        }
        for (const auto& d : j.value("descriptors", json::array())) m.experiments.push_back(descriptor_from_json(d));
        for (const auto& p : j.value("procedures", json::array())) {
            std::filesystem::path file = p.get<std::string>();
            m.procedures.push_back(procedure::load((file.is_absolute() ? file : base / file).string()));
        }
        if (j.contains("asset_dir")) {
            std::filesystem::path a = j["asset_dir"].get<std::string>();
            m.asset_dir = a.is_absolute() ? a : base / a;
        }
    } catch (const ManifestError&) {
        throw;
    } catch (const std::exception& e) {
        throw ManifestError(path.string() + ": " + e.what());
    }
    return m;
}

Manifest default_manifest() {
    return load_manifest(std::filesystem::path(KAGENTS_DATA_DIR) / "manifests" / "default.json");
}

} // namespace kagents::knowledge
