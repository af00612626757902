// lifegraph CLI: build a graph from a Vaccount, query it, analyze it, run the
// benchmark harness. JSON goes to stdout (or --out files), logs to stderr.
// Exit codes: 0 success, 1 usage error, 2 runtime error.

#include "lifegraph/analysis.hpp"
#include "lifegraph/construction.hpp"
#include "lifegraph/eval.hpp"
#include "lifegraph/graph.hpp"
#include "lifegraph/retrieval.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;
using namespace lifegraph;

namespace {

struct AppConfig {
    int depth = 3;  // paper range d in {2,3}
    int width = 3;  // paper range k in {3,5}
    long capacity = 2048;
    int image_cost = 256;
    int max_refs = 8;
    HttpModelConfig http;
};

// precedence: flags > env vars > config file > defaults
AppConfig load_config(const std::string& config_file) {
    AppConfig cfg;
    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw LoadError("cannot open config file: " + config_file);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw LoadError("config: expected key=value, got '" + line + "'");
            }
            std::string key = line.substr(0, eq);
            std::string val = line.substr(eq + 1);
            if (key == "depth") cfg.depth = std::stoi(val);
            else if (key == "width") cfg.width = std::stoi(val);
            else if (key == "capacity") cfg.capacity = std::stol(val);
            else if (key == "image_cost") cfg.image_cost = std::stoi(val);
            else if (key == "max_refs") cfg.max_refs = std::stoi(val);
            else if (key == "model_base_url") cfg.http.base_url = val;
            else if (key == "model_name") cfg.http.model_name = val;
            else if (key == "model_api_key") cfg.http.api_key = val;
            else if (key == "model_timeout_ms") cfg.http.timeout_ms = std::stoi(val);
            else throw LoadError("config: unknown key '" + key + "'");
        }
    }
    // env overrides the file
    HttpModelConfig env = HttpModelConfig::from_env();
    if (!env.base_url.empty()) cfg.http.base_url = env.base_url;
    if (!env.model_name.empty()) cfg.http.model_name = env.model_name;
    if (!env.api_key.empty()) cfg.http.api_key = env.api_key;
    if (const char* v = std::getenv("MODEL_TIMEOUT_MS")) cfg.http.timeout_ms = std::atoi(v);
    return cfg;
}

std::unique_ptr<ModelClient> make_model(const std::string& mock_script, const AppConfig& cfg) {
    if (!mock_script.empty()) {
        return std::make_unique<ScriptedMock>(ScriptedMock::from_script_file(mock_script));
    }
    if (cfg.http.base_url.empty()) {
        throw ModelError("no model configured: pass --mock <script> or set MODEL_BASE_URL");
    }
    return std::make_unique<HttpChatClient>(cfg.http);
}

std::string default_media_dir(const std::string& anchor_path) {
    return (fs::path(anchor_path).parent_path() / "media").string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LifeGraph: personal knowledge graph construction, retrieval and evaluation"};
    app.require_subcommand(1);

    std::string config_file, mock_script;
    app.add_option("--config", config_file, "key=value config file");
    app.add_option("--mock", mock_script, "scripted mock model (JSON script file)");

    // build
    auto* build = app.add_subcommand("build", "Build a LifeGraph from a Vaccount JSON file");
    std::string build_vaccount, build_out;
    build->add_option("vaccount", build_vaccount, "Vaccount JSON document")->required();
    build->add_option("-o,--out", build_out, "output graph file (.lgr.jsonl)")->required();
    auto* build_capacity = build->add_option("--capacity", "bin-packing capacity");
    auto* build_image_cost = build->add_option("--image-cost", "weight per image");

    // ask
    auto* ask = app.add_subcommand("ask", "Answer a question over a graph");
    std::string ask_graph, ask_question, ask_media_dir;
    ask->add_option("graph", ask_graph, "graph file")->required();
    ask->add_option("question", ask_question, "question text")->required();
    auto* ask_depth = ask->add_option("--depth", "retrieval depth limit d");
    auto* ask_width = ask->add_option("--width", "retrieval width k");
    auto* ask_max_refs = ask->add_option("--max-refs", "source reference cap");
    bool ask_no_refs = false;
    ask->add_flag("--no-refs{true},--with-refs{false}", ask_no_refs,
                  "disable source-data fetching");
    ask->add_option("--media-dir", ask_media_dir, "media directory for source refs");

    // retrieve
    auto* ret = app.add_subcommand("retrieve", "Print retrieved context as JSON (no generation)");
    std::string ret_graph, ret_question, ret_media_dir;
    ret->add_option("graph", ret_graph, "graph file")->required();
    ret->add_option("question", ret_question, "question text")->required();
    auto* ret_depth = ret->add_option("--depth", "retrieval depth limit d");
    auto* ret_width = ret->add_option("--width", "retrieval width k");
    auto* ret_max_refs = ret->add_option("--max-refs", "source reference cap");
    bool ret_no_refs = false;
    ret->add_flag("--no-refs{true},--with-refs{false}", ret_no_refs,
                  "disable source-data fetching");
    ret->add_option("--media-dir", ret_media_dir, "media directory for source refs");

    // eval
    auto* ev = app.add_subcommand("eval", "Run the benchmark harness");
    std::string ev_vaccount, ev_answerer = "echo", ev_graph, ev_judge = "mock", ev_out;
    ev->add_option("--vaccount", ev_vaccount, "Vaccount JSON (QA at <stem>.qa.jsonl)")
        ->required();
    ev->add_option("--answerer", ev_answerer, "lifegraph | echo | script:<file>");
    ev->add_option("--graph", ev_graph, "graph file (required for --answerer lifegraph)");
    auto* ev_depth = ev->add_option("--depth", "retrieval depth limit d");
    auto* ev_width = ev->add_option("--width", "retrieval width k");
    ev->add_option("--judge", ev_judge, "mock | live");
    ev->add_option("--out", ev_out, "write the JSON report here (else stdout)");

    // analyze
    auto* an = app.add_subcommand("analyze", "Emit a structural report as JSON");
    std::string an_graph, an_degrees_out;
    an->add_option("graph", an_graph, "graph file")->required();
    an->add_option("--degrees-out", an_degrees_out, "write degree-frequency data here");

    // export
    auto* ex = app.add_subcommand("export", "Export a graph");
    std::string ex_graph, ex_dot;
    ex->add_option("graph", ex_graph, "graph file")->required();
    ex->add_option("--dot", ex_dot, "DOT output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            app.exit(e);
            return 0;
        }
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return 1;
    }

    try {
        AppConfig cfg = load_config(config_file);

        if (*build) {
            if (build_capacity->count()) cfg.capacity = build_capacity->as<long>();
            if (build_image_cost->count()) cfg.image_cost = build_image_cost->as<int>();
            Vaccount account = load_vaccount(build_vaccount);
            auto model = make_model(mock_script, cfg);
            ConstructionConfig ccfg;
            ccfg.capacity = cfg.capacity;
            ccfg.image_cost = cfg.image_cost;
            std::vector<std::string> diagnostics;
            LifeGraph graph = build_graph(account, *model, ccfg, &diagnostics);
            for (const auto& d : diagnostics) std::cerr << "[build] " << d << "\n";
            graph.save_file(build_out);
            std::cerr << "[build] " << graph.node_count() << " nodes, " << graph.edge_count()
                      << " edges -> " << build_out << "\n";
        } else if (*ask || *ret) {
            bool is_ask = static_cast<bool>(*ask);
            const std::string& gpath = is_ask ? ask_graph : ret_graph;
            LifeGraph graph = LifeGraph::load_file(gpath);
            auto model = make_model(mock_script, cfg);
            RetrievalOptions opts;
            opts.depth = cfg.depth;
            opts.width = cfg.width;
            opts.max_refs = cfg.max_refs;
            auto* depth_opt = is_ask ? ask_depth : ret_depth;
            auto* width_opt = is_ask ? ask_width : ret_width;
            auto* refs_opt = is_ask ? ask_max_refs : ret_max_refs;
            if (depth_opt->count()) opts.depth = depth_opt->as<int>();
            if (width_opt->count()) opts.width = width_opt->as<int>();
            if (refs_opt->count()) opts.max_refs = refs_opt->as<int>();
            opts.with_refs = !(is_ask ? ask_no_refs : ret_no_refs);

            std::string media_dir = is_ask ? ask_media_dir : ret_media_dir;
            if (media_dir.empty()) media_dir = default_media_dir(gpath);
            MediaStore media(media_dir);

            Query query;
            query.text = is_ask ? ask_question : ret_question;
            query.vaccount_id = graph.owner();
            if (is_ask) {
                std::cout << answer(query, graph, opts, *model, &media) << "\n";
            } else {
                auto ctx = retrieve(query, graph, opts, *model, &media);
                for (const auto& d : ctx.diagnostics) std::cerr << "[retrieve] " << d << "\n";
                std::cout << context_to_json(graph, ctx) << "\n";
            }
        } else if (*ev) {
            auto [account, items] = load_vaccount_qa(ev_vaccount);
            MediaStore media(default_media_dir(ev_vaccount));

            RetrievalOptions opts;
            opts.depth = cfg.depth;
            opts.width = cfg.width;
            opts.max_refs = cfg.max_refs;
            if (ev_depth->count()) opts.depth = ev_depth->as<int>();
            if (ev_width->count()) opts.width = ev_width->as<int>();

            std::unique_ptr<ModelClient> model;  // lazily created below
            Answerer answerer;
            std::shared_ptr<LifeGraph> graph;
            if (ev_answerer == "echo") {
                answerer = [](const QAItem& item) { return item.gold; };
            } else if (ev_answerer == "lifegraph") {
                if (ev_graph.empty()) {
                    std::cerr << "--answerer lifegraph requires --graph\n";
                    return 1;
                }
                graph = std::make_shared<LifeGraph>(LifeGraph::load_file(ev_graph));
                model = make_model(mock_script, cfg);
                answerer = [&, graph](const QAItem& item) {
                    Query q;
                    q.text = item.input_text;
                    q.vaccount_id = item.vaccount_id;
                    for (const auto& m : item.input_media) {
                        if (auto payload = media.resolve(m)) q.media.push_back(*payload);
                    }
                    return answer(q, *graph, opts, *model, &media);
                };
            } else if (ev_answerer.rfind("script:", 0) == 0) {
                std::ifstream in(ev_answerer.substr(7));
                if (!in) throw LoadError("cannot open answer script: " + ev_answerer.substr(7));
                auto doc = std::make_shared<nlohmann::json>();
                in >> *doc;
                answerer = [doc](const QAItem& item) -> std::string {
                    if (!doc->contains(item.id)) {
                        throw ModelError("no scripted answer for item " + item.id);
                    }
                    return (*doc)[item.id].get<std::string>();
                };
            } else {
                std::cerr << "unknown answerer '" << ev_answerer << "'\n";
                return 1;
            }

            std::unique_ptr<ModelClient> judge;
            if (ev_judge == "mock") {
                if (mock_script.empty()) {
                    std::cerr << "--judge mock requires --mock <script>\n";
                    return 1;
                }
                judge = std::make_unique<ScriptedMock>(ScriptedMock::from_script_file(mock_script));
            } else if (ev_judge == "live") {
                judge = std::make_unique<HttpChatClient>(cfg.http);
            } else {
                std::cerr << "unknown judge '" << ev_judge << "'\n";
                return 1;
            }

            EvalReport report = run_eval(account, items, answerer, judge.get());
            std::string json = report_to_json(report);
            if (!ev_out.empty()) {
                std::ofstream out(ev_out);
                if (!out) throw LoadError("cannot write report: " + ev_out);
                out << json << "\n";
                std::cout << report_to_table(report);
            } else {
                std::cout << json << "\n";
                std::cerr << report_to_table(report);
            }
        } else if (*an) {
            LifeGraph graph = LifeGraph::load_file(an_graph);
            StructureReport report = analyze(graph);
            if (!an_degrees_out.empty()) {
                std::ofstream out(an_degrees_out);
                if (!out) throw LoadError("cannot write degree data: " + an_degrees_out);
                out << histogram_to_text(degree_histogram(graph));
            }
            std::cout << report_to_json(report) << "\n";
        } else if (*ex) {
            LifeGraph graph = LifeGraph::load_file(ex_graph);
            std::ofstream out(ex_dot);
            if (!out) throw LoadError("cannot write DOT file: " + ex_dot);
            graph.export_dot(out);
            std::cerr << "[export] wrote " << ex_dot << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
