// cogsearch: ingest, query, bench, serve, generate.
//
// Exit codes: 0 success, 1 data error, 2 usage error. Every option with an
// env name can also be set as COGSEARCH_<NAME>; flags win.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <regex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cogsearch/catalog/index_dir.hpp"
#include "cogsearch/engine/engine.hpp"
#include "cogsearch/eval/bench.hpp"
#include "cogsearch/eval/synthetic.hpp"
#include "cogsearch/service/service.hpp"
#include "cogsearch/util/text.hpp"

namespace cs = cogsearch;
using Json = nlohmann::json;

namespace {

constexpr int kData = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Url {
  std::string host;
  int port = 80;
  std::string path = "/";
};

Url parse_url(const std::string& s) {
  static const std::regex re(R"(^http://([^/:]+)(?::(\d+))?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw UsageError("expected http://host[:port]/path, got '" + s + "'");
  Url u{m[1], m[2].matched ? std::stoi(m[2]) : 80, m[3].matched ? m[3].str() : "/"};
  return u;
}

// Options shared by the pipeline commands.
struct EngineFlags {
  std::string config;
  std::string weights;
  std::string as_of;
  std::string web_url;
  std::string backend_url;

  void add(CLI::App* cmd) {
    cmd->add_option("--config", config, "engine config JSON (missing keys keep defaults)")
        ->envname("COGSEARCH_CONFIG");
    cmd->add_option("--weights", weights, "evidence score weights alpha,beta,gamma")
        ->envname("COGSEARCH_WEIGHTS");
    cmd->add_option("--as-of", as_of, "reference time for freshness (RFC 3339)")
        ->envname("COGSEARCH_AS_OF");
    cmd->add_option("--web-url", web_url, "remote web source instead of the local corpus")
        ->envname("COGSEARCH_WEB_URL");
    cmd->add_option("--backend-url", backend_url, "generative backend for planning and rationale")
        ->envname("COGSEARCH_BACKEND_URL");
  }

  cs::engine::EngineConfig config_value() const {
    auto cfg = config.empty() ? cs::engine::EngineConfig::defaults() : cs::engine::load_config(config);
    if (!weights.empty()) {
      std::vector<std::string> parts;
      std::stringstream ss(weights);
      for (std::string part; std::getline(ss, part, ',');) parts.push_back(part);
      if (parts.size() != 3) throw UsageError("--weights needs three comma-separated numbers");
      try {
        auto& w = cfg.executor.web.weights;
        w.alpha = std::stod(parts[0]);
        w.beta = std::stod(parts[1]);
        w.gamma = std::stod(parts[2]);
      } catch (const std::logic_error&) {
        throw UsageError("--weights needs three comma-separated numbers");
      }
      try {
        cfg.executor.web.weights.validate();
      } catch (const cs::ValidationError& e) {
        throw UsageError(std::string("--weights: ") + e.what());
      }
    }
    if (!as_of.empty()) {
      try {
        cfg.as_of = cs::parse_rfc3339(as_of);
      } catch (const std::exception&) {
        throw UsageError("--as-of must be RFC 3339");
      }
    }
    return cfg;
  }

  void attach(cs::engine::Engine& e) const {
    if (!web_url.empty()) {
      const auto u = parse_url(web_url);
      e.set_web_source(std::make_shared<cs::executor::HttpWebSource>(u.host, u.port, u.path));
    }
    if (!backend_url.empty()) {
      const auto u = parse_url(backend_url);
      auto b = std::make_shared<cs::HttpGenerativeBackend>(u.host, u.port, u.path);
      e.set_planner_backend(b);
      e.set_rationale_backend(b);
    }
  }
};

std::string fmt(double v, int prec = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

int cmd_ingest(const std::string& products, const std::string& reviews, const std::string& webdocs,
               const std::string& out, bool lenient, const std::string& ingested_at) {
  const auto at = ingested_at.empty() ? cs::system_now() : cs::parse_rfc3339(ingested_at);
  cs::catalog::CatalogBuilder b;
  std::vector<cs::catalog::IngestReport> reports;
  reports.push_back(b.add_products_jsonl(products));
  if (!reviews.empty()) reports.push_back(b.add_reviews_jsonl(reviews));
  if (!webdocs.empty()) reports.push_back(b.add_webdocs_jsonl(webdocs, at));
  std::size_t rejected = 0;
  for (const auto& r : reports) {
    std::cout << r.source << ": accepted " << r.accepted << ", rejected " << r.rejected.size() << '\n';
    for (const auto& x : r.rejected) {
      std::cout << "  line " << x.line << (x.id.empty() ? "" : " (" + x.id + ")") << ": " << x.reason
                << '\n';
    }
    rejected += r.rejected.size();
  }
  if (rejected > 0 && !lenient) {
    std::cerr << "cogsearch: " << rejected << " rejected record(s); index not written (use --lenient)\n";
    return kData;
  }
  const auto cat = b.build();
  cs::catalog::save_index(out, *cat, at);
  std::cout << "index written to " << out << '\n';
  return 0;
}

int cmd_query(const std::string& index, const std::string& text, bool json, const EngineFlags& ef) {
  if (cs::text::trim(text).empty()) throw UsageError("query text is empty");
  auto cfg = ef.config_value();
  auto cat = cs::catalog::load_index(index);
  cs::engine::Engine engine(cat, cfg);
  ef.attach(engine);
  const auto sid = engine.create_session("cli");
  std::vector<cs::engine::TurnEvent> events;
  const auto out = engine.run_turn(sid, text, Json::object(),
                                   [&](const cs::engine::TurnEvent& e) { events.push_back(e); });
  if (json) {
    for (const auto& e : events) std::cout << Json(e).dump() << '\n';
    return 0;
  }
  const auto& st = out.state;
  if (out.plan) {
    std::cout << "plan: " << out.plan->graph.nodes.size() << " node(s)";
    if (!st.constraints.empty()) std::cout << ", constraints: " << Json(st.constraints).dump();
    std::cout << '\n';
  }
  for (const auto& e : st.errors) std::cout << "error: " << e << '\n';
  if (!st.recommendation) {
    std::cout << "no recommendation\n";
    return 0;
  }
  const auto& rec = *st.recommendation;
  std::cout << "\n  #  item        functional economic reliability ok  total  title\n";
  std::size_t i = 0;
  for (const auto& [id, u] : rec.ranked) {
    const auto* p = cat->find(id);
    std::printf("%3zu  %-10s  %-10s %-8s %-11s %-3s %-6s %s\n", ++i, id.c_str(),
                fmt(u.functional).c_str(), fmt(u.economic).c_str(), fmt(u.reliability).c_str(),
                u.constraint_ok ? "y" : "n", fmt(u.total).c_str(), p ? p->title.c_str() : "");
  }
  std::cout << "\nbest: " << rec.best << "\n" << rec.rationale_text() << '\n';
  if (!st.facets.empty()) {
    std::cout << "\nfacets:\n";
    for (const auto& f : st.facets) {
      std::cout << "  " << f.label << " (gain " << fmt(f.info_gain) << "):";
      for (const auto& b : f.buckets) std::cout << "  " << b.label << " [" << b.count << "]";
      std::cout << '\n';
    }
  }
  if (!st.suggestions.empty()) {
    std::cout << "\nsuggestions:\n";
    for (const auto& s : st.suggestions) std::cout << "  " << s.text << '\n';
  }
  return 0;
}

int cmd_bench(const std::string& index, const std::string& cases_path, const std::string& ablate,
              std::uint64_t seed, std::size_t parallel, std::size_t k, const std::string& out,
              const EngineFlags& ef) {
  auto cfg = ef.config_value();
  try {
    cfg.ablation = cs::engine::Ablation::parse(ablate);
  } catch (const cs::ValidationError& e) {
    throw UsageError(std::string("--ablate: ") + e.what());
  }
  auto cat = cs::catalog::load_index(index);
  const auto cases = cs::eval::read_benchmark(cases_path);
  const auto report = cs::eval::run_benchmark(cases, cat, cfg, {k, parallel, seed});
  if (out.empty()) {
    std::cout << report.dump(2) << '\n';
    std::cerr << cs::eval::format_summary(report);
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << report.dump(2) << '\n';
    std::cout << cs::eval::format_summary(report);
  }
  return 0;
}

int cmd_serve(const std::string& index, const std::string& host, int port,
              const std::string& snapshot, const EngineFlags& ef) {
  auto cfg = ef.config_value();
  auto cat = cs::catalog::load_index(index);
  auto memory = std::make_shared<cs::memory::MemoryStore>();
  if (!snapshot.empty() && std::filesystem::exists(snapshot)) {
    memory->restore(snapshot);
    std::cerr << "restored " << memory->sessions().size() << " session(s) from " << snapshot << '\n';
  }
  auto engine = std::make_shared<cs::engine::Engine>(cat, cfg, memory);
  ef.attach(*engine);

  // Block the shutdown signals before any thread starts so only the
  // waiter below receives them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGTERM);
  sigaddset(&set, SIGINT);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  cs::service::Service svc(engine);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    svc.stop();
  });
  std::cerr << "serving " << cat->products().size() << " products on " << host << ":" << port << '\n';
  const bool ok = svc.listen(host, port);
  if (!ok) {
    std::cerr << "cogsearch: cannot listen on " << host << ":" << port << '\n';
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kData;
  }
  waiter.join();
  svc.drain();
  if (!snapshot.empty()) {
    memory->snapshot(snapshot);
    std::cerr << "snapshot written to " << snapshot << '\n';
  }
  return 0;
}

int cmd_generate(const std::string& out, std::size_t products, std::uint64_t seed,
                 const cs::eval::BenchmarkCounts& counts, const std::string& index) {
  cs::eval::SyntheticOptions opt;
  opt.products = products;
  opt.seed = seed;
  const auto data = cs::eval::generate_synthetic_catalog(opt);
  std::filesystem::create_directories(out);
  cs::eval::write_jsonl(out, data);
  const auto cat = cs::eval::build_catalog(data);
  std::vector<std::string> notes;
  const auto cases = cs::eval::generate_synthetic_benchmark(*cat, seed, counts, &notes);
  const auto cases_path = std::filesystem::path(out) / "benchmark.jsonl";
  cs::eval::write_benchmark(cases_path, cases);
  for (const auto& n : notes) std::cerr << "note: " << n << '\n';
  std::cout << data.products.size() << " products, " << data.reviews.size() << " reviews, "
            << data.webdocs.size() << " web docs, " << cases.size() << " cases in " << out << '\n';
  if (!index.empty()) {
    cs::catalog::save_index(index, *cat, opt.as_of);
    std::cout << "index written to " << index << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cogsearch: multi-agent product search"};
  app.require_subcommand(1);

  std::string products, reviews, webdocs, out, ingested_at;
  bool lenient = false;
  auto* ingest = app.add_subcommand("ingest", "validate records and build an index directory");
  ingest->add_option("--products", products, "products JSONL")->required()->envname("COGSEARCH_PRODUCTS");
  ingest->add_option("--reviews", reviews, "reviews JSONL")->envname("COGSEARCH_REVIEWS");
  ingest->add_option("--webdocs", webdocs, "web documents JSONL")->envname("COGSEARCH_WEBDOCS");
  ingest->add_option("--out", out, "index directory")->required();
  ingest->add_flag("--lenient", lenient, "write the index even if records were rejected");
  ingest->add_option("--ingested-at", ingested_at, "ingestion time for undated web documents");

  std::string index, text;
  bool json = false;
  EngineFlags ef;
  auto* query = app.add_subcommand("query", "run one turn and print the recommendation");
  query->add_option("--index", index, "index directory")->required()->envname("COGSEARCH_INDEX");
  query->add_option("text", text, "query text")->required();
  query->add_flag("--json", json, "print the event stream as NDJSON");
  ef.add(query);

  std::string cases, ablate, report_out;
  std::uint64_t seed = 7;
  std::size_t parallel = 1, k = 5;
  auto* bench = app.add_subcommand("bench", "score a benchmark file");
  bench->add_option("--index", index, "index directory")->required()->envname("COGSEARCH_INDEX");
  bench->add_option("--cases", cases, "benchmark JSONL")->required();
  bench->add_option("--ablate", ablate, "comma list of websearch,guider,decider,memory,planner")
      ->envname("COGSEARCH_ABLATE");
  bench->add_option("--seed", seed, "seed recorded in the report")->envname("COGSEARCH_SEED");
  bench->add_option("--parallel", parallel, "cases run concurrently")
      ->check(CLI::PositiveNumber)->envname("COGSEARCH_PARALLEL");
  bench->add_option("-k", k, "cutoff for ACC@k")->check(CLI::PositiveNumber);
  bench->add_option("--out", report_out, "report path (stdout when absent)");
  ef.add(bench);

  std::string host = "127.0.0.1", snapshot;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "run the streaming HTTP service");
  serve->add_option("--index", index, "index directory")->required()->envname("COGSEARCH_INDEX");
  serve->add_option("--host", host, "bind address")->envname("COGSEARCH_HOST");
  serve->add_option("--port", port, "port")->envname("COGSEARCH_PORT")->check(CLI::Range(1, 65535));
  serve->add_option("--snapshot", snapshot, "memory snapshot restored at start, written at exit")
      ->envname("COGSEARCH_SNAPSHOT");
  ef.add(serve);

  std::size_t gen_products = 10'000;
  cs::eval::BenchmarkCounts counts;
  std::string gen_index;
  auto* generate = app.add_subcommand("generate", "write a seeded synthetic catalog and benchmark");
  generate->add_option("--out", out, "output directory")->required();
  generate->add_option("--products", gen_products, "catalog size")->check(CLI::PositiveNumber);
  generate->add_option("--seed", seed, "generator seed")->envname("COGSEARCH_SEED");
  generate->add_option("--simple", counts.simple, "simple cases");
  generate->add_option("--complex", counts.complex, "complex cases");
  generate->add_option("--consultative", counts.consultative, "consultative cases");
  generate->add_option("--index", gen_index, "also write an index directory here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*ingest) return cmd_ingest(products, reviews, webdocs, out, lenient, ingested_at);
    if (*query) return cmd_query(index, text, json, ef);
    if (*bench) return cmd_bench(index, cases, ablate, seed, parallel, k, report_out, ef);
    if (*serve) return cmd_serve(index, host, port, snapshot, ef);
    if (*generate) return cmd_generate(out, gen_products, seed, counts, gen_index);
  } catch (const UsageError& e) {
    std::cerr << "cogsearch: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "cogsearch: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
