// lanebandit: simulate, screen, train, evaluate and deploy personalized
// lane-change initiation policies learned from binary feedback.

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <thread>

#include "lanebandit/decision.hpp"
#include "lanebandit/errors.hpp"
#include "lanebandit/evaluator.hpp"
#include "lanebandit/session.hpp"
#include "lanebandit/text.hpp"
#include "lanebandit/trainer.hpp"
#include "lanebandit/usersim.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace lanebandit;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kRejected = 3 };

fs::path with_suffix(const fs::path& base, std::string_view suffix) {
  auto p = base;
  p += suffix;
  return p;
}

void write_manifest(const fs::path& path, std::string_view command,
                    const std::vector<std::string>& argv, ordered_json config,
                    ordered_json inputs, ordered_json outputs) {
  ordered_json m;
  m["tool"] = "lanebandit";
  m["version"] = LANEBANDIT_VERSION;
  m["command"] = command;
  m["argv"] = argv;
  m["config"] = std::move(config);
  m["inputs"] = std::move(inputs);
  m["outputs"] = std::move(outputs);
  text::write_file_atomic(path, m.dump(2) + "\n");
}

SubjectProfile resolve_profile(const std::string& spec) {
  if (auto preset = find_preset(spec)) return *preset;
  if (fs::exists(spec)) return {fs::path(spec).stem().string(), load_profile(spec)};
  throw DataError("unknown profile '" + spec + "' (presets: eager, cautious, distance-keeper, "
                  "unreliable; or a profile file path)");
}

// --- simulate -----------------------------------------------------------------

struct SimulateArgs {
  std::string profile;
  std::optional<std::uint64_t> seed;
  std::size_t episodes = kDefaultSession1Episodes;
  std::string out;
};

int run_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  const auto profile = resolve_profile(a.profile);
  const std::uint64_t seed = a.seed.value_or(profile.user.seed);
  Rng gen(seed);
  const auto train = generate_session1(profile.user, gen, a.episodes);
  const auto test = generate_session2(profile.user);

  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  const auto train_path = with_suffix(out, ".train.csv");
  const auto test_path = with_suffix(out, ".test.csv");
  write_observations(train, train_path);
  write_labeled(test, test_path);
  write_manifest(with_suffix(out, ".manifest.json"), "simulate", argv,
                 {{"profile", profile.name},
                  {"weights", profile.user.weights},
                  {"bias", profile.user.bias},
                  {"flip_noise", profile.user.flip_noise},
                  {"seed", seed},
                  {"episodes", a.episodes}},
                 ordered_json::object(),
                 {{"train", train_path.string()}, {"test", test_path.string()}});
  std::cout << "wrote " << train.size() << " observations to " << train_path.string() << " and "
            << test.size() << " labeled contexts to " << test_path.string() << '\n';
  return kOk;
}

// --- check --------------------------------------------------------------------

int run_check(const std::string& path, double cutoff) {
  const auto rep = consistency_ratio(read_observations(path), cutoff);
  std::cout << rep << '\n';
  return rep.decision == ScreenDecision::Accept ? kOk : kRejected;
}

// --- train --------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string out;
  double cutoff = kDefaultConsistencyCutoff;
  bool force = false;
  TrainerConfig cfg;
};

int run_train(const TrainArgs& a, const std::vector<std::string>& argv) {
  const auto data = read_observations(a.data);
  const auto screen_rep = consistency_ratio(data, a.cutoff);
  std::cerr << screen_rep << '\n';
  if (screen_rep.decision == ScreenDecision::Reject && !a.force) {
    std::cerr << "data rejected by the consistency screen; pass --force to train anyway\n";
    return kRejected;
  }

  const auto result = train(data, a.cfg);
  if (!result.log.stratified_split) {
    std::cerr << "warning: only one preferred action in the data; validation split is not "
                 "stratified\n";
  }
  const auto& last = result.log.last();

  Model model{result.params, a.cfg.scaling, {}};
  model.meta["seed"] = std::to_string(a.cfg.seed);
  model.meta["epochs"] = std::to_string(last.epoch);
  model.meta["stop_reason"] = std::string(to_string(result.log.stop_reason));
  model.meta["val_acc"] = text::format_double(last.val_acc);

  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  const auto log_path = with_suffix(out, ".log.csv");
  save_model(model, out);
  write_training_log(result.log, log_path);
  write_manifest(with_suffix(out, ".manifest.json"), "train", argv,
                 {{"lr", a.cfg.learning_rate},
                  {"batch", a.cfg.batch_size},
                  {"lambda", a.cfg.reg_lambda},
                  {"stop_window", a.cfg.stop_window},
                  {"stop_std", a.cfg.stop_std},
                  {"stop_acc", a.cfg.stop_val_acc},
                  {"max_epochs", a.cfg.max_epochs},
                  {"val_fraction", a.cfg.val_fraction},
                  {"seed", a.cfg.seed},
                  {"cutoff", a.cutoff},
                  {"force", a.force}},
                 {{"train", a.data}}, {{"model", out.string()}, {"log", log_path.string()}});

  std::cout << "stop_reason=" << to_string(result.log.stop_reason) << " epochs=" << last.epoch
            << " train_acc=" << text::format_fixed(last.train_acc, 4)
            << " val_acc=" << text::format_fixed(last.val_acc, 4)
            << " val_std=" << text::format_fixed(result.log.final_val_std, 4) << '\n';
  return kOk;
}

// --- eval / cross ---------------------------------------------------------------

int run_eval(const std::string& model_path, const std::string& test_path) {
  const auto model = load_model(model_path);
  const auto test = read_labeled(test_path);
  std::cout << text::format_fixed(accuracy(model.params, test, model.scaling), 4) << '\n';
  return kOk;
}

int run_cross(const std::vector<std::string>& specs, const std::string& out,
              const std::vector<std::string>& argv) {
  std::map<std::string, Model> models;
  std::map<std::string, std::vector<LabeledExample>> tests;
  ordered_json inputs = ordered_json::object();
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    const auto comma = spec.find(',', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || eq == 0 || comma == std::string::npos) {
      throw DataError("expected SUBJECT=MODEL,TEST_CSV, got '" + spec + "'");
    }
    const auto name = spec.substr(0, eq);
    const auto model_path = spec.substr(eq + 1, comma - eq - 1);
    const auto test_path = spec.substr(comma + 1);
    if (models.count(name)) throw DataError("subject '" + name + "' given twice");
    models[name] = load_model(model_path);
    tests[name] = read_labeled(test_path);
    inputs[name] = {{"model", model_path}, {"test", test_path}};
  }
  const auto matrix = cross_evaluate(models, tests);
  std::cout << format_scatter(matrix);
  if (!out.empty()) {
    const fs::path p(out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    report(matrix, p);
    write_manifest(with_suffix(p, ".manifest.json"), "cross", argv, ordered_json::object(), inputs,
                   {{"report", p.string()}, {"scatter", with_suffix(p, ".scatter.txt").string()}});
  }
  return kOk;
}

// --- decide ---------------------------------------------------------------------

int run_decide(const std::string& model_path, double x1, double x2, double x3) {
  const auto model = load_model(model_path);
  std::cout << describe(decide(model, Context{x1, x2, x3})) << '\n';
  return kOk;
}

// --- serve ----------------------------------------------------------------------

struct ServeArgs {
  int port = 8080;
  std::string mode = "feedback";
  std::uint64_t seed = 0;
  std::optional<std::size_t> episodes;
  std::string out = "session.csv";
};

int run_serve(const ServeArgs& a) {
  const auto mode = session::parse_mode(a.mode);
  if (!mode) throw DataError("--mode must be 'feedback' or 'designate'");

  // Block termination signals before spawning the server thread so only
  // this thread receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  session::SessionService service(a.out, {*mode, a.seed, a.episodes});
  httplib::Server server;
  service.mount(server);
  if (!server.bind_to_port("0.0.0.0", a.port)) {
    std::cerr << "cannot bind port " << a.port << '\n';
    return kDataError;
  }
  std::thread worker([&] { server.listen_after_bind(); });
  std::cerr << "session service on port " << a.port << " (" << a.mode << " mode), writing "
            << a.out << '\n';

  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  worker.join();
  service.flush();
  std::cerr << "stopped; observations flushed to " << a.out << '\n';
  return kOk;
}

int default_port() {
  if (const char* env = std::getenv("LANEBANDIT_PORT")) {
    if (auto v = text::parse_int(env); v && *v > 0 && *v < 65536) return static_cast<int>(*v);
  }
  return 8080;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Personalized lane-change initiation from binary feedback"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LANEBANDIT_VERSION);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate both experiment sessions for a simulated subject");
  simulate->add_option("--profile", sim.profile, "Preset name or profile file")->required();
  simulate->add_option("--seed", sim.seed, "Generator seed (default: the profile's seed)");
  simulate->add_option("--episodes", sim.episodes, "Session-1 episode count")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "Output prefix for .train.csv/.test.csv/.manifest.json")
      ->required();

  std::string check_path;
  double check_cutoff = kDefaultConsistencyCutoff;
  auto* check = app.add_subcommand("check", "Screen a feedback log for consistency");
  check->add_option("train_csv", check_path, "Observation CSV")->required();
  check->add_option("--cutoff", check_cutoff, "Minimum consistency ratio to accept");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a policy from a feedback log");
  train_cmd->add_option("train_csv", tr.data, "Observation CSV")->required();
  train_cmd->add_option("--out", tr.out, "Model file path")->required();
  train_cmd->add_option("--seed", tr.cfg.seed, "Seed for initialization, split and batches");
  train_cmd->add_option("--lr", tr.cfg.learning_rate, "Learning rate");
  train_cmd->add_option("--batch", tr.cfg.batch_size, "Batch size");
  train_cmd->add_option("--lambda", tr.cfg.reg_lambda, "L2 weight penalty coefficient");
  train_cmd->add_option("--stop-window", tr.cfg.stop_window, "Epochs in the STD stopping window");
  train_cmd->add_option("--stop-std", tr.cfg.stop_std, "Validation-accuracy STD threshold");
  train_cmd->add_option("--stop-acc", tr.cfg.stop_val_acc, "Minimum validation accuracy to stop");
  train_cmd->add_option("--max-epochs", tr.cfg.max_epochs, "Epoch cap");
  train_cmd->add_option("--val-fraction", tr.cfg.val_fraction, "Validation fraction");
  train_cmd->add_option("--cutoff", tr.cutoff, "Consistency screen cutoff");
  train_cmd->add_flag("--force", tr.force, "Train even if the consistency screen rejects the data");

  std::string eval_model, eval_test;
  auto* eval = app.add_subcommand("eval", "Accuracy of a model on a labeled test set");
  eval->add_option("model", eval_model, "Model file")->required();
  eval->add_option("test_csv", eval_test, "Labeled CSV")->required();

  std::vector<std::string> cross_specs;
  std::string cross_out;
  auto* cross = app.add_subcommand("cross", "Cross-subject evaluation matrix");
  cross->add_option("subjects", cross_specs, "SUBJECT=MODEL,TEST_CSV (two or more)")->required();
  cross->add_option("--out", cross_out, "Report CSV path");

  std::string decide_model;
  double x1 = 0, x2 = 0, x3 = 0;
  auto* decide_cmd = app.add_subcommand("decide", "Decide a maneuver for one traffic context");
  decide_cmd->add_option("model", decide_model, "Model file")->required();
  decide_cmd->add_option("x1", x1, "Gap to the preceding car [m]")->required();
  decide_cmd->add_option("x2", x2, "Gap to the adjacent-lane rear car [m]")->required();
  decide_cmd->add_option("x3", x3, "Rear car velocity [km/h]")->required();

  ServeArgs sv;
  sv.port = default_port();
  auto* serve = app.add_subcommand("serve", "Run the feedback-collection service for a human subject");
  serve->add_option("--port", sv.port, "Listen port (default: $LANEBANDIT_PORT or 8080)");
  serve->add_option("--mode", sv.mode, "feedback or designate")
      ->check(CLI::IsMember({"feedback", "designate"}));
  serve->add_option("--seed", sv.seed, "Seed for proposed actions");
  serve->add_option("--episodes", sv.episodes, "Feedback episode count")->check(CLI::PositiveNumber);
  serve->add_option("--out", sv.out, "CSV written as answers arrive");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*simulate) return run_simulate(sim, args);
    if (*check) return run_check(check_path, check_cutoff);
    if (*train_cmd) return run_train(tr, args);
    if (*eval) return run_eval(eval_model, eval_test);
    if (*cross) return run_cross(cross_specs, cross_out, args);
    if (*decide_cmd) return run_decide(decide_model, x1, x2, x3);
    if (*serve) return run_serve(sv);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRejected;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}
