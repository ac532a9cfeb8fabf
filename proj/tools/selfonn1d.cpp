// Command-line front end.  Everything model-related goes through the shared
// library's C interface; this file only parses configuration, schedules
// patient jobs and formats output.
#include <selfonn1d.h>

#include <CLI11.hpp>

#include <atomic>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace {

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw CliError{code, message};
}

[[noreturn]] void fail_api(so1d_status status) {
  throw CliError{int(status), so1d_last_error()};
}

void check(so1d_status status) {
  if (status != SO1D_OK) fail_api(status);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// key=value settings: defaults are overlaid by the config file, then by
// command-line flags.  Every key must be consumed by a getter; leftovers are
// rejected so typos cannot silently fall back to defaults.
class Settings {
 public:
  void load_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(2, "cannot read config file " + path);
    std::string line;
    for (int line_no = 1; std::getline(f, line); ++line_no) {
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos)
        fail(2, path + ":" + std::to_string(line_no) + ": expected key=value");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty())
        fail(2, path + ":" + std::to_string(line_no) + ": empty key");
      if (!kv_.emplace(key, value).second)
        fail(2, path + ":" + std::to_string(line_no) + ": duplicate key " + key);
    }
  }

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string str(const std::string& key, const std::string& def) {
    auto it = kv_.find(key);
    const std::string v = it == kv_.end() ? def : it->second;
    consume(key, v);
    return v;
  }

  std::uint64_t u64(const std::string& key, std::uint64_t def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
      consume(key, std::to_string(def));
      return def;
    }
    errno = 0;
    char* end = nullptr;
    const auto v = std::strtoull(it->second.c_str(), &end, 0);
    if (errno != 0 || end == it->second.c_str() || *end != '\0')
      fail(2, "key " + key + ": not an integer: '" + it->second + "'");
    consume(key, it->second);
    return v;
  }

  std::size_t size(const std::string& key, std::size_t def) {
    return static_cast<std::size_t>(u64(key, def));
  }

  int integer(const std::string& key, int def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
      consume(key, std::to_string(def));
      return def;
    }
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(it->second.c_str(), &end, 0);
    if (errno != 0 || end == it->second.c_str() || *end != '\0')
      fail(2, "key " + key + ": not an integer: '" + it->second + "'");
    consume(key, it->second);
    return static_cast<int>(v);
  }

  double number(const std::string& key, double def) {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
      consume(key, std::to_string(def));
      return def;
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (errno != 0 || end == it->second.c_str() || *end != '\0')
      fail(2, "key " + key + ": not a number: '" + it->second + "'");
    consume(key, it->second);
    return v;
  }

  std::vector<std::string> list(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) {
      consume(key, "");
      return {};
    }
    std::vector<std::string> out;
    std::string cur;
    for (char c : it->second + ",") {
      if (c == ',') {
        const std::string item = trim(cur);
        if (!item.empty()) out.push_back(item);
        cur.clear();
      } else {
        cur += c;
      }
    }
    consume(key, it->second);
    return out;
  }

  // corrects the logged value when the effective default is computed later
  void note(const std::string& key, const std::string& effective) {
    resolved_[key] = effective;
  }

  // rejects unconsumed keys, then logs every setting actually in effect
  void finish(const std::string& command) const {
    std::string unknown;
    for (const auto& [key, value] : kv_) {
      if (consumed_.count(key)) continue;
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
    if (!unknown.empty()) fail(2, "unknown config keys: " + unknown);
    std::printf("config command=%s\n", command.c_str());
    for (const auto& [key, value] : resolved_)
      std::printf("config %s=%s\n", key.c_str(), value.c_str());
  }

 private:
  void consume(const std::string& key, const std::string& effective) {
    consumed_.insert(key);
    resolved_[key] = effective;
  }

  std::map<std::string, std::string> kv_;
  std::set<std::string> consumed_;
  mutable std::map<std::string, std::string> resolved_;
};

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> q;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
};

void apply_flag_overrides(Settings& settings, const Flags& flags) {
  if (flags.seed) settings.set("seed", std::to_string(*flags.seed));
  if (flags.q) settings.set("q", std::to_string(*flags.q));
  if (flags.jobs) settings.set("jobs", std::to_string(*flags.jobs));
  if (flags.out) settings.set("out_dir", *flags.out);
}

Settings load_settings(const Flags& flags) {
  Settings settings;
  if (!flags.config_path.empty()) settings.load_file(flags.config_path);
  apply_flag_overrides(settings, flags);
  return settings;
}

std::vector<std::size_t> size_list(Settings& settings, const std::string& key) {
  std::vector<std::size_t> out;
  for (const auto& item : settings.list(key)) {
    errno = 0;
    char* end = nullptr;
    const auto v = std::strtoull(item.c_str(), &end, 10);
    if (errno != 0 || end == item.c_str() || *end != '\0')
      fail(2, "key " + key + ": not an integer: '" + item + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

so1d_network_config network_from(Settings& settings) {
  so1d_network_config cfg;
  so1d_network_config_default(&cfg);
  cfg.input_channels = settings.size("input_channels", cfg.input_channels);
  cfg.input_length = settings.size("input_length", cfg.input_length);

  const auto layers = size_list(settings, "layers");
  const auto subsample = size_list(settings, "subsample");
  if (!layers.empty()) {
    if (layers.size() > SO1D_MAX_LAYERS)
      fail(2, "layers: at most " + std::to_string(SO1D_MAX_LAYERS) + " entries");
    cfg.layer_count = layers.size();
    for (std::size_t i = 0; i < layers.size(); ++i) cfg.layer_neurons[i] = layers[i];
  }
  if (!subsample.empty()) {
    if (subsample.size() != cfg.layer_count)
      fail(2, "subsample: need one factor per layer");
    for (std::size_t i = 0; i < subsample.size(); ++i) cfg.subsample[i] = subsample[i];
  } else if (!layers.empty() && layers.size() != 2) {
    fail(2, "subsample: required when layers does not have two entries");
  }

  auto join = [](const std::size_t* values, std::size_t count) {
    std::string s;
    for (std::size_t i = 0; i < count; ++i)
      s += (i ? "," : "") + std::to_string(values[i]);
    return s;
  };
  settings.note("layers", join(cfg.layer_neurons, cfg.layer_count));
  settings.note("subsample", join(cfg.subsample, cfg.layer_count));

  cfg.kernel = settings.size("kernel", cfg.kernel);
  cfg.q_order = settings.integer("q", cfg.q_order);
  cfg.dense_hidden = settings.size("dense_hidden", cfg.dense_hidden);
  cfg.classes = settings.size("classes", cfg.classes);
  const std::string loss = settings.str("loss", "cross_entropy");
  if (loss == "cross_entropy" || loss == "ce")
    cfg.loss = SO1D_LOSS_CROSS_ENTROPY;
  else if (loss == "mse")
    cfg.loss = SO1D_LOSS_MSE;
  else
    fail(2, "loss: expected cross_entropy or mse, got '" + loss + "'");
  return cfg;
}

// keeps the id strings alive behind the pointer arrays the plan wants
struct PlanStorage {
  std::vector<std::string> pool, test;
  std::vector<const char*> pool_ptrs, test_ptrs;
  so1d_partition_plan plan;
};

PlanStorage plan_from(Settings& settings) {
  PlanStorage s;
  so1d_partition_plan_default(&s.plan);
  s.pool = settings.list("pool_ids");
  s.test = settings.list("test_ids");
  for (const auto& id : s.pool) s.pool_ptrs.push_back(id.c_str());
  for (const auto& id : s.test) s.test_ptrs.push_back(id.c_str());
  if (!s.pool.empty()) {
    s.plan.pool_ids = s.pool_ptrs.data();
    s.plan.pool_count = s.pool_ptrs.size();
  }
  if (!s.test.empty()) {
    s.plan.test_ids = s.test_ptrs.data();
    s.plan.test_count = s.test_ptrs.size();
  }
  s.plan.boundary_seconds = settings.number("boundary_seconds", s.plan.boundary_seconds);
  s.plan.common_per_class = settings.size("common_per_class", s.plan.common_per_class);
  return s;
}

so1d_train_schedule schedule_from(Settings& settings) {
  so1d_train_schedule sched;
  so1d_train_schedule_default(&sched);
  sched.max_epochs = settings.size("max_epochs", sched.max_epochs);
  sched.target_train_error =
      settings.number("target_train_error", sched.target_train_error);
  sched.lr0 = settings.number("lr0", sched.lr0);
  sched.lr_up = settings.number("lr_up", sched.lr_up);
  sched.lr_down = settings.number("lr_down", sched.lr_down);
  sched.runs = settings.size("runs", sched.runs);
  sched.batch_size = settings.size("batch_size", sched.batch_size);
  return sched;
}

struct PartitionsHandle {
  so1d_partitions* value = nullptr;
  ~PartitionsHandle() { so1d_partitions_free(value); }
};

// loads the dataset, builds partitions and resolves the patient work list
void open_partitions(Settings& settings, PartitionsHandle& parts,
                     std::vector<std::string>& patients, std::uint64_t seed) {
  const std::string data_dir = settings.str("data_dir", "");
  if (data_dir.empty()) fail(2, "data_dir is required");
  const double sampling_rate = settings.number("sampling_rate", 360.0);
  auto plan = plan_from(settings);
  const auto wanted = settings.list("patients");

  so1d_dataset* dataset = nullptr;
  check(so1d_dataset_load_dir(data_dir.c_str(), &plan.plan, sampling_rate, &dataset));
  const so1d_status built = so1d_partitions_build(dataset, &plan.plan, seed, &parts.value);
  so1d_dataset_free(dataset);
  check(built);

  if (!wanted.empty()) {
    for (const auto& id : wanted) {
      size_t train_n = 0, test_n = 0;
      check(so1d_partitions_patient_counts(parts.value, id.c_str(), &train_n, &test_n));
      patients.push_back(id);
    }
    return;
  }
  size_t count = 0;
  check(so1d_partitions_patient_count(parts.value, &count));
  for (size_t i = 0; i < count; ++i) {
    char* id = nullptr;
    check(so1d_partitions_patient_id(parts.value, i, &id));
    patients.push_back(id);
    so1d_string_free(id);
  }
}

// per-patient master seed: stable over the patient list, independent of jobs
std::uint64_t patient_seed(std::uint64_t base, std::size_t index) {
  return base ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(index + 1));
}

int cmd_train(const Flags& flags) {
  Settings settings = load_settings(flags);
  const std::uint64_t seed = settings.u64("seed", 1);
  const std::size_t jobs = std::max<std::size_t>(1, settings.size("jobs", 1));
  const std::string out_dir = settings.str("out_dir", "models");
  const so1d_network_config cfg = network_from(settings);
  const so1d_train_schedule sched = schedule_from(settings);

  PartitionsHandle parts;
  std::vector<std::string> patients;
  open_partitions(settings, parts, patients, seed);
  settings.finish("train");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(3, "cannot create " + out_dir + ": " + ec.message());

  size_t common = 0;
  check(so1d_partitions_common_count(parts.value, &common));
  std::printf("shared pool: %zu beats; training %zu patients with %zu jobs\n",
              common, patients.size(), jobs);

  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  std::optional<CliError> first_error;
  std::size_t first_error_index = SIZE_MAX;

  auto worker = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= patients.size()) return;
      const std::string& pid = patients[index];
      const std::uint64_t master = patient_seed(seed, index);

      std::vector<so1d_run_summary> runs(sched.runs);
      size_t runs_filled = 0;
      so1d_model* model = nullptr;
      const so1d_status trained =
          so1d_train_patient(parts.value, pid.c_str(), &cfg, &sched, master,
                             &model, runs.data(), &runs_filled);
      std::string message = trained == SO1D_OK ? "" : so1d_last_error();

      std::string log;
      so1d_status status = trained;
      if (trained == SO1D_OK) {
        for (size_t r = 0; r < runs_filled; ++r) {
          char line[160];
          std::snprintf(line, sizeof line,
                        "patient %s: run %zu seed=%llu epochs=%zu error=%.2f%%%s\n",
                        pid.c_str(), r,
                        static_cast<unsigned long long>(runs[r].seed),
                        runs[r].epochs_run, 100.0 * runs[r].final_train_error,
                        runs[r].selected ? "  (kept)" : "");
          log += line;
        }
        const std::string path = out_dir + "/" + pid + ".model.json";
        status = so1d_model_save(model, path.c_str());
        if (status == SO1D_OK)
          log += "patient " + pid + ": saved " + path + "\n";
        else
          message = so1d_last_error();
        so1d_model_free(model);
      }

      std::lock_guard<std::mutex> lock(io_mutex);
      if (status == SO1D_OK) {
        std::fputs(log.c_str(), stdout);
      } else if (index < first_error_index) {
        first_error_index = index;
        first_error = CliError{int(status), "patient " + pid + ": " + message};
      }
    }
  };

  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < std::min(jobs, patients.size()); ++j)
    pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (first_error) throw *first_error;
  return 0;
}

int cmd_eval(const Flags& flags) {
  Settings settings = load_settings(flags);
  const std::uint64_t seed = settings.u64("seed", 1);
  const std::string models_dir = settings.str("models_dir", "models");
  const std::string out_dir = settings.str("out_dir", "reports");

  PartitionsHandle parts;
  std::vector<std::string> patients;
  open_partitions(settings, parts, patients, seed);
  settings.finish("eval");

  so1d_report* report = nullptr;
  check(so1d_report_create(report ? nullptr : &report));
  std::string expected_hash;

  for (const auto& pid : patients) {
    const std::string path = models_dir + "/" + pid + ".model.json";
    so1d_model* model = nullptr;
    check(so1d_model_load(path.c_str(), &model));

    char hash[17];
    check(so1d_model_config_hash_hex(model, hash));
    if (expected_hash.empty()) {
      expected_hash = hash;
    } else if (expected_hash != hash) {
      so1d_model_free(model);
      so1d_report_free(report);
      fail(2, "model " + path + " has configuration " + hash +
                  " but the evaluation started with " + expected_hash +
                  "; refusing to mix architectures in one report");
    }

    uint64_t confusion[25];
    const so1d_status evaluated =
        so1d_eval_patient(parts.value, pid.c_str(), model, confusion);
    so1d_model_free(model);
    check(evaluated);
    check(so1d_report_add(report, pid.c_str(), confusion));
  }

  char* text = nullptr;
  char* csv = nullptr;
  so1d_status rendered = so1d_report_text(report, &text);
  if (rendered == SO1D_OK) rendered = so1d_report_csv(report, &csv);
  so1d_report_free(report);
  check(rendered);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(3, "cannot create " + out_dir + ": " + ec.message());
  for (const auto& [name, body] :
       {std::pair<std::string, char*>{"report.txt", text},
        std::pair<std::string, char*>{"report.csv", csv}}) {
    const std::string path = out_dir + "/" + name;
    std::ofstream f(path, std::ios::binary);
    if (f) f << body;
    if (!f) {
      so1d_string_free(text);
      so1d_string_free(csv);
      fail(3, "failed writing " + path);
    }
  }

  std::fputs(text, stdout);
  std::printf("wrote %s/report.txt and %s/report.csv\n", out_dir.c_str(),
              out_dir.c_str());
  so1d_string_free(text);
  so1d_string_free(csv);
  return 0;
}

int cmd_complexity(const Flags& flags) {
  Settings settings = load_settings(flags);
  so1d_network_config cfg = network_from(settings);
  settings.finish("complexity");

  char* trace = nullptr;
  check(so1d_dim_trace(&cfg, &trace));
  uint64_t params = 0, macs = 0;
  check(so1d_complexity(&cfg, &params, &macs));

  std::printf("map lengths     %s\n", trace);
  so1d_string_free(trace);
  std::printf("parameters      %llu\n", static_cast<unsigned long long>(params));
  std::printf("macs            %llu\n", static_cast<unsigned long long>(macs));
  for (size_t l = 0; l < cfg.layer_count; ++l) {
    uint64_t per_neuron = 0;
    check(so1d_layer_neuron_macs(&cfg, l, &per_neuron));
    std::printf("layer %zu neuron  %llu macs\n", l + 1,
                static_cast<unsigned long long>(per_neuron));
  }
  std::printf(
      "note: mac totals count one multiply-add per matrix-product term at "
      "full pre-subsample map lengths; figures under other accounting bases "
      "are not directly comparable\n");
  return 0;
}

int cmd_bench(const Flags& flags) {
  Settings settings = load_settings(flags);
  const std::uint64_t seed = settings.u64("seed", 1);
  const std::size_t reps = settings.size("reps", 10000);
  so1d_network_config cfg = network_from(settings);
  settings.finish("bench");

  char* info = nullptr;
  check(so1d_machine_info(&info));
  std::printf("machine         %s\n", info);
  so1d_string_free(info);
  std::printf("repetitions     %zu\n", reps);

  auto run = [&](const so1d_network_config& c) {
    so1d_bench_result r;
    check(so1d_bench_run(&c, reps, seed, &r));
    std::printf("q=%d  forward  median %8.1f us   p95 %8.1f us\n", c.q_order,
                r.forward_median_us, r.forward_p95_us);
    std::printf("q=%d  backward median %8.1f us   p95 %8.1f us\n", c.q_order,
                r.backward_median_us, r.backward_p95_us);
    return r;
  };

  const so1d_bench_result main_run = run(cfg);
  double slower = main_run.forward_median_us;
  double faster = main_run.forward_median_us;
  if (cfg.q_order > 1) {
    so1d_network_config base = cfg;
    base.q_order = 1;
    const so1d_bench_result base_run = run(base);
    faster = base_run.forward_median_us;
    if (faster >= slower)
      fail(4, "higher-order forward pass was not slower than order 1 at the "
              "same layout; timing environment is unreliable");
  }
  if (slower >= 1000.0 || faster >= 1000.0)
    fail(4, "per-beat forward latency exceeded the 1 ms budget");
  std::printf("ordering        ok (forward medians %.1f us >= %.1f us, both "
              "under 1 ms)\n",
              slower, faster);
  return 0;
}

int cmd_synth(const Flags& flags) {
  Settings settings = load_settings(flags);
  so1d_synth_spec spec;
  so1d_synth_spec_default(&spec);
  spec.normal_beats = settings.size("normal_beats", spec.normal_beats);
  spec.s_beats = settings.size("s_beats", spec.s_beats);
  spec.v_beats = settings.size("v_beats", spec.v_beats);
  spec.f_beats = settings.size("f_beats", spec.f_beats);
  spec.q_beats = settings.size("q_beats", spec.q_beats);
  spec.rr_seconds = settings.number("rr_seconds", spec.rr_seconds);
  spec.premature_rr_seconds =
      settings.number("premature_rr_seconds", spec.premature_rr_seconds);
  spec.jitter_seconds = settings.number("jitter_seconds", spec.jitter_seconds);
  spec.noise = settings.number("noise", spec.noise);
  spec.sampling_rate = settings.integer("sampling_rate", spec.sampling_rate);
  const std::uint64_t seed = settings.u64("seed", 1);
  const std::string out_dir = settings.str("out_dir", "synth_data");
  const auto ids = settings.list("ids");
  settings.finish("synth");

  std::vector<const char*> id_ptrs;
  for (const auto& id : ids) id_ptrs.push_back(id.c_str());
  check(so1d_synth_write(&spec, ids.empty() ? nullptr : id_ptrs.data(),
                         id_ptrs.size(), seed, out_dir.c_str()));
  std::printf("wrote %zu records to %s\n", ids.empty() ? std::size_t(44) : ids.size(),
              out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patient-specific heartbeat classification with "
               "self-organized operational networks"};
  app.require_subcommand(1);

  Flags flags;
  int (*entry)(const Flags&) = nullptr;
  const std::map<std::string, std::pair<const char*, int (*)(const Flags&)>>
      commands = {
          {"train", {"train one model per evaluation patient", cmd_train}},
          {"eval", {"evaluate saved models and write reports", cmd_eval}},
          {"complexity", {"print parameter and mac accounting", cmd_complexity}},
          {"bench", {"time per-beat forward/backward passes", cmd_bench}},
          {"synth", {"generate a synthetic CSV corpus", cmd_synth}},
      };
  for (const auto& [name, info] : commands) {
    auto* sub = app.add_subcommand(name, info.first);
    sub->add_option("--config", flags.config_path, "key=value settings file");
    sub->add_option("--seed", flags.seed, "override the seed setting");
    sub->add_option("--q", flags.q, "override the polynomial order");
    sub->add_option("--jobs", flags.jobs, "parallel patient jobs (train)");
    sub->add_option("--out", flags.out, "override the output directory");
    sub->callback([&entry, fn = info.second] { entry = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return entry(flags);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  }
}
