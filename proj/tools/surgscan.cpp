// surgscan: operator command line for the dataset kit, metrics, inference
// and the batch-inspection service.
//
// Exit codes: 0 success, 1 validation failure (bad flags, malformed input,
// findings), 2 runtime error (I/O, backend failure).

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "surgscan/codec.hpp"
#include "surgscan/dataset/annotations.hpp"
#include "surgscan/dataset/augment.hpp"
#include "surgscan/dataset/layout.hpp"
#include "surgscan/dataset/manifest.hpp"
#include "surgscan/dataset/split.hpp"
#include "surgscan/fixtures.hpp"
#include "surgscan/inference/cascade.hpp"
#include "surgscan/report.hpp"
#include "surgscan/service/config.hpp"
#include "surgscan/service/http_server.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace surgscan;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::IoFailure:
    case Errc::BackendFailure:
    case Errc::NoBackendForInstrument:
    case Errc::LowConfidenceInstrument:
      return kRuntime;
    default:
      return kValidation;
  }
}

void print_effective(std::string_view command, const json& cfg) {
  std::cerr << "surgscan " << command << " effective config: " << cfg.dump() << '\n';
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw Error(Errc::IoFailure, "cannot write " + p.string());
}

// --- convert ---------------------------------------------------------------

struct ConvertOpts {
  std::string in, images, out, manifest;
};

int run_convert(const ConvertOpts& o) {
  print_effective("convert", {{"in", o.in}, {"images", o.images}, {"out", o.out}, {"manifest", o.manifest}});
  const auto result = dataset::convert_annotations(o.in, o.images, o.out);
  for (const auto& d : result.diagnostics) std::cerr << d.file << ": " << d.message << '\n';
  if (!o.manifest.empty()) dataset::save_manifest(result.manifest, o.manifest);
  std::cout << "converted " << result.images << " images, " << result.boxes << " boxes\n";
  return result.diagnostics.empty() ? kOk : kValidation;
}

// --- split -----------------------------------------------------------------

struct SplitOpts {
  std::string manifest, out;
  double train_fraction = 0.80;
  std::uint64_t seed = 0;
};

int run_split(const SplitOpts& o) {
  print_effective("split", {{"manifest", o.manifest},
                            {"out", o.out},
                            {"train_fraction", o.train_fraction},
                            {"seed", o.seed}});
  const auto in = dataset::load_manifest(o.manifest);
  const auto out = dataset::stratified_split(in, {o.train_fraction, o.seed});
  dataset::save_manifest(out, o.out);
  std::size_t train = 0;
  for (const auto& e : out.entries) train += out.split.at(e.id) == dataset::Split::Train;
  std::cout << "split " << out.entries.size() << " images: " << train << " train, "
            << out.entries.size() - train << " val\n";
  return kOk;
}

// --- augment ---------------------------------------------------------------

struct AugmentOpts {
  std::string manifest, out_manifest, images_out;
  imaging::AugmentParams params;
  double min_box_keep = dataset::kDefaultMinBoxKeep;
};

int run_augment(AugmentOpts o) {
  print_effective("augment", {{"manifest", o.manifest},
                              {"out_manifest", o.out_manifest},
                              {"images_out", o.images_out},
                              {"rotations", o.params.fixed_rotations},
                              {"rotation_range", o.params.random_rotation_range},
                              {"brightness", o.params.brightness_delta},
                              {"contrast", o.params.contrast_delta},
                              {"noise_sigma", o.params.noise_sigma},
                              {"unsharp_radius", o.params.unsharp_radius},
                              {"unsharp_amount", o.params.unsharp_amount},
                              {"min_box_keep", o.min_box_keep},
                              {"seed", o.params.seed}});
  const auto in = dataset::load_manifest(o.manifest);
  const auto out = dataset::augment_dataset(in, o.params, o.images_out, o.min_box_keep);
  dataset::save_manifest(out, o.out_manifest);
  std::cout << "augmented " << in.entries.size() << " images into " << out.entries.size() << " entries\n";
  return kOk;
}

// --- package / validate ----------------------------------------------------

int run_package(const std::string& manifest, const std::string& root) {
  print_effective("package", {{"manifest", manifest}, {"root", root}});
  const auto m = dataset::load_manifest(manifest);
  const auto config = dataset::emit_dataset_config(m, root);
  std::cout << "wrote " << config.string() << '\n';
  return kOk;
}

int run_validate(const std::string& root) {
  print_effective("validate", {{"root", root}});
  const auto report = dataset::validate_layout(root);
  for (const auto& f : report.findings) {
    std::cout << dataset::to_string(f.kind) << '\t' << f.path << '\t' << f.detail << '\n';
  }
  std::cout << report.findings.size() << " finding(s)\n";
  return report.empty() ? kOk : kValidation;
}

// --- report ----------------------------------------------------------------

struct ReportOpts {
  std::string csv, title, out_csv;
};

int run_report(const ReportOpts& o) {
  print_effective("report", {{"csv", o.csv}, {"title", o.title}, {"out_csv", o.out_csv}});
  const auto rows = metrics::parse_csv(read_text(o.csv));
  const std::string title = o.title.empty() ? fs::path(o.csv).stem().string() : o.title;
  std::cout << metrics::render_comparison(rows, title);
  if (!o.out_csv.empty()) write_text(o.out_csv, metrics::to_csv(rows));
  return kOk;
}

// --- fixtures --------------------------------------------------------------

struct FixturesOpts {
  std::string out;
  fixtures::SyntheticSpec spec;
  bool annotations = true;
};

int run_fixtures(const FixturesOpts& o) {
  print_effective("fixtures", {{"out", o.out},
                               {"defective", o.spec.defective_per_instrument},
                               {"clean", o.spec.clean_per_instrument},
                               {"width", o.spec.width},
                               {"height", o.spec.height},
                               {"annotations", o.annotations},
                               {"seed", o.spec.seed}});
  const auto m = fixtures::write_fixture_set(o.spec, o.out, o.annotations);
  dataset::save_manifest(m, fs::path(o.out) / "manifest.jsonl");
  std::cout << "wrote " << m.entries.size() << " fixture images to " << o.out << '\n';
  return kOk;
}

// --- service-backed commands -----------------------------------------------

struct ServiceOpts {
  std::string config;
  std::string host;
  int port = -1;
  std::string data_dir;
  std::vector<std::string> fixture_dirs;
};

service::ServiceConfig service_config(const ServiceOpts& o) {
  auto cfg = service::load_config(o.config.empty() ? std::nullopt : std::optional<fs::path>(o.config));
  if (!o.host.empty()) cfg.host = o.host;
  if (o.port >= 0) cfg.port = o.port;
  if (!o.data_dir.empty()) cfg.data_dir = o.data_dir;
  if (!o.fixture_dirs.empty()) cfg.backends.fixture_dirs.assign(o.fixture_dirs.begin(), o.fixture_dirs.end());
  return cfg;
}

int run_serve(const ServiceOpts& o) {
  const auto cfg = service_config(o);
  print_effective("serve", service::config_to_json(cfg));

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::HttpServer server(service::build_service(cfg));
  const int port = server.bind(cfg.host, cfg.port);
  std::cout << "listening on " << cfg.host << ":" << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    std::cerr << "surgscan serve: shutting down\n";
    server.stop();
  });
  server.run();
  if (waiter.joinable()) {
    // run() returned on its own; wake the waiter so it can exit
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  return kOk;
}

struct InspectOpts {
  ServiceOpts service;
  std::string image;
  bool raw = false;
};

int run_inspect(InspectOpts o) {
  if (o.service.fixture_dirs.empty() && o.service.config.empty()) {
    o.service.fixture_dirs.push_back(fs::absolute(o.image).parent_path().string());
  }
  const auto cfg = service_config(o.service);
  json effective = service::config_to_json(cfg);
  effective["image"] = o.image;
  effective["raw"] = o.raw;
  print_effective("inspect", effective);

  const auto cascade = service::build_cascade(cfg);
  const auto bytes = imaging::read_file_bytes(o.image);
  auto raster = imaging::decode_image(bytes);
  if (!o.raw) {
    raster = imaging::resize_preserve_aspect(raster, cfg.pipeline.resize_long_side);
    raster = imaging::unsharp_mask(raster, cfg.pipeline.unsharp_radius, cfg.pipeline.unsharp_amount);
  }
  const auto result = cascade->inspect(inference::InspectionInput{raster, {}, inference::sha256_hex(bytes)});
  std::cout << service::result_to_json(result).dump(2) << '\n';
  return kOk;
}

struct UserAddOpts {
  ServiceOpts service;
  std::string name, email, password, role = "user";
};

int run_user_add(const UserAddOpts& o) {
  const auto cfg = service_config(o.service);
  print_effective("user-add", {{"data_dir", cfg.data_dir.string()},
                               {"name", o.name},
                               {"email", o.email},
                               {"role", o.role}});
  const auto role = service::parse_role(o.role);
  if (!role) throw Error(Errc::InvalidArgument, "role must be 'admin' or 'user'");
  auto svc = service::build_service(cfg);
  const auto user = svc->add_user(o.name, o.email, o.password, *role);
  std::cout << "created user " << user.id << " <" << user.email << "> as " << service::to_string(user.role) << '\n';
  return kOk;
}

void add_service_flags(CLI::App* cmd, ServiceOpts& o) {
  cmd->add_option("--config", o.config, "Service config file (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--data-dir", o.data_dir, "Data directory (store and images)");
  cmd->add_option("--fixtures", o.fixture_dirs, "Fixture directories for the stub backends");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SurgScan AOI toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  ConvertOpts convert;
  auto* c = app.add_subcommand("convert", "Convert XML annotations to normalized label files");
  c->add_option("--in", convert.in, "Annotation directory")->required()->check(CLI::ExistingDirectory);
  c->add_option("--images", convert.images, "Image directory")->required()->check(CLI::ExistingDirectory);
  c->add_option("--out", convert.out, "Label output directory")->required();
  c->add_option("--manifest", convert.manifest, "Also write the manifest of converted images");
  c->callback([&] { action = [&] { return run_convert(convert); }; });

  SplitOpts split;
  auto* s = app.add_subcommand("split", "Stratified train/val split of a manifest");
  s->add_option("--manifest", split.manifest, "Input manifest")->required()->check(CLI::ExistingFile);
  s->add_option("--out", split.out, "Output manifest")->required();
  s->add_option("--train-fraction", split.train_fraction, "Train fraction")->capture_default_str();
  s->add_option("--seed", split.seed, "Shuffle seed")->capture_default_str();
  s->callback([&] { action = [&] { return run_split(split); }; });

  AugmentOpts augment;
  auto* a = app.add_subcommand("augment", "Expand the train split with deterministic augmentations");
  a->add_option("--manifest", augment.manifest, "Split manifest")->required()->check(CLI::ExistingFile);
  a->add_option("--out-manifest", augment.out_manifest, "Augmented manifest")->required();
  a->add_option("--images-out", augment.images_out, "Directory for derivative images")->required();
  a->add_option("--rotations", augment.params.fixed_rotations, "Fixed rotations (90/180/270)")
      ->delimiter(',')
      ->capture_default_str();
  a->add_option("--rotation-range", augment.params.random_rotation_range, "Random rotation range, degrees")
      ->capture_default_str();
  a->add_option("--brightness", augment.params.brightness_delta, "Brightness delta")->capture_default_str();
  a->add_option("--contrast", augment.params.contrast_delta, "Contrast delta")->capture_default_str();
  a->add_option("--noise-sigma", augment.params.noise_sigma, "Gaussian noise sigma")->capture_default_str();
  a->add_option("--unsharp-radius", augment.params.unsharp_radius, "Unsharp radius")->capture_default_str();
  a->add_option("--unsharp-amount", augment.params.unsharp_amount, "Unsharp amount")->capture_default_str();
  a->add_option("--min-box-keep", augment.min_box_keep, "Minimum surviving box area fraction")
      ->capture_default_str();
  a->add_option("--seed", augment.params.seed, "Augmentation seed")->capture_default_str();
  a->callback([&] { action = [&] { return run_augment(augment); }; });

  std::string package_manifest, package_root;
  auto* p = app.add_subcommand("package", "Emit the on-disk training layout and dataset config");
  p->alias("emit");
  p->add_option("--manifest", package_manifest, "Split (and optionally augmented) manifest")
      ->required()
      ->check(CLI::ExistingFile);
  p->add_option("--root", package_root, "Dataset root")->required();
  p->callback([&] { action = [&] { return run_package(package_manifest, package_root); }; });

  std::string validate_root;
  auto* v = app.add_subcommand("validate", "Check an emitted dataset for orphans, bad labels and leakage");
  v->add_option("--root", validate_root, "Dataset root")->required()->check(CLI::ExistingDirectory);
  v->callback([&] { action = [&] { return run_validate(validate_root); }; });

  ReportOpts report;
  auto* r = app.add_subcommand("report", "Render a model comparison table");
  r->add_option("--csv", report.csv, "Metrics table (CSV or TSV)")->required()->check(CLI::ExistingFile);
  r->add_option("--title", report.title, "Table title");
  r->add_option("--out-csv", report.out_csv, "Also write normalized CSV");
  r->callback([&] { action = [&] { return run_report(report); }; });

  FixturesOpts fx;
  bool no_annotations = false;
  auto* f = app.add_subcommand("fixtures", "Write a synthetic fixture corpus");
  f->add_option("--out", fx.out, "Output directory")->required();
  f->add_option("--defective", fx.spec.defective_per_instrument, "Defective images per instrument")
      ->capture_default_str();
  f->add_option("--clean", fx.spec.clean_per_instrument, "Clean images per instrument")->capture_default_str();
  f->add_option("--width", fx.spec.width, "Image width")->capture_default_str();
  f->add_option("--height", fx.spec.height, "Image height")->capture_default_str();
  f->add_option("--seed", fx.spec.seed, "Rendering seed")->capture_default_str();
  f->add_flag("--no-annotations", no_annotations, "Skip XML annotations");
  f->callback([&] {
    fx.annotations = !no_annotations;
    action = [&] { return run_fixtures(fx); };
  });

  ServiceOpts serve;
  auto* sv = app.add_subcommand("serve", "Run the batch-inspection REST service");
  add_service_flags(sv, serve);
  sv->add_option("--host", serve.host, "Bind address");
  sv->add_option("--port", serve.port, "Port (0 picks a free port)");
  sv->callback([&] { action = [&] { return run_serve(serve); }; });

  InspectOpts inspect;
  auto* in = app.add_subcommand("inspect", "Run the two-stage cascade on one image");
  add_service_flags(in, inspect.service);
  in->add_option("--image", inspect.image, "Image file")->required()->check(CLI::ExistingFile);
  in->add_flag("--raw", inspect.raw, "Skip the resize and sharpen pipeline");
  in->callback([&] { action = [&] { return run_inspect(inspect); }; });

  UserAddOpts user;
  auto* u = app.add_subcommand("user-add", "Create a service account");
  add_service_flags(u, user.service);
  u->add_option("--name", user.name, "Display name")->required();
  u->add_option("--email", user.email, "Login email")->required();
  u->add_option("--password", user.password, "Password")->required();
  u->add_option("--role", user.role, "admin or user")->capture_default_str();
  u->callback([&] { action = [&] { return run_user_add(user); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    return action();
  } catch (const service::ApiError& e) {
    std::cerr << "surgscan: " << e.code() << ": " << e.what() << '\n';
    return e.status() >= 500 ? kRuntime : kValidation;
  } catch (const dataset::LabelParseError& e) {
    std::cerr << "surgscan: " << errc_name(e.code()) << " at line " << e.line() << ": " << e.what() << '\n';
    return kValidation;
  } catch (const Error& e) {
    std::cerr << "surgscan: " << errc_name(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "surgscan: " << e.what() << '\n';
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "surgscan: " << e.what() << '\n';
    return kRuntime;
  }
}
