#pragma once

// A service over a temp data dir with stub backends indexed on a small
// fixture set, plus three accounts.

#include <memory>
#include <string>

#include "surgscan/codec.hpp"
#include "surgscan/fixtures.hpp"
#include "surgscan/inference/stub_backend.hpp"
#include "surgscan/service/config.hpp"
#include "test_support.hpp"

namespace surgscan::testkit {

struct ServiceRig {
  TempDir dir{"surgscan-svc"};
  dataset::DatasetManifest truth;
  service::ServiceConfig cfg;
  std::shared_ptr<service::Service> svc;
  std::string low_confidence_path;
  std::string unindexed_path;

  static constexpr const char* kAdminEmail = "admin@example.com";
  static constexpr const char* kAdminPassword = "admin-pass";

  explicit ServiceRig(int per_class = 2, int instruments = 3) {
    fixtures::SyntheticSpec spec;
    spec.instruments.resize(static_cast<std::size_t>(instruments));
    spec.defective_per_instrument = per_class;
    spec.clean_per_instrument = per_class;
    spec.width = 72;
    spec.height = 56;
    spec.seed = 4;
    truth = fixtures::write_fixture_set(spec, dir / "fixtures", false);

    low_confidence_path = (dir / "fixtures/images/lowconf.png").string();
    imaging::save_png(random_raster(40, 30, 77), low_confidence_path);
    inference::write_fixture_tags(low_confidence_path, {InstrumentClass::Probe, 0.3, {}});
    unindexed_path = (dir / "unindexed.png").string();
    imaging::save_png(random_raster(40, 30, 78), unindexed_path);

    cfg.data_dir = dir / "data";
    cfg.backends.fixture_dirs = {dir / "fixtures"};
    cfg.bootstrap_admin = service::BootstrapAdmin{"Root", kAdminEmail, kAdminPassword};
    svc = service::build_service(cfg);
    svc->add_user("Alice", "alice@example.com", "alice-pass", service::Role::User);
    svc->add_user("Bob", "bob@example.com", "bob-pass", service::Role::User);
  }

  std::string token(const std::string& who) {
    if (who == "admin") return svc->login(kAdminEmail, kAdminPassword).at("token");
    return svc->login(who + "@example.com", who + "-pass").at("token");
  }

  static std::vector<std::uint8_t> bytes(const std::string& path) { return imaging::read_file_bytes(path); }
};

}  // namespace surgscan::testkit
