#include "hetnet/scenario.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace hetnet;
using Catch::Approx;

TEST_CASE("preset constants", "[scenario]") {
  const Preset in = Preset::indoor();
  CHECK(in.environment == Environment::Indoor);
  CHECK(in.macro_radius_m == 1000.0);
  CHECK(in.phantom_radius_m == 50.0);
  CHECK(in.macro_power_dbm == 47.0);
  CHECK(in.phantom_power_dbm == 23.0);
  CHECK(in.macro_users == 10);
  CHECK(in.phantom_cells == 4);
  CHECK(in.users_per_phantom == 5);
  CHECK(in.bandwidth_hz == 180e3);
  CHECK(in.trials == 80);
  CHECK(in.propagation.wall_loss_db == 10.0);
  CHECK(in.propagation.shadow_sigma_db == 10.0);
  CHECK(in.propagation.noise_psd_dbm_hz == -174.0);
  CHECK(in.propagation.cross_phantom_walls == 2);

  const Preset out = Preset::outdoor();
  CHECK(out.environment == Environment::Outdoor);
  CHECK(out.phantom_radius_m == 250.0);
  CHECK(out.phantom_power_dbm == 30.0);
  CHECK(out.macro_power_dbm == 47.0);

  const NetworkConfig c = in.network();
  CHECK(c.budget(0) == Approx(50.119).epsilon(1e-4));
  CHECK(c.budget(1) == Approx(0.19953).epsilon(1e-4));
  CHECK(c.mask_f1(1) == Approx(c.budget(1) / in.subcarriers_f1));
  CHECK(c.noise_power == Approx(7.166e-16).epsilon(1e-3));
  CHECK(environment_from_string("outdoor") == Environment::Outdoor);
  CHECK_THROWS_AS(environment_from_string("rural"), std::invalid_argument);
}

TEST_CASE("deployment shape and determinism", "[scenario]") {
  const Deployment d = generate(Preset::indoor(), 42);
  CHECK(d.users.size() == 30);
  CHECK(std::count(d.user_cell.begin(), d.user_cell.end(), 0) == 10);
  for (int m = 1; m <= 4; ++m) CHECK(std::count(d.user_cell.begin(), d.user_cell.end(), m) == 5);
  const Deployment e = generate(Preset::indoor(), 42);
  CHECK(d.users == e.users);
  CHECK(d.base_stations == e.base_stations);
  CHECK(generate(Preset::indoor(), 43).users != d.users);
}

TEST_CASE("users stay inside their cell", "[scenario][property]") {
  for (const Preset& p : {Preset::indoor(), Preset::outdoor()}) {
    double worst = 0.0, closest = 1e300;
    for (std::uint64_t s = 0; s < 10000; ++s) {
      const Deployment d = generate(p, s);
      for (std::size_t u = 0; u < d.users.size(); ++u) {
        const int cell = d.user_cell[u];
        const double radius = cell == 0 ? p.macro_radius_m : p.phantom_radius_m;
        worst = std::max(worst, d.distance(cell, static_cast<int>(u)) / radius);
        for (int j = 0; j <= p.phantom_cells; ++j) closest = std::min(closest, d.distance(j, static_cast<int>(u)));
      }
    }
    CHECK(worst <= 1.0 + 1e-12);
    CHECK(closest >= kMinLinkDistance);
  }
}

TEST_CASE("link types", "[scenario]") {
  CHECK(link_type(0, 0, Environment::Indoor) == LinkType::MbsToMue);
  CHECK(link_type(0, 2, Environment::Indoor) == LinkType::MbsInterferingPue);
  CHECK(link_type(3, 0, Environment::Outdoor) == LinkType::PbsInterferingMue);
  CHECK(link_type(1, 1, Environment::Indoor) == LinkType::PbsToIndoorPue);
  CHECK(link_type(1, 2, Environment::Outdoor) == LinkType::PbsToOutdoorPue);
}

TEST_CASE("gain realizations", "[scenario]") {
  const Deployment d = generate(Preset::outdoor(), 9);
  Rng a(5), b(5);
  const ChannelGains f1 = realize_gains(d, Band::F1, a);
  const ChannelGains f2 = realize_gains(d, Band::F2, a);
  CHECK_NOTHROW(f1.validate());
  CHECK_NOTHROW(f2.validate());
  CHECK_FALSE(f2.has_transmitter(0));
  CHECK_THROWS_AS(f2.from(0), std::invalid_argument);
  const ChannelGains again = realize_gains(d, Band::F1, b);
  for (int j = 0; j < f1.num_cells(); ++j) CHECK(again.from(j) == f1.from(j));

  // Indoor links into another phantom cell carry the extra wall losses;
  // outdoor ones do not.
  for (const Preset& p : {Preset::indoor(), Preset::outdoor()}) {
    Preset bare = p;
    bare.propagation.cross_phantom_walls = 0;
    bare.propagation.shadow_sigma_db = 0.0;
    bare.propagation.per_subcarrier_fading = false;
    Preset walled = bare;
    walled.propagation.cross_phantom_walls = 2;
    const Deployment dep = generate(bare, 3);
    Rng r1(1), r2(1);
    const ChannelGains g0 = realize_gains(dep, Band::F2, r1);
    Deployment dep2 = dep;
    dep2.preset = walled;
    const ChannelGains g2 = realize_gains(dep2, Band::F2, r2);
    const int foreign = dep.preset.macro_users + dep.preset.users_per_phantom;   // first user of cell 2
    const double drop_db = 10.0 * std::log10(g0(1, foreign, 0) / g2(1, foreign, 0));
    CHECK(drop_db == Approx(p.environment == Environment::Indoor ? 20.0 : 0.0).margin(1e-9));
    CHECK(g0(1, dep.preset.macro_users, 0) == g2(1, dep.preset.macro_users, 0));
  }

  Preset flat = Preset::indoor();
  flat.propagation.per_subcarrier_fading = false;
  Rng c(1);
  const ChannelGains g = realize_gains(generate(flat, 1), Band::F1, c);
  for (int j = 0; j < g.num_cells(); ++j)
    for (int u = 0; u < g.num_users(); ++u) CHECK((g.from(j).row(u).array() == g(j, u, 0)).all());
}
