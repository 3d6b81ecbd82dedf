#include "wsnqos/experiments.hpp"
#include "wsnqos/report.hpp"
#include "wsnqos/scenario_io.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace wsnqos;

TEST_SUITE ("cli-experiments")
{
  TEST_CASE ("Jain index")
  {
    CHECK (jain_fairness ({3, 3, 3, 3}) == doctest::Approx (1.0));
    CHECK (jain_fairness ({1, 0, 0, 0}) == doctest::Approx (0.25));
    CHECK (jain_fairness ({1, 1, 0, 0, 0}) == doctest::Approx (0.4));
    CHECK (jain_fairness ({1, 2, 3}) == doctest::Approx (6.0 / 7));
    CHECK_THROWS (jain_fairness ({}));
    CHECK_THROWS (jain_fairness ({0, 0}));
    CHECK_THROWS (jain_fairness ({1, -1}));
  }

  TEST_CASE ("scenario generation is deterministic")
  {
    Scenario a = generate_scenario (42);
    Scenario b = generate_scenario (42);
    CHECK (a.graph.size () == 41);
    CHECK (a.graph.sources ().size () == 10);
    CHECK (a.graph.relays ().size () == 30);
    CHECK (a.tree == b.tree);
    CHECK (a.sub_seed == b.sub_seed);
    ScenarioFile fa, fb;
    fa.graph = a.graph;
    fb.graph = b.graph;
    CHECK (scenario_to_json (fa).dump () == scenario_to_json (fb).dump ());
    CHECK (a.connected);
    CHECK (a.feasible);
    CHECK (validate_tree (a.tree, a.graph, 5));
    CHECK (a.graph.node (0).kind == NodeKind::Sink);
    CHECK (a.graph.node (0).x == 0.0);
    for (const Edge& e : a.graph.edges ())
      {
        const Node& u = a.graph.node (e.a);
        const Node& v = a.graph.node (e.b);
        CHECK (std::hypot (u.x - v.x, u.y - v.y) <= 40.0);
        CHECK (e.per <= 0.02);
      }

    auto many = generate_scenarios (7, 3);
    CHECK (many.size () == 3);
    CHECK (many[1].seed == 8);
    CHECK (many[2].tree == generate_scenario (9).tree);
  }

  TEST_CASE ("sensitivity sweep")
  {
    StudyConfig cfg;
    auto rows = sensitivity_sweep ("n_c", {3, 4, 5, 6}, cfg);
    REQUIRE (rows.size () == 4);
    CHECK (rows[2].b1 == doctest::Approx (80.75).epsilon (0.02));
    CHECK (rows[2].b == doctest::Approx (std::min (rows[2].b1, rows[2].b2)));

    auto be = sensitivity_sweep ("be_min", {1, 2, 3, 4}, cfg);
    const double reference[] = {164.95, 128.93, 82.85, 35.67};
    for (int k = 0; k < 4; ++k)
      CHECK (be[static_cast<std::size_t> (k)].b_prime == doctest::Approx (reference[k]).epsilon (0.02));

    CHECK_THROWS (sensitivity_sweep ("slot", {1}, cfg));
  }

  TEST_CASE ("perturbation")
  {
    StudyConfig cfg;
    TreeTopology t ({kNoParent, 0, 1, 0, 3, 0}, {1, 2, 3, 4, 5});
    PerturbationResult z = perturbation_study (t, 3.0, 1, cfg, true);
    for (const auto& [id, r] : z.rates)
      CHECK (r == 3.0);

    for (std::uint64_t seed = 1; seed <= 20; ++seed)
      {
        PerturbationResult r = perturbation_study (t, 3.0, seed, cfg);
        CHECK (r.rates.size () == 5);
        CHECK (std::abs (r.mean_rate - 3.0) <= 0.05 + 1e-12);
        int up = 0, down = 0;
        for (const auto& [id, v] : r.rates)
          {
            double d = v - 3.0;
            CHECK (std::abs (d) >= 0.01 - 1e-12);
            CHECK (std::abs (d) <= 0.05 + 1e-12);
            (d > 0 ? up : down)++;
          }
        CHECK (up == 2);
        CHECK (down == 3);
        CHECK (r.converged);
        PerturbationResult again = perturbation_study (t, 3.0, seed, cfg);
        CHECK (again.rates == r.rates);
      }
  }

  TEST_CASE ("report rendering")
  {
    ExperimentReport r;
    r.kind = "demo";
    r.provenance = make_provenance (5, ProtocolParams{}, 0.02, split_qos (0.9, 0.1, 5));
    Table t{"rows", {"name", "value", "count", "flag"}, {}};
    t.add_row ({std::string ("a,b"), 1.5, std::int64_t (3), true});
    t.add_row ({std::string ("say \"hi\""), std::nan (""), std::int64_t (-1), false});
    CHECK_THROWS (t.add_row ({1.0}));
    r.tables.push_back (t);
    r.check ("ok", true);
    CHECK (r.all_hold ());

    std::string csv = to_csv (r);
    CHECK (csv == to_csv (r));
    CHECK (csv.find ("\"a,b\"") != std::string::npos);
    CHECK (csv.find ("\"say \"\"hi\"\"\"") != std::string::npos);
    // constant column count on header and data lines
    std::istringstream in (csv);
    std::string line;
    int lines = 0;
    while (std::getline (in, line))
      {
        if (!line.empty () && line.back () == '\r')
          line.pop_back ();
        if (line.empty ())
          continue;
        ++lines;
        int commas = 0;
        bool quoted = false;
        for (char c : line)
          {
            if (c == '"')
              quoted = !quoted;
            else if (c == ',' && !quoted)
              ++commas;
          }
        CHECK (commas == 4);
      }
    CHECK (lines >= 3);

    auto j = to_json (r);
    CHECK (j.dump () == to_json (r).dump ());
    CHECK (j["kind"] == "demo");
    CHECK (j["provenance"]["seed"] == 5);
    CHECK (j["tables"][0]["rows"][1]["value"].is_null ());

    r.check ("broken", false);
    CHECK_FALSE (r.all_hold ());

    CHECK (format_number (0.1) == "0.1");
    CHECK (format_number (80.797471147780204) == "80.79747115");
    CHECK (csv_escape ("plain") == "plain");
    CHECK (fnv1a_hex ("") == "cbf29ce484222325");
    CHECK (fnv1a_hex ("a") == "af63dc4c8601ec8c");
    CHECK_THROWS (format_from_string ("xml"));
  }

  TEST_CASE ("parameter digest tracks every input")
  {
    ProtocolParams p;
    QosTargets q = split_qos (0.9, 0.1, 5);
    std::string base = param_digest (p, 0.02, q);
    CHECK (base == param_digest (p, 0.02, q));
    CHECK (base != param_digest (p, 0.03, q));
    ProtocolParams p2 = p;
    p2.n_c = 4;
    CHECK (base != param_digest (p2, 0.02, q));
    CHECK (params_from_json (params_to_json (p2)) == p2);
  }

  TEST_CASE ("scenario file round trip")
  {
    Scenario sc = generate_scenario (3);
    ScenarioFile f;
    f.graph = sc.graph;
    f.seed = 3;
    f.tree = sc.tree;
    f.rates = ArrivalRates::uniform (sc.graph.sources (), 2.5);
    auto j = scenario_to_json (f);
    ScenarioFile g = scenario_from_json (nlohmann::json::parse (j.dump ()));
    CHECK (g.graph.size () == f.graph.size ());
    CHECK (g.graph.edges ().size () == f.graph.edges ().size ());
    REQUIRE (g.tree.has_value ());
    CHECK (*g.tree == *f.tree);
    CHECK (g.rates->per_second () == f.rates->per_second ());
    CHECK (*g.seed == 3);
    CHECK (g.params == f.params);
    CHECK (scenario_to_json (g).dump () == j.dump ());

    CHECK_THROWS_AS (scenario_from_json (nlohmann::json::parse ("{\"format\": 2}")), ModelError);
    CHECK_THROWS_AS (scenario_from_json (nlohmann::json::parse ("[]")), ModelError);
  }
}
