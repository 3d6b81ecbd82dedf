#include "wsnqos/bounds.hpp"
#include "wsnqos/detailed.hpp"
#include "wsnqos/simplified.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace wsnqos;

TEST_SUITE ("fp-detailed")
{
  TEST_CASE ("vanishing load")
  {
    ProtocolParams p;
    TreeTopology t = test::chain_and_leaf ();
    DetailedSolution s = solve_detailed (t, ArrivalRates::uniform (t.sources (), 1e-9), p, 0.02);
    REQUIRE (s.converged);
    CHECK_FALSE (s.saturated);
    for (NodeId v : t.members ())
      {
        const auto& n = s.at (v);
        CHECK (n.delta == doctest::Approx (std::pow (0.02, 4)).epsilon (1e-6));
        CHECK (n.beta == doctest::Approx (1.0 / 78).epsilon (1e-8));
        CHECK (n.alpha == doctest::Approx (0.0).epsilon (1e-8));
        CHECK (n.p == doctest::Approx (0.0).epsilon (1e-8));
      }
  }

  TEST_CASE ("relations hold at convergence")
  {
    ProtocolParams p;
    const double t = tx_duration (p);
    Rng rng (21);
    for (int trial = 0; trial < 20; ++trial)
      {
        TreeTopology tree = test::random_tree (rng, 10);
        ArrivalRates rates = ArrivalRates::uniform (tree.sources (), 2.0 + rng.uniform (0, 3));
        DetailedSolution s = solve_detailed (tree, rates, p, 0.02);
        REQUIRE (s.converged);
        double total = 0;
        for (NodeId v : tree.members ())
          total += s.at (v).tau_perceived;
        for (NodeId v : tree.members ())
          {
            const auto& n = s.at (v);
            CHECK (n.beta == doctest::Approx (beta_from_alpha (p, n.alpha)).epsilon (1e-7));
            CHECK (n.tau_minus == doctest::Approx (total - n.tau_perceived).epsilon (1e-12));
            CHECK (n.eta == doctest::Approx (n.beta / (n.beta + n.tau_minus)));
            CHECK (n.gamma == doctest::Approx (n.p + (1 - n.p) * 0.02));
            CHECK (n.delta == doctest::Approx (discard_probability (n.alpha, n.gamma, p)));
            double busy = (1 - n.eta) * (1 - n.c) * n.beta * t;
            CHECK (n.alpha
                   == doctest::Approx (busy / (n.eta + (1 - n.eta) * n.c + busy)).epsilon (1e-6));
            CHECK (n.tau_perceived
                   == doctest::Approx (n.beta * n.b * n.q / (1 - n.q + n.q * n.b)).epsilon (1e-6));
            CHECK (n.q == doctest::Approx (std::min (1.0, n.nu * n.sigma_inv)));
            // flow conservation
            double in = rates.per_symbol (v, p);
            for (NodeId ch : tree.children (v))
              in += s.at (ch).theta;
            CHECK (n.nu == doctest::Approx (in));
            CHECK (n.theta == doctest::Approx (n.nu * (1 - n.delta)));
          }
      }
  }

  TEST_CASE ("collision probability")
  {
    ProtocolParams p;
    CHECK (collision_probability (0.0, 0.0, 0.1, p) == 0.0);
    CHECK (collision_probability (1.0, 0.3, 0.0, p) == 0.0);
    CHECK (collision_probability (0.0, 0.3, 0.5, p) == doctest::Approx (1.0));
    double eta = 0.7, c = 0.1, tm = 0.01;
    double r3 = eta * (1 - std::exp (-12 * tm));
    double r4 = (1 - eta) * c;
    CHECK (collision_probability (eta, c, tm, p) == doctest::Approx ((r3 + r4) / (eta + (1 - eta) * c)));
  }

  TEST_CASE ("service moments match the transform")
  {
    ProtocolParams p;
    for (auto [beta, alpha, gamma] : {std::tuple{1.0 / 78, 0.0, 0.0}, std::tuple{0.01, 0.2, 0.05},
                                      std::tuple{1.0 / 238, 0.6, 0.3}})
      {
        ServiceMoments m = service_moments (beta, alpha, gamma, p);
        const double h = 1e-6;
        double f0 = service_mgf (0.0, beta, alpha, gamma, p);
        double fp = service_mgf (h, beta, alpha, gamma, p);
        double fm = service_mgf (-h, beta, alpha, gamma, p);
        CHECK (f0 == doctest::Approx (1.0));
        CHECK (m.es == doctest::Approx ((fp - fm) / (2 * h)).epsilon (1e-6));
        CHECK (m.es2 == doctest::Approx ((fp - 2 * f0 + fm) / (h * h)).epsilon (1e-3));
        CHECK (m.cs2 == doctest::Approx (m.es2 / (m.es * m.es) - 1));
      }
    CHECK (service_moments (1.0 / 78, 0.0, 0.0, p).es == doctest::Approx (340.0));
    CHECK_THROWS_AS (service_moments (0.0, 0.0, 0.0, p), ModelError);
    CHECK_THROWS_AS (service_moments (0.01, 1.0, 0.0, p), ModelError);
  }

  TEST_CASE ("delay chain reduces to the service time at vanishing load")
  {
    ProtocolParams p;
    TreeTopology t = test::chain_and_leaf ();
    ArrivalRates r = ArrivalRates::uniform (t.sources (), 1e-9);
    DetailedSolution s = solve_detailed (t, r, p, 0.02);
    QnaResult q = qna_delay (t, s, r, p);
    for (NodeId v : t.members ())
      {
        const auto& n = q.nodes[static_cast<std::size_t> (v)];
        CHECK (n.sojourn == doctest::Approx (n.es).epsilon (1e-6));
        CHECK (n.es == doctest::Approx (340.0 / (1 - 0.02)).epsilon (1e-6));
      }
    CHECK (q.end_to_end_delay.at (1) == doctest::Approx (q.nodes[1].sojourn + q.nodes[2].sojourn));
  }

  TEST_CASE ("arrival variability propagates from children")
  {
    ProtocolParams p;
    TreeTopology t = test::chain_and_leaf ();
    ArrivalRates r = ArrivalRates::uniform (t.sources (), 4.0);
    DetailedSolution s = solve_detailed (t, r, p, 0.02);
    QnaResult q = qna_delay (t, s, r, p);
    // leaf sources are Poisson
    CHECK (q.nodes[1].ca2 == 1.0);
    CHECK (q.nodes[3].ca2 == 1.0);
    const auto& n2 = q.nodes[2];
    double expect = (r.per_symbol (2, p) + q.nodes[1].total_in * q.nodes[1].cd2) / n2.total_in;
    CHECK (n2.ca2 == doctest::Approx (expect));
    CHECK (n2.total_in == doctest::Approx (s.at (2).nu));
  }

  TEST_CASE ("end to end aggregation")
  {
    TreeTopology t = test::chain_and_leaf ();
    std::vector<double> delta{0, 0.1, 0.2, 0.3};
    std::vector<double> soj{0, 10, 20, 30};
    auto e = end_to_end (t, delta, soj);
    CHECK (e.at (1).delivery == doctest::Approx (0.9 * 0.8));
    CHECK (e.at (1).delay == 30.0);
    CHECK (e.at (3).delivery == doctest::Approx (0.7));

    TreeTopology chain ({kNoParent, 0, 1, 2, 3, 4}, {1, 2, 3, 4, 5});
    std::vector<double> d (6, 0.0208);
    d[0] = 0;
    CHECK (end_to_end (chain, d, std::vector<double> (6, 0.0)).at (5).delivery
           == doctest::Approx (std::pow (1 - 0.0208, 5)));
    CHECK (std::pow (1 - 0.0208, 5) == doctest::Approx (0.9001).epsilon (1e-3));
  }

  TEST_CASE ("overloaded queue is reported")
  {
    ProtocolParams p;
    TreeTopology t = test::chain_and_leaf ();
    ArrivalRates r = ArrivalRates::uniform (t.sources (), 400.0);
    DetailedSolution s = solve_detailed (t, r, p, 0.02);
    CHECK (s.saturated);
    CHECK_THROWS_AS (qna_delay (t, s, r, p), UnstableQueue);
  }

  TEST_CASE ("attempt and discard rise with load")
  {
    ProtocolParams p;
    TreeTopology t = test::chain_and_leaf ();
    double prev_tau = 0, prev_delta = 0;
    for (double rate = 1.0; rate <= 30.0; rate += 1.0)
      {
        DetailedSolution s = solve_detailed (t, ArrivalRates::uniform (t.sources (), rate), p, 0.02);
        REQUIRE (s.converged);
        const auto& n = s.at (2);
        CHECK (n.tau_minus >= prev_tau);
        CHECK (n.delta >= prev_delta);
        prev_tau = n.tau_minus;
        prev_delta = n.delta;
      }
  }

  TEST_CASE ("layers agree in the low-discard regime")
  {
    ProtocolParams p;
    TreeTopology t = test::chain_and_leaf ();
    ArrivalRates r = ArrivalRates::uniform (t.sources (), 3.0);
    DetailedSolution d = solve_detailed (t, r, p, 0.02);
    SimplifiedSolution s = solve_vector (t, r, p, 0.02);
    for (NodeId v : t.members ())
      {
        auto i = static_cast<std::size_t> (v);
        CHECK (s.tau_minus[i] == doctest::Approx (d.at (v).tau_minus).epsilon (0.15));
        CHECK (s.delta[i] == doctest::Approx (d.at (v).delta).epsilon (0.05));
      }
  }

  TEST_CASE ("bad inputs")
  {
    ProtocolParams p;
    TreeTopology t = test::chain_and_leaf ();
    ArrivalRates r = ArrivalRates::uniform (t.sources (), 1.0);
    CHECK_THROWS_AS (solve_detailed (t, r, p, 1.0), ModelError);
    DetailedOptions o;
    o.damping = 0;
    CHECK_THROWS_AS (solve_detailed (t, r, p, 0.02, o), ModelError);
  }
}
