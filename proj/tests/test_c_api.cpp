// Exercises the extern-C surface the way an out-of-tree consumer would:
// opaque handles in, status codes out, strings freed through the API.

#include <doctest.h>

#include <cmath>
#include <string>

#include "blindspot.h"

namespace {

const std::string kFixtures = BLINDSPOT_FIXTURES_DIR;

struct Loaded {
  bs_distribution* rho = nullptr;
  bs_kernel* policy = nullptr;
  bs_corpus* corpus = nullptr;
  bs_loss* loss = nullptr;
  bs_joint* p = nullptr;
  bs_joint* q = nullptr;

  ~Loaded() {
    bs_joint_free(q);
    bs_joint_free(p);
    bs_loss_free(loss);
    bs_corpus_free(corpus);
    bs_kernel_free(policy);
    bs_distribution_free(rho);
  }
};

void load_reference(Loaded& l) {
  REQUIRE(bs_distribution_load((kFixtures + "/reference/rho.jsonl").c_str(), &l.rho) == BS_OK);
  REQUIRE(bs_kernel_load((kFixtures + "/reference/policy.jsonl").c_str(), &l.policy) == BS_OK);
  REQUIRE(bs_corpus_load((kFixtures + "/reference/corpus.jsonl").c_str(), &l.corpus) == BS_OK);
  REQUIRE(bs_loss_load((kFixtures + "/reference/loss.jsonl").c_str(), &l.loss) == BS_OK);
  REQUIRE(bs_joint_make(l.rho, l.policy, BS_ON_POLICY, &l.p) == BS_OK);
  REQUIRE(bs_corpus_to_offpolicy(l.corpus, l.rho, BS_CHOSEN_ONLY, &l.q) == BS_OK);
}

}  // namespace

TEST_CASE("c api: happy path over the reference fixture") {
  Loaded l;
  load_reference(l);

  double tv = 0.0;
  REQUIRE(bs_tv_joint(l.p, l.q, &tv) == BS_OK);
  CHECK(std::abs(tv - 0.4) <= 1e-12);

  double r_gen = 0.0;
  REQUIRE(bs_risk(l.p, l.loss, &r_gen) == BS_OK);
  CHECK(std::abs(r_gen - 0.15) <= 1e-12);

  int passed = 0;
  char* diag = nullptr;
  REQUIRE(bs_check_equal_marginal(l.p, l.q, 0.0, &passed, &diag) == BS_OK);
  CHECK(passed == 1);
  bs_string_free(diag);

  char* report = nullptr;
  REQUIRE(bs_audit_exact(l.p, l.q, l.loss, "chosen_only", BS_FORMAT_STRUCTURED, &report) == BS_OK);
  const std::string text(report);
  bs_string_free(report);
  CHECK(text.find("\"gap\": 0.4") != std::string::npos);
  CHECK(text.find("\"bound\": 0.8") != std::string::npos);
  CHECK(text.find("\"q_mode\": \"chosen_only\"") != std::string::npos);
}

TEST_CASE("c api: sampled audit and sampling are deterministic") {
  Loaded l;
  load_reference(l);

  char* a = nullptr;
  char* b = nullptr;
  REQUIRE(bs_audit_sampled(l.p, l.q, l.loss, 2000, 7, 0.99, "chosen_only", BS_FORMAT_STRUCTURED,
                           &a) == BS_OK);
  REQUIRE(bs_audit_sampled(l.p, l.q, l.loss, 2000, 7, 0.99, "chosen_only", BS_FORMAT_STRUCTURED,
                           &b) == BS_OK);
  CHECK(std::string(a) == std::string(b));
  bs_string_free(a);
  bs_string_free(b);

  char* s1 = nullptr;
  char* s2 = nullptr;
  REQUIRE(bs_sample(l.p, 100, 42, &s1) == BS_OK);
  REQUIRE(bs_sample(l.p, 100, 42, &s2) == BS_OK);
  CHECK(std::string(s1) == std::string(s2));
  CHECK(std::string(s1).find("\"regime\":\"on_policy\"") != std::string::npos);
  bs_string_free(s1);
  bs_string_free(s2);
}

TEST_CASE("c api: demo and classify render reports") {
  char* demo = nullptr;
  REQUIRE(bs_demo(7, 1.0, BS_FORMAT_TEXT, &demo) == BS_OK);
  CHECK(std::string(demo).find("headline") != std::string::npos);
  bs_string_free(demo);

  bs_corpus* corpus = nullptr;
  REQUIRE(bs_corpus_load((kFixtures + "/discretion/pairs50.jsonl").c_str(), &corpus) == BS_OK);
  char* report = nullptr;
  REQUIRE(bs_classify(corpus, nullptr, 0, BS_FORMAT_STRUCTURED, &report) == BS_OK);
  const std::string text(report);
  bs_string_free(report);
  CHECK(text.find("\"consensus\": 24") != std::string::npos);
  CHECK(text.find("\"conflict\": 14") != std::string::npos);
  CHECK(text.find("\"indifference\": 12") != std::string::npos);

  const char* judges[] = {"nope"};
  char* bad = nullptr;
  CHECK(bs_classify(corpus, judges, 1, BS_FORMAT_TEXT, &bad) == BS_ERR_VALIDATION);
  CHECK(std::string(bs_last_error()).find("available judges") != std::string::npos);
  bs_corpus_free(corpus);
}

TEST_CASE("c api: failures set status and last_error") {
  bs_distribution* d = nullptr;
  CHECK(bs_distribution_load("/no/such/file.jsonl", &d) == BS_ERR_IO);
  CHECK(std::string(bs_last_error()).find("/no/such/file.jsonl") != std::string::npos);
  CHECK(d == nullptr);

  const char* labels[] = {"a", "b"};
  const double bad_weights[] = {0.6, 0.6};
  CHECK(bs_distribution_make(labels, bad_weights, 2, 0, &d) == BS_ERR_VALIDATION);
  CHECK(bs_distribution_make(labels, bad_weights, 2, 1, &d) == BS_OK);
  bs_distribution_free(d);

  CHECK(bs_tv_joint(nullptr, nullptr, nullptr) == BS_ERR_VALIDATION);

  char* report = nullptr;
  CHECK(bs_demo(0, 2.5, BS_FORMAT_TEXT, &report) == BS_ERR_VALIDATION);
}
