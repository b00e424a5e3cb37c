// Walks the full CBR cycle on the worked two-quadruplet example: retrieval
// over a three-case base, threshold acceptance, label adaptation, review,
// and retain.
#include <cstdio>

#include "orsim/orsim.hpp"

using namespace orsim;

int main() {
  const Taxonomy tax = Taxonomy::default_taxonomy();

  CaseBase cb;
  Case c1;
  c1.id = 1;
  c1.problem = {{"surgeon", "fatigue", 3.2, 700}};
  c1.solution = {AlertState::Normal, "Normal"};
  c1.provenance = Provenance::ExpertReviewed;
  Case c8;
  c8.id = 8;
  c8.problem = {{"bistoury", "fatigue", 0.9, 1200}, {"nurse", "fatigue", 2.1, 1200}};
  c8.solution = {AlertState::Normal, "Normal"};
  c8.provenance = Provenance::ExpertReviewed;
  Case c35;
  c35.id = 35;
  c35.problem = {{"nurse", "fatigue", 2.5, 300}, {"staphy", "infection", 280, 300}};
  c35.solution = {AlertState::Alert, "Pause Pers."};
  c35.provenance = Provenance::ExpertReviewed;
  cb.cases = {c1, c8, c35};
  cb.next_id = 36;

  const Problem target = {{"surgeon", "fatigue", 2.7, 400}, {"staphy", "infection", 270, 400}};
  std::printf("target: (surgeon, fatigue, 2.7, 400) (staphy, infection, 270, 400)\n\n");

  const auto ranked = retrieve(target, cb, tax);
  std::printf("retrieval (case 1 filtered out, single quadruplet):\n");
  for (const auto& r : ranked) {
    std::printf("  case %lld  distance %.4f  %s\n", static_cast<long long>(r.id), r.distance,
                r.distance <= cb.acceptance_threshold ? "within threshold" : "too far");
  }

  const ReuseOutcome outcome = reuse(target, ranked, cb, tax);
  std::printf("\nreuse: source case %lld at %.4f\n", static_cast<long long>(outcome.source_id),
              outcome.distance);
  for (const auto& s : outcome.path) {
    std::printf("  adaptation %s -> %s (shared class: %s)\n", s.from.c_str(), s.to.c_str(),
                s.lca.c_str());
  }
  std::printf("  solution %s / %s\n", to_code(outcome.solution.state).c_str(),
              outcome.solution.recommendation.c_str());

  Case adapted;
  adapted.problem = target;
  adapted.solution = outcome.solution;
  adapted.provenance = Provenance::Adapted;
  adapted.adaptation = outcome.path;
  adapted.retrieved_from = outcome.source_id;
  adapted.retrieval_distance = outcome.distance;
  PendingCase pending{adapted, false};

  const auto reviewed = review(pending, {Verdict::Kind::Accept, {}});
  const std::int64_t id = retain(*reviewed, cb);
  std::printf("\nretained as case %lld (%s), base now holds %zu cases\n",
              static_cast<long long>(id), to_string(reviewed->provenance).c_str(),
              cb.cases.size());
  return 0;
}
