#include "clh/projection.hpp"

namespace clh {

ProjectionReduction projection_reduce(const Instance& inst,
                                      const ProjectionWitness& witness) {
  inst.validate();
  ProjectionReduction out;
  out.instance = inst;
  for (Term& t : out.instance.terms) {
    auto it = witness.lambda.find(t.id);
    if (it == witness.lambda.end()) {
      fail(ErrorKind::BadEigenvalue,
           "no eigenvalue provided for term " + std::to_string(t.id), t.id);
    }
    double lambda = it->second;
    double match_tol = inst.tol.eps_rank * std::max(1.0, t.matrix.norm());
    bool matched = false;
    Matrix proj = eigenspace_projector(t.matrix, lambda, match_tol, inst.tol, &matched);
    if (!matched) {
      fail(ErrorKind::BadEigenvalue,
           "lambda matches no eigenvalue of term " + std::to_string(t.id), t.id);
    }
    out.sum_lambda += lambda;
    t.matrix = Matrix::Identity(t.dim(), t.dim()) - proj;
    t.factors.reset();  // projection of a factorized term need not factorize
  }
  out.instance.validate(/*require_projections=*/true);
  return out;
}

}  // namespace clh
