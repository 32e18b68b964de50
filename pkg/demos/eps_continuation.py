#!/usr/bin/env python3
# Shrinking the regularization parameter.
#
# Usage:
#   python3 demos/eps_continuation.py [out_dir]
#
# The regularized problem is solved for a decreasing list of eps.  If the
# space-time integrals stay bounded and the final fields bunch together as
# eps shrinks, the eps -> 0 limit looks well behaved at this resolution.
# That is a trend, not a proof.
import sys

from chemofluid.harness import default_config, eps_study

out = sys.argv[1] if len(sys.argv) > 1 else None
cfg = default_config(**{"grid.n": (32, 32), "run.t_final": 0.1})
study = eps_study(cfg, [1e-1, 1e-2, 1e-3, 1e-4], out_dir=out)
print(study.format())

for e, rec in zip(study.eps, study.finals):
    print(f"eps={e:g}: mass {rec.mass:.15f}  c_max {rec.c_max:.6f}  energy {rec.combined_energy:.6f}")
