#!/usr/bin/env python3
# The solver against closed-form answers.
#
# Usage:
#   python3 demos/validation_suites.py
#
# Two linear sub-cases have exact solutions: pure heat flow for the oxygen
# (and for the cells with chemotaxis switched off), compared against a
# cosine series, and porous-medium spreading for the cells, compared against
# the Barenblatt profile.  The coupled system has no such solution, so the
# last table checks that the weak-form residuals shrink under refinement.
from chemofluid.harness import barenblatt_validate, default_config, mms_validate, weak_refinement
from chemofluid.model import ModelParams, validate_assumptions

for kin in ("linear", "saturating", "quadratic"):
    print(f"--- kinetics: {kin}")
    print(validate_assumptions(ModelParams(kinetics=kin)).format())

print()
print(mms_validate((16, 32, 64)).format())
print()
# coarse sizes keep this quick; the acceptance suite uses 64, 128, 256
print(barenblatt_validate((32, 64, 128)).format())
print()
print(weak_refinement(default_config(), sizes=(16, 32, 64)).format())
