"""Centralized numerical tolerances.

Every bound used by invariant checks and cross-track comparisons lives here so
that tests and library code cannot drift apart.
"""

# Absolute bound on covariance asymmetry.
SYMMETRY_ATOL = 1e-12

# Slack on the uncertainty bound: symplectic eigenvalues must be >= 1/4 minus this.
PHYSICALITY_ATOL = 1e-9

# Absolute agreement required between Gaussian and brute-force photon moments.
MOMENT_AGREEMENT_ATOL = 1e-6

# Relative agreement required for full-pipeline cross checks.
PIPELINE_AGREEMENT_RTOL = 1e-4

# Mean photon number conservation under passive unitaries.
PHOTON_CONSERVATION_ATOL = 1e-10

# Composing two loss channels must equal the product channel to this accuracy.
LOSS_COMPOSITION_ATOL = 1e-12

# Probability allowed past a Fock cutoff before a result is rejected.
TAIL_MASS_GATE = 1e-10
