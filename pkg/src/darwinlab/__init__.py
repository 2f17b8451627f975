"""darwinlab: a numerical laboratory for decoherence, information
redundancy, and envariance-based consistency checks.

Layers, bottom up:

  numeric      shared tolerances and caps
  qstate       dense states, partial traces, Schmidt decomposition
  info         entropies, mutual information, discord, Holevo quantity
  branching    Gram-kernel fast path for branching states
  spinmodels   c-not chain, central-spin bath, hazy bath, interacting bath
  qbm          Gaussian quantum Brownian motion
  photon       scattered-radiation model, analytic rates and plots
  envariance   swap/counterswap, finegraining, record algebra, frequencies
  darwin       partial-information plots, redundancy extraction, sweeps
  cli          reproducible experiment runner
"""

__version__ = "0.1.0"
